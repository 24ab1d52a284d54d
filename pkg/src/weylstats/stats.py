"""Inversions, descents, Hajek projections and 1-dependent decompositions.

Combinatorial statistics of an element pi (one-line notation):

    inv_plus  = #{i < j : pi(i) > pi(j)}
    inv_minus = #{i < j : -pi(i) > pi(j)}      (negative sum pairs)
    inv_circ  = #{i : pi(i) < 0}
    inv       = inv_plus (S) | inv_plus + inv_minus + inv_circ (B)
                | inv_plus + inv_minus (D)
    des       = #{1 <= i <= n-1 : pi(i) > pi(i+1)}, plus 1{0 > pi(1)} on B
                (virtual pi(0) := 0) and 1{-pi(2) > pi(1)} on D.

Latent statistics replace the element by a vector z of independent GR(p)
variables; the signed ranking is an order isomorphism, so pi(i) > pi(j)
becomes z_i > z_j and -pi(i) > pi(j) becomes z_i + z_j < 0.  For family D
the latent vector is used raw (no sign fix): the resulting statistic law is
the one all closed-form moments and limit experiments describe, and it
agrees with the constrained-element law exactly when the bias is 0 or 1/2.

Hajek projection of inv with respect to the latent coordinates:

    hajek_inv(z) = sum_k E(inv | Z_k = z_k) - (n-1) E(inv).

The conditional expectation splits by the slot the conditioned coordinate
occupies in a pair.  With q = 1-p and u = |z| the per-pair means are

    first slot  (pairs (k, j), j > k):  (q - p) u + 2p      [z itself for S]
    second slot (pairs (i, k), i < k):  1 - z

so that, writing G(z) = 1 - z and H(z) = (q-p)|z| + 2p,

    E(inv | Z_k = z) = (k-1) G(z) + (n-k) H(z) + C(n-1,2) (p + 1/2)

for family D, plus 1{z < 0} + (n-1) p on family B; the family S case is the
p = 0 specialization (k-1)(1-z) + (n-k) z + C(n-1,2)/2.  These are the true
conditional expectations (verified against brute-force conditional
integration in the tests), which is what makes the projection identity
Cov(inv, hajek_inv) = Var(hajek_inv) hold exactly.

The 1-dependent decomposition emits n two-component terms summing exactly to
(hajek_inv(z), des(z)): term k < n carries (E(inv | Z_k), 1{z_k > z_{k+1}}),
with the family boundary indicator (1{z_1 < 0} on B, 1{z_1 + z_2 < 0} on D)
added to term 1's des component, and term n carries the centering constant
(E(inv | Z_n) - (n-1) E(inv), 0).  Term k is a function of (z_k, z_{k+1})
only, so the sequence is 1-dependent.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import moments
from ._kernels import pair_counts
from .core import (
    GroupFamily,
    GroupSpec,
    JointStat,
    ProductGroupSpec,
    SignedPermutation,
    validate_for_family,
)


# ---------------------------------------------------------------------------
# element statistics
# ---------------------------------------------------------------------------

def count_inversions(pi: SignedPermutation, family: GroupFamily) -> JointStat:
    """Inversion counters of an element (the des field is left at 0)."""
    family = GroupFamily(family)
    validate_for_family(pi, family)
    e = pi.entries
    n = len(e)
    inv_plus = sum(1 for i in range(n) for j in range(i + 1, n) if e[i] > e[j])
    if family is GroupFamily.S:
        return JointStat(inv=inv_plus, des=0, inv_plus=inv_plus)
    inv_minus = sum(1 for i in range(n) for j in range(i + 1, n) if -e[i] > e[j])
    inv_circ = sum(1 for v in e if v < 0)
    inv = inv_plus + inv_minus + (inv_circ if family is GroupFamily.B else 0)
    return JointStat(inv=inv, des=0, inv_plus=inv_plus, inv_minus=inv_minus, inv_circ=inv_circ)


def count_descents(pi: SignedPermutation, family: GroupFamily) -> int:
    family = GroupFamily(family)
    validate_for_family(pi, family)
    e = pi.entries
    n = len(e)
    if family is GroupFamily.D and n < 2:
        raise ValueError("descents on family D need rank >= 2")
    des = sum(1 for i in range(n - 1) if e[i] > e[i + 1])
    if family is GroupFamily.B:
        des += 1 if 0 > e[0] else 0
    elif family is GroupFamily.D:
        des += 1 if -e[1] > e[0] else 0
    return des


def element_statistics(pi: SignedPermutation, family: GroupFamily) -> JointStat:
    """Full joint statistic of an element."""
    counts = count_inversions(pi, family)
    return JointStat(
        inv=counts.inv,
        des=count_descents(pi, family),
        inv_plus=counts.inv_plus,
        inv_minus=counts.inv_minus,
        inv_circ=counts.inv_circ,
    )


def d_formula_statistics(pi: SignedPermutation) -> JointStat:
    """Family-D statistic formulas evaluated on any signed permutation.

    Used by the oracle to aggregate the latent-law distribution over the full
    sign space; membership in D_n is deliberately not required.
    """
    e = pi.entries
    n = len(e)
    if n < 2:
        raise ValueError("family D statistics need rank >= 2")
    inv_plus = sum(1 for i in range(n) for j in range(i + 1, n) if e[i] > e[j])
    inv_minus = sum(1 for i in range(n) for j in range(i + 1, n) if -e[i] > e[j])
    inv_circ = sum(1 for v in e if v < 0)
    des = (1 if -e[1] > e[0] else 0) + sum(1 for i in range(n - 1) if e[i] > e[i + 1])
    return JointStat(inv=inv_plus + inv_minus, des=des,
                     inv_plus=inv_plus, inv_minus=inv_minus, inv_circ=inv_circ)


# ---------------------------------------------------------------------------
# latent statistics
# ---------------------------------------------------------------------------

def _as_vector(z: Sequence[float], n: int) -> np.ndarray:
    zv = np.asarray(z, dtype=float)
    if zv.shape != (n,):
        raise ValueError(f"latent sample must have length {n}, got shape {zv.shape}")
    return zv


def latent_statistics(z: Sequence[float], spec: GroupSpec) -> JointStat:
    """Indicator sums over the latent vector.

    Matches element_statistics(rank_permutation(z)) for families S and B; for
    family D it evaluates the raw vector (apply fix_last_sign first to match
    a constrained element pointwise).
    """
    zv = _as_vector(z, spec.rank)
    n = spec.rank
    family = spec.family
    if family is GroupFamily.D and n < 2:
        raise ValueError("descents on family D need rank >= 2")
    iu, ju = np.triu_indices(n, k=1)
    inv_plus = int(np.sum(zv[iu] > zv[ju]))
    adj = int(np.sum(zv[:-1] > zv[1:]))
    if family is GroupFamily.S:
        return JointStat(inv=inv_plus, des=adj, inv_plus=inv_plus)
    inv_minus = int(np.sum(zv[iu] + zv[ju] < 0))
    inv_circ = int(np.sum(zv < 0))
    if family is GroupFamily.B:
        return JointStat(
            inv=inv_plus + inv_minus + inv_circ,
            des=adj + (1 if zv[0] < 0 else 0),
            inv_plus=inv_plus, inv_minus=inv_minus, inv_circ=inv_circ,
        )
    return JointStat(
        inv=inv_plus + inv_minus,
        des=adj + (1 if zv[0] + zv[1] < 0 else 0),
        inv_plus=inv_plus, inv_minus=inv_minus, inv_circ=inv_circ,
    )


def joint_batch(Z: np.ndarray, spec: GroupSpec) -> tuple[np.ndarray, np.ndarray]:
    """(inv, des) int64 arrays for a batch of latent rows."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2 or Z.shape[1] != spec.rank:
        raise ValueError(f"expected a batch of shape (m, {spec.rank})")
    family = spec.family
    if family is GroupFamily.D and spec.rank < 2:
        raise ValueError("descents on family D need rank >= 2")
    inv_plus, inv_minus = pair_counts(Z)
    adj = (Z[:, :-1] > Z[:, 1:]).sum(axis=1).astype(np.int64)
    if family is GroupFamily.S:
        return inv_plus, adj
    if family is GroupFamily.B:
        neg = (Z < 0).sum(axis=1).astype(np.int64)
        return inv_plus + inv_minus + neg, adj + (Z[:, 0] < 0)
    return inv_plus + inv_minus, adj + (Z[:, 0] + Z[:, 1] < 0)


# ---------------------------------------------------------------------------
# conditional expectations and the Hajek projection
# ---------------------------------------------------------------------------

def conditional_inv_coeffs(spec: GroupSpec, k: int) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """Exact piecewise-linear coefficients of z -> E(inv | Z_k = z).

    Returns ((a_neg, b_neg), (a_pos, b_pos)) with the value a + b*z on
    [-1, 0] and [0, 1] respectively; 1-indexed k.
    """
    n, p = spec.rank, spec.bias
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}")
    q = 1 - p
    const = Fraction((n - 1) * (n - 2), 2) * (p + Fraction(1, 2))
    # (k-1) second-slot terms (1 - z) and (n-k) first-slot terms ((q-p)|z| + 2p)
    a = Fraction(k - 1) + (n - k) * 2 * p + const
    b_pos = -Fraction(k - 1) + (n - k) * (q - p)
    b_neg = -Fraction(k - 1) - (n - k) * (q - p)
    a_neg, a_pos = a, a
    if spec.family is GroupFamily.B:
        a_neg += 1  # the coordinate's own negative-entry indicator
        a_neg += (n - 1) * p
        a_pos += (n - 1) * p
    return (a_neg, b_neg), (a_pos, b_pos)


def conditional_inv_mean(spec: GroupSpec, k: int, z: float) -> float:
    """E(inv | Z_k = z) as a float (1-indexed k)."""
    (a_neg, b_neg), (a_pos, b_pos) = conditional_inv_coeffs(spec, k)
    if z < 0:
        return float(a_neg) + float(b_neg) * z
    return float(a_pos) + float(b_pos) * z


def _conditional_terms(zv: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """Vector of E(inv | Z_k = z_k) over k = 1..n."""
    n, p = spec.rank, spec.bias_float
    q = 1.0 - p
    kk = np.arange(1, n + 1, dtype=float)
    const = (n - 1) * (n - 2) / 2.0 * (p + 0.5)
    terms = (kk - 1.0) * (1.0 - zv) + (n - kk) * ((q - p) * np.abs(zv) + 2.0 * p) + const
    if spec.family is GroupFamily.B:
        terms = terms + (zv < 0) + (n - 1) * p
    return terms


def hajek_inv(z: Sequence[float], spec: GroupSpec) -> float:
    """Hajek projection of inv: sum_k E(inv | Z_k) - (n-1) E(inv)."""
    zv = _as_vector(z, spec.rank)
    total = float(np.sum(_conditional_terms(zv, spec)))
    return total - (spec.rank - 1) * float(moments.mean_inv(spec))


def hajek_inv_batch(Z: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """Hajek projections for a batch of latent rows."""
    Z = np.asarray(Z, dtype=float)
    n, p = spec.rank, spec.bias_float
    q = 1.0 - p
    kk = np.arange(1, n + 1, dtype=float)
    const_total = n * (n - 1) * (n - 2) / 2.0 * (p + 0.5)
    totals = (
        ((kk - 1.0) * (1.0 - Z)).sum(axis=1)
        + ((n - kk) * ((q - p) * np.abs(Z) + 2.0 * p)).sum(axis=1)
        + const_total
    )
    if spec.family is GroupFamily.B:
        totals = totals + (Z < 0).sum(axis=1) + n * (n - 1) * p
    return totals - (n - 1) * float(moments.mean_inv(spec))


def hajek_des(z: Sequence[float], spec: GroupSpec) -> float:
    """Hajek projection of des on family S: z_1 - z_n + (n-1)/2.

    The interior conditional expectations are constant (the two adjacent-pair
    contributions of each coordinate cancel), leaving only the boundary
    coordinates; the constant (n-1)/2 restores the mean E(des).
    """
    if spec.family is not GroupFamily.S:
        raise ValueError("hajek_des is only available for family S")
    if spec.rank < 2:
        raise ValueError("hajek_des needs rank >= 2")
    zv = _as_vector(z, spec.rank)
    return float(zv[0] - zv[-1] + (spec.rank - 1) / 2.0)


# ---------------------------------------------------------------------------
# 1-dependent decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionTerm:
    """Term k of the 1-dependent decomposition: a (inv, des) component pair."""

    index: int
    inv_part: float
    des_part: int


def m_dependent_decomposition(z: Sequence[float], spec: GroupSpec) -> list[DecompositionTerm]:
    """Terms summing exactly to (hajek_inv(z), des(z)); see module docstring."""
    if spec.rank < 2:
        raise ValueError("the decomposition needs rank >= 2")
    zv = _as_vector(z, spec.rank)
    n = spec.rank
    cond = _conditional_terms(zv, spec)
    terms = []
    for k in range(1, n):
        des_part = 1 if zv[k - 1] > zv[k] else 0
        if k == 1:
            if spec.family is GroupFamily.B and zv[0] < 0:
                des_part += 1
            elif spec.family is GroupFamily.D and zv[0] + zv[1] < 0:
                des_part += 1
        terms.append(DecompositionTerm(k, float(cond[k - 1]), des_part))
    centering = (n - 1) * float(moments.mean_inv(spec))
    terms.append(DecompositionTerm(n, float(cond[n - 1]) - centering, 0))
    return terms


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------

def product_statistics(elements: Sequence[SignedPermutation], spec: ProductGroupSpec) -> JointStat:
    """Componentwise sums of inv and des over a product element."""
    if len(elements) != len(spec.components):
        raise ValueError("element count does not match the component count")
    inv = des = inv_plus = inv_minus = inv_circ = 0
    for pi, comp in zip(elements, spec.components):
        if pi.n != comp.rank:
            raise ValueError(f"component rank mismatch: {pi.entries} vs {comp.label()}")
        st = element_statistics(pi, comp.family)
        inv += st.inv
        des += st.des
        inv_plus += st.inv_plus
        inv_minus += st.inv_minus
        inv_circ += st.inv_circ
    return JointStat(inv=inv, des=des, inv_plus=inv_plus, inv_minus=inv_minus, inv_circ=inv_circ)
