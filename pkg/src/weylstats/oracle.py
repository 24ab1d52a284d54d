"""Exhaustive enumeration oracle with exact rational arithmetic.

Ground truth for every closed form in :mod:`weylstats.moments`: small groups
are enumerated exactly, the joint (inv, des) probability mass function is
aggregated as Fractions, and moments are derived from it with no floating
point anywhere.

Two laws per family live here, and for S and B they coincide elementwise:

* ``enumerate_elements`` yields the group elements with their point masses
  (for D: uniform unsigned permutation, p-biased signs at positions 1..n-1,
  last sign forced positive-product, mass p^a q^(n-1-a)/n!).
* ``exact_joint_pmf`` / ``exact_moments`` describe the law of the statistic
  pair that the closed forms and the limit experiments refer to, which is
  induced by independent GR(p) latent coordinates.  For family D that law
  averages the D statistic formulas over the *full* sign space; it agrees
  with the constrained-element law exactly when the bias is 0 or 1/2 (both
  agreements and the divergence elsewhere are pinned by tests).

Hajek-related second moments are not functions of the discrete element, so
they are computed here by exact piecewise-polynomial integration against the
GR(p) density (p on (-1,0), q on (0,1)): every needed integrand is a product
of two piecewise-linear functions of a single coordinate, hence a piecewise
quadratic with rational coefficients that integrates in closed form.  These
oracle values are exact rationals, independent of the collected polynomial
algebra used by the moments module.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product as iproduct
from math import factorial
from typing import Iterator, Optional, Union

from . import moments as moments_mod
from .core import (
    GroupFamily,
    GroupSpec,
    JointStat,
    ProductGroupSpec,
    SignedPermutation,
    des_max,
    inv_max,
)
from .stats import d_formula_statistics, element_statistics

#: largest rank enumerated per family (S_8 has 40320 elements, B_5 3840, D_5 1920)
DEFAULT_BUDGETS = {GroupFamily.S: 8, GroupFamily.B: 5, GroupFamily.D: 5}

AnySpec = Union[GroupSpec, ProductGroupSpec]


class BudgetExceededError(RuntimeError):
    """Raised when an enumeration would exceed the configured rank budget."""


def _check_budget(spec: GroupSpec, budgets: Optional[dict] = None) -> None:
    budgets = DEFAULT_BUDGETS if budgets is None else budgets
    cap = budgets[spec.family]
    if spec.rank > cap:
        raise BudgetExceededError(
            f"{spec.label()} exceeds the enumeration budget (family cap {cap})"
        )


def element_count(spec: GroupSpec) -> int:
    n = spec.rank
    if spec.family is GroupFamily.S:
        return factorial(n)
    if spec.family is GroupFamily.B:
        return factorial(n) * 2 ** n
    return factorial(n) * 2 ** (n - 1)


def enumerate_elements(
    spec: GroupSpec, budgets: Optional[dict] = None
) -> Iterator[tuple[SignedPermutation, Fraction]]:
    """Every group element exactly once with its point mass (masses sum to 1)."""
    _check_budget(spec, budgets)
    n, p = spec.rank, spec.bias
    q = 1 - p
    inv_nfact = Fraction(1, factorial(n))
    if spec.family is GroupFamily.S:
        for perm in permutations(range(1, n + 1)):
            yield SignedPermutation(perm), inv_nfact
        return
    if spec.family is GroupFamily.B:
        for perm in permutations(range(1, n + 1)):
            for signs in iproduct((1, -1), repeat=n):
                a = sum(1 for s in signs if s < 0)
                entries = tuple(s * v for s, v in zip(signs, perm))
                yield SignedPermutation(entries), p ** a * q ** (n - a) * inv_nfact
        return
    for perm in permutations(range(1, n + 1)):
        for signs in iproduct((1, -1), repeat=n - 1):
            parity = 1
            for s in signs:
                parity *= s
            full = signs + (parity,)
            a = sum(1 for s in signs if s < 0)
            entries = tuple(s * v for s, v in zip(full, perm))
            yield SignedPermutation(entries), p ** a * q ** (n - 1 - a) * inv_nfact


def statistic_items(
    spec: GroupSpec, budgets: Optional[dict] = None
) -> Iterator[tuple[JointStat, Fraction]]:
    """(statistic, mass) pairs under the latent-law distribution."""
    if spec.family is not GroupFamily.D:
        for pi, w in enumerate_elements(spec, budgets):
            yield element_statistics(pi, spec.family), w
        return
    # family D: average the statistic formulas over the full sign space
    _check_budget(spec, budgets)
    n, p = spec.rank, spec.bias
    q = 1 - p
    inv_nfact = Fraction(1, factorial(n))
    for perm in permutations(range(1, n + 1)):
        for signs in iproduct((1, -1), repeat=n):
            a = sum(1 for s in signs if s < 0)
            entries = tuple(s * v for s, v in zip(signs, perm))
            yield (
                d_formula_statistics(SignedPermutation(entries)),
                p ** a * q ** (n - a) * inv_nfact,
            )


@dataclass(frozen=True)
class JointPmf:
    """Exact joint pmf of (inv, des); masses sum to exactly 1."""

    spec: AnySpec
    table: dict[tuple[int, int], Fraction]

    def total(self) -> Fraction:
        return sum(self.table.values(), Fraction(0))

    def marginal_inv(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (v, _), w in self.table.items():
            out[v] = out.get(v, Fraction(0)) + w
        return out

    def marginal_des(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (_, d), w in self.table.items():
            out[d] = out.get(d, Fraction(0)) + w
        return out

    def csv_rows(self) -> list[tuple[int, int, int, int]]:
        return [
            (v, d, w.numerator, w.denominator)
            for (v, d), w in sorted(self.table.items())
        ]


def exact_joint_pmf(spec: AnySpec, budgets: Optional[dict] = None) -> JointPmf:
    if isinstance(spec, ProductGroupSpec):
        table: dict[tuple[int, int], Fraction] = {(0, 0): Fraction(1)}
        for comp in spec.components:
            comp_pmf = exact_joint_pmf(comp, budgets)
            new: dict[tuple[int, int], Fraction] = {}
            for (v1, d1), w1 in table.items():
                for (v2, d2), w2 in comp_pmf.table.items():
                    key = (v1 + v2, d1 + d2)
                    new[key] = new.get(key, Fraction(0)) + w1 * w2
            table = new
        return JointPmf(spec, table)
    table = {}
    for st, w in statistic_items(spec, budgets):
        key = (st.inv, st.des)
        table[key] = table.get(key, Fraction(0)) + w
    return JointPmf(spec, table)


def exact_moments(spec: AnySpec, budgets: Optional[dict] = None) -> moments_mod.MomentSet:
    """All moments as exact rationals (Hajek entries by exact integration)."""
    if isinstance(spec, ProductGroupSpec):
        parts = [exact_moments(c, budgets) for c in spec.components]
        return moments_mod.MomentSet(
            mean_inv=sum((m.mean_inv for m in parts), Fraction(0)),
            var_inv=sum((m.var_inv for m in parts), Fraction(0)),
            mean_des=sum((m.mean_des for m in parts), Fraction(0)),
            var_des=sum((m.var_des for m in parts), Fraction(0)),
            cov_inv_des=sum((m.cov_inv_des for m in parts), Fraction(0)),
            var_hajek_inv=sum((m.var_hajek_inv for m in parts), Fraction(0)),
            cov_hajek_des=sum((m.cov_hajek_des for m in parts), Fraction(0)),
        )
    e_i = e_d = e_ii = e_dd = e_id = Fraction(0)
    for st, w in statistic_items(spec, budgets):
        e_i += w * st.inv
        e_d += w * st.des
        e_ii += w * st.inv * st.inv
        e_dd += w * st.des * st.des
        e_id += w * st.inv * st.des
    return moments_mod.MomentSet(
        mean_inv=e_i,
        var_inv=e_ii - e_i ** 2,
        mean_des=e_d,
        var_des=e_dd - e_d ** 2,
        cov_inv_des=e_id - e_i * e_d,
        var_hajek_inv=hajek_inv_variance_exact(spec),
        cov_hajek_des=hajek_des_covariance_exact(spec),
    )


# ---------------------------------------------------------------------------
# generating polynomial and the rank-one factorization test
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenPoly:
    """Coefficient matrix c[d][v] of sum_pi mass(pi) s^des t^inv."""

    spec: AnySpec
    coefficients: tuple[tuple[Fraction, ...], ...]

    def to_json_dict(self) -> dict:
        return {
            "des_degree": len(self.coefficients) - 1,
            "inv_degree": len(self.coefficients[0]) - 1,
            "coefficients": [
                [f"{c.numerator}/{c.denominator}" for c in row]
                for row in self.coefficients
            ],
        }


def generating_polynomial(spec: AnySpec, budgets: Optional[dict] = None) -> GenPoly:
    pmf = exact_joint_pmf(spec, budgets)
    if isinstance(spec, ProductGroupSpec):
        dmax = sum(des_max(c.family, c.rank) for c in spec.components)
        vmax = sum(inv_max(c.family, c.rank) for c in spec.components)
    else:
        dmax = des_max(spec.family, spec.rank)
        vmax = inv_max(spec.family, spec.rank)
    rows = [[Fraction(0)] * (vmax + 1) for _ in range(dmax + 1)]
    for (v, d), w in pmf.table.items():
        rows[d][v] += w
    return GenPoly(spec, tuple(tuple(row) for row in rows))


def factors_as_product(gen: GenPoly) -> bool:
    """Exact rank-one test: c[d][v] == (row sum d) * (column sum v) for all d, v.

    Since the coefficients sum to 1, rank-one factorization of the matrix is
    equivalent to independence of inv and des.
    """
    rows = gen.coefficients
    row_sums = [sum(row, Fraction(0)) for row in rows]
    col_sums = [sum(col, Fraction(0)) for col in zip(*rows)]
    return all(
        rows[d][v] == row_sums[d] * col_sums[v]
        for d in range(len(rows))
        for v in range(len(rows[0]))
    )


def mahonian_pmf(n: int) -> list[Fraction]:
    """Inversion pmf of uniform S_n by convolving uniforms on {0..i}, i < n.

    Independent route (no enumeration): the inversion count of a uniform
    permutation is distributed as a sum of n-1 independent discrete uniforms.
    """
    dist = [Fraction(1)]
    for i in range(1, n):
        step = Fraction(1, i + 1)
        new = [Fraction(0)] * (len(dist) + i)
        for v, w in enumerate(dist):
            if w:
                for shift in range(i + 1):
                    new[v + shift] += w * step
        dist = new
    return dist


# ---------------------------------------------------------------------------
# exact piecewise-polynomial integration for Hajek moments
# ---------------------------------------------------------------------------
# A piecewise polynomial on [-1, 1] with a single knot at 0 is a pair
# (neg, pos) of coefficient tuples; value sum c_i z^i on each side.

_PW = tuple[tuple[Fraction, ...], tuple[Fraction, ...]]


def _pw_linear(a_neg, b_neg, a_pos, b_pos) -> _PW:
    return ((Fraction(a_neg), Fraction(b_neg)), (Fraction(a_pos), Fraction(b_pos)))


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return tuple(out)


def _pw_mul(f: _PW, g: _PW) -> _PW:
    return (_poly_mul(f[0], g[0]), _poly_mul(f[1], g[1]))


def _pw_mean(f: _PW, p: Fraction) -> Fraction:
    """E f(Z) for Z ~ GR(p): density p on (-1,0), q on (0,1)."""
    q = 1 - p
    neg = sum(c * Fraction((-1) ** i, i + 1) for i, c in enumerate(f[0]))
    pos = sum(c * Fraction(1, i + 1) for i, c in enumerate(f[1]))
    return p * neg + q * pos


def _gr_cdf_pieces(p: Fraction) -> _PW:
    q = 1 - p
    return _pw_linear(p, p, p, q)  # p*z+p on [-1,0]; q*z+p on [0,1]


def _gr_cdf_reflected_pieces(p: Fraction) -> _PW:
    q = 1 - p
    return _pw_linear(p, -q, p, -p)  # z -> F_p(-z)


def _one_minus(f: _PW) -> _PW:
    def flip(coeffs):
        out = list(-c for c in coeffs)
        out[0] += 1
        return tuple(out)

    return (flip(f[0]), flip(f[1]))


def _conditional_pieces(spec: GroupSpec, k: int) -> _PW:
    from .stats import conditional_inv_coeffs

    (a_neg, b_neg), (a_pos, b_pos) = conditional_inv_coeffs(spec, k)
    return _pw_linear(a_neg, b_neg, a_pos, b_pos)


def hajek_inv_variance_exact(spec: GroupSpec) -> Fraction:
    """Var of the Hajek projection by direct integration of the conditional
    means; independent of the collected closed-form polynomial."""
    p = spec.bias
    total = Fraction(0)
    for k in range(1, spec.rank + 1):
        g = _conditional_pieces(spec, k)
        total += _pw_mean(_pw_mul(g, g), p) - _pw_mean(g, p) ** 2
    return total


def hajek_des_covariance_exact(spec: GroupSpec) -> Fraction:
    """Cov of the inv Hajek projection with des, exactly.

    Splits des into its adjacent indicators plus the family boundary term.
    Conditioning each indicator on the shared coordinate turns every
    covariance into a one-dimensional piecewise-polynomial integral:
    E(1{Z_k > Z_{k+1}} | Z_k) = F_p(Z_k), E(1{Z_{k-1} > Z_k} | Z_k) =
    1 - F_p(Z_k), and the boundary indicators give 1{z < 0} (family B) and
    F_p(-z) (family D, either shared coordinate).
    """
    if spec.family is GroupFamily.D and spec.rank < 2:
        raise ValueError("descents on family D need rank >= 2")
    p = spec.bias
    n = spec.rank
    cdf = _gr_cdf_pieces(p)
    cdf_refl = _gr_cdf_reflected_pieces(p)
    total = Fraction(0)
    for k in range(1, n + 1):
        g = _conditional_pieces(spec, k)
        mean_g = _pw_mean(g, p)
        if k <= n - 1:  # indicator 1{Z_k > Z_(k+1)} seen from the left slot
            total += _pw_mean(_pw_mul(g, cdf), p) - mean_g * Fraction(1, 2)
        if k >= 2:  # indicator 1{Z_(k-1) > Z_k} seen from the right slot
            total += _pw_mean(_pw_mul(g, _one_minus(cdf)), p) - mean_g * Fraction(1, 2)
        if spec.family is GroupFamily.B and k == 1:
            ind_neg = _pw_linear(1, 0, 0, 0)
            total += _pw_mean(_pw_mul(g, ind_neg), p) - mean_g * p
        if spec.family is GroupFamily.D and k in (1, 2):
            total += _pw_mean(_pw_mul(g, cdf_refl), p) - mean_g * p
    return total


def pmf_to_csv(pmf: JointPmf) -> str:
    lines = ["inv,des,numerator,denominator"]
    lines += [f"{v},{d},{num},{den}" for v, d, num, den in pmf.csv_rows()]
    return "\n".join(lines) + "\n"


def elements_to_csv(spec: GroupSpec, budgets: Optional[dict] = None) -> str:
    """Per-element weight table (one row per group element, masses sum to 1)."""
    lines = ["entries,inv,des,numerator,denominator"]
    for pi, w in enumerate_elements(spec, budgets):
        st = element_statistics(pi, spec.family)
        entries = " ".join(str(v) for v in pi.entries)
        lines.append(f"{entries},{st.inv},{st.des},{w.numerator},{w.denominator}")
    return "\n".join(lines) + "\n"


def genpoly_to_json(gen: GenPoly) -> str:
    return json.dumps(gen.to_json_dict(), sort_keys=True, indent=2) + "\n"
