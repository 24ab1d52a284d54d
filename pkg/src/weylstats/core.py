"""Domain types for the classical Weyl group families S_n, B_n and D_n.

Elements are written in one-line notation as tuples of signed integers whose
absolute values form a permutation of 1..n:

* family S: all entries positive (ordinary permutations),
* family B: arbitrary signs (signed permutations),
* family D: the product of all entry signs is positive (even-signed).

Random elements are induced by a latent vector z of independent
generalized-Rademacher GR(p) variables: entry i is sign(z_i) times the rank
of |z_i| among all magnitudes (rank 1 = smallest).  This signed ranking is an
order isomorphism, so order events on z translate verbatim to order events on
the element: z_i > z_j iff pi(i) > pi(j) and -z_i > z_j iff -pi(i) > pi(j).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

BiasLike = Union[Fraction, int, float, str]


class GroupFamily(str, Enum):
    S = "S"
    B = "B"
    D = "D"


def as_bias(value: BiasLike) -> Fraction:
    """Coerce a sign bias to an exact rational in [0, 1].

    Strings are parsed exactly ("1/4", "0.25"); floats convert to their exact
    binary value.  Values outside [0, 1] are rejected.
    """
    p = Fraction(value)
    if not 0 <= p <= 1:
        raise ValueError(f"sign bias must lie in [0, 1], got {value!r}")
    return p


@dataclass(frozen=True)
class GroupSpec:
    """One classical Weyl group together with its sign bias p.

    For family S the latent variables are uniform on (0, 1), i.e. GR(0), so
    the bias must be 0.  The bias is stored as an exact rational; exact
    (oracle) computations consume the rational, Monte Carlo paths its float.
    """

    family: GroupFamily
    rank: int
    bias: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", GroupFamily(self.family))
        object.__setattr__(self, "bias", as_bias(self.bias))
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")
        if self.family is GroupFamily.S and self.bias != 0:
            raise ValueError("family S requires bias 0 (its latents are U(0,1))")

    @property
    def n(self) -> int:
        return self.rank

    @property
    def bias_float(self) -> float:
        return float(self.bias)

    def label(self) -> str:
        if self.family is GroupFamily.S:
            return f"S_{self.rank}"
        return f"{self.family.value}_{self.rank}(p={self.bias})"


@dataclass(frozen=True)
class ProductGroupSpec:
    """A bounded direct product of classical Weyl groups.

    Statistics of a product element are the sums of the component statistics
    (components are independent), so moments add componentwise.
    """

    components: tuple[GroupSpec, ...]

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        if len(comps) < 1:
            raise ValueError("a product needs at least one component")
        if not all(isinstance(c, GroupSpec) for c in comps):
            raise TypeError("components must be GroupSpec instances")
        object.__setattr__(self, "components", comps)

    @property
    def total_rank(self) -> int:
        return sum(c.rank for c in self.components)

    def ranks_sorted_decreasingly(self) -> bool:
        ranks = [c.rank for c in self.components]
        return all(a >= b for a, b in zip(ranks, ranks[1:]))

    def label(self) -> str:
        return " x ".join(c.label() for c in self.components)


@dataclass(frozen=True)
class SignedPermutation:
    """One-line notation element; absolute values form a permutation of 1..n."""

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        entries = tuple(int(v) for v in self.entries)
        object.__setattr__(self, "entries", entries)
        n = len(entries)
        if n == 0:
            raise ValueError("empty permutation")
        if sorted(abs(v) for v in entries) != list(range(1, n + 1)):
            raise ValueError(f"absolute values must be a permutation of 1..{n}: {entries}")

    @property
    def n(self) -> int:
        return len(self.entries)

    def sign_product(self) -> int:
        return -1 if neg_count(self) % 2 else 1


def neg_count(pi: SignedPermutation) -> int:
    """Number of negative entries of the element."""
    return sum(1 for v in pi.entries if v < 0)


def validate_for_family(pi: SignedPermutation, family: GroupFamily) -> None:
    """Raise ValueError when the element does not belong to the family."""
    family = GroupFamily(family)
    if family is GroupFamily.S and any(v < 0 for v in pi.entries):
        raise ValueError(f"{pi.entries} has negative entries, not an S element")
    if family is GroupFamily.D and pi.sign_product() < 0:
        raise ValueError(f"{pi.entries} has negative sign product, not a D element")


def inv_max(family: GroupFamily, n: int) -> int:
    """Largest possible inversion count in the family at rank n."""
    family = GroupFamily(family)
    if family is GroupFamily.S:
        return n * (n - 1) // 2
    if family is GroupFamily.B:
        return n * n
    return n * (n - 1)


def des_max(family: GroupFamily, n: int) -> int:
    """Largest possible descent count in the family at rank n."""
    return n - 1 if GroupFamily(family) is GroupFamily.S else n


@dataclass(frozen=True)
class JointStat:
    """Joint inversion/descent statistic of one element or latent vector.

    ``inv`` follows the family rule: inv_plus for S, the sum of all three
    counters for B, and inv_plus + inv_minus for D (inv_circ is reported but
    excluded from inv for D).
    """

    inv: int
    des: int
    inv_plus: int = 0
    inv_minus: int = 0
    inv_circ: int = 0

    def within_bounds(self, family: GroupFamily, n: int) -> bool:
        return 0 <= self.inv <= inv_max(family, n) and 0 <= self.des <= des_max(family, n)


def rank_permutation(z: Sequence[float], family: GroupFamily) -> SignedPermutation:
    """Signed ranking of a latent vector: entry i is sign(z_i) * rank(|z_i|).

    Raw operation: for family D it rejects vectors whose induced sign product
    is negative (the D sampler fixes the last coordinate's sign before
    ranking; see :func:`fix_last_sign`).  Exact magnitude ties are broken by
    index (lower index gets the lower rank), which has probability zero under
    any continuous latent law.
    """
    family = GroupFamily(family)
    zv = np.asarray(z, dtype=float)
    if zv.ndim != 1 or zv.size == 0:
        raise ValueError("latent sample must be a nonempty vector")
    n = zv.size
    ranks = np.empty(n, dtype=np.int64)
    if family is GroupFamily.S:
        ranks[np.argsort(zv, kind="stable")] = np.arange(1, n + 1)
        return SignedPermutation(tuple(int(r) for r in ranks))
    ranks[np.argsort(np.abs(zv), kind="stable")] = np.arange(1, n + 1)
    signs = np.where(zv < 0, -1, 1)
    entries = tuple(int(s * r) for s, r in zip(signs, ranks))
    pi = SignedPermutation(entries)
    if family is GroupFamily.D and pi.sign_product() < 0:
        raise ValueError(
            "induced sign product is negative; fix the last coordinate's sign "
            "before ranking for family D"
        )
    return pi


def fix_last_sign(z: Sequence[float]) -> np.ndarray:
    """Flip the sign of the last coordinate when the vector has an odd number
    of negative entries, so the induced element lands in D_n."""
    zv = np.array(z, dtype=float, copy=True)
    if int(np.sum(zv < 0)) % 2:
        zv[-1] = -zv[-1]
    return zv
