"""Closed-form moments of the joint inversion/descent statistic.

Everything here is exact rational arithmetic in the rank n and the sign bias
p (q := 1 - p, pq := p*q).  The formulas describe the law induced by the
latent construction (independent GR(p) variables; see :mod:`weylstats.stats`)
and are pinned against the exhaustive enumeration oracle in the test suite.
Writing w := 12*pq, the central ones are

    E(inv):    S: n(n-1)/4          B: C(n,2)(p+1/2) + np      D: C(n,2)(p+1/2)
    Var(inv):  D: (1+w)n^3/36 + (1-w)n^2/24 - (5-w)n/72
               B: Var_D + n^2 pq    S: D at p=0, i.e. n^3/36 + n^2/24 - 5n/72
    E(des):    S: (n-1)/2           B, D: (n-1)/2 + p
    Var(des):  S, B: (n+1)/12 for n >= 2 (B's boundary indicator's own
               variance pq cancels exactly against its -pq/2 covariance with
               the first adjacent indicator); D: no closed form kept for
               general p (use the oracle or a pilot estimate), except that
               the boundary indicator degenerates at p in {0, 1} where
               (n+1)/12 applies.
    Cov(inv, des): S: (n-1)/4       B, D: (n-1)/4 + pq

The Hajek projection of inv (best L^2 approximation by a sum of functions of
the individual latent variables) has

    Var:       S: (n^3-n)/36
               D: a1*S1 + a2*S2 + a3*S3 - n(n-1)^2 (p+1/2)^2  with
                  a1 = 4p^2/3 + 2p/3 + 1/3, a2 = 2p + 1/3,
                  a3 = 4p^2/3 + 8p/3 + 1/3, S1 = S2 = n(n-1)(2n-1)/6,
                  S3 = n(n-1)(n-2)/6
               B: Var_D + n^2 pq
    Cov with des: S: (n-1)/6 exactly; B, D: the same (n-1)/6 is the exact
               linear leading term, returned with a leading-term-only flag
               (exact small-n values come from the oracle's piecewise
               integration; they equal (n-1)/6 + pq on B and (n-1)/6 + 2pq/3
               on D, which the tests pin).

The shared cubic leading coefficient of both inversion variances is
c(p) = -p^2/3 + p/3 + 1/36 = (1 + 12pq)/36, positive on [0,1] and maximal at
p = 1/2.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import GroupFamily, GroupSpec, ProductGroupSpec

_HALF = Fraction(1, 2)

#: flag recorded when cov_hajek_des only carries the linear leading term
LEADING_TERM_ONLY = "cov_hajek_des:leading-term-only"


@dataclass(frozen=True)
class MomentSet:
    """Bundle of exact moments; optional fields are None when no closed form
    (or exact oracle value) is available."""

    mean_inv: Fraction
    var_inv: Fraction
    mean_des: Fraction
    cov_inv_des: Fraction
    var_hajek_inv: Fraction
    var_des: Optional[Fraction] = None
    cov_hajek_des: Optional[Fraction] = None
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.var_inv < 0 or self.var_hajek_inv < 0:
            raise ValueError("variances must be nonnegative")
        if self.var_des is not None:
            if self.var_des < 0:
                raise ValueError("variances must be nonnegative")
            if self.cov_inv_des ** 2 > self.var_inv * self.var_des:
                raise ValueError("covariance exceeds the Cauchy-Schwarz bound")

    def to_dict(self) -> dict:
        def fmt(x):
            return None if x is None else f"{x.numerator}/{x.denominator}"

        return {
            "mean_inv": fmt(self.mean_inv),
            "var_inv": fmt(self.var_inv),
            "mean_des": fmt(self.mean_des),
            "var_des": fmt(self.var_des),
            "cov_inv_des": fmt(self.cov_inv_des),
            "var_hajek_inv": fmt(self.var_hajek_inv),
            "cov_hajek_des": fmt(self.cov_hajek_des),
            "flags": list(self.flags),
        }


def _binom2(n: int) -> Fraction:
    return Fraction(n * (n - 1), 2)


def _require_des_defined(spec: GroupSpec) -> None:
    if spec.family is GroupFamily.D and spec.rank < 2:
        raise ValueError("descents on family D need rank >= 2")


def mean_inv(spec: GroupSpec) -> Fraction:
    p = spec.bias
    n = spec.rank
    if spec.family is GroupFamily.S:
        return Fraction(n * (n - 1), 4)
    base = _binom2(n) * (p + _HALF)
    return base + n * p if spec.family is GroupFamily.B else base


def var_inv(spec: GroupSpec) -> Fraction:
    p = spec.bias
    n = spec.rank
    w = 12 * p * (1 - p)
    value = (
        (1 + w) * Fraction(n ** 3, 36)
        + (1 - w) * Fraction(n ** 2, 24)
        - (5 - w) * Fraction(n, 72)
    )
    if spec.family is GroupFamily.B:
        value += Fraction(n ** 2) * p * (1 - p)
    return value


def mean_des(spec: GroupSpec) -> Fraction:
    _require_des_defined(spec)
    base = Fraction(spec.rank - 1, 2)
    return base if spec.family is GroupFamily.S else base + spec.bias


def var_des(spec: GroupSpec) -> Optional[Fraction]:
    """(n+1)/12 for S and B; None for D with nondegenerate bias.

    Family D's boundary indicator 1{-Z_2 > Z_1} is almost surely constant at
    p in {0, 1}, where (n+1)/12 applies; otherwise callers fall back to the
    oracle (small n) or a pilot estimate.
    """
    _require_des_defined(spec)
    n = spec.rank
    p = spec.bias
    if n == 1:
        # S_1 has constant des = 0; B_1 has des = 1{negative entry}.
        return Fraction(0) if spec.family is GroupFamily.S else p * (1 - p)
    if spec.family is not GroupFamily.D or p in (0, 1):
        return Fraction(n + 1, 12)
    return None


def cov_inv_des(spec: GroupSpec) -> Fraction:
    _require_des_defined(spec)
    base = Fraction(spec.rank - 1, 4)
    if spec.family is GroupFamily.S:
        return base
    return base + spec.bias * (1 - spec.bias)


def var_hajek_inv(spec: GroupSpec) -> Fraction:
    p = spec.bias
    n = spec.rank
    if spec.family is GroupFamily.S:
        return Fraction(n ** 3 - n, 36)
    a1 = Fraction(4, 3) * p ** 2 + Fraction(2, 3) * p + Fraction(1, 3)
    a2 = 2 * p + Fraction(1, 3)
    a3 = Fraction(4, 3) * p ** 2 + Fraction(8, 3) * p + Fraction(1, 3)
    s12 = Fraction(n * (n - 1) * (2 * n - 1), 6)
    s3 = Fraction(n * (n - 1) * (n - 2), 6)
    value = (a1 + a2) * s12 + a3 * s3 - n * (n - 1) ** 2 * (p + _HALF) ** 2
    if spec.family is GroupFamily.B:
        value += Fraction(n ** 2) * p * (1 - p)
    return value


@dataclass(frozen=True)
class CovHajekDes:
    """Covariance of the inv Hajek projection with des.

    ``exact`` is True only for family S; for B and D the value is the linear
    leading term (n-1)/6 and the O(1) remainder must come from the oracle.
    """

    value: Fraction
    exact: bool


def cov_hajek_des(spec: GroupSpec) -> CovHajekDes:
    _require_des_defined(spec)
    value = Fraction(spec.rank - 1, 6)
    return CovHajekDes(value, exact=spec.family is GroupFamily.S)


def leading_coefficient(p) -> Fraction:
    """Cubic leading coefficient c(p) = -p^2/3 + p/3 + 1/36 of Var(inv)."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError("bias must lie in [0, 1]")
    return -(p ** 2) / 3 + p / 3 + Fraction(1, 36)


def corr_inv_des(spec: GroupSpec, var_des_value: Optional[Fraction] = None) -> float:
    """Correlation of (inv, des); needs a des variance (closed form or supplied)."""
    vd = var_des_value if var_des_value is not None else var_des(spec)
    if vd is None:
        raise ValueError(f"no closed-form des variance for {spec.label()}; supply one")
    import math

    return float(cov_inv_des(spec)) / math.sqrt(float(var_inv(spec)) * float(vd))


def moment_set(spec: GroupSpec) -> MomentSet:
    chd = cov_hajek_des(spec)
    return MomentSet(
        mean_inv=mean_inv(spec),
        var_inv=var_inv(spec),
        mean_des=mean_des(spec),
        var_des=var_des(spec),
        cov_inv_des=cov_inv_des(spec),
        var_hajek_inv=var_hajek_inv(spec),
        cov_hajek_des=chd.value,
        flags=() if chd.exact else (LEADING_TERM_ONLY,),
    )


def product_moments(spec: ProductGroupSpec) -> MomentSet:
    """Componentwise sums; des-related optionals propagate unavailability."""
    sets = [moment_set(c) for c in spec.components]
    var_des_total: Optional[Fraction] = Fraction(0)
    for m in sets:
        var_des_total = None if (var_des_total is None or m.var_des is None) else var_des_total + m.var_des
    flags = tuple(sorted({f for m in sets for f in m.flags}))
    cov_hd = sum((m.cov_hajek_des for m in sets), Fraction(0))
    return MomentSet(
        mean_inv=sum((m.mean_inv for m in sets), Fraction(0)),
        var_inv=sum((m.var_inv for m in sets), Fraction(0)),
        mean_des=sum((m.mean_des for m in sets), Fraction(0)),
        var_des=var_des_total,
        cov_inv_des=sum((m.cov_inv_des for m in sets), Fraction(0)),
        var_hajek_inv=sum((m.var_hajek_inv for m in sets), Fraction(0)),
        cov_hajek_des=cov_hd,
        flags=flags,
    )
