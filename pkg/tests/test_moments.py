"""Closed-form moments against the enumeration oracle (exact equality)."""
import math
from fractions import Fraction

import pytest

from weylstats.core import GroupSpec, ProductGroupSpec
from weylstats.moments import (
    LEADING_TERM_ONLY,
    MomentSet,
    cov_hajek_des,
    cov_inv_des,
    leading_coefficient,
    mean_des,
    mean_inv,
    moment_set,
    product_moments,
    var_des,
    var_hajek_inv,
    var_inv,
)
from weylstats.oracle import exact_moments

P_GRID = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]


def test_mean_inv_examples():
    assert mean_inv(GroupSpec("S", 4)) == 3
    assert mean_inv(GroupSpec("B", 3, Fraction(1, 2))) == Fraction(9, 2)
    spec = GroupSpec("B", 2, Fraction(1, 2))
    assert mean_inv(spec) == 2
    assert exact_moments(spec).mean_inv == 2


def test_var_inv_examples():
    assert var_inv(GroupSpec("S", 3)) == Fraction(11, 12)
    assert var_inv(GroupSpec("B", 2, Fraction(1, 2))) == Fraction(3, 2)
    for n in range(1, 9):
        assert var_inv(GroupSpec("D", n, 0)) == var_inv(GroupSpec("S", n))
        assert var_inv(GroupSpec("S", n)) == Fraction(n ** 3, 36) + Fraction(n ** 2, 24) - Fraction(5 * n, 72)


def test_var_des_examples():
    assert var_des(GroupSpec("S", 3)) == Fraction(1, 3)
    assert var_des(GroupSpec("B", 2, Fraction(1, 2))) == Fraction(1, 4)
    assert var_des(GroupSpec("D", 3, Fraction(1, 4))) is None
    assert var_des(GroupSpec("D", 3, 0)) == Fraction(1, 3)
    assert var_des(GroupSpec("D", 3, 1)) == Fraction(1, 3)
    # contract case: the oracle supplies the unavailable value
    oracle_value = exact_moments(GroupSpec("D", 3, Fraction(1, 4))).var_des
    assert oracle_value == Fraction(3 + 1, 12) + Fraction(1, 4) * Fraction(3, 4) / 3


def test_var_des_b_confirmed_by_oracle():
    # the boundary indicator's variance pq cancels against its covariance
    # with the first adjacent indicator; confirm for n <= 5 and the p grid
    for n in range(2, 6):
        for p in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            spec = GroupSpec("B", n, p)
            assert exact_moments(spec).var_des == Fraction(n + 1, 12)


def test_cov_inv_des_examples():
    assert cov_inv_des(GroupSpec("S", 3)) == Fraction(1, 2)
    assert cov_inv_des(GroupSpec("B", 2, Fraction(1, 2))) == Fraction(1, 2)
    for n in (2, 5, 9):
        assert cov_inv_des(GroupSpec("D", n, 0)) == Fraction(n - 1, 4)


def test_var_hajek_inv_examples():
    assert var_hajek_inv(GroupSpec("S", 3)) == Fraction(2, 3)
    assert var_hajek_inv(GroupSpec("D", 3, 0)) == Fraction(2, 3)
    # B and D values differ by exactly n^2 pq
    for n in (1, 2, 3, 5):
        for p in P_GRID:
            d = var_hajek_inv(GroupSpec("D", n, p)) if n > 1 else Fraction(0)
            b = var_hajek_inv(GroupSpec("B", n, p))
            d_val = var_hajek_inv(GroupSpec("D", n, p))
            assert b == d_val + n ** 2 * p * (1 - p)
    assert var_hajek_inv(GroupSpec("B", 2, Fraction(1, 2))) == Fraction(4, 3)


def test_cov_hajek_des_contract():
    s = cov_hajek_des(GroupSpec("S", 3))
    assert s.value == Fraction(1, 3) and s.exact
    for n in (2, 4, 7):
        lead = cov_hajek_des(GroupSpec("D", n, 0))
        assert lead.value == Fraction(n - 1, 6) and not lead.exact
    flagged = cov_hajek_des(GroupSpec("D", 3, Fraction(1, 2)))
    assert not flagged.exact
    # the oracle supplies the exact value in the flagged cases
    assert exact_moments(GroupSpec("D", 3, Fraction(1, 2))).cov_hajek_des == \
        Fraction(2, 6) + Fraction(2, 3) * Fraction(1, 4)
    assert LEADING_TERM_ONLY in moment_set(GroupSpec("D", 3, Fraction(1, 2))).flags
    assert moment_set(GroupSpec("S", 3)).flags == ()


def test_leading_coefficient():
    assert leading_coefficient(0) == Fraction(1, 36)
    assert leading_coefficient(Fraction(1, 2)) == Fraction(1, 9)
    assert leading_coefficient(1) == Fraction(1, 36)
    for p in P_GRID:
        assert leading_coefficient(p) == leading_coefficient(1 - p)
        assert leading_coefficient(p) > 0
    assert max(P_GRID, key=leading_coefficient) == Fraction(1, 2)
    with pytest.raises(ValueError):
        leading_coefficient(Fraction(3, 2))


@pytest.mark.parametrize("family,max_n", [("S", 6), ("B", 4), ("D", 4)])
def test_closed_forms_equal_oracle(family, max_n):
    # the central gate: exact rational equality against enumeration
    for n in range(1 if family != "D" else 2, max_n + 1):
        for p in (P_GRID if family != "S" else [Fraction(0)]):
            spec = GroupSpec(family, n, p)
            oracle = exact_moments(spec)
            assert mean_inv(spec) == oracle.mean_inv, spec.label()
            assert var_inv(spec) == oracle.var_inv, spec.label()
            assert mean_des(spec) == oracle.mean_des, spec.label()
            assert cov_inv_des(spec) == oracle.cov_inv_des, spec.label()
            assert var_hajek_inv(spec) == oracle.var_hajek_inv, spec.label()
            closed_vd = var_des(spec)
            if closed_vd is not None:
                assert closed_vd == oracle.var_des, spec.label()
            chd = cov_hajek_des(spec)
            if chd.exact:
                assert chd.value == oracle.cov_hajek_des, spec.label()


def test_projection_reduces_variance():
    for family in ("S", "B", "D"):
        for n in (2, 5, 20, 100):
            for p in (P_GRID if family != "S" else [Fraction(0)]):
                spec = GroupSpec(family, n, p)
                assert var_hajek_inv(spec) <= var_inv(spec), spec.label()


def test_variance_ratio_bound_at_200():
    n = 200
    for family in ("S", "B", "D"):
        for p in ([Fraction(0)] if family == "S" else
                  [Fraction(0), Fraction(1, 4), Fraction(1, 2)]):
            spec = GroupSpec(family, n, p)
            ratio = var_inv(spec) / var_hajek_inv(spec)
            assert 1 <= ratio <= 1 + Fraction(5, n), spec.label()


def test_correlation_decay():
    # |corr| <= C/n with one constant across n in {50, 100, 200}
    for family, p in (("S", Fraction(0)), ("B", Fraction(1, 4)), ("B", Fraction(1, 2))):
        corrs = {}
        for n in (50, 100, 200):
            spec = GroupSpec(family, n, p)
            corr = abs(float(cov_inv_des(spec))) / math.sqrt(
                float(var_inv(spec)) * float(var_des(spec))
            )
            corrs[n] = corr
        c = corrs[50] * 50 * 1.05
        for n, corr in corrs.items():
            assert corr <= c / n


def test_product_moments():
    s3 = GroupSpec("S", 3)
    prod = ProductGroupSpec((s3, s3))
    ms = product_moments(prod)
    assert ms.var_inv == 2 * Fraction(11, 12)
    single = product_moments(ProductGroupSpec((s3,)))
    assert single.var_inv == var_inv(s3)
    assert single.mean_des == mean_des(s3)
    mixed = ProductGroupSpec((GroupSpec("S", 2), GroupSpec("B", 2, Fraction(1, 2))))
    assert product_moments(mixed).mean_inv == Fraction(1, 2) + 2
    with_d = ProductGroupSpec((GroupSpec("S", 3), GroupSpec("D", 3, Fraction(1, 4))))
    assert product_moments(with_d).var_des is None


def test_moment_set_validation():
    with pytest.raises(ValueError):
        MomentSet(
            mean_inv=Fraction(0),
            var_inv=Fraction(1),
            mean_des=Fraction(0),
            cov_inv_des=Fraction(2),
            var_hajek_inv=Fraction(1),
            var_des=Fraction(1),
        )
    with pytest.raises(ValueError):
        MomentSet(
            mean_inv=Fraction(0),
            var_inv=Fraction(-1),
            mean_des=Fraction(0),
            cov_inv_des=Fraction(0),
            var_hajek_inv=Fraction(1),
        )


def test_mean_des_d_rank_one_rejected():
    with pytest.raises(ValueError):
        mean_des(GroupSpec("D", 1, Fraction(1, 2)))
