"""Exhaustive enumeration oracle: pmfs, budgets, generating polynomials."""
from fractions import Fraction

import pytest

from weylstats.core import GroupSpec, ProductGroupSpec
from weylstats.moments import cov_hajek_des, var_hajek_inv
from weylstats.oracle import (
    BudgetExceededError,
    elements_to_csv,
    enumerate_elements,
    exact_joint_pmf,
    exact_moments,
    factors_as_product,
    generating_polynomial,
    genpoly_to_json,
    hajek_des_covariance_exact,
    hajek_inv_variance_exact,
    mahonian_pmf,
    pmf_to_csv,
    statistic_items,
)

S3_TABLE = {
    (0, 0): Fraction(1, 6),
    (1, 1): Fraction(2, 6),
    (2, 1): Fraction(2, 6),
    (3, 2): Fraction(1, 6),
}


def test_enumerate_s3():
    items = list(enumerate_elements(GroupSpec("S", 3)))
    assert len(items) == 6
    assert all(w == Fraction(1, 6) for _, w in items)
    assert len({pi.entries for pi, _ in items}) == 6


def test_enumerate_b2_uniform():
    items = list(enumerate_elements(GroupSpec("B", 2, Fraction(1, 2))))
    assert len(items) == 8
    assert all(w == Fraction(1, 8) for _, w in items)


def test_enumerate_d2_weights():
    p = Fraction(1, 3)
    q = 1 - p
    items = dict(
        (pi.entries, w) for pi, w in enumerate_elements(GroupSpec("D", 2, p))
    )
    assert items == {
        (1, 2): q / 2,
        (2, 1): q / 2,
        (-1, -2): p / 2,
        (-2, -1): p / 2,
    }


@pytest.mark.parametrize(
    "spec",
    [
        GroupSpec("S", 5),
        GroupSpec("B", 4, Fraction(1, 4)),
        GroupSpec("D", 4, Fraction(2, 5)),
        GroupSpec("B", 3, Fraction(0)),
        GroupSpec("D", 3, Fraction(1)),
    ],
)
def test_weights_sum_to_one(spec):
    total = sum(w for _, w in enumerate_elements(spec))
    assert total == 1
    assert sum(w for _, w in statistic_items(spec)) == 1


def test_joint_pmf_examples():
    assert exact_joint_pmf(GroupSpec("S", 3)).table == S3_TABLE
    assert exact_joint_pmf(GroupSpec("S", 1)).table == {(0, 0): Fraction(1)}
    pmf = exact_joint_pmf(GroupSpec("B", 2, Fraction(1, 2)))
    assert pmf.table[(0, 0)] == Fraction(1, 8)
    inv_marg = pmf.marginal_inv()
    # element inversion values are 0,1,1,2,2,3,3,4 over the 8 elements
    assert inv_marg == {0: Fraction(1, 8), 1: Fraction(2, 8), 2: Fraction(2, 8),
                        3: Fraction(2, 8), 4: Fraction(1, 8)}


def test_exact_moments_examples():
    m = exact_moments(GroupSpec("S", 3))
    assert (m.mean_inv, m.var_inv) == (Fraction(3, 2), Fraction(11, 12))
    assert (m.mean_des, m.var_des, m.cov_inv_des) == (1, Fraction(1, 3), Fraction(1, 2))
    b = exact_moments(GroupSpec("B", 2, Fraction(1, 2)))
    assert (b.mean_inv, b.var_inv, b.cov_inv_des) == (2, Fraction(3, 2), Fraction(1, 2))
    assert exact_moments(GroupSpec("S", 2)).var_inv == Fraction(1, 4)


def test_budget_errors():
    with pytest.raises(BudgetExceededError):
        list(enumerate_elements(GroupSpec("S", 9)))
    with pytest.raises(BudgetExceededError):
        exact_joint_pmf(GroupSpec("B", 6, Fraction(1, 2)))
    with pytest.raises(BudgetExceededError):
        exact_joint_pmf(GroupSpec("D", 6, Fraction(1, 2)))
    # custom budgets are honored
    assert len(list(enumerate_elements(GroupSpec("B", 6, Fraction(1, 2)),
                                       budgets={"B": 6, "S": 8, "D": 5}))) > 0


def test_d_statistic_law_vs_constrained_elements():
    # the latent statistic law and the constrained-element law agree exactly
    # at bias 0 and 1/2, and differ otherwise (rank >= 3)
    from weylstats.stats import element_statistics

    def element_law(spec):
        table = {}
        for pi, w in enumerate_elements(spec):
            st = element_statistics(pi, spec.family)
            key = (st.inv, st.des)
            table[key] = table.get(key, Fraction(0)) + w
        return table

    for p in (Fraction(0), Fraction(1, 2)):
        for n in (2, 3, 4):
            spec = GroupSpec("D", n, p)
            assert exact_joint_pmf(spec).table == element_law(spec)
    spec = GroupSpec("D", 3, Fraction(1, 4))
    assert exact_joint_pmf(spec).table != element_law(spec)


def test_mahonian_marginal():
    for n in range(1, 9):
        pmf = exact_joint_pmf(GroupSpec("S", n))
        marginal = pmf.marginal_inv()
        convolution = mahonian_pmf(n)
        assert marginal == {v: w for v, w in enumerate(convolution) if w != 0}


def test_inversion_pmf_symmetry():
    for n in (3, 4, 5, 6):
        marginal = exact_joint_pmf(GroupSpec("S", n)).marginal_inv()
        top = n * (n - 1) // 2
        for v, w in marginal.items():
            assert marginal[top - v] == w


def test_generating_polynomial_factorization():
    assert factors_as_product(generating_polynomial(GroupSpec("S", 3))) is False
    assert factors_as_product(generating_polynomial(GroupSpec("S", 1))) is True
    # on S_2 inv and des coincide and are non-degenerate, so no factorization
    assert factors_as_product(generating_polynomial(GroupSpec("S", 2))) is False


def test_generating_polynomial_matches_pmf():
    g = generating_polynomial(GroupSpec("S", 3))
    assert g.coefficients[0][0] == Fraction(1, 6)
    assert g.coefficients[1][1] == Fraction(2, 6)
    assert sum(sum(row, Fraction(0)) for row in g.coefficients) == 1
    payload = g.to_json_dict()
    assert payload["coefficients"][2][3] == "1/6"
    assert "des_degree" in payload and "inv_degree" in payload
    assert genpoly_to_json(g).startswith("{")


def test_hajek_integration_matches_closed_forms():
    # dual route: exact piecewise integration of the conditional means vs the
    # collected polynomial algebra
    for family in ("S", "B", "D"):
        for n in range(1 if family != "D" else 2, 6):
            for p in ([Fraction(0)] if family == "S"
                      else [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)]):
                spec = GroupSpec(family, n, p)
                assert hajek_inv_variance_exact(spec) == var_hajek_inv(spec), spec.label()


def test_hajek_des_covariance_exact_values():
    # S: (n-1)/6 exactly; B: (n-1)/6 + pq; D: (n-1)/6 + 2pq/3
    for n in range(2, 6):
        assert hajek_des_covariance_exact(GroupSpec("S", n)) == Fraction(n - 1, 6)
        assert cov_hajek_des(GroupSpec("S", n)).value == Fraction(n - 1, 6)
        for p in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)):
            pq = p * (1 - p)
            assert hajek_des_covariance_exact(GroupSpec("B", n, p)) == Fraction(n - 1, 6) + pq
            assert hajek_des_covariance_exact(GroupSpec("D", n, p)) == \
                Fraction(n - 1, 6) + Fraction(2, 3) * pq


def test_product_pmf_by_convolution():
    prod = ProductGroupSpec((GroupSpec("S", 2), GroupSpec("S", 3)))
    pmf = exact_joint_pmf(prod)
    assert pmf.total() == 1
    # brute-force cartesian aggregation
    from weylstats.stats import element_statistics

    table = {}
    for pi1, w1 in enumerate_elements(GroupSpec("S", 2)):
        for pi2, w2 in enumerate_elements(GroupSpec("S", 3)):
            s1 = element_statistics(pi1, "S")
            s2 = element_statistics(pi2, "S")
            key = (s1.inv + s2.inv, s1.des + s2.des)
            table[key] = table.get(key, Fraction(0)) + w1 * w2
    assert pmf.table == table


def test_csv_emission():
    text = pmf_to_csv(exact_joint_pmf(GroupSpec("S", 3)))
    lines = text.strip().splitlines()
    assert lines[0] == "inv,des,numerator,denominator"
    assert len(lines) == 1 + len(S3_TABLE)
    assert "0,0,1,6" in lines
    table = elements_to_csv(GroupSpec("B", 2, Fraction(1, 2)))
    rows = table.strip().splitlines()
    assert len(rows) == 1 + 8
    total = sum(
        Fraction(int(r.split(",")[-2]), int(r.split(",")[-1])) for r in rows[1:]
    )
    assert total == 1


def test_budget_respects_family_keys():
    # default budgets are keyed by family enum; custom dict with string keys
    from weylstats.core import GroupFamily

    budgets = {GroupFamily.S: 3, GroupFamily.B: 2, GroupFamily.D: 2}
    with pytest.raises(BudgetExceededError):
        list(enumerate_elements(GroupSpec("S", 4), budgets=budgets))
