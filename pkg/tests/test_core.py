"""Domain types and the signed-ranking map."""
import numpy as np
import pytest
from fractions import Fraction

from weylstats.core import (
    GroupFamily,
    GroupSpec,
    JointStat,
    ProductGroupSpec,
    SignedPermutation,
    des_max,
    fix_last_sign,
    inv_max,
    neg_count,
    rank_permutation,
    validate_for_family,
)


def test_rank_permutation_examples():
    assert rank_permutation([0.9, 0.1, 0.5], "S").entries == (3, 1, 2)
    assert rank_permutation([-0.2, 0.7], "B").entries == (-1, 2)
    assert rank_permutation([-0.2, -0.7], "D").entries == (-1, -2)


def test_rank_permutation_rejects_odd_sign_product_for_d():
    with pytest.raises(ValueError):
        rank_permutation([-0.2, 0.7], "D")


def test_neg_count_examples():
    assert neg_count(SignedPermutation((1, 2, 3))) == 0
    assert neg_count(SignedPermutation((-1, 2, -3))) == 2
    assert neg_count(SignedPermutation((-1, -2))) == 2


def test_positive_latent_b_matches_s_embedding():
    rng = np.random.default_rng(7)
    for _ in range(50):
        z = rng.random(8)
        s_entries = rank_permutation(z, "S").entries
        b_entries = rank_permutation(z, "B").entries
        assert b_entries == s_entries


def test_order_isomorphism_of_signed_ranking():
    rng = np.random.default_rng(11)
    for _ in range(100):
        z = rng.uniform(-1, 1, size=7)
        pi = rank_permutation(z, "B").entries
        n = len(z)
        for i in range(n):
            for j in range(i + 1, n):
                assert (z[i] > z[j]) == (pi[i] > pi[j])
                assert (-z[i] > z[j]) == (-pi[i] > pi[j])


def test_group_spec_validation():
    with pytest.raises(ValueError):
        GroupSpec("S", 3, Fraction(1, 4))
    with pytest.raises(ValueError):
        GroupSpec("B", 3, Fraction(5, 4))
    with pytest.raises(ValueError):
        GroupSpec("B", 0, Fraction(1, 2))
    spec = GroupSpec("B", 3, "1/4")
    assert spec.bias == Fraction(1, 4)


def test_signed_permutation_validation():
    with pytest.raises(ValueError):
        SignedPermutation((1, 1))
    with pytest.raises(ValueError):
        SignedPermutation((0, 1))
    with pytest.raises(ValueError):
        SignedPermutation(())
    validate_for_family(SignedPermutation((-1, -2)), "D")
    with pytest.raises(ValueError):
        validate_for_family(SignedPermutation((-1, 2)), "D")
    with pytest.raises(ValueError):
        validate_for_family(SignedPermutation((-1, 2)), "S")


def test_stat_bounds():
    assert inv_max("S", 4) == 6
    assert inv_max("B", 4) == 16
    assert inv_max("D", 4) == 12
    assert des_max("S", 4) == 3
    assert des_max("B", 4) == 4
    assert JointStat(inv=3, des=2).within_bounds(GroupFamily.S, 4)
    assert not JointStat(inv=7, des=2).within_bounds(GroupFamily.S, 4)


def test_fix_last_sign():
    z = np.array([-0.2, 0.7])
    fixed = fix_last_sign(z)
    assert (fixed == np.array([-0.2, -0.7])).all()
    assert (fix_last_sign(fixed) == fixed).all()  # already even
    # does not mutate the input
    assert z[1] == 0.7


def test_product_spec():
    spec = ProductGroupSpec((GroupSpec("S", 3), GroupSpec("B", 2, Fraction(1, 2))))
    assert spec.total_rank == 5
    assert spec.ranks_sorted_decreasingly()
    unsorted = ProductGroupSpec((GroupSpec("S", 2), GroupSpec("S", 3)))
    assert not unsorted.ranks_sorted_decreasingly()
    with pytest.raises(ValueError):
        ProductGroupSpec(())


def test_types_immutable():
    spec = GroupSpec("S", 3)
    with pytest.raises(AttributeError):
        spec.rank = 4
    pi = SignedPermutation((1, 2))
    with pytest.raises(AttributeError):
        pi.entries = (2, 1)
