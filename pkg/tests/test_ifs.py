from fractions import Fraction

import numpy as np
import pytest

from fractal.config import make_rng
from fractal.errors import DomainError, UnsupportedError
from fractal.ifs import (AffineIfs, TruncationBudget, Word, cylinder_interval, dual_weights, encode, expand,
                         find_complement, ft_cylinder, ft_cylinders, ft_invariant, hull, lattice_residual, locate,
                         mask, new_ifs, sample_invariant, similarity_dimension, words)


def in_zero_set(n: int) -> bool:
    """n = 4^m (4k + 2)"""
    if n == 0:
        return False
    while n % 4 == 0:
        n //= 4
    return n % 4 == 2


# |----------Construction----------|
def test_new_ifs_catalog_systems():
    assert new_ifs(4, [0, 2]).distinct_mod_R
    assert new_ifs(4, [1, 0]).digits == (0, 1)
    overlap = new_ifs(2, [0, 4])
    assert not overlap.distinct_mod_R
    with pytest.raises(UnsupportedError):
        cylinder_interval(overlap, (4,))


@pytest.mark.parametrize("R, B", [(1, (0,)), (4, (0, 0)), (2, (0, 1, 2)), (4, ())])
def test_new_ifs_rejects(R, B):
    with pytest.raises(DomainError):
        new_ifs(R, B)


def test_words_are_lexicographic(mu4):
    assert [w.digits for w in words(mu4, 2)] == [(0, 0), (0, 2), (2, 0), (2, 2)]
    assert words(mu4, 0) == [Word(())]


def test_similarity_dimension(mu4, mu3):
    assert similarity_dimension(mu4) == pytest.approx(0.5)
    assert similarity_dimension(mu3) == pytest.approx(np.log(2) / np.log(3))


# |----------Codage----------|
def test_encode(mu4):
    assert encode(mu4, (2,)) == 0.5
    assert encode(mu4, (2,) * 40) == pytest.approx(2 / 3, abs=1e-12)
    assert encode(mu4, (2,), depth=3) == 0.5


def test_encode_errors(mu4):
    with pytest.raises(DomainError):
        encode(mu4, (1,))
    with pytest.raises(DomainError):
        encode(AffineIfs(3, (1, 2)), (1,), depth=3)


def test_cylinder_interval(mu4):
    lo, hi, mass = cylinder_interval(mu4, (0, 2))
    assert lo == pytest.approx(1 / 8)
    assert hi == pytest.approx(1 / 8 + (1 / 16) * (2 / 3))
    assert mass == Fraction(1, 4)
    assert cylinder_interval(mu4, ())[:2] == pytest.approx(hull(mu4))
    assert cylinder_interval(mu4, ())[2] == 1


def test_expand_and_locate(mu4):
    assert expand(mu4, 2 / 3, 5) == (2,) * 5
    assert locate(mu4, 0.5, 1) == Word((2,))
    assert locate(mu4, encode(mu4, (0, 2, 2)), 3) == Word((0, 2, 2))
    with pytest.raises(DomainError):
        locate(mu4, 0.3, 2)


def test_sample_invariant_depth_one(mu4):
    assert set(sample_invariant(mu4, 1, 1000, seed=1).tolist()) <= {0.0, 0.5}


def test_sample_invariant_moments(mu4):
    points = sample_invariant(mu4, 30, 100_000, seed=7)
    # variance de μ₄ : Σ_k Var(b) 4^{-2k} = 1/15
    sigma = np.sqrt(1 / 15 / len(points))
    assert abs(points.mean() - 1 / 3) < 4 * sigma
    assert abs(np.mean(points < 0.25) - 0.5) < 4 * np.sqrt(0.25 / len(points))


# |----------Transformées----------|
def test_ft_at_zero_is_one(mu3, mu4, mu4p, lebesgue_ifs):
    for ifs in (mu3, mu4, mu4p, lebesgue_ifs):
        assert ft_invariant(ifs, 0.0) == 1


def test_ft_zero_of_mu4p(mu4p):
    assert abs(ft_invariant(mu4p, 2.0)) < 1e-10


@pytest.mark.parametrize("t", [1, 5, 13])
def test_ft_mu4p_cosine_product(mu4p, t):
    k = np.arange(1, 61)
    expected = np.exp(-1j * np.pi * t / 3) * np.prod(np.cos(np.pi * t / 4.0 ** k))
    assert abs(ft_invariant(mu4p, t) - expected) < 1e-11


def test_ft_refinement_identity(mu3, mu4, mu4p):
    t = make_rng(3).uniform(-500, 500, size=200)
    for ifs in (mu3, mu4, mu4p):
        lhs = ft_invariant(ifs, t)
        rhs = mask(ifs, t / ifs.R) * ft_invariant(ifs, t / ifs.R)
        assert np.max(np.abs(lhs - rhs)) < 1e-11


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_ft_partition_identity(mu3, mu4, n):
    t = make_rng(n).uniform(-300, 300, size=50)
    for ifs in (mu3, mu4):
        total = ft_cylinders(ifs, n, t).sum(axis=0)
        assert np.max(np.abs(total - ft_invariant(ifs, t))) < 1e-10


def test_ft_truncation_is_certified(mu4, mu3):
    t = make_rng(11).uniform(-1000, 1000, size=100)
    for ifs in (mu3, mu4):
        coarse = ft_invariant(ifs, t, TruncationBudget(1e-12))
        fine = ft_invariant(ifs, t, TruncationBudget(1e-14))
        assert np.max(np.abs(coarse - fine)) <= 1e-12 + 1e-14


def test_truncation_budget_rejects_tolerance():
    with pytest.raises(DomainError):
        TruncationBudget(0)


def test_ft_cylinder(mu4):
    t = np.linspace(-20, 20, 41)
    np.testing.assert_allclose(ft_cylinder(mu4, (), t), ft_invariant(mu4, t))
    assert ft_cylinder(mu4, (0, 2), 0.0) == pytest.approx(0.25)


def test_ft_cylinder_monte_carlo(mu4):
    points = sample_invariant(mu4, 30, 100_000, seed=5)
    inside = points >= 0.5
    estimate = np.mean(inside * np.exp(-2j * np.pi * points))
    assert abs(ft_cylinder(mu4, (2,), 1.0) - estimate) < 4 * np.sqrt(0.5 / len(points))


def test_zero_set_of_mu4p(mu4p):
    integers = np.arange(-10_000, 10_001)
    zeros = np.array([in_zero_set(int(n)) for n in integers])
    values = np.abs(ft_invariant(mu4p, integers.astype(float)))
    assert np.all(values[zeros] < 1e-8)

    others = make_rng(17).choice(integers[~zeros], size=1000, replace=False)
    assert np.all(np.abs(ft_invariant(mu4p, others.astype(float))) > 1e-8)


# |----------Complémentaires----------|
def test_find_complement(mu4, mu3):
    assert (0, 1) in find_complement(mu4, 3)
    assert find_complement(new_ifs(4, [0, 1, 2, 3]), 3)[0] == (0,)
    assert find_complement(mu3, 10) == []


@pytest.mark.parametrize("R, B, c_max", [(4, (0, 2), 3), (4, (0, 1), 7), (9, (0, 3, 6), 8), (6, (0, 1), 5)])
def test_complements_give_complete_residues(R, B, c_max):
    ifs = new_ifs(R, B)
    complements = find_complement(ifs, c_max)
    assert complements
    for C in complements:
        assert len({(b + c) % R for b in B for c in C}) == R


def test_dual_weights(mu4p):
    nu = dual_weights(mu4p, np.arange(-3, 4))
    assert dict(nu.atoms)[0.0] == 1.0
    assert 2.0 not in nu.points and -2.0 not in nu.points


def test_dual_weights_surviving_fraction(mu4p):
    lam = 10_000
    nu = dual_weights(mu4p, np.arange(-lam, lam + 1))
    fraction = len(nu) / (2 * lam + 1)
    assert fraction == pytest.approx(2 / 3, abs=0.02)
    assert 1 - fraction == pytest.approx(1 / 3, abs=0.02)


def test_lattice_residual():
    assert lattice_residual(new_ifs(4, [0, 1, 2, 3])) < 1e-8
    assert lattice_residual(new_ifs(9, [0, 1, 2, 3, 4, 5, 6, 7, 8])) < 1e-8
    assert lattice_residual(new_ifs(4, [0, 2])) > 1e-3


def test_ft_of_full_digit_set_is_lebesgue():
    t = make_rng(11).uniform(-50, 50, size=200)
    t = t[np.abs(t) > 1e-3]
    expected = (1 - np.exp(-2j * np.pi * t)) / (2j * np.pi * t)
    np.testing.assert_allclose(ft_invariant(new_ifs(4, [0, 1, 2, 3]), t), expected, rtol=0, atol=1e-10)


def test_expand_keeps_zero_at_full_depth():
    assert expand(new_ifs(4, [0, 1, 2, 3]), 0.0, 40) == (0,) * 40
    assert expand(new_ifs(4, [0, 1, 2, 3]), 0.25, 40) == (1,) + (0,) * 39
