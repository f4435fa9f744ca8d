import numpy as np
import pytest

from fractal.errors import DomainError, SizeError, UnsupportedError, UsageError
from fractal.frame import (CylinderFunction, HermitianMatrix, counterexample_probe, discretization_sweep,
                           frame_bounds, frame_measure, gram_matrix, hermitian_extremes, jitter_sensitivity,
                           lambda_sweep, lower_bound_decay_certificate, weighted_frame)
from fractal.ifs import AffineIfs, dual_weights, ft_invariant
from fractal.measure import convolve, counting, dirac, make_atomic, mollify, translate


def dual(complement: AffineIfs, lam: int):
    return dual_weights(complement, np.arange(-lam, lam + 1))


# |----------Fonctions cylindriques----------|
def test_cylinder_function_norm(mu4):
    f = CylinderFunction.from_values(mu4, [1, 2j, 0, -1])
    assert f.level == 2
    assert f.norm_sq == pytest.approx((1 + 4 + 1) / 4)


def test_cylinder_function_refine_and_indicator(mu4):
    f = CylinderFunction.indicator(mu4, (2,), level=3)
    assert f.level == 3
    np.testing.assert_allclose(f.coefficients, [0, 0, 0, 0, 1, 1, 1, 1])
    assert f.norm_sq == pytest.approx(0.5)
    total = CylinderFunction.indicator(mu4, (0,)) + CylinderFunction.indicator(mu4, (2,))
    np.testing.assert_allclose(total.coefficients, [1, 1])


def test_cylinder_function_evaluate(mu4):
    f = 3 * CylinderFunction.indicator(mu4, (2,))
    np.testing.assert_allclose(f.evaluate([0.5, 0.1, 0.3]), [3, 0, 0])


def test_cylinder_function_ft(mu4):
    t = np.linspace(-10, 10, 21)
    np.testing.assert_allclose(CylinderFunction.constant(mu4).ft(t), ft_invariant(mu4, t), atol=1e-14)
    parts = CylinderFunction.indicator(mu4, (0,)).ft(t) + CylinderFunction.indicator(mu4, (2,)).ft(t)
    np.testing.assert_allclose(parts, ft_invariant(mu4, t), atol=1e-12)


def test_cylinder_function_errors(mu4):
    with pytest.raises(UsageError):
        CylinderFunction(mu4, 2, np.ones(3))
    with pytest.raises(UnsupportedError):
        CylinderFunction.constant(AffineIfs(2, (0, 4)))


# |----------Valeurs propres----------|
def test_hermitian_extremes():
    assert hermitian_extremes(HermitianMatrix(np.diag([1.0, 2.0, 3.0]))) == pytest.approx((1, 3))
    assert hermitian_extremes(HermitianMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))) == pytest.approx((-1, 1))


def test_hermitian_extremes_rejects_non_hermitian():
    with pytest.raises(DomainError):
        hermitian_extremes(HermitianMatrix(np.array([[0.0, 1.0], [0.0, 0.0]])))


def test_quadratic_form_matches_energy(mu4, mu4p):
    nu = dual(mu4p, 64)
    gram = gram_matrix(mu4, 2, nu)
    c = np.array([1.0, -2.0j, 0.5, 1.0 + 1.0j])
    f = CylinderFunction(mu4, 2, c)
    energy = np.sum(nu.weights * np.abs(f.ft(nu.points)) ** 2)
    assert gram.quadratic_form(c) == pytest.approx(energy, rel=1e-10)


# |----------Gram----------|
def test_gram_of_dirac_is_rank_one(mu4):
    gram = gram_matrix(mu4, 2, dirac(0.0))
    np.testing.assert_allclose(gram.data, np.full((4, 4), 1 / 16))
    report = frame_bounds(mu4, 2, dirac(0.0))
    assert report.lower == pytest.approx(0, abs=1e-12)
    assert report.upper == pytest.approx(1)


def test_gram_lebesgue_tends_to_identity(lebesgue_ifs):
    gram = gram_matrix(lebesgue_ifs, 1, counting(-2048, 2048))
    np.testing.assert_allclose(gram.data, 0.5 * np.eye(2), atol=2e-3)


def test_gram_guards(mu4):
    with pytest.raises(SizeError):
        gram_matrix(mu4, 13, dirac(0.0))
    with pytest.raises(UnsupportedError):
        gram_matrix(AffineIfs(2, (0, 4)), 1, dirac(0.0))
    with pytest.raises(UsageError):
        gram_matrix(mu4, 1, mollify(dirac(0.0), 1))


@pytest.mark.parametrize("R, B", [(3, (0, 2)), (4, (0, 2)), (4, (0, 1)), (2, (0, 1))])
def test_gram_is_positive(R, B):
    ifs = AffineIfs(R, B)
    gram = gram_matrix(ifs, 3, counting(-200, 200))
    assert gram.hermitian_residual() <= 1e-12
    assert np.linalg.eigvalsh(gram.data).min() >= -1e-10


# |----------Bornes de frame----------|
def test_lebesgue_integers_reach_parseval(lebesgue_ifs):
    report = frame_bounds(lebesgue_ifs, 3, counting(-512, 512))
    assert report.lower >= 0.95
    assert report.upper <= 1 + 1e-8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dual_weights_parseval_ceiling_and_monotone(mu4, mu4p, n):
    lowers = []
    for lam in (16, 64, 256, 1024):
        report = frame_bounds(mu4, n, dual(mu4p, lam))
        assert report.upper <= 1 + 1e-8
        lowers.append(report.lower)
    assert all(later >= earlier - 1e-12 for earlier, later in zip(lowers, lowers[1:]))


def test_dual_weights_frame_at_large_truncation(mu4, mu4p):
    report = frame_bounds(mu4, 2, dual(mu4p, 4096))
    assert report.lower >= 0.99
    assert report.upper <= 1 + 1e-8


def test_subspace_consistency(mu4, mu4p):
    nu = dual(mu4p, 256)
    reports = [frame_bounds(mu4, n, nu) for n in (1, 2, 3, 4)]
    for coarse, fine in zip(reports, reports[1:]):
        assert fine.lower <= coarse.lower + 1e-12
        assert fine.upper >= coarse.upper - 1e-12


@pytest.mark.parametrize("s", [3, -7, 0.5, 2.25])
def test_translated_integers_stay_bessel(lebesgue_ifs, s):
    lam = 64
    shifted = frame_bounds(lebesgue_ifs, 2, translate(counting(-lam, lam), s))
    assert shifted.upper <= 1 + 1e-8
    if float(s).is_integer():
        inner = frame_bounds(lebesgue_ifs, 2, counting(-lam + abs(s), lam - abs(s)))
        assert shifted.lower >= inner.lower - 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bessel_transfer(mu4, mu4p, n):
    lam = 256
    combined = AffineIfs(4, (0, 1, 2, 3))
    weighted = frame_bounds(mu4, n, dual(mu4p, lam))
    plain = frame_bounds(combined, n, counting(-lam, lam))
    assert weighted.upper <= plain.upper + 1e-6


def test_frame_report_json(mu4, mu4p):
    report = frame_bounds(mu4, 1, dual(mu4p, 16), lambda_truncation=16, measure_ref="dual")
    data = report.to_dict()
    assert set(data) == {"level", "lambda_truncation", "A", "B", "residuals", "measure_ref"}
    assert {"psd", "hermitian"} <= set(data["residuals"])


# |----------Balayages----------|
def test_lambda_sweep(lebesgue_ifs):
    sweep = lambda_sweep(lebesgue_ifs, 1, lambda lam: counting(-lam, lam), lambda0=16, lambda_max=4096)
    lambdas = [report.lambda_truncation for report in sweep.reports]
    assert lambdas == [16 * 2 ** k for k in range(len(lambdas))]
    assert sweep.lambda_star == lambdas[-1] <= 4096
    lowers = [report.lower for report in sweep.reports]
    assert all(later >= earlier - 1e-12 for earlier, later in zip(lowers, lowers[1:]))
    if sweep.converged:
        assert lowers[-1] - lowers[-2] < 1e-3


def test_lambda_sweep_does_not_stop_on_zero_lower_bound(mu4, mu4p):
    # Λ = 1, 2 : moins de N² atomes, A_2 = 0 deux fois de suite
    sweep = lambda_sweep(mu4, 2, lambda lam: dual(mu4p, int(lam)), lambda0=1, lambda_max=4096)
    assert sweep.reports[0].lower < 1e-9
    assert sweep.reports[1].lower < 1e-9
    assert len(sweep.reports) > 2
    assert sweep.reports[-1].lower > 1e-3


def test_discretization_sweep(lebesgue_ifs):
    rows = discretization_sweep(lebesgue_ifs, 1, counting(-64, 64), [0.5, 1.0, 2.0])
    assert [r for r, _ in rows] == [0.5, 1.0, 2.0]
    # r = 1 laisse les entiers en place
    assert rows[1][1].lower == pytest.approx(frame_bounds(lebesgue_ifs, 1, counting(-64, 64)).lower)


def test_jitter_without_radius_is_stable(lebesgue_ifs):
    report = jitter_sensitivity(lebesgue_ifs, 1, counting(-32, 32), 0.0, draws=2, seed=1)
    assert report.lower_range == pytest.approx((report.base.lower, report.base.lower))
    assert report.upper_range == pytest.approx((report.base.upper, report.base.upper))
    with pytest.raises(DomainError):
        jitter_sensitivity(lebesgue_ifs, 1, counting(-32, 32), -1.0)


# |----------Frames pondérées----------|
def test_weighted_frame():
    assert {weight for weight, _ in weighted_frame(counting(-3, 3))} == {1.0}
    nu = make_atomic([0, 1, 5], [4.0, 1.0, 0.25])
    again = frame_measure(weighted_frame(nu))
    assert again.atoms == nu.atoms


def test_weighted_frame_from_dual(mu4p):
    pairs = weighted_frame(dual(mu4p, 10))
    frequencies = [point for _, point in pairs]
    assert 2.0 not in frequencies
    for weight, point in pairs:
        assert weight == pytest.approx(abs(ft_invariant(mu4p, point)))


# |----------Contre-exemple----------|
def test_counterexample_probe_trivial():
    assert counterexample_probe(dirac(-7.3), 7.3) == pytest.approx(1)
    assert counterexample_probe(dirac(0), 1000) < 1e-6


def test_counterexample_probe_decays():
    nu = mollify(counting(-100, 100), 1)
    certificate = lower_bound_decay_certificate(nu, [1e2, 1e3, 1e4])
    assert certificate.decreasing
    assert certificate.ratio < 1e-2
    assert certificate.rows[0][1] == pytest.approx(0.5, abs=1e-2)


def test_decay_certificate_needs_two_rows():
    with pytest.raises(UsageError):
        lower_bound_decay_certificate(dirac(0), [10])


def test_hermitian_extremes_random_matrix():
    rng = np.random.default_rng(64)
    X = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    M = (X + X.conj().T) / 2
    expected = np.linalg.eigvalsh(M)
    lambda_min, lambda_max = hermitian_extremes(HermitianMatrix(M))
    scale = np.abs(expected).max()
    assert abs(lambda_min - expected[0]) <= 1e-10 * scale
    assert abs(lambda_max - expected[-1]) <= 1e-10 * scale


def test_convolution_with_probability_stays_bessel(mu4, mu4p):
    # B = 1 pour les poids duaux complets ; la convolution ne peut pas dépasser cette borne
    rho = make_atomic([0, 0.3, 1.7], [0.5, 0.3, 0.2])
    for n in (1, 2):
        report = frame_bounds(mu4, n, convolve(dual(mu4p, 1024), rho))
        assert report.upper <= 1 + 1e-6
