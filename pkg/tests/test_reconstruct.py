import numpy as np
import pytest

from fractal.errors import DomainError, UsageError
from fractal.frame import CylinderFunction
from fractal.ifs import AffineIfs
from fractal.reconstruct import (SplitSystem, base_norm, boundary_distance, extract_digits, factorization_residual,
                                 fourier_reconstruct, pf_value, project_p, transfer_norm)


@pytest.fixture
def split() -> SplitSystem:
    return SplitSystem.from_digits(4, [0, 2], [0, 1])


# |----------Décomposition----------|
def test_split_system(split):
    assert split.combined.digits == (0, 1, 2, 3)
    assert split.split(3) == (2, 1)
    assert split.split(1) == (0, 1)


@pytest.mark.parametrize("B, C", [([0, 1], [0, 1]), ([0, 2], [0, 4])])
def test_split_system_rejects(B, C):
    with pytest.raises(DomainError):
        SplitSystem.from_digits(4, B, C)


def test_split_system_needs_same_scale():
    with pytest.raises(DomainError):
        SplitSystem(AffineIfs(4, (0, 2)), AffineIfs(3, (0, 1)))


def test_factorization(split):
    assert factorization_residual(split, np.linspace(-50, 50, 101)) < 1e-10


# |----------Projection----------|
def test_extract_digits_of_zero(split):
    assert extract_digits(split, 0.0) == (0,) * 40
    assert project_p(split, 0.0) == 0


def test_project_p(split):
    assert project_p(split, 0.75) == pytest.approx(0.5)
    assert project_p(split, 0.0) == 0
    np.testing.assert_allclose(project_p(split, [0.25, 0.75]), [0.0, 0.5])
    with pytest.raises(DomainError):
        project_p(split, 1.5)


def test_pf_value(split, mu4):
    f = CylinderFunction.indicator(mu4, (2,))
    assert pf_value(split, f, 0.75) == 1
    assert pf_value(split, f, 0.25) == 0


def test_transfer_norm_preserves_l2(split, mu4):
    f = CylinderFunction.indicator(mu4, (2,))
    assert base_norm(f) ** 2 == pytest.approx(0.5)
    count = 100_000
    estimate = transfer_norm(split, f, 2, count=count, seed=3) ** 2
    assert abs(estimate - 0.5) < 4 * np.sqrt(0.25 / count)
    assert transfer_norm(split, f, np.inf, count=1000, seed=3) == 1


def test_transfer_norm_errors(split, mu3, mu4):
    with pytest.raises(UsageError):
        transfer_norm(split, CylinderFunction.constant(mu4), 3)
    with pytest.raises(UsageError):
        transfer_norm(split, CylinderFunction.constant(mu3))


# |----------Reconstruction----------|
@pytest.mark.parametrize("t", [1 / 8, 1 / 3, 1 / 2])
def test_reconstruct_constant(split, mu4, t):
    report = fourier_reconstruct(split, CylinderFunction.constant(mu4), t, cutoff=200, quad_step=1 / 64)
    assert abs(report.value - 1) < 0.05
    assert report.richardson_residual < 1e-3


@pytest.mark.parametrize("t", [1 / 2, 1 / 3])
def test_reconstruct_converges_with_cutoff(split, mu4, t):
    f = CylinderFunction.constant(mu4)
    errors = [abs(fourier_reconstruct(split, f, t, cutoff=X).value - 1) for X in (50, 100, 200, 400)]
    assert all(later < earlier for earlier, later in zip(errors, errors[1:]))


def test_reconstruct_indicator(split, mu4):
    f = CylinderFunction.indicator(mu4, (2,))
    assert abs(fourier_reconstruct(split, f, 0.75).value - 1) < 0.05
    assert abs(fourier_reconstruct(split, f, 0.25).value) < 0.05


def test_reconstruct_flags_cylinder_edges(split, mu4):
    f = CylinderFunction.indicator(mu4, (2,))
    assert boundary_distance(split, f, 0.5) == 0
    assert fourier_reconstruct(split, f, 0.5, cutoff=50).near_boundary
    assert not fourier_reconstruct(split, f, 0.6, cutoff=50).near_boundary


def test_reconstruct_errors(split, mu4, mu3):
    with pytest.raises(DomainError):
        fourier_reconstruct(split, CylinderFunction.constant(mu4), 0.5, cutoff=0)
    with pytest.raises(DomainError):
        fourier_reconstruct(split, CylinderFunction.constant(mu4), 0.5, quad_step=-1)
    with pytest.raises(UsageError):
        fourier_reconstruct(split, CylinderFunction.constant(mu3), 0.5)


def test_reconstruct_is_linear(split, mu4):
    f = CylinderFunction.indicator(mu4, (2,))
    g = CylinderFunction.from_values(mu4, [1, 0.5j])
    for t in (0.2, 0.6):
        combined = fourier_reconstruct(split, 2 * f + (-3j) * g, t, cutoff=100).value
        parts = 2 * fourier_reconstruct(split, f, t, cutoff=100).value \
            - 3j * fourier_reconstruct(split, g, t, cutoff=100).value
        assert abs(combined - parts) < 1e-9
