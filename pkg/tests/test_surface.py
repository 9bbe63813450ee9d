import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nfchan.errors import ValidationError
from nfchan.geometry import PlaneSpec
from nfchan.surface import (
    ResolutionWarning,
    RoughSurface,
    empirical_autocorr,
    export_realization,
    read_realization_dump,
    realization_seed,
    sample_surface,
)

UNIT = PlaneSpec.horizontal((0, 0, 0), 1.0, 1.0)


@pytest.fixture(scope="module")
def correlated_ensemble():
    """50 fields of 1 x 1 m at 1 mm, sigma 1 mm, l = 10 mm (a (100 l)^2 surface)."""
    surf = RoughSurface(UNIT, 1e-3, 10e-3)
    return [sample_surface(surf, 1e-3, realization_seed(11, k)) for k in range(50)]


def test_surface_parameter_validation():
    with pytest.raises(ValidationError):
        RoughSurface(UNIT, -1e-3)
    with pytest.raises(ValidationError):
        RoughSurface(UNIT, 1e-3, -1.0)
    with pytest.raises(ValidationError):
        RoughSurface(UNIT, passivity=0.0)
    with pytest.raises(ValidationError):
        RoughSurface(UNIT, passivity=1.2)


def test_flat_field_is_zero():
    real = sample_surface(RoughSurface(UNIT, 0.0, 0.03), 0.01, 5)
    assert real.shape == (100, 100)
    assert not real.heights.any()


@pytest.mark.parametrize("corr_len", [0.0, 0.03])
def test_same_seed_is_bit_identical(corr_len):
    surf = RoughSurface(UNIT, 2e-3, corr_len)
    a = sample_surface(surf, 0.01, 42)
    b = sample_surface(surf, 0.01, 42)
    assert a.heights.tobytes() == b.heights.tobytes()
    c = sample_surface(surf, 0.01, 43)
    assert not np.array_equal(a.heights, c.heights)


def test_grid_covers_plane():
    plane = PlaneSpec.horizontal((0, 0, 0), 0.3, 0.2)
    real = sample_surface(RoughSurface(plane, 1e-3), 0.007, 0)
    assert real.step_u <= 0.007 and real.step_v <= 0.007
    assert real.shape[0] * real.step_u == pytest.approx(0.3)
    assert real.shape[1] * real.step_v == pytest.approx(0.2)
    assert real.u[0] == pytest.approx(-0.15 + real.step_u / 2)


@pytest.mark.parametrize("step", [0.0, -0.1, 0.26])
def test_grid_step_preconditions(step):
    with pytest.raises(ValidationError):
        sample_surface(RoughSurface(UNIT, 1e-3), step, 0)


def test_coarse_grid_warns():
    with pytest.warns(ResolutionWarning):
        sample_surface(RoughSurface(UNIT, 1e-3, 0.01), 0.02, 0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        sample_surface(RoughSurface(UNIT, 1e-3, 0.04), 0.02, 0)


def test_autocorr_at_correlation_length(correlated_ensemble):
    vals = [empirical_autocorr(r, 10e-3) for r in correlated_ensemble]
    assert np.mean(vals) == pytest.approx(np.exp(-1.0), abs=0.05)


def test_height_variance_within_five_percent(correlated_ensemble):
    var = np.mean([np.mean(r.heights**2) for r in correlated_ensemble])
    assert var == pytest.approx(1e-6, rel=0.05)
    assert abs(np.mean([r.heights.mean() for r in correlated_ensemble])) < 1e-4


@pytest.mark.parametrize("axis", [0, 1])
def test_autocorr_shape_along_axes(correlated_ensemble, axis):
    lags = (5e-3, 10e-3, 20e-3)
    emp = [np.mean([empirical_autocorr(r, lag, axis) for r in correlated_ensemble[:10]]) for lag in lags]
    np.testing.assert_allclose(emp, [np.exp(-(lag / 10e-3) ** 2) for lag in lags], atol=0.05)


def test_autocorr_lag_zero_is_one():
    real = sample_surface(RoughSurface(UNIT, 1e-3, 0.02), 0.005, 3)
    assert empirical_autocorr(real, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_autocorr_undefined_for_flat_field():
    real = sample_surface(RoughSurface(UNIT, 0.0), 0.01, 0)
    with pytest.raises(ValidationError):
        empirical_autocorr(real, 0.01)


@pytest.mark.parametrize("lag", [0.0123, 0.6, -0.01])
def test_autocorr_lag_out_of_range(lag):
    real = sample_surface(RoughSurface(UNIT, 1e-3), 0.01, 0)
    with pytest.raises(ValidationError):
        empirical_autocorr(real, lag)


def test_uncorrelated_field_lag_one_step():
    real = sample_surface(RoughSurface(UNIT, 1e-3, 0.0), 0.004, 9)
    assert abs(empirical_autocorr(real, 0.004)) < 0.05
    assert np.var(real.heights) == pytest.approx(1e-6, rel=0.05)


@pytest.mark.parametrize("corr_len", [0.0, 0.021])
def test_oversampled_field_contains_coarse_field(corr_len):
    # with an odd factor the middle fine cell sits on the coarse midpoint
    surf = RoughSurface(PlaneSpec.horizontal((0, 0, 0), 0.3, 0.25), 1e-3, corr_len)
    coarse = sample_surface(surf, 0.0033, 4)
    fine = sample_surface(surf, 0.0033, 4, oversample=3)
    assert fine.shape == (3 * coarse.shape[0], 3 * coarse.shape[1])
    np.testing.assert_allclose(fine.heights[1::3, 1::3], coarse.heights, atol=1e-15)


def test_scaled_equals_resampled():
    surf = RoughSurface(UNIT, 1.0, 0.05)
    base = sample_surface(surf, 0.01, 8)
    np.testing.assert_allclose(base.scaled(2e-3).heights, sample_surface(surf.with_sigma(2e-3), 0.01, 8).heights,
                               rtol=1e-15)


@given(st.integers(0, 2**40), st.integers(0, 10_000))
def test_realization_seed_is_deterministic(base, k):
    assert realization_seed(base, k) == realization_seed(base, k)
    assert realization_seed(base, k) != realization_seed(base, k + 1)


def test_export_round_trip(tmp_path):
    surf = RoughSurface(PlaneSpec.horizontal((0, 0, 0), 0.2, 0.1), 1e-3, 0.01)
    real = sample_surface(surf, 0.005, realization_seed(1, 2))
    path = tmp_path / "field.bin"
    export_realization(real, path)
    header, z = read_realization_dump(path)
    assert (header["n_u"], header["n_v"]) == real.shape
    assert header["seed"] == real.seed
    assert header["corr_len"] == 0.01
    np.testing.assert_array_equal(z, real.heights)
    assert path.stat().st_size == 48 + 8 * z.size
