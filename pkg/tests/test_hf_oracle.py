import numpy as np
import pytest

from conftest import K28, LAM28
from nfchan.analytic import deterministic_reflector
from nfchan.errors import ValidationError
from nfchan.geometry import ArrayGeometry, PlaneSpec, make_upa
from nfchan.hf_oracle import HFConfig, hf_channel_matrix, hf_coefficient, hf_coefficients
from nfchan.surface import RoughSurface, sample_surface

SMALL = PlaneSpec.horizontal((0, 0, 0), 0.4, 0.3)
TX, RX = (0.05, 0.0, 1.5), (-0.1, 0.05, 2.0)


@pytest.fixture(scope="module")
def rough_small():
    sigma = 2.0 / K28
    return sample_surface(RoughSurface(SMALL, sigma, 2 * np.sqrt(2) * sigma), LAM28 / 8, 21)


def test_flat_full_geometry_matches_image(va):
    surf = va.surface.surface()
    real = sample_surface(surf, LAM28 / 8, 0)
    rx = va.regimes.rx_m
    c = hf_coefficient(va.tx_m, rx, real, va.k)
    cb, hbar = deterministic_reflector(ArrayGeometry.single(va.tx_m), ArrayGeometry.single(rx), surf, va.k)
    image = cb * hbar.entries[0, 0]
    assert abs(c) == pytest.approx(abs(image), rel=0.05)


def test_linear_in_passivity(rough_small):
    half = sample_surface(RoughSurface(SMALL, rough_small.parent.sigma_z, rough_small.parent.corr_len, 0.5),
                          LAM28 / 8, 21)
    assert hf_coefficient(TX, RX, half, K28) == pytest.approx(0.5 * hf_coefficient(TX, RX, rough_small, K28),
                                                              rel=1e-12)


def test_reciprocity(rough_small):
    assert hf_coefficient(TX, RX, rough_small, K28) == pytest.approx(hf_coefficient(RX, TX, rough_small, K28),
                                                                     rel=1e-6)


def test_one_by_one_matrix(rough_small):
    m = hf_channel_matrix(ArrayGeometry.single(TX), ArrayGeometry.single(RX), rough_small, K28)
    assert m.provenance == "oracle" and m.shape == (1, 1)
    assert m.entries[0, 0] == hf_coefficient(TX, RX, rough_small, K28)


def test_matrix_reciprocity(rough_small):
    a = make_upa(TX, 2, 1, LAM28 / 2)
    b = make_upa(RX, 1, 3, LAM28 / 2)
    hab = hf_channel_matrix(a, b, rough_small, K28).entries
    hba = hf_channel_matrix(b, a, rough_small, K28).entries
    np.testing.assert_allclose(hab, hba.T, rtol=1e-6)


def test_flat_two_by_two_equal_magnitudes():
    plane = PlaneSpec.horizontal((0, 0, 0), 1.0, 1.0)
    real = sample_surface(RoughSurface(plane), LAM28 / 8, 0)
    tx = make_upa((0, 0, 4.0), 2, 1, LAM28 / 2, ((1, 0, 0), (0, 1, 0)))
    rx = make_upa((0.1, 0, 3.0), 1, 2, LAM28 / 2, ((1, 0, 0), (0, 1, 0)))
    mags = np.abs(hf_channel_matrix(tx, rx, real, K28).entries)
    assert mags.max() / mags.min() - 1 < 0.01


def test_block_size_bit_stable(rough_small):
    cfg = HFConfig(block_rows=17)
    a = hf_coefficient(TX, RX, rough_small, K28, cfg)
    assert a == hf_coefficient(TX, RX, rough_small, K28, cfg)
    # other block sizes agree to rounding
    assert a == pytest.approx(hf_coefficient(TX, RX, rough_small, K28), rel=1e-6)


def test_multi_receiver_matches_single(rough_small):
    many = hf_coefficients(TX, [RX, (0.0, 0.0, 1.0)], rough_small, K28)
    assert many[0] == hf_coefficient(TX, RX, rough_small, K28)


@pytest.mark.parametrize("tx, rx", [((0, 0, -1.0), RX), (TX, (0, 0, 0.0))])
def test_points_must_be_above_plane(rough_small, tx, rx):
    with pytest.raises(ValidationError):
        hf_coefficient(tx, rx, rough_small, K28)


def test_coarse_grid_rejected():
    real = sample_surface(RoughSurface(SMALL), LAM28 / 3, 0)
    with pytest.raises(ValidationError):
        hf_coefficient(TX, RX, real, K28)


def test_config_validation():
    with pytest.raises(ValidationError):
        HFConfig(grid_step=0.0)
    assert HFConfig().step_for(K28) == pytest.approx(LAM28 / 8)


def test_constant_amplitude_mode_is_close(rough_small):
    exact = hf_coefficient(TX, RX, rough_small, K28)
    approx = hf_coefficient(TX, RX, rough_small, K28, HFConfig(use_exact_amplitude=False))
    assert abs(approx - exact) / abs(exact) < 0.2


def test_grid_convergence_on_reference_geometry(va):
    # same band-limited realization sampled at lambda/8 and lambda/16
    sigma = LAM28 / 2
    surf = RoughSurface(va.surface.plane(), sigma, 2 * np.sqrt(2) * sigma)
    coarse = sample_surface(surf, LAM28 / 8, 3)
    fine = sample_surface(surf, LAM28 / 8, 3, oversample=2)
    c1 = hf_coefficient(va.tx_m, va.regimes.rx_m, coarse, va.k)
    c2 = hf_coefficient(va.tx_m, va.regimes.rx_m, fine, va.k)
    assert abs(abs(c2) / abs(c1) - 1) < 0.01
