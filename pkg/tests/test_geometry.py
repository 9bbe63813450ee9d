import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nfchan.errors import ValidationError
from nfchan.geometry import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    PlaneSpec,
    Point3,
    make_ula,
    make_upa,
    mirror_array,
    mirror_point,
    nf_array_response,
    wavelength,
    wavenumber,
)

coord = st.floats(-50, 50, allow_nan=False)
vec3 = st.tuples(coord, coord, coord)
direction = vec3.filter(lambda v: np.linalg.norm(v) > 1e-3)


@st.composite
def planes(draw):
    n = np.asarray(draw(direction))
    return PlaneSpec.from_normal(draw(vec3), n, 2.0, 3.0)


def test_wavelength_uses_exact_speed_of_light():
    assert wavelength(60e9) == SPEED_OF_LIGHT / 60e9
    assert wavenumber(28e9) == pytest.approx(2 * np.pi * 28e9 / 299_792_458.0, rel=1e-15)
    with pytest.raises(ValidationError):
        wavelength(0.0)


def test_point_rejects_non_finite():
    with pytest.raises(ValidationError):
        Point3(0.0, np.nan, 1.0)
    with pytest.raises(ValidationError):
        Point3.of([1.0, 2.0])


def test_upa_single_element():
    arr = make_upa((0, 0, 0), 1, 1, 0.005)
    assert arr.n == 1
    np.testing.assert_array_equal(arr.positions, [[0.0, 0.0, 0.0]])


def test_upa_extent_400_by_10_at_60ghz():
    lam = SPEED_OF_LIGHT / 60e9
    arr = make_upa((0, 0, 0), 400, 10, lam / 2)
    ext = np.ptp(arr.positions, axis=0)
    # (N - 1) * c / (2 f), recomputed with the exact speed of light
    assert ext[1] == pytest.approx(0.99680992285, abs=1e-11)
    assert ext[2] == pytest.approx(0.02248443435, abs=1e-11)
    assert ext[0] == 0.0


@pytest.mark.parametrize("spacing", [0.0, -1e-3])
def test_upa_rejects_non_positive_spacing(spacing):
    with pytest.raises(ValidationError):
        make_upa((0, 0, 0), 2, 2, spacing)


@pytest.mark.parametrize("axes", [((1, 0, 0), (1, 1e-6, 0)), ((2, 0, 0), (0, 1, 0)), ((1, 0, 0), (0.5, 0.5, 0))])
def test_upa_rejects_non_orthonormal_axes(axes):
    with pytest.raises(ValidationError):
        make_upa((0, 0, 0), 2, 2, 0.01, axes)


@given(center=vec3, n_u=st.integers(1, 12), n_v=st.integers(1, 12), spacing=st.floats(1e-4, 1.0))
def test_upa_centered_grid_invariants(center, n_u, n_v, spacing):
    arr = make_upa(center, n_u, n_v, spacing)
    assert arr.n == n_u * n_v
    np.testing.assert_allclose(arr.center.array, center, atol=1e-12 * (1 + np.abs(center).max()))
    grid = arr.positions.reshape(n_u, n_v, 3)
    if n_u > 1:
        np.testing.assert_allclose(np.linalg.norm(np.diff(grid, axis=0), axis=-1), spacing, atol=1e-12)
    if n_v > 1:
        np.testing.assert_allclose(np.linalg.norm(np.diff(grid, axis=1), axis=-1), spacing, atol=1e-12)


def test_upa_row_major_order():
    arr = make_upa((0, 0, 0), 3, 2, 1.0)
    # element k = i * n_v + j
    np.testing.assert_allclose(arr.positions[1] - arr.positions[0], [0, 0, 1])
    np.testing.assert_allclose(arr.positions[2] - arr.positions[0], [0, 1, 0])


def test_ula_spacing_and_axis():
    arr = make_ula((1, 2, 3), 5, 0.25, axis=(1, 0, 0))
    np.testing.assert_allclose(np.diff(arr.positions[:, 0]), 0.25, atol=1e-12)
    np.testing.assert_allclose(arr.center.array, [1, 2, 3], atol=1e-12)


def test_array_is_immutable():
    arr = make_upa((0, 0, 0), 2, 2, 0.1)
    with pytest.raises(ValueError):
        arr.positions[0, 0] = 5.0
    with pytest.raises(ValidationError):
        ArrayGeometry(np.empty((0, 3)))


def test_plane_validation():
    with pytest.raises(ValidationError):
        PlaneSpec(Point3(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 0, 0), 1.0, 1.0)
    with pytest.raises(ValidationError):
        PlaneSpec.horizontal(length_x=0.0)


@given(planes())
def test_plane_axes_orthonormal(plane):
    basis = np.stack([plane.n_vec, plane.u_vec, plane.v_vec])
    np.testing.assert_allclose(basis @ basis.T, np.eye(3), atol=1e-12)


@pytest.mark.parametrize(
    "p, plane, expected",
    [
        ((0, 0, 90), PlaneSpec.horizontal(), (0, 0, -90)),
        ((13, -13, -5), PlaneSpec.from_normal((15, 0, 0), (1, 0, 0), 1, 1), (17, -13, -5)),
        ((13, -13, -5), PlaneSpec.from_normal((15, -22, 0), (-1, 0, 0), 10, 10), (17, -13, -5)),
    ],
)
def test_mirror_point_examples(p, plane, expected):
    np.testing.assert_allclose(mirror_point(p, plane).array, expected, atol=1e-12)


def test_mirror_point_fixed_on_plane():
    plane = PlaneSpec.from_normal((1, 2, 3), (1, 1, 0), 1, 1)
    on = plane.to_global([0.3, -0.2, 0.0])
    np.testing.assert_allclose(mirror_point(on, plane).array, on, atol=1e-12)


@given(p=vec3, plane=planes())
def test_mirror_is_involution(p, plane):
    back = mirror_point(mirror_point(p, plane), plane)
    np.testing.assert_allclose(back.array, p, atol=1e-12 * (1 + 4 * 50))


@given(p=vec3, q=vec3, plane=planes())
def test_image_distance_symmetry(p, q, plane):
    d1 = Point3.of(p).distance(mirror_point(q, plane))
    d2 = mirror_point(p, plane).distance(q)
    assert d1 == pytest.approx(d2, abs=1e-10)


def test_mirror_array_matches_pointwise():
    plane = PlaneSpec.from_normal((0, 0, 1), (0.2, 0.1, 1), 1, 1)
    arr = make_upa((0.3, 0.1, 4), 3, 2, 0.1)
    m = mirror_array(arr, plane)
    for a, b in zip(arr.positions, m.positions):
        np.testing.assert_allclose(mirror_point(a, plane).array, b, atol=1e-12)


def test_response_single_element():
    k, d = 587.0, 3.2
    r = nf_array_response(ArrayGeometry.single((0, 0, 0)), (d, 0, 0), k)
    np.testing.assert_allclose(r, [np.exp(1j * k * d)], rtol=1e-14)


def test_response_focus_on_element_is_defined():
    r = nf_array_response(ArrayGeometry.single((1, 1, 1)), (1, 1, 1), 10.0)
    assert r[0] == 1.0


def test_response_broadside_symmetry():
    lam = 0.01
    arr = make_ula((0, 0, 0), 2, lam / 2, axis=(0, 1, 0))
    r = nf_array_response(arr, (5.0, 0, 0), 2 * np.pi / lam)
    assert r[0] == pytest.approx(r[1], abs=1e-12)


def test_response_requires_positive_wavenumber():
    with pytest.raises(ValidationError):
        nf_array_response(ArrayGeometry.single((0, 0, 0)), (1, 0, 0), 0.0)


@given(focus=vec3, k=st.floats(1.0, 2000.0), n=st.integers(1, 6))
def test_response_unit_modulus(focus, k, n):
    arr = make_upa((0.1, -0.2, 0.3), n, 2, 0.005)
    np.testing.assert_allclose(np.abs(nf_array_response(arr, focus, k)), 1.0, atol=1e-12)


@given(focus=vec3, shift=vec3)
def test_response_translation_invariant(focus, shift):
    k = 100.0
    arr = make_upa((0, 0, 0), 3, 2, 0.05)
    a = nf_array_response(arr, focus, k)
    b = nf_array_response(arr.translated(shift), np.add(focus, shift), k)
    # relative geometry only; phase error from rounding of |u - f| at 1e-13 m scale
    np.testing.assert_allclose(np.angle(b / a), 0.0, atol=1e-9)
