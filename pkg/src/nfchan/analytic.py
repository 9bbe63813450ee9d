"""Closed-form channel components for near-field links with rough reflectors.

Gain convention
---------------
Coefficients use the *field* convention of the numerical oracle: a free-space
link of length d has gain exp(j k d)/d, and a flat reflector of passivity
zeta behaves like its mirror image, zeta * exp(j k d_v)/d_v. Physical path
loss is layered on top by one constant (see ``PathLossModel``). The literal
prefactor zeta/(j lambda) is still available through ``convention="literal"``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import NumericalError, ValidationError
from .geometry import ArrayGeometry, PlaneSpec, as_array, distances, mirror_array, mirror_point
from .special import sinc

Convention = Literal["field", "literal"]
PROVENANCES = ("oracle", "analytic-deterministic", "analytic-sampled")


@dataclass(frozen=True)
class ChannelMatrix:
    entries: np.ndarray
    provenance: str

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCES:
            raise ValidationError(f"unknown provenance {self.provenance!r}")
        e = np.atleast_2d(np.asarray(self.entries, dtype=complex))
        if e.ndim != 2:
            raise ValidationError("channel entries must be a matrix")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def to_json(self) -> dict:
        return {
            "provenance": self.provenance,
            "entries": [[[float(c.real), float(c.imag)] for c in row] for row in self.entries],
        }

    def __add__(self, other: "ChannelMatrix") -> "ChannelMatrix":
        prov = self.provenance if self.provenance == other.provenance else "analytic-sampled"
        return ChannelMatrix(self.entries + other.entries, prov)


def _positions(x) -> np.ndarray:
    if isinstance(x, ArrayGeometry):
        return x.positions
    return np.atleast_2d(np.asarray([as_array(p) for p in np.atleast_2d(x)]))


def los_matrix(tx: ArrayGeometry, rx: ArrayGeometry, wavenumber: float) -> ChannelMatrix:
    return ChannelMatrix(np.exp(1j * wavenumber * distances(rx.positions, tx.positions)), "analytic-deterministic")


def scatterer_matrix(tx: ArrayGeometry, rx: ArrayGeometry, scatterer, wavenumber: float) -> ChannelMatrix:
    s = as_array(scatterer)
    dt = np.linalg.norm(tx.positions - s, axis=1)
    dr = np.linalg.norm(rx.positions - s, axis=1)
    if np.any(dt == 0) or np.any(dr == 0):
        raise ValidationError("scatterer coincides with an antenna element")
    return ChannelMatrix(np.outer(np.exp(1j * wavenumber * dr), np.exp(1j * wavenumber * dt)), "analytic-deterministic")


def roughness_attenuation(g) -> np.ndarray | float:
    g = np.asarray(g, dtype=float)
    if np.any(g < 0):
        raise ValidationError("g must be non-negative")
    out = np.exp(-g / 2.0)
    return float(out) if out.ndim == 0 else out


def incidence_cosines(tx, rx, plane: PlaneSpec) -> tuple[float, float]:
    """cos of the angles between the plane normal and the center-to-Tx / center-to-Rx directions."""
    c = plane.origin.array
    t = as_array(tx) - c
    r = as_array(rx) - c
    n = plane.n_vec
    return float(t @ n / np.linalg.norm(t)), float(r @ n / np.linalg.norm(r))


def kappa_z(tx, rx, plane: PlaneSpec, wavenumber: float) -> float:
    ct, cr = incidence_cosines(tx, rx, plane)
    return wavenumber * (ct + cr)


def roughness_g(sigma_z: float, kz: float) -> float:
    return float((kz * sigma_z) ** 2)


def _check_above(plane: PlaneSpec, pts: np.ndarray) -> None:
    h = (np.atleast_2d(pts) - plane.origin.array) @ plane.n_vec
    if np.any(h <= 0):
        raise ValidationError("antennas must lie strictly on the positive side of the reflector")


def deterministic_reflector(
    tx: ArrayGeometry,
    rx: ArrayGeometry,
    surface,
    wavenumber: float,
    convention: Convention = "field",
    formulation: Literal["virtual_rx", "virtual_tx"] = "virtual_rx",
) -> tuple[complex, ChannelMatrix]:
    """Specular component: gain c_bar(g) and the image-theory matrix H_bar.

    ``H_bar[m, n] = exp(j k |u_vrx,m - u_tx,n|)``; the ``virtual_tx`` formulation
    mirrors the transmitter instead and gives the same matrix.
    """
    plane = surface.plane
    _check_above(plane, tx.positions)
    _check_above(plane, rx.positions)
    if formulation == "virtual_rx":
        d = distances(mirror_array(rx, plane).positions, tx.positions)
    elif formulation == "virtual_tx":
        d = distances(rx.positions, mirror_array(tx, plane).positions)
    else:
        raise ValidationError(f"unknown formulation {formulation!r}")
    h_bar = ChannelMatrix(np.exp(1j * wavenumber * d), "analytic-deterministic")

    tc, rc = tx.center, rx.center
    g = roughness_g(surface.sigma_z, kappa_z(tc, rc, plane, wavenumber))
    d_v = mirror_point(rc, plane).distance(tc)
    c_bar = surface.passivity * np.exp(-g / 2.0) / d_v
    if convention == "literal":
        lam = 2.0 * np.pi / wavenumber
        c_bar = c_bar / (1j * lam)
    elif convention != "field":
        raise ValidationError(f"unknown convention {convention!r}")
    return complex(c_bar), h_bar


# --- spatial correlation ------------------------------------------------------

def _surface_grid(plane: PlaneSpec, n: int) -> tuple[np.ndarray, float]:
    su = -plane.length_u / 2 + (np.arange(n) + 0.5) * plane.length_u / n
    sv = -plane.length_v / 2 + (np.arange(n) + 0.5) * plane.length_v / n
    gu, gv = np.meshgrid(su, sv, indexing="ij")
    pts = plane.origin.array + gu[..., None] * plane.u_vec + gv[..., None] * plane.v_vec
    return pts, plane.area / n**2


def _pair_phase(pair: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """d * sin(elevation) of each surface point in the pair's local frame.

    The local z axis points from the first to the second element and the
    origin sits at their midpoint, so exp(j k d sin) approximates
    exp(j k (|u - p0| - |u - p1|)).
    """
    p0, p1 = pair
    sep = p1 - p0
    mid = 0.5 * (p0 + p1)
    rel = pts - mid
    return (rel @ sep) / np.linalg.norm(rel, axis=-1)


def pair_in_far_field(pair: np.ndarray, plane: PlaneSpec, wavelength: float) -> bool:
    pair = np.asarray(pair, dtype=float)
    d = np.linalg.norm(pair[1] - pair[0])
    dist = np.linalg.norm(0.5 * (pair[0] + pair[1]) - plane.origin.array)
    return 2.0 * d * d / wavelength < dist


def spatial_correlation_integral(tx_pair, rx_pair, plane: PlaneSpec, wavenumber: float, n_quad: int = 400) -> complex:
    """Surface average of exp(j k (d_rx sin th_rx(u) + d_tx sin th_tx(u))).

    Each pair is ``(first, second)`` element positions; the value models
    E{c_first c_second^*} / E{|c|^2} under full scattering.
    """
    if not plane.area > 0:
        raise ValidationError("zero-area surface")
    tx_pair = np.asarray([as_array(p) for p in tx_pair])
    rx_pair = np.asarray([as_array(p) for p in rx_pair])
    lam = 2 * np.pi / wavenumber
    for pair in (tx_pair, rx_pair):
        if not pair_in_far_field(pair, plane, lam):
            warnings.warn("element separation violates the far-pair assumption", RuntimeWarning, stacklevel=2)
    pts, _ = _surface_grid(plane, n_quad)
    phase = np.zeros(pts.shape[:-1])
    for pair in (tx_pair, rx_pair):
        if np.linalg.norm(pair[1] - pair[0]) > 0:
            phase += _pair_phase(pair, pts)
    return complex(np.mean(np.exp(1j * wavenumber * phase)))


def elevation_window(ref, direction, plane: PlaneSpec, n_quad: int = 400) -> tuple[float, float]:
    """Range [theta1, theta2] of surface elevation angles seen from ``ref``.

    Elevation is measured from the plane orthogonal to ``direction``.
    """
    e = np.asarray(direction, dtype=float)
    e = e / np.linalg.norm(e)
    pts, _ = _surface_grid(plane, n_quad)
    rel = pts - as_array(ref)
    s = (rel @ e) / np.linalg.norm(rel, axis=-1)
    return float(np.arcsin(s.min())), float(np.arcsin(s.max()))


def spatial_correlation_sinc(d: float, theta1: float, theta2: float, wavelength: float) -> float:
    """|R| for isotropic scattering confined to elevations (theta1, theta2)."""
    if not theta1 < theta2:
        raise ValidationError("theta1 must be smaller than theta2")
    arg = 2.0 * d / wavelength * np.cos((theta2 + theta1) / 2.0) * np.sin((theta2 - theta1) / 2.0)
    return float(abs(sinc(arg)))


def correlation_aligned(d: float, theta_c: float, wavelength: float) -> float:
    return float(abs(sinc(2.0 * d / wavelength * np.sin(theta_c / 2.0) ** 2)))


def correlation_perpendicular(d: float, theta_c: float, wavelength: float) -> float:
    return float(abs(sinc(2.0 * d / wavelength * np.sin(theta_c / 2.0))))


# --- power gains ----------------------------------------------------------------

def c_tilde_inf_sq(
    tx, rx, surface, wavenumber: float, a_rx: float | None = None, d_tx: float = 1.0,
    d_r: float = 2.0, convention: Convention = "field",
) -> float:
    """Full-scattering power gain from energy conservation.

    Physical ratio P_rx/P_tx = (A_rx D_r / 4 pi u_rx^2)(A_r D_tx / 4 pi u_tx^2) with
    u measured from the reflector center. The field convention rescales by
    (4 pi / lambda)^2, the ratio between field-normalized and physical
    free-space gains, and applies zeta^2. The literal form uses zeta/lambda.
    """
    lam = 2 * np.pi / wavenumber
    if a_rx is None:
        a_rx = lam**2 / (4 * np.pi)
    c = surface.plane.origin.array
    u_tx = np.linalg.norm(as_array(tx) - c)
    u_rx = np.linalg.norm(as_array(rx) - c)
    if not (a_rx > 0 and u_tx > 0 and u_rx > 0):
        raise ValidationError("areas and distances must be positive")
    physical = (a_rx * d_r / (4 * np.pi * u_rx**2)) * (surface.plane.area * d_tx / (4 * np.pi * u_tx**2))
    if convention == "field":
        return float(surface.passivity**2 * physical * (4 * np.pi / lam) ** 2)
    if convention == "literal":
        return float(surface.passivity / lam * physical)
    raise ValidationError(f"unknown convention {convention!r}")


def power_gain_uncorrelated(c_bar_flat_sq: float, c_inf_sq: float, g: float) -> tuple[float, float, float]:
    """(|c_inf|^2, stochastic power, total power) of the uncorrelated-surface model."""
    if g < 0 or c_bar_flat_sq < 0 or c_inf_sq < 0:
        raise ValidationError("powers and g must be non-negative")
    stoch = (1.0 - np.exp(-g / 2.0)) ** 2 * c_inf_sq
    total = c_bar_flat_sq * np.exp(-g) + stoch
    return float(c_inf_sq), float(stoch), float(total)


def _incidence_params(p, plane: PlaneSpec) -> tuple[float, float]:
    """(a, phi): sine of the angle from the normal and in-plane azimuth of the direction to ``p``."""
    loc = plane.to_local(as_array(p))
    r = np.linalg.norm(loc)
    return float(np.hypot(loc[0], loc[1]) / r), float(np.arctan2(loc[1], loc[0]))


@dataclass(frozen=True)
class KappaRhoCandidates:
    amplitude_sin2: float
    amplitude_as_printed: float
    amplitude_fit: float
    selected: str


def kappa_rho_candidates(tx, rx, plane: PlaneSpec, n_phi: int = 4096) -> KappaRhoCandidates:
    """Both amplitude formulas for a cos(phi - phi_tx) + a_rx cos(phi - phi_rx).

    The fit samples the sum over phi in [0, 2 pi) and takes its peak
    magnitude; the candidate closest to it is selected.
    """
    a_t, p_t = _incidence_params(tx, plane)
    a_r, p_r = _incidence_params(rx, plane)
    phi_c = p_t - p_r
    sin2 = np.sqrt((a_t + a_r * np.cos(phi_c)) ** 2 + (a_r * np.sin(phi_c)) ** 2)
    printed = np.sqrt((a_t + a_r * np.cos(phi_c)) ** 2 + a_r**2)
    phi = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    f = a_t * np.cos(phi - p_t) + a_r * np.cos(phi - p_r)
    # project onto the first harmonic for an exact amplitude estimate
    fit = float(2.0 * abs(np.mean(f * np.exp(-1j * phi))))
    sel = "sin2" if abs(sin2 - fit) <= abs(printed - fit) else "as_printed"
    return KappaRhoCandidates(float(sin2), float(printed), fit, sel)


def kappa_rho(tx, rx, plane: PlaneSpec, wavenumber: float) -> float:
    cand = kappa_rho_candidates(tx, rx, plane)
    amp = cand.amplitude_sin2 if cand.selected == "sin2" else cand.amplitude_as_printed
    return float(wavenumber * amp)


def s_parameter(k_rho: float, corr_len: float, k_z: float, sigma_z: float) -> float:
    if not (k_z > 0 and sigma_z > 0):
        raise ValidationError("kappa_z and sigma_z must be positive")
    return float((k_rho * corr_len) ** 2 / (2.0 * k_z * sigma_z) ** 2)


def corr_len_for_s(s: float, k_rho: float, k_z: float, sigma_z: float) -> float:
    if not k_rho > 0:
        raise ValidationError("kappa_rho must be positive to map S to a correlation length")
    return float(np.sqrt(s) * 2.0 * k_z * sigma_z / k_rho)


def s_min(ratio: float) -> float:
    """Lower root of S exp(1 - S) = ratio on (0, 1), bisected to full precision."""
    if not 0 < ratio < 1:
        raise NumericalError(f"scatter floor ratio {ratio:g} outside (0, 1): reflector is degenerate")
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if mid * np.exp(1.0 - mid) < ratio:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True)
class ReflectorModel:
    surface: object
    g: float
    kappa_z: float
    kappa_rho: float
    S: float
    c_bar_flat: complex
    c_tilde_inf_sq: float
    virtual_tx: ArrayGeometry
    virtual_rx: ArrayGeometry

    def __post_init__(self) -> None:
        if self.g < 0 or self.S < 0:
            raise ValidationError("g and S must be non-negative")
        if not abs(self.c_bar_flat) > 0:
            raise ValidationError("flat-surface gain must be non-zero")

    @property
    def floor_ratio(self) -> float:
        return self.c_tilde_inf_sq / abs(self.c_bar_flat) ** 2

    @property
    def s_min(self) -> float:
        return s_min(self.floor_ratio)

    @property
    def stochastic_power(self) -> float:
        return (1.0 - np.exp(-self.g / 2.0)) ** 2 * self.c_tilde_inf_sq


def build_reflector_model(tx: ArrayGeometry, rx: ArrayGeometry, surface, wavenumber: float,
                          a_rx: float | None = None, d_tx: float = 1.0) -> ReflectorModel:
    plane = surface.plane
    tc, rc = tx.center, rx.center
    kz = kappa_z(tc, rc, plane, wavenumber)
    kr = kappa_rho(tc, rc, plane, wavenumber)
    g = roughness_g(surface.sigma_z, kz)
    flat = surface.with_sigma(0.0) if hasattr(surface, "with_sigma") else surface
    c0, _ = deterministic_reflector(tx, rx, flat, wavenumber)
    if surface.sigma_z > 0 and surface.corr_len > 0:
        S = s_parameter(kr, surface.corr_len, kz, surface.sigma_z)
    else:
        S = 0.0
    cinf = c_tilde_inf_sq(tc, rc, surface, wavenumber, a_rx=a_rx, d_tx=d_tx)
    return ReflectorModel(surface, g, kz, kr, S, c0, cinf, mirror_array(tx, plane), mirror_array(rx, plane))


def power_gain_s(S: float, c_bar_flat_sq: float, c_inf_sq: float) -> float:
    """Piecewise power law in the smoothness index S."""
    ratio = c_inf_sq / c_bar_flat_sq
    smin = s_min(ratio)
    if S >= 1.0:
        return float(c_bar_flat_sq)
    if S > smin:
        return float(c_bar_flat_sq * S * np.exp(1.0 - S))
    return float(c_inf_sq)


def power_gain_correlated(model: ReflectorModel, corr_len: float) -> float:
    if not (model.kappa_z > 0 and model.surface.sigma_z > 0):
        raise ValidationError("kappa_z and sigma_z must be positive")
    S = s_parameter(model.kappa_rho, corr_len, model.kappa_z, model.surface.sigma_z)
    return power_gain_s(S, abs(model.c_bar_flat) ** 2, model.c_tilde_inf_sq)


# --- sampling and assembly --------------------------------------------------------

def element_correlation_matrix(tx: ArrayGeometry, rx: ArrayGeometry, plane: PlaneSpec, wavenumber: float,
                             n_quad: int = 200) -> np.ndarray:
    """Covariance of vec(H_tilde) (row-major over (m, n)) from the full-scattering kernel."""
    pairs = [(m, n) for m in range(rx.n) for n in range(tx.n)]
    size = len(pairs)
    cov = np.eye(size, dtype=complex)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for i, (m, n) in enumerate(pairs):
            for j in range(i + 1, size):
                m2, n2 = pairs[j]
                val = spatial_correlation_integral(
                    (tx.positions[n], tx.positions[n2]), (rx.positions[m], rx.positions[m2]),
                    plane, wavenumber, n_quad)
                cov[i, j] = val
                cov[j, i] = np.conj(val)
    return cov


def _psd_sqrt(cov: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(cov)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def sample_reflector_channel(model: ReflectorModel, tx: ArrayGeometry, rx: ArrayGeometry, wavenumber: float,
                             seed: int, correlated: bool = False, scale: float = 1.0) -> ChannelMatrix:
    """c_bar(g) H_bar + c_tilde H_tilde with H_tilde ~ CN(0, 1) entries.

    ``correlated=True`` colors H_tilde with the full-scattering correlation
    kernel. ``scale`` multiplies both parts (path-loss constant).
    """
    c_bar, h_bar = deterministic_reflector(tx, rx, model.surface, wavenumber)
    det = c_bar * h_bar.entries
    var = model.stochastic_power
    rng = np.random.default_rng(int(seed))
    shape = det.shape
    w = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    if correlated and w.size > 1:
        root = _psd_sqrt(element_correlation_matrix(tx, rx, model.surface.plane, wavenumber))
        w = (root @ w.reshape(-1)).reshape(shape)
    return ChannelMatrix(scale * (det + np.sqrt(var) * w), "analytic-sampled")


@dataclass(frozen=True)
class PathLossModel:
    """|c0|^2 = beta (d/d0)^-eta; the same constant sqrt(beta) d0 scales all other paths."""

    beta_db: float = 0.0
    d0_m: float = 1.0
    eta: float = 2.0

    def c0_magnitude(self, d: float) -> float:
        return float(np.sqrt(10 ** (self.beta_db / 10.0) * (d / self.d0_m) ** (-self.eta)))

    @property
    def field_scale(self) -> float:
        return float(np.sqrt(10 ** (self.beta_db / 10.0)) * self.d0_m)


@dataclass(frozen=True)
class Scatterer:
    position: tuple[float, float, float]
    loss: float = 1.0


@dataclass(frozen=True)
class ReflectorSpec:
    surface: object
    k_bar: float | None = None


@dataclass(frozen=True)
class PathGains:
    c0: complex
    c_hat: tuple[complex, ...]
    c_bar: tuple[complex, ...]
    c_tilde_var: tuple[float, ...]
    rician_factors: tuple[tuple[float, ...], tuple[float, ...], tuple[float, ...]]

    def __post_init__(self) -> None:
        if any(v < 0 for v in self.c_tilde_var):
            raise ValidationError("negative stochastic power")


def passivity_for_rician(k_bar: float, tx, rx, plane: PlaneSpec) -> float:
    """zeta that makes |c_bar(0)| / |c0| equal ``k_bar``: zeta = k_bar * d_v / d."""
    d = float(np.linalg.norm(as_array(rx) - as_array(tx)))
    d_v = mirror_point(rx, plane).distance(tx)
    return float(k_bar * d_v / d)


def assemble_link(
    tx: ArrayGeometry,
    rx: ArrayGeometry,
    wavenumber: float,
    path_loss: PathLossModel,
    scatterers: Sequence[Scatterer] = (),
    reflectors: Sequence[ReflectorSpec] = (),
    seed: int = 0,
    include_stochastic: bool = True,
) -> tuple[ChannelMatrix, PathGains]:
    """Sum of LOS, point-scatterer and reflector components for one link.

    A reflector with ``k_bar`` set uses that specular Rician factor directly,
    c_bar = k_bar * c0 * exp(-g/2); otherwise c_bar follows from the passivity.
    """
    rng = np.random.default_rng(int(seed))
    d = tx.center.distance(rx.center)
    c0 = path_loss.c0_magnitude(d)
    h = c0 * los_matrix(tx, rx, wavenumber).entries
    K = path_loss.field_scale
    c_hat, k_hat = [], []
    for s in scatterers:
        dt = tx.center.distance(s.position)
        dr = rx.center.distance(s.position)
        mag = K * s.loss * path_loss.d0_m / (dt * dr)
        val = mag * np.exp(2j * np.pi * rng.random())
        h = h + val * scatterer_matrix(tx, rx, s.position, wavenumber).entries
        c_hat.append(complex(val))
        k_hat.append(mag / c0)
    c_bar_l, k_bar_l, var_l, k_tilde_l = [], [], [], []
    for spec in reflectors:
        model = build_reflector_model(tx, rx, spec.surface, wavenumber)
        _, h_bar = deterministic_reflector(tx, rx, spec.surface, wavenumber)
        att = np.exp(-model.g / 2.0)
        if spec.k_bar is not None:
            cb = spec.k_bar * c0 * att
        else:
            cb = K * abs(model.c_bar_flat) * att
        var = K**2 * model.stochastic_power
        h = h + cb * h_bar.entries
        if include_stochastic and var > 0:
            w = (rng.standard_normal(h.shape) + 1j * rng.standard_normal(h.shape)) / np.sqrt(2.0)
            h = h + np.sqrt(var) * w
        c_bar_l.append(complex(cb))
        k_bar_l.append(abs(cb) / c0)
        var_l.append(float(var))
        k_tilde_l.append(float(np.sqrt(var) / c0))
    gains = PathGains(complex(c0), tuple(c_hat), tuple(c_bar_l), tuple(var_l),
                      (tuple(k_hat), tuple(k_bar_l), tuple(k_tilde_l)))
    prov = "analytic-sampled" if (scatterers or (include_stochastic and any(v > 0 for v in var_l))) else "analytic-deterministic"
    return ChannelMatrix(h, prov), gains
