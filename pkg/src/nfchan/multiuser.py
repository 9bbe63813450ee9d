"""Two-user downlink with near-field focusing over LOS or reflected paths.

Channel rows follow the package convention: the coefficient from element n
to a point p carries exp(+j k |u_n - p|), and the received sample is the
plain product ``h @ q``. A focus beamformer therefore uses the conjugate
phase exp(-j k |u_n - f|) / sqrt(N).

Closed-form SINRs normalize each row by sqrt(N) of the serving array, so
the intended user sees unit array gain and ``noise_ratio`` is
sigma_n^2 / (P |c0|^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import ValidationError
from .geometry import ArrayGeometry, PlaneSpec, Point3, as_array, make_ula, mirror_point, wavelength, wavenumber
from .special import quad_phase_integral, sinc

Strategy = Literal["los", "nlos"]


def dbm_to_watts(p_dbm):
    return 10.0 ** ((np.asarray(p_dbm, dtype=float) - 30.0) / 10.0)


@dataclass(frozen=True)
class NoiseModel:
    """Thermal noise W * N0 * Nf."""

    bandwidth_hz: float
    n0_dbm_per_hz: float = -174.0
    noise_figure_db: float = 0.0

    def __post_init__(self) -> None:
        if not self.bandwidth_hz > 0:
            raise ValidationError("bandwidth_hz must be positive")

    @property
    def sigma2(self) -> float:
        return float(self.bandwidth_hz * dbm_to_watts(self.n0_dbm_per_hz + self.noise_figure_db))


@dataclass(frozen=True)
class Beamformer:
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=complex).reshape(-1)
        norm = np.linalg.norm(w)
        if not abs(norm - 1.0) < 1e-9:
            raise ValidationError(f"beamformer must have unit norm, got {norm:.6g}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.size

    def rotated(self, phase: float) -> "Beamformer":
        return Beamformer(self.weights * np.exp(1j * phase))


def nf_focus_beamformer(array: ArrayGeometry, focus, k: float, mask=None) -> Beamformer:
    """Weights exp(-j k |u_n - focus|) / sqrt(N) on the active elements.

    ``mask`` (boolean, one entry per element) restricts the beam to a
    sub-array; inactive elements get zero weight.
    """
    if not k > 0:
        raise ValidationError("wavenumber must be positive")
    d = np.linalg.norm(array.positions - as_array(focus), axis=1)
    w = np.exp(-1j * k * d)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (array.n,):
            raise ValidationError("mask must have one entry per element")
        if not mask.any():
            raise ValidationError("mask selects no element")
        w = np.where(mask, w, 0.0)
    return Beamformer(w / np.linalg.norm(w))


def row_channel(array: ArrayGeometry, point, k: float, gain: complex = 1.0) -> np.ndarray:
    d = np.linalg.norm(array.positions - as_array(point), axis=1)
    return gain * np.exp(1j * k * d)


def beam_gain(h, q: Beamformer) -> float:
    h = np.asarray(h, dtype=complex).reshape(-1)
    if h.size != q.n:
        raise ValidationError(f"channel has {h.size} entries, beamformer {q.n}")
    return float(abs(h @ q.weights) ** 2)


def sinr(h, q_own: Beamformer, q_other, P: float, sigma2: float) -> float:
    """|h q_own|^2 P / (sum_j |h q_j|^2 P + sigma2) over the other users' beams."""
    if P < 0 or sigma2 < 0:
        raise ValidationError("power and noise must be non-negative")
    others = [q_other] if isinstance(q_other, Beamformer) else list(q_other)
    s = beam_gain(h, q_own) * P
    i = sum(beam_gain(h, q) for q in others) * P
    den = i + sigma2
    if den == 0:
        return float("inf") if s > 0 else 0.0
    return float(s / den)


# --- closed forms -------------------------------------------------------------

def los_curvature(k: float, phi0: float, d1: float, d2: float) -> float:
    """a1 = k sin^2(phi0)/2 * (d2 - d1)/(d1 d2) for two users on one ray."""
    if not (d1 > 0 and d2 > 0):
        raise ValidationError("distances must be positive")
    return float(k * np.sin(phi0) ** 2 / 2.0 * (d2 - d1) / (d1 * d2))


def nlos_coefficients(k: float, phi1: float, phi2: float, d1: float, d2: float) -> tuple[float, float]:
    """(a2, b) of the residual phase between two beams seen from the array axis."""
    if not (d1 > 0 and d2 > 0):
        raise ValidationError("distances must be positive")
    a2 = k / 2.0 * abs(np.sin(phi1) ** 2 / d1 - np.sin(phi2) ** 2 / d2)
    b = k * (np.cos(phi1) - np.cos(phi2))
    return float(a2), float(b)


def polar_about(center, axis, p) -> tuple[float, float]:
    """Distance and angle from ``axis`` of point ``p`` as seen from ``center``."""
    r = as_array(p) - as_array(center)
    dist = float(np.linalg.norm(r))
    ax = np.asarray(axis, dtype=float)
    ax = ax / np.linalg.norm(ax)
    return dist, float(np.arccos(np.clip(r @ ax / dist, -1.0, 1.0)))


def phase_coefficients(center, axis, p_own, p_other, k: float) -> tuple[float, float]:
    """(a, b) of the second-order residual phase a y^2 + b y along the array.

    A beam focused on ``p_other`` and observed at ``p_own``; collinear points
    on one ray give b = 0 and a = a1.
    """
    d_o, phi_o = polar_about(center, axis, p_own)
    d_x, phi_x = polar_about(center, axis, p_other)
    return nlos_coefficients(k, phi_o, phi_x, d_o, d_x)


def _check_common(Ly: float, noise_ratio: float) -> None:
    if not Ly > 0:
        raise ValidationError("Ly must be positive")
    if noise_ratio < 0:
        raise ValidationError("noise_ratio must be non-negative")


def sinr_los_closed_form(a1: float, Ly: float, noise_ratio: float) -> float:
    _check_common(Ly, noise_ratio)
    return float(1.0 / (abs(quad_phase_integral(a1, 0.0, Ly)) ** 2 + noise_ratio))


def _check_kbar(k_bar: float) -> None:
    if not 0 < k_bar <= 1:
        raise ValidationError("k_bar must lie in (0, 1]")


def sinr_nlos_closed_form(a2: float, b: float, Ly: float, k_bar: float, noise_ratio: float) -> float:
    _check_common(Ly, noise_ratio)
    _check_kbar(k_bar)
    return float(1.0 / (abs(quad_phase_integral(a2, b, Ly)) ** 2 + noise_ratio / k_bar**2))


def sinr_nlos_sinc(b: float, Ly: float, k_bar: float, noise_ratio: float) -> float:
    """Linear-phase approximation, valid when a2 is small against b."""
    _check_common(Ly, noise_ratio)
    _check_kbar(k_bar)
    return float(1.0 / (sinc(Ly * b / (2.0 * np.pi)) ** 2 + noise_ratio / k_bar**2))


# --- two-user trade-off geometry ----------------------------------------------

@dataclass(frozen=True)
class TradeoffGeometry:
    """ULA along y at the origin, users on a ray at angle ``phi0`` from +y.

    User 1 sits at distance ``d1_m``, user 2 at ``d1_m + d_m`` on the same
    ray in the z = 0 plane. A wall normal to x lies ``wall_gap_m`` behind
    user 2 and each user's reflected path is its mirror image.

    ``partitioned`` splits the array in two halves of ``n_elements`` each;
    the +y half serves user 1 and the -y half user 2. Otherwise both beams
    use one array of ``n_elements``.
    """

    frequency_hz: float
    n_elements: int
    phi0_rad: float
    d1_m: float
    d_m: float
    wall_gap_m: float = 1.0
    noise_ratio: float = 0.1
    partitioned: bool = False

    def __post_init__(self) -> None:
        if not self.frequency_hz > 0:
            raise ValidationError("frequency_hz must be positive")
        if self.n_elements < 1:
            raise ValidationError("n_elements must be >= 1")
        if not (self.d1_m > 0 and self.d_m > 0 and self.wall_gap_m > 0):
            raise ValidationError("distances must be positive")
        if not 0 < self.phi0_rad < np.pi:
            raise ValidationError("phi0_rad must lie in (0, pi)")
        if np.sin(self.phi0_rad) <= 0:
            raise ValidationError("users must lie on the +x side")

    @property
    def k(self) -> float:
        return wavenumber(self.frequency_hz)

    @property
    def spacing(self) -> float:
        return wavelength(self.frequency_hz) / 2.0

    @property
    def length(self) -> float:
        """Aperture of one serving array, N lambda/2."""
        return self.n_elements * self.spacing

    def _ray(self) -> np.ndarray:
        return np.array([np.sin(self.phi0_rad), np.cos(self.phi0_rad), 0.0])

    @property
    def users(self) -> tuple[Point3, Point3]:
        e = self._ray()
        return Point3.of(self.d1_m * e), Point3.of((self.d1_m + self.d_m) * e)

    @property
    def wall(self) -> PlaneSpec:
        x_w = self.users[1].x + self.wall_gap_m
        return PlaneSpec.from_normal((x_w, 0.0, 0.0), (-1.0, 0.0, 0.0), 100.0, 100.0)

    @property
    def virtual_users(self) -> tuple[Point3, Point3]:
        w = self.wall
        return mirror_point(self.users[0], w), mirror_point(self.users[1], w)

    def array(self) -> ArrayGeometry:
        n = 2 * self.n_elements if self.partitioned else self.n_elements
        return make_ula((0.0, 0.0, 0.0), n, self.spacing, axis=(0.0, 1.0, 0.0))

    def masks(self) -> tuple[np.ndarray | None, np.ndarray | None]:
        if not self.partitioned:
            return None, None
        y = self.array().positions[:, 1]
        return y > 0, y < 0

    def serving_centers(self) -> tuple[np.ndarray, np.ndarray]:
        arr = self.array()
        m1, m2 = self.masks()
        if m1 is None:
            c = arr.positions.mean(axis=0)
            return c, c
        return arr.positions[m1].mean(axis=0), arr.positions[m2].mean(axis=0)


@dataclass(frozen=True)
class TradeoffPoint:
    los_closed: float
    los_discrete: float
    nlos_closed: dict = field(default_factory=dict)
    nlos_discrete: dict = field(default_factory=dict)
    a_los: float = 0.0
    b_los: float = 0.0
    a_nlos: float = 0.0
    b_nlos: float = 0.0


def _discrete_sinr1(geom: TradeoffGeometry, targets, gain: float) -> float:
    """SINR of user 1 with beams focused on ``targets`` and unit-modulus rows.

    Rows are scaled by ``gain / sqrt(N)`` where N is the size of the array
    serving user 1, which makes the noise term ``noise_ratio``.
    """
    arr = geom.array()
    m1, m2 = geom.masks()
    q1 = nf_focus_beamformer(arr, targets[0], geom.k, m1)
    q2 = nf_focus_beamformer(arr, targets[1], geom.k, m2)
    h = row_channel(arr, targets[0], geom.k, gain / np.sqrt(geom.n_elements))
    return sinr(h, q1, q2, 1.0, geom.noise_ratio)


def tradeoff_point(geom: TradeoffGeometry, k_bars: Sequence[float] = (1.0, 0.6, 0.2)) -> TradeoffPoint:
    """User-1 SINR for LOS and reflected-path focusing, closed form and element sums.

    The closed forms use the residual phase of user 2's beam at user 1,
    expanded about the center of the array that forms user 2's beam.
    """
    _, c2 = geom.serving_centers()
    axis = (0.0, 1.0, 0.0)
    u1, u2 = geom.users
    v1, v2 = geom.virtual_users
    L = geom.length
    a_l, b_l = phase_coefficients(c2, axis, u1, u2, geom.k)
    a_n, b_n = phase_coefficients(c2, axis, v1, v2, geom.k)
    i_los = abs(quad_phase_integral(a_l, b_l, L)) ** 2
    i_nlos = abs(quad_phase_integral(a_n, b_n, L)) ** 2
    los_c = 1.0 / (i_los + geom.noise_ratio)
    los_d = _discrete_sinr1(geom, (u1, u2), 1.0)
    nc, nd = {}, {}
    for kb in k_bars:
        _check_kbar(kb)
        nc[float(kb)] = float(1.0 / (i_nlos + geom.noise_ratio / kb**2))
        nd[float(kb)] = _discrete_sinr1(geom, (v1, v2), kb)
    return TradeoffPoint(float(los_c), float(los_d), nc, nd, a_l, b_l, a_n, b_n)


# --- side-lobe ratio ----------------------------------------------------------

def smr(array: ArrayGeometry, q: Beamformer, main_row, side_row) -> float:
    """|side_row q|^2 / |main_row q|^2 for a beam aimed along the main path."""
    if q.n != array.n:
        raise ValidationError("beamformer does not match the array")
    main = beam_gain(main_row, q)
    if main == 0:
        raise ValidationError("beam has no gain on the main path")
    return beam_gain(side_row, q) / main


def leakage_ratio(side_row, q_other: Beamformer, main_row, q_own: Beamformer) -> float:
    """Power another user's beam leaks through ``side_row`` over the own main-lobe power."""
    main = beam_gain(main_row, q_own)
    if main == 0:
        raise ValidationError("beam has no gain on the main path")
    return beam_gain(side_row, q_other) / main


# --- sum rate -----------------------------------------------------------------

@dataclass(frozen=True)
class UserLinks:
    """Per-user LOS and reflected-path row channels plus the focus points."""

    los_rows: tuple[np.ndarray, ...]
    nlos_rows: tuple[np.ndarray, ...]
    los_focus: tuple[Point3, ...]
    nlos_focus: tuple[Point3 | None, ...]


def strategy_beams(array: ArrayGeometry, links: UserLinks, strategy: Strategy, k: float,
                   masks: Sequence | None = None) -> list[Beamformer]:
    if strategy == "los":
        foci = links.los_focus
    elif strategy == "nlos":
        if any(f is None for f in links.nlos_focus):
            raise ValidationError("the reflected-path strategy needs a reflector for every user")
        foci = links.nlos_focus
    else:
        raise ValidationError(f"unknown strategy {strategy!r}")
    masks = masks or [None] * len(foci)
    return [nf_focus_beamformer(array, f, k, m) for f, m in zip(foci, masks)]


def sum_rate_from_rows(rows: Sequence[np.ndarray], beams: Sequence[Beamformer], Pt: float, sigma2: float) -> float:
    """sum_k log2(1 + SINR_k) with the power split equally over the users."""
    K = len(beams)
    if K < 1 or len(rows) != K:
        raise ValidationError("need one channel row per beam")
    if Pt < 0:
        raise ValidationError("transmit power must be non-negative")
    if Pt == 0:
        return 0.0
    P = Pt / K
    total = 0.0
    for k in range(K):
        others = [beams[j] for j in range(K) if j != k]
        total += np.log2(1.0 + sinr(rows[k], beams[k], others, P, sigma2))
    return float(total)
