"""Rough reflecting surfaces and Gaussian height-field synthesis.

Correlated fields come from filtering real white noise on a periodic grid
whose spectrum is the discrete Fourier transform of the target covariance
exp(-rho^2 / l^2) (circulant embedding). The periodic grid is padded by
several correlation lengths so the crop that covers the surface carries the
exact stationary covariance. ``corr_len == 0`` draws i.i.d. heights per cell.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from .errors import ValidationError
from .geometry import PlaneSpec

PAD_CORR_LENGTHS = 4.0


class ResolutionWarning(UserWarning):
    """Grid step too coarse to resolve the correlation length."""


@dataclass(frozen=True)
class RoughSurface:
    plane: PlaneSpec
    sigma_z: float = 0.0
    corr_len: float = 0.0
    passivity: float = 1.0
    loss_factor: float = 1.0

    def __post_init__(self) -> None:
        if not self.sigma_z >= 0:
            raise ValidationError("sigma_z must be >= 0")
        if not self.corr_len >= 0:
            raise ValidationError("corr_len must be >= 0")
        if not 0 < self.passivity <= 1:
            raise ValidationError("passivity must lie in (0, 1]")
        if not 0 < self.loss_factor <= 1:
            raise ValidationError("loss_factor must lie in (0, 1]")

    def with_sigma(self, sigma_z: float) -> "RoughSurface":
        return replace(self, sigma_z=float(sigma_z))


@dataclass(frozen=True)
class SurfaceRealization:
    """One sampled height field on the cell-midpoint grid of the plane.

    ``heights[i, j]`` is the height along the plane normal at local
    coordinates ``(u[i], v[j])``.
    """

    heights: np.ndarray
    step_u: float
    step_v: float
    parent: RoughSurface
    seed: int
    oversample: int = 1

    def __post_init__(self) -> None:
        h = np.asarray(self.heights, dtype=float)
        h.setflags(write=False)
        object.__setattr__(self, "heights", h)

    @property
    def grid_step(self) -> float:
        return self.step_u

    @property
    def shape(self) -> tuple[int, int]:
        return self.heights.shape

    @property
    def u(self) -> np.ndarray:
        n = self.heights.shape[0]
        return -self.parent.plane.length_u / 2 + (np.arange(n) + 0.5) * self.step_u

    @property
    def v(self) -> np.ndarray:
        n = self.heights.shape[1]
        return -self.parent.plane.length_v / 2 + (np.arange(n) + 0.5) * self.step_v

    @property
    def cell_area(self) -> float:
        return self.step_u * self.step_v

    def scaled(self, sigma_z: float) -> "SurfaceRealization":
        """Same realization with heights rescaled to a new roughness.

        Valid because heights are a unit-variance field times sigma_z; equals
        ``sample_surface`` with the new sigma_z and the same seed bit for bit
        when the original was drawn at sigma_z = 1.
        """
        s0 = self.parent.sigma_z
        if s0 == 0:
            raise ValidationError("cannot rescale a flat realization")
        factor = sigma_z / s0
        return replace(self, heights=self.heights * factor, parent=self.parent.with_sigma(sigma_z))


def grid_dims(plane: PlaneSpec, grid_step: float) -> tuple[int, int, float, float]:
    n_u = int(np.ceil(plane.length_u / grid_step - 1e-9))
    n_v = int(np.ceil(plane.length_v / grid_step - 1e-9))
    return n_u, n_v, plane.length_u / n_u, plane.length_v / n_v


def realization_seed(base_seed: int, index: int) -> int:
    """Counter-based child seed for realization ``index`` of a run."""
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


@lru_cache(maxsize=8)
def _gaussian_filter_spectrum(m_u: int, m_v: int, step_u: float, step_v: float, corr_len: float) -> np.ndarray:
    """sqrt of the half-plane spectrum of the periodic covariance exp(-rho^2/l^2).

    The Gaussian covariance factorizes over the two axes, so its 2D spectrum
    is the outer product of two 1D spectra.
    """
    iu = np.arange(m_u)
    iv = np.arange(m_v)
    du = np.minimum(iu, m_u - iu) * step_u
    dv = np.minimum(iv, m_v - iv) * step_v
    lam_u = np.clip(sfft.fft(np.exp(-du**2 / corr_len**2)).real, 0.0, None)
    lam_v = np.clip(sfft.rfft(np.exp(-dv**2 / corr_len**2)).real, 0.0, None)
    amp = np.sqrt(np.outer(lam_u, lam_v))
    # Nyquist bins are dropped so the spectrum stays Hermitian after shifts
    if m_u % 2 == 0:
        amp[m_u // 2, :] = 0.0
    if m_v % 2 == 0:
        amp[:, -1] = 0.0
    amp.setflags(write=False)
    return amp


def _unit_field(plane: PlaneSpec, grid_step: float, corr_len: float, seed: int, oversample: int) -> tuple[np.ndarray, float, float]:
    n_u, n_v, step_u, step_v = grid_dims(plane, grid_step)
    rng = np.random.default_rng(int(seed))
    if corr_len == 0.0:
        z = rng.standard_normal((n_u, n_v))
        if oversample > 1:
            z = np.repeat(np.repeat(z, oversample, axis=0), oversample, axis=1)
        return z, step_u / oversample, step_v / oversample

    pad_u = int(np.ceil(PAD_CORR_LENGTHS * corr_len / step_u))
    pad_v = int(np.ceil(PAD_CORR_LENGTHS * corr_len / step_v))
    m_u = sfft.next_fast_len(n_u + pad_u, real=True)
    m_v = sfft.next_fast_len(n_v + pad_v, real=True)
    amp = _gaussian_filter_spectrum(m_u, m_v, step_u, step_v, corr_len)
    noise = rng.standard_normal((m_u, m_v))
    spec = sfft.rfft2(noise) * amp
    if oversample == 1:
        z = sfft.irfft2(spec, s=(m_u, m_v))
        return z[:n_u, :n_v], step_u, step_v

    # Band-limited evaluation at the fine cell midpoints, which sit at
    # coarse index positions i/r - (r-1)/(2r).
    r = int(oversample)
    delta = -(r - 1) / (2.0 * r)
    iu = np.arange(m_u)
    ku = np.where(iu < (m_u + 1) // 2, iu, iu - m_u)
    kv = np.arange(m_v // 2 + 1)
    phase = np.exp(2j * np.pi * ku[:, None] * delta / m_u) * np.exp(2j * np.pi * kv[None, :] * delta / m_v)
    big = np.zeros((r * m_u, r * m_v // 2 + 1), dtype=complex)
    rows = np.mod(ku, r * m_u)
    big[rows, : m_v // 2 + 1] = spec * phase
    z = sfft.irfft2(big, s=(r * m_u, r * m_v)) * (r * r)
    return z[: r * n_u, : r * n_v], step_u / r, step_v / r


def sample_surface(surface: RoughSurface, grid_step: float, seed: int, oversample: int = 1) -> SurfaceRealization:
    """Draw one height field on a grid of (at most) ``grid_step`` spacing.

    ``oversample > 1`` evaluates the same band-limited realization on a grid
    refined by that factor, used for grid-convergence checks.
    """
    plane = surface.plane
    if not grid_step > 0:
        raise ValidationError("grid_step must be positive")
    if grid_step > min(plane.length_u, plane.length_v) / 4:
        raise ValidationError("grid_step must not exceed a quarter of the smallest extent")
    if int(oversample) != oversample or oversample < 1:
        raise ValidationError("oversample must be a positive integer")
    if surface.corr_len > 0 and grid_step > surface.corr_len / 2:
        warnings.warn(
            f"grid step {grid_step:g} m does not resolve correlation length {surface.corr_len:g} m",
            ResolutionWarning,
            stacklevel=2,
        )
    if surface.sigma_z == 0.0:
        n_u, n_v, step_u, step_v = grid_dims(plane, grid_step)
        z = np.zeros((n_u * oversample, n_v * oversample))
        return SurfaceRealization(z, step_u / oversample, step_v / oversample, surface, int(seed), int(oversample))
    z, su, sv = _unit_field(plane, grid_step, surface.corr_len, seed, int(oversample))
    return SurfaceRealization(z * surface.sigma_z, su, sv, surface, int(seed), int(oversample))


def empirical_autocorr(real: SurfaceRealization, lag: float, axis: int | None = None) -> float:
    """Autocorrelation at ``lag`` (meters), normalized so lag 0 gives 1.

    Uses the known zero mean and the unbiased (N - k) normalization. With
    ``axis=None`` both grid axes are pooled.
    """
    z = real.heights
    var = float(np.mean(z * z))
    if not var > 0:
        raise ValidationError("autocorrelation undefined for a zero-variance field")
    axes = (0, 1) if axis is None else (axis,)
    num = 0.0
    count = 0
    for ax in axes:
        step = real.step_u if ax == 0 else real.step_v
        k = lag / step
        if lag < 0 or abs(k - round(k)) > 1e-6:
            raise ValidationError("lag must be a non-negative multiple of the grid step")
        k = int(round(k))
        if k > z.shape[ax] // 2:
            raise ValidationError("lag exceeds half the surface extent")
        a = np.take(z, np.arange(z.shape[ax] - k), axis=ax)
        b = np.take(z, np.arange(k, z.shape[ax]), axis=ax)
        num += float(np.sum(a * b))
        count += a.size
    return num / count / var


_HEADER = struct.Struct("<qqdddq")


def export_realization(real: SurfaceRealization, path: str | Path) -> None:
    """Flat little-endian dump: n_u, n_v, step, sigma_z, corr_len, seed, then float64 heights."""
    n_u, n_v = real.shape
    seed = int(real.seed) & 0xFFFFFFFFFFFFFFFF
    if seed >= 2**63:
        seed -= 2**64
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(n_u, n_v, real.step_u, real.parent.sigma_z, real.parent.corr_len, seed))
        fh.write(np.ascontiguousarray(real.heights, dtype="<f8").tobytes())


def read_realization_dump(path: str | Path) -> tuple[dict, np.ndarray]:
    raw = Path(path).read_bytes()
    n_u, n_v, step, sigma, ell, seed = _HEADER.unpack_from(raw)
    z = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(n_u, n_v)
    return {"n_u": n_u, "n_v": n_v, "step": step, "sigma_z": sigma, "corr_len": ell, "seed": seed % 2**64}, z
