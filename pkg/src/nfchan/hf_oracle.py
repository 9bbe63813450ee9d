"""Direct numerical evaluation of the Huygens-Fresnel reflection integral.

The coefficient between a transmitter and a receiver is the midpoint-rule sum

    (zeta / (j lambda)) * sum_cells [h_t / r_t^2] [h_r / r_r^2] exp(j k (r_t + r_r)) dA

over the cells of a sampled height field, with exact distances r_t, r_r to
the displaced surface point. Nothing here relies on phase expansions, so the
closed forms in :mod:`nfchan.analytic` can be checked against it.

Cells are visited in fixed row blocks and each block is reduced by numpy's
pairwise summation, which keeps results bit-stable for a given block size.
Distances and phases are formed in float64; after reduction modulo 2 pi the
trigonometric evaluation runs in float32, and accumulation is float64 again.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analytic import ChannelMatrix
from .errors import ValidationError
from .geometry import ArrayGeometry, as_array
from .surface import SurfaceRealization

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class HFConfig:
    """Oracle settings.

    grid_step: requested cell size; ``None`` means lambda/8 at the call's wavenumber.
    use_exact_amplitude: per-cell 1/r^2 amplitudes (default) or one constant
        amplitude taken at the surface center.
    exact_area: scale each cell by sqrt(1 + |grad z|^2) instead of dA = dx dy.
    block_rows: rows of the surface grid per reduction block.
    """

    grid_step: float | None = None
    use_exact_amplitude: bool = True
    exact_area: bool = False
    block_rows: int = 256

    def __post_init__(self) -> None:
        if self.grid_step is not None and not self.grid_step > 0:
            raise ValidationError("grid_step must be positive")
        if self.block_rows < 1:
            raise ValidationError("block_rows must be >= 1")

    def step_for(self, wavenumber: float) -> float:
        return self.grid_step if self.grid_step is not None else (TWO_PI / wavenumber) / 8.0


def _local_heights(real: SurfaceRealization, pts: np.ndarray) -> np.ndarray:
    loc = real.parent.plane.to_local(pts)
    if np.any(loc[..., 2] <= 0):
        raise ValidationError("transmitter and receiver must lie strictly above the surface plane")
    return loc


def hf_coefficients(tx, rxs: Sequence, real: SurfaceRealization, wavenumber: float,
                    cfg: HFConfig | None = None) -> np.ndarray:
    """Oracle coefficients from one transmitter to several receivers on one realization."""
    cfg = cfg or HFConfig()
    if not wavenumber > 0:
        raise ValidationError("wavenumber must be positive")
    lam = TWO_PI / wavenumber
    if max(real.step_u, real.step_v) > lam / 4 * (1 + 1e-9):
        raise ValidationError("grid step above lambda/4 aliases the phase")
    tx_l = _local_heights(real, as_array(tx))
    rx_l = _local_heights(real, np.atleast_2d(np.asarray([as_array(r) for r in rxs])))
    zeta = real.parent.passivity
    u = real.u
    v = real.v
    z = real.heights
    n_rx = rx_l.shape[0]

    if cfg.use_exact_amplitude:
        const_amp = None
    else:
        # amplitude frozen at the surface center
        rt0 = np.linalg.norm(tx_l)
        rr0 = np.linalg.norm(rx_l, axis=1)
        const_amp = tx_l[2] / rt0**2 * rx_l[:, 2] / rr0**2

    if cfg.exact_area:
        gu, gv = np.gradient(z, real.step_u, real.step_v)
        area_w = np.sqrt(1.0 + gu * gu + gv * gv)
    else:
        area_w = None

    dvt2 = (v - tx_l[1]) ** 2
    dvr2 = [(v - rx_l[m, 1]) ** 2 for m in range(n_rx)]
    acc_re = np.zeros(n_rx)
    acc_im = np.zeros(n_rx)
    for i0 in range(0, z.shape[0], cfg.block_rows):
        i1 = min(i0 + cfg.block_rows, z.shape[0])
        zz = z[i0:i1]
        ub = u[i0:i1, None]
        rt2 = (ub - tx_l[0]) ** 2 + dvt2[None, :] + (tx_l[2] - zz) ** 2
        rt = np.sqrt(rt2)
        amp_t = tx_l[2] / rt2
        if area_w is not None:
            amp_t = amp_t * area_w[i0:i1]
        for m in range(n_rx):
            rr2 = (ub - rx_l[m, 0]) ** 2 + dvr2[m][None, :] + (rx_l[m, 2] - zz) ** 2
            rr = np.sqrt(rr2)
            phase = wavenumber * (rt + rr)
            phase -= TWO_PI * np.floor(phase * (1.0 / TWO_PI))
            phase = phase.astype(np.float32)
            if const_amp is None:
                w = (amp_t * (rx_l[m, 2] / rr2)).astype(np.float32)
            else:
                w = np.full(zz.shape, const_amp[m], dtype=np.float32) if area_w is None else \
                    (const_amp[m] * area_w[i0:i1]).astype(np.float32)
            acc_re[m] += np.sum(w * np.cos(phase), dtype=np.float64)
            acc_im[m] += np.sum(w * np.sin(phase), dtype=np.float64)
    total = (acc_re + 1j * acc_im) * real.cell_area
    return zeta / (1j * lam) * total


def hf_coefficient(tx, rx, real: SurfaceRealization, wavenumber: float, cfg: HFConfig | None = None) -> complex:
    return complex(hf_coefficients(tx, [rx], real, wavenumber, cfg)[0])


def hf_channel_matrix(tx_array: ArrayGeometry, rx_array: ArrayGeometry, real: SurfaceRealization,
                      wavenumber: float, cfg: HFConfig | None = None) -> ChannelMatrix:
    """Entry (m, n) is the oracle coefficient from Tx element n to Rx element m."""
    h = np.empty((rx_array.n, tx_array.n), dtype=complex)
    for n, t in enumerate(tx_array.positions):
        h[:, n] = hf_coefficients(t, list(rx_array.positions), real, wavenumber, cfg)
    return ChannelMatrix(h, "oracle")
