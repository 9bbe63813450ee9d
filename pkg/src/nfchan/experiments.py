"""Named experiments: each computes one table and writes it as CSV plus a JSON sidecar.

The ``*_table`` functions return plain rows and a summary dict, so the
acceptance checks reuse exactly the numbers the CLI writes.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import stats

from . import __version__
from .analytic import (
    PathLossModel,
    ReflectorSpec,
    assemble_link,
    build_reflector_model,
    corr_len_for_s,
    elevation_window,
    power_gain_s,
    spatial_correlation_sinc,
)
from .errors import ValidationError
from .geometry import ArrayGeometry, Point3, make_upa, mirror_point
from .hf_oracle import HFConfig, hf_coefficients
from .multiuser import (
    NoiseModel,
    TradeoffGeometry,
    UserLinks,
    dbm_to_watts,
    leakage_ratio,
    row_channel,
    smr,
    strategy_beams,
    sum_rate_from_rows,
    tradeoff_point,
)
from .scenario import ScenarioConfig
from .statistics import collect_samples, correlation_from_samples, normality_check, summarize
from .surface import ResolutionWarning, RoughSurface, sample_surface

EXPERIMENTS = ("regimes", "pdf", "correlation", "length-correlation", "sinr-tradeoff", "smr", "sumrate")

_STREAM_REGIMES = 1
_STREAM_ENSEMBLE = 2
_STREAM_LENGTH = 3


def stream_seed(seed: int, *key: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple]


@dataclass(frozen=True)
class Result:
    experiment: str
    tables: list[Table]
    summary: dict


# --- oracle plumbing ----------------------------------------------------------

def oracle_step(sc: ScenarioConfig, fast: bool) -> float:
    step = sc.oracle.grid_step_wavelengths * sc.wavelength
    return 2.0 * step if fast else step


def _hf_cfg(sc: ScenarioConfig, fast: bool) -> HFConfig:
    return HFConfig(grid_step=oracle_step(sc, fast), block_rows=sc.oracle.block_rows)


def _n(requested: int, fast: bool) -> int:
    return max(2, requested // 2) if fast else requested


def _surface(sc: ScenarioConfig, sigma: float, corr_len: float) -> RoughSurface:
    base = sc.surface.surface()
    return RoughSurface(base.plane, sigma, corr_len, base.passivity, base.loss_factor)


def flat_oracle(sc: ScenarioConfig, rxs, fast: bool) -> np.ndarray:
    flat = _surface(sc, 0.0, 0.0)
    real = sample_surface(flat, oracle_step(sc, fast), 0)
    return hf_coefficients(sc.tx_m, rxs, real, sc.k, _hf_cfg(sc, fast))


def _ensemble(sc: ScenarioConfig, surf: RoughSurface, rxs, n: int, base_seed: int, fast: bool) -> np.ndarray:
    step = oracle_step(sc, fast)
    cfg = _hf_cfg(sc, fast)

    def evaluate(s: RoughSurface, seed: int):
        with warnings.catch_warnings():
            # the cell grid is the surface model when l drops below the step
            warnings.simplefilter("ignore", ResolutionWarning)
            real = sample_surface(s, step, seed)
        return hf_coefficients(sc.tx_m, rxs, real, sc.k, cfg)

    out = collect_samples(evaluate, surf, n, base_seed)
    return out.reshape(n, len(rxs))


# --- regimes -----------------------------------------------------------------------

REGIMES_COLUMNS = ("kappa_sigma_z", "sigma_z_m", "corr_len_m", "g", "mean_re", "mean_im", "mean_abs",
                   "rms_abs", "std_error", "theory_exp", "theory_floor", "n_realizations")


def regimes_table(sc: ScenarioConfig, seed: int, fast: bool = False) -> Result:
    sc.require("tx_m", "surface", "regimes")
    rc = sc.regimes
    n = _n(rc.realizations, fast)
    rx = rc.rx_m
    c_flat = complex(flat_oracle(sc, [rx], fast)[0])
    T, R = ArrayGeometry.single(sc.tx_m), ArrayGeometry.single(rx)
    rows = []
    for j, ks in enumerate(rc.kappa_sigma_z):
        if ks < 0:
            raise ValidationError("regimes.kappa_sigma_z must be non-negative")
        sigma = ks / sc.k
        ell = rc.corr_len_per_sigma * sigma
        surf = _surface(sc, sigma, ell)
        model = build_reflector_model(T, R, surf, sc.k)
        if sigma == 0:
            vals = np.full(n, 1.0 + 0.0j)
        else:
            vals = _ensemble(sc, surf, [rx], n, stream_seed(seed, _STREAM_REGIMES, j), fast)[:, 0] / c_flat
        m = vals.mean()
        std_err = float(np.sqrt(np.mean(np.abs(vals - m) ** 2) / n))
        rows.append((ks, sigma, ell, model.g, m.real, m.imag, float(np.mean(np.abs(vals))),
                     float(np.sqrt(np.mean(np.abs(vals) ** 2))), std_err, float(np.exp(-model.g / 2.0)),
                     float(np.sqrt(model.c_tilde_inf_sq) / abs(c_flat)), n))
    summary = {"rx_m": list(rx), "flat_oracle": [c_flat.real, c_flat.imag], "realizations": n,
               "grid_step_m": oracle_step(sc, fast)}
    return Result("regimes", [Table("regimes", REGIMES_COLUMNS, rows)], summary)


# --- shared ensemble for pdf and correlation -----------------------------------

@dataclass(frozen=True)
class CorrelationEnsemble:
    points: np.ndarray
    samples: np.ndarray
    d_over_lambda: tuple[float, ...]
    c_flat_ref: complex
    sigma_z: float
    corr_len: float

    @property
    def reference(self) -> np.ndarray:
        return self.samples[:, 0] / self.c_flat_ref

    def aligned(self, i: int) -> np.ndarray:
        return self.samples[:, 1 + i]

    def perpendicular(self, i: int) -> np.ndarray:
        return self.samples[:, 1 + len(self.d_over_lambda) + i]


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def correlation_points(sc: ScenarioConfig) -> np.ndarray:
    cc = sc.correlation
    ref = np.asarray(cc.reference_m, dtype=float)
    ea, ep = _unit(cc.aligned_axis), _unit(cc.perpendicular_axis)
    pts = [ref]
    pts += [ref + d * sc.wavelength * ea for d in cc.d_over_lambda]
    pts += [ref + d * sc.wavelength * ep for d in cc.d_over_lambda]
    return np.array(pts)


def correlation_ensemble(sc: ScenarioConfig, seed: int, fast: bool = False, reference_only: bool = False,
                         n: int | None = None) -> CorrelationEnsemble:
    """Oracle samples at the reference point and its displaced copies.

    Realization k uses the same surface whether or not the displaced points
    are evaluated, so ``reference_only`` reproduces column 0 bit for bit.
    """
    sc.require("tx_m", "surface", "correlation")
    cc = sc.correlation
    n = _n(cc.realizations, fast) if n is None else n
    sigma = cc.kappa_sigma_z / sc.k
    ell = cc.corr_len_per_sigma * sigma
    pts = correlation_points(sc)
    use = pts[:1] if reference_only else pts
    c_flat = complex(flat_oracle(sc, [pts[0]], fast)[0])
    samples = _ensemble(sc, _surface(sc, sigma, ell), list(use), n, stream_seed(seed, _STREAM_ENSEMBLE), fast)
    return CorrelationEnsemble(use, samples, tuple(cc.d_over_lambda), c_flat, sigma, ell)


CORRELATION_COLUMNS = ("d_over_lambda", "numeric_P", "numeric_A", "sinc_P", "sinc_A")


def correlation_predictions(sc: ScenarioConfig) -> list[tuple[float, float, float]]:
    cc = sc.correlation
    plane = sc.surface.plane()
    ref = cc.reference_m
    tp = elevation_window(ref, cc.perpendicular_axis, plane)
    ta = elevation_window(ref, cc.aligned_axis, plane)
    lam = sc.wavelength
    return [(d, spatial_correlation_sinc(d * lam, *tp, lam), spatial_correlation_sinc(d * lam, *ta, lam))
            for d in cc.d_over_lambda]


def correlation_table(sc: ScenarioConfig, seed: int, fast: bool = False,
                      ensemble: CorrelationEnsemble | None = None) -> Result:
    ens = ensemble or correlation_ensemble(sc, seed, fast)
    ref = ens.samples[:, 0]
    rows = []
    for i, (d, sp, sa) in enumerate(correlation_predictions(sc)):
        rp = abs(correlation_from_samples(ref, ens.perpendicular(i)))
        ra = abs(correlation_from_samples(ref, ens.aligned(i)))
        rows.append((d, rp, ra, sp, sa))
    plane = sc.surface.plane()
    summary = {
        "reference_m": list(sc.correlation.reference_m),
        "realizations": int(ens.samples.shape[0]),
        "sigma_z_m": ens.sigma_z,
        "corr_len_m": ens.corr_len,
        "window_perpendicular_rad": list(elevation_window(sc.correlation.reference_m, sc.correlation.perpendicular_axis, plane)),
        "window_aligned_rad": list(elevation_window(sc.correlation.reference_m, sc.correlation.aligned_axis, plane)),
    }
    return Result("correlation", [Table("correlation", CORRELATION_COLUMNS, rows)], summary)


PDF_COLUMNS = ("bin_center", "density_re", "density_im", "normal_re", "normal_im")
SAMPLE_COLUMNS = ("realization", "re", "im")


def pdf_table(sc: ScenarioConfig, seed: int, fast: bool = False,
              ensemble: CorrelationEnsemble | None = None) -> Result:
    sc.require("tx_m", "surface", "correlation", "pdf")
    n = _n(sc.pdf.realizations, fast)
    ens = ensemble or correlation_ensemble(sc, seed, fast, reference_only=True, n=n)
    x = ens.reference[:n]
    summ = summarize(x, bins=sc.pdf.bins)
    report = normality_check(summ) if summ.n >= 100 else None
    lim = float(np.max(np.abs(np.concatenate([x.real, x.imag]))))
    edges = np.linspace(-lim, lim, sc.pdf.bins + 1)
    dr, _ = np.histogram(x.real, bins=edges, density=True)
    di, _ = np.histogram(x.imag, bins=edges, density=True)
    centers = 0.5 * (edges[1:] + edges[:-1])
    nr = stats.norm.pdf(centers, x.real.mean(), x.real.std())
    ni = stats.norm.pdf(centers, x.imag.mean(), x.imag.std())
    hist = [(c, a, b, p, q) for c, a, b, p, q in zip(centers, dr, di, nr, ni)]
    samples = [(i, v.real, v.imag) for i, v in enumerate(x)]
    summary = {"moments": summ.to_json(), "normality": None if report is None else {
        "passed": report.passed, "defined": report.defined, "lines": report.lines()}}
    return Result("pdf", [Table("pdf", PDF_COLUMNS, hist), Table("pdf_samples", SAMPLE_COLUMNS, samples)], summary)


# --- length correlation ---------------------------------------------------------

LENGTH_COLUMNS = ("S", "corr_len_m", "numeric_gain", "theory_gain", "ratio", "numeric_gain_flat_oracle",
                  "n_realizations")


def length_s_grid(lc, s_lo: float) -> list[float]:
    if lc.s_values:
        return [float(s) for s in lc.s_values]
    below = np.geomspace(s_lo, 1.0, max(lc.n_below_one, 2))
    return [float(s) for s in below] + [float(s) for s in lc.s_above_one]


def length_correlation_table(sc: ScenarioConfig, seed: int, fast: bool = False) -> Result:
    """Mean power against the smoothness index, normalized by the flat specular gain."""
    sc.require("tx_m", "surface", "length_correlation")
    lc = sc.length_correlation
    n = _n(lc.realizations, fast)
    sigma = lc.kappa_sigma_z / sc.k
    rx = lc.rx_m
    T, R = ArrayGeometry.single(sc.tx_m), ArrayGeometry.single(rx)
    model = build_reflector_model(T, R, _surface(sc, sigma, 0.0), sc.k)
    cb2 = abs(model.c_bar_flat) ** 2
    c_flat = complex(flat_oracle(sc, [rx], fast)[0])
    rows = []
    for j, S in enumerate(length_s_grid(lc, model.s_min)):
        ell = corr_len_for_s(S, model.kappa_rho, model.kappa_z, sigma)
        vals = _ensemble(sc, _surface(sc, sigma, ell), [rx], n, stream_seed(seed, _STREAM_LENGTH, j), fast)[:, 0]
        p = float(np.mean(np.abs(vals) ** 2))
        theory = power_gain_s(S, cb2, model.c_tilde_inf_sq) / cb2
        rows.append((S, ell, p / cb2, theory, (p / cb2) / theory, p / abs(c_flat) ** 2, n))
    summary = {"rx_m": list(rx), "S_min": model.s_min, "floor_ratio": model.floor_ratio,
               "kappa_rho": model.kappa_rho, "kappa_z": model.kappa_z, "sigma_z_m": sigma,
               "flat_oracle_over_image": abs(c_flat) ** 2 / cb2}
    return Result("length-correlation", [Table("length_correlation", LENGTH_COLUMNS, rows)], summary)


# --- two-user trade-off -------------------------------------------------------------

def _kb(v: float) -> str:
    return f"{v:g}"


def tradeoff_columns(k_bars) -> tuple[str, ...]:
    cols = ["d_m", "d1_m", "sinr_los", "sinr_los_discrete"]
    for kb in k_bars:
        cols += [f"sinr_nlos_kbar_{_kb(kb)}", f"sinr_nlos_discrete_kbar_{_kb(kb)}"]
    return tuple(cols)


def _tradeoff_rows(tc, pairs) -> list[tuple]:
    rows = []
    for d1, d in pairs:
        geom = TradeoffGeometry(tc.frequency_hz, tc.n_elements, tc.phi0_rad, d1, d, tc.wall_gap_m,
                                tc.noise_ratio, tc.partitioned)
        t = tradeoff_point(geom, tc.k_bar_values)
        row = [d, d1, t.los_closed, t.los_discrete]
        for kb in tc.k_bar_values:
            row += [t.nlos_closed[float(kb)], t.nlos_discrete[float(kb)]]
        rows.append(tuple(row))
    return rows


def sinr_tradeoff_table(sc: ScenarioConfig, seed: int = 0, fast: bool = False) -> Result:
    sc.require("tradeoff")
    tc = sc.tradeoff
    cols = tradeoff_columns(tc.k_bar_values)
    rows_d = _tradeoff_rows(tc, [(tc.d1_m, d) for d in tc.d_sweep_m.values()])
    rows_d1 = _tradeoff_rows(tc, [(d1, tc.d_fixed_m) for d1 in tc.d1_sweep_m.values()])
    summary = {"geometry": "users on a ray at phi0 from the array axis, wall normal to x behind user 2",
               "n_elements": tc.n_elements, "partitioned": tc.partitioned}
    return Result("sinr-tradeoff", [Table("sinr_tradeoff_d", cols, rows_d),
                                    Table("sinr_tradeoff_d1", cols, rows_d1)], summary)


# --- reflected-path channels for the two-user scenario -----------------------------

def reflector_for(sc: ScenarioConfig, value: float, mode: str) -> ReflectorSpec:
    """Wall reflector for a requested loss value.

    ``wall_loss`` uses the value as the wall passivity, so the per-user
    Rician factor is value * d / d_v. ``rician`` imposes the value as the
    Rician factor of every link.
    """
    sc.require("wall")
    base = sc.wall.surface()
    if mode == "wall_loss":
        return ReflectorSpec(RoughSurface(base.plane, base.sigma_z, base.corr_len, value, base.loss_factor))
    if mode == "rician":
        return ReflectorSpec(base, k_bar=value)
    raise ValidationError(f"unknown k_bar mode {mode!r}")


def assemble_channel(sc: ScenarioConfig, seed: int, value: float, mode: str = "wall_loss",
                     array: ArrayGeometry | None = None, include_stochastic: bool = False):
    """Row channel and path gains of every user from the BS array."""
    sc.require("bs", "users_m", "wall")
    arr = array if array is not None else sc.bs_array()
    pl = PathLossModel(sc.path_loss.beta_db, sc.path_loss.d0_m, sc.path_loss.eta)
    spec = reflector_for(sc, value, mode)
    rows, gains = [], []
    for i, u in enumerate(sc.users_m):
        h, g = assemble_link(arr, ArrayGeometry.single(u), sc.k, pl, reflectors=[spec],
                             seed=stream_seed(seed, 10, i), include_stochastic=include_stochastic)
        rows.append(h.entries[0])
        gains.append(g)
    return rows, gains


def user_links(sc: ScenarioConfig, array: ArrayGeometry, value: float, mode: str) -> UserLinks:
    """Separate LOS and reflected rows per user, for side-lobe accounting."""
    pl = PathLossModel(sc.path_loss.beta_db, sc.path_loss.d0_m, sc.path_loss.eta)
    spec = reflector_for(sc, value, mode)
    plane = spec.surface.plane
    los, nlos, foci_l, foci_n = [], [], [], []
    for u in sc.users_m:
        _, g = assemble_link(array, ArrayGeometry.single(u), sc.k, pl, reflectors=[spec], include_stochastic=False)
        v = mirror_point(u, plane)
        los.append(row_channel(array, u, sc.k, g.c0))
        nlos.append(row_channel(array, v, sc.k, g.c_bar[0]))
        foci_l.append(Point3.of(u))
        foci_n.append(v)
    return UserLinks(tuple(los), tuple(nlos), tuple(foci_l), tuple(foci_n))


SMR_COLUMNS = ("Ly_m", "n_y", "smr_desired_los_db", "smr_interference_los_db", "smr_desired_nlos_db",
               "smr_interference_nlos_db", "smr_worst_db")


def _db(x: float) -> float:
    return float(10.0 * np.log10(x)) if x > 0 else float("-inf")


def smr_table(sc: ScenarioConfig, seed: int = 0, fast: bool = False) -> Result:
    """Side-lobe power of user 1 through the unused path, relative to its main lobe.

    Desired: the own beam seen through the other path. Interference: user 2's
    beam seen through the other path. Both are divided by the own main-lobe
    power, which is what enters the SINR.
    """
    sc.require("bs", "users_m", "wall", "smr")
    mc = sc.smr
    mode = sc.sumrate.k_bar_mode if sc.sumrate is not None else "wall_loss"
    spacing = sc.bs.spacing_wavelengths * sc.wavelength
    rows = []
    for ny in mc.n_y_values:
        arr = make_upa(sc.bs.center_m, int(ny), sc.bs.n_z, spacing)
        links = user_links(sc, arr, mc.k_bar, mode)
        ql = strategy_beams(arr, links, "los", sc.k)
        qn = strategy_beams(arr, links, "nlos", sc.k)
        h_l, h_n = links.los_rows[0], links.nlos_rows[0]
        vals = [smr(arr, ql[0], h_l, h_n), leakage_ratio(h_n, ql[1], h_l, ql[0]),
                smr(arr, qn[0], h_n, h_l), leakage_ratio(h_l, qn[1], h_n, qn[0])]
        db = [_db(v) for v in vals]
        rows.append((ny * spacing, int(ny), *db, max(db)))
    summary = {"k_bar": mc.k_bar, "k_bar_mode": mode, "threshold_db": mc.threshold_db, "n_z": sc.bs.n_z}
    return Result("smr", [Table("smr", SMR_COLUMNS, rows)], summary)


SUMRATE_COLUMNS = ("Pt_dBm", "rate_los", "rate_nlos")


def crossover_power(p_dbm, rate_los, rate_nlos) -> float | None:
    """First power where the reflected-path strategy overtakes LOS (linear interpolation)."""
    diff = np.asarray(rate_nlos) - np.asarray(rate_los)
    for i in range(len(diff) - 1):
        if diff[i] <= 0 < diff[i + 1]:
            t = -diff[i] / (diff[i + 1] - diff[i])
            return float(p_dbm[i] + t * (p_dbm[i + 1] - p_dbm[i]))
    return None


def sumrate_table(sc: ScenarioConfig, seed: int, fast: bool = False) -> Result:
    sc.require("bs", "users_m", "wall", "sumrate")
    sr = sc.sumrate
    arr = sc.bs_array()
    sigma2 = NoiseModel(sc.noise.bandwidth_hz, sc.noise.n0_dbm_per_hz, sc.noise.noise_figure_db).sigma2
    p_dbm = sr.powers_dbm()
    tables, per_kbar = [], {}
    for kb in sr.k_bar_values:
        rows_h, gains = assemble_channel(sc, seed, kb, sr.k_bar_mode, arr, sr.include_stochastic)
        links = user_links(sc, arr, kb, sr.k_bar_mode)
        ql = strategy_beams(arr, links, "los", sc.k)
        qn = strategy_beams(arr, links, "nlos", sc.k)
        rl = [sum_rate_from_rows(rows_h, ql, float(dbm_to_watts(p)), sigma2) for p in p_dbm]
        rn = [sum_rate_from_rows(rows_h, qn, float(dbm_to_watts(p)), sigma2) for p in p_dbm]
        tables.append(Table(f"sumrate_kbar_{_kb(kb)}", SUMRATE_COLUMNS, list(zip(p_dbm.tolist(), rl, rn))))
        per_kbar[_kb(kb)] = {
            "crossover_dBm": crossover_power(p_dbm, rl, rn),
            "rician_factors": [g.rician_factors[1][0] for g in gains],
        }
    summary = {"sigma2_w": sigma2, "k_bar_mode": sr.k_bar_mode, "per_k_bar": per_kbar}
    return Result("sumrate", tables, summary)


RUNNERS: dict[str, Callable[..., Result]] = {
    "regimes": regimes_table,
    "pdf": pdf_table,
    "correlation": correlation_table,
    "length-correlation": length_correlation_table,
    "sinr-tradeoff": sinr_tradeoff_table,
    "smr": smr_table,
    "sumrate": sumrate_table,
}


# --- output ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def csv_bytes(table: Table) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        if len(row) != len(table.columns):
            raise ValidationError(f"table {table.name}: row width does not match header")
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if np.isfinite(v) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def write_result(result: Result, sc: ScenarioConfig, out_dir: str | Path, seed: int, fast: bool) -> list[Path]:
    out = Path(out_dir)
    written = []
    for t in result.tables:
        p = out / f"{t.name}.csv"
        write_atomic(p, csv_bytes(t))
        written.append(p)
    side = {
        "experiment": result.experiment,
        "version": __version__,
        "seed": seed,
        "fast": fast,
        "outputs": [p.name for p in written],
        "columns": {t.name: list(t.columns) for t in result.tables},
        "scenario": sc.to_json(),
        "summary": result.summary,
    }
    sp = out / f"{result.experiment.replace('-', '_')}.json"
    write_atomic(sp, (json.dumps(_jsonable(side), indent=2, sort_keys=True) + "\n").encode("utf-8"))
    written.append(sp)
    return written


def run_experiment(name: str, sc: ScenarioConfig, out_dir: str | Path, seed: int | None = None,
                   fast: bool = False) -> list[Path]:
    if name not in RUNNERS:
        raise ValidationError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    seed = sc.seed if seed is None else int(seed)
    result = RUNNERS[name](sc, seed, fast)
    return write_result(result, sc, out_dir, seed, fast)
