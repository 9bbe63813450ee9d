"""Monte Carlo ensembles over surface realizations and their summaries."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .errors import ValidationError
from .surface import realization_seed

SKEW_LIMIT = 0.3
KURT_LIMIT = 0.5


def collect_samples(evaluator: Callable, surface, n: int, base_seed: int, workers: int = 1) -> np.ndarray:
    """Call ``evaluator(surface, seed_k)`` for k = 0..n-1 with split seeds.

    Results are stacked in index order regardless of ``workers``, so the
    output is identical for any degree of concurrency.
    """
    if n < 1:
        raise ValidationError("need at least one realization")
    seeds = [realization_seed(base_seed, k) for k in range(n)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(lambda s: evaluator(surface, s), seeds))
    else:
        out = [evaluator(surface, s) for s in seeds]
    return np.asarray(out, dtype=complex)


def _moments(x: np.ndarray) -> tuple[float, float]:
    if np.ptp(x) == 0:
        return float("nan"), float("nan")
    return float(stats.skew(x)), float(stats.kurtosis(x))


@dataclass(frozen=True)
class EnsembleSummary:
    n: int
    mean_re: float
    mean_im: float
    var: float
    skew_re: float
    skew_im: float
    kurt_re: float
    kurt_im: float
    hist_edges_re: tuple[float, ...]
    hist_counts_re: tuple[int, ...]
    hist_edges_im: tuple[float, ...]
    hist_counts_im: tuple[int, ...]
    mean_abs: float
    mean_power: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValidationError("an ensemble summary needs at least two samples")
        if self.var < 0:
            raise ValidationError("negative variance")

    @property
    def mean(self) -> complex:
        return complex(self.mean_re, self.mean_im)

    @property
    def std_error(self) -> float:
        return float(np.sqrt(self.var / self.n))

    def to_json(self) -> dict:
        d = asdict(self)
        d["hist_edges_re"] = list(self.hist_edges_re)
        d["hist_edges_im"] = list(self.hist_edges_im)
        d["hist_counts_re"] = list(self.hist_counts_re)
        d["hist_counts_im"] = list(self.hist_counts_im)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), allow_nan=True)


def summarize(samples, bins: int = 30) -> EnsembleSummary:
    x = np.asarray(samples, dtype=complex).reshape(-1)
    if x.size < 2:
        raise ValidationError("an ensemble summary needs at least two samples")
    # an exact constant keeps exact zero variance instead of summation residue
    m = x[0] if np.all(x == x[0]) else x.mean()
    var = float(np.mean(np.abs(x - m) ** 2))
    sr, kr = _moments(x.real)
    si, ki = _moments(x.imag)
    cr, er = np.histogram(x.real, bins=bins)
    ci, ei = np.histogram(x.imag, bins=bins)
    return EnsembleSummary(
        n=int(x.size), mean_re=float(m.real), mean_im=float(m.imag), var=var,
        skew_re=sr, skew_im=si, kurt_re=kr, kurt_im=ki,
        hist_edges_re=tuple(float(e) for e in er), hist_counts_re=tuple(int(c) for c in cr),
        hist_edges_im=tuple(float(e) for e in ei), hist_counts_im=tuple(int(c) for c in ci),
        mean_abs=float(np.mean(np.abs(x))), mean_power=float(np.mean(np.abs(x) ** 2)),
    )


def run_ensemble(evaluator: Callable, surface, n: int, base_seed: int, workers: int = 1) -> EnsembleSummary:
    if n < 2:
        raise ValidationError("n must be at least 2")
    return summarize(collect_samples(evaluator, surface, n, base_seed, workers))


@dataclass(frozen=True)
class NormalityReport:
    n: int
    skew_re: float
    skew_im: float
    kurt_re: float
    kurt_im: float
    defined: bool
    passed: bool

    def lines(self) -> list[str]:
        return [
            f"skew re {self.skew_re:+.3f} im {self.skew_im:+.3f} (limit {SKEW_LIMIT})",
            f"excess kurtosis re {self.kurt_re:+.3f} im {self.kurt_im:+.3f} (limit {KURT_LIMIT})",
        ]


def normality_check(summary: EnsembleSummary, skew_limit: float = SKEW_LIMIT,
                    kurt_limit: float = KURT_LIMIT) -> NormalityReport:
    """Moment-threshold Gaussianity test on real and imaginary parts."""
    if summary.n < 100:
        raise ValidationError("normality check needs at least 100 samples")
    vals = (summary.skew_re, summary.skew_im, summary.kurt_re, summary.kurt_im)
    defined = all(np.isfinite(vals))
    passed = defined and max(abs(summary.skew_re), abs(summary.skew_im)) < skew_limit \
        and max(abs(summary.kurt_re), abs(summary.kurt_im)) < kurt_limit
    return NormalityReport(summary.n, *vals, defined=bool(defined), passed=bool(passed))


def correlation_from_samples(a, b) -> complex:
    """Sample covariance E{(a - ma)(b - mb)^*} over the geometric mean of the two powers."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.size < 2:
        raise ValidationError("need two equally long sample streams")
    da = a - a.mean()
    db = b - b.mean()
    pa = np.mean(np.abs(da) ** 2)
    pb = np.mean(np.abs(db) ** 2)
    if not (pa > 0 and pb > 0):
        raise ValidationError("correlation undefined for a constant stream")
    return complex(np.mean(da * np.conj(db)) / np.sqrt(pa * pb))


def pairwise_correlation(evaluator: Callable, surface, n: int, base_seed: int, workers: int = 1) -> complex:
    """Correlation of the two coefficients returned by ``evaluator(surface, seed)``."""
    if n < 2:
        raise ValidationError("n must be at least 2")
    s = collect_samples(evaluator, surface, n, base_seed, workers)
    if s.ndim != 2 or s.shape[1] != 2:
        raise ValidationError("evaluator must return a pair of coefficients")
    return correlation_from_samples(s[:, 0], s[:, 1])


def lag1_correlation(x) -> float:
    x = np.asarray(x, dtype=complex)
    return abs(correlation_from_samples(x[:-1], x[1:]))
