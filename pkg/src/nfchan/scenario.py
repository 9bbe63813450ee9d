"""Strict JSON scenario files.

Every physical quantity carries its unit in the field name (``frequency_hz``,
``sigma_z_m``, ``noise_figure_db``). Unknown fields are rejected and missing
required fields are reported with their full path, e.g. ``surface.length_u_m``.
``ScenarioConfig.to_json`` echoes the resolved values including defaults.
"""

from __future__ import annotations

import json
import types
import typing
from dataclasses import MISSING, asdict, dataclass, field, fields, is_dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .geometry import ArrayGeometry, PlaneSpec, Point3, make_upa, wavelength, wavenumber
from .surface import RoughSurface

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class PlaneConfig:
    center_m: Vec3
    normal: Vec3
    length_u_m: float
    length_v_m: float
    axis_u: Vec3 | None = None
    sigma_z_m: float = 0.0
    corr_len_m: float = 0.0
    passivity: float = 1.0

    def plane(self) -> PlaneSpec:
        return PlaneSpec.from_normal(self.center_m, self.normal, self.length_u_m, self.length_v_m, self.axis_u)

    def surface(self) -> RoughSurface:
        return RoughSurface(self.plane(), self.sigma_z_m, self.corr_len_m, self.passivity)


@dataclass(frozen=True)
class OracleConfig:
    grid_step_wavelengths: float = 0.125
    block_rows: int = 256

    def __post_init__(self) -> None:
        if not 0 < self.grid_step_wavelengths <= 0.25:
            raise ValidationError("oracle.grid_step_wavelengths must lie in (0, 0.25]")


@dataclass(frozen=True)
class RegimesConfig:
    rx_m: Vec3
    kappa_sigma_z: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0, 3.0)
    corr_len_per_sigma: float = 2.0 * np.sqrt(2.0)
    realizations: int = 100


@dataclass(frozen=True)
class CorrelationConfig:
    reference_m: Vec3
    kappa_sigma_z: float = 3.0
    corr_len_per_sigma: float = 2.0 * np.sqrt(2.0)
    d_over_lambda: tuple[float, ...] = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
    aligned_axis: Vec3 = (0.0, 0.0, 1.0)
    perpendicular_axis: Vec3 = (1.0, 0.0, 0.0)
    realizations: int = 500


@dataclass(frozen=True)
class PdfConfig:
    """Distribution of the coefficient at the correlation reference point."""

    bins: int = 30
    realizations: int = 500


@dataclass(frozen=True)
class LengthCorrelationConfig:
    rx_m: Vec3
    kappa_sigma_z: float = 3.0
    s_values: tuple[float, ...] = ()
    n_below_one: int = 3
    s_above_one: tuple[float, ...] = (1.5, 2.0)
    realizations: int = 80


@dataclass(frozen=True)
class UpaConfig:
    center_m: Vec3 = (0.0, 0.0, 0.0)
    n_y: int = 400
    n_z: int = 10
    spacing_wavelengths: float = 0.5


@dataclass(frozen=True)
class PathLossConfig:
    beta_db: float = -68.0
    d0_m: float = 1.0
    eta: float = 2.0


@dataclass(frozen=True)
class NoiseConfig:
    bandwidth_hz: float = 20e6
    n0_dbm_per_hz: float = -174.0
    noise_figure_db: float = 6.0


@dataclass(frozen=True)
class SweepConfig:
    start: float
    stop: float
    num: int

    def values(self) -> np.ndarray:
        if self.num < 2:
            raise ValidationError("a sweep needs at least two points")
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class TradeoffConfig:
    """Two users on one ray from a ULA, wall behind the second user."""

    frequency_hz: float
    n_elements: int
    phi0_rad: float
    d1_m: float
    d_sweep_m: SweepConfig
    d_fixed_m: float
    d1_sweep_m: SweepConfig
    wall_gap_m: float = 1.0
    noise_ratio: float = 0.1
    partitioned: bool = False
    k_bar_values: tuple[float, ...] = (1.0, 0.6, 0.2)


@dataclass(frozen=True)
class SmrConfig:
    n_y_values: tuple[int, ...]
    k_bar: float = 1.0
    threshold_db: float = -20.0


@dataclass(frozen=True)
class SumRateConfig:
    k_bar_values: tuple[float, ...] = (1.0, 0.6, 0.2)
    k_bar_mode: str = "wall_loss"
    power_start_dbm: float = -50.0
    power_stop_dbm: float = 40.0
    power_step_db: float = 1.0
    include_stochastic: bool = False

    def __post_init__(self) -> None:
        if self.k_bar_mode not in ("wall_loss", "rician"):
            raise ValidationError("sumrate.k_bar_mode must be 'wall_loss' or 'rician'")
        if not self.power_step_db > 0 or self.power_stop_dbm < self.power_start_dbm:
            raise ValidationError("sumrate power grid is empty")

    def powers_dbm(self) -> np.ndarray:
        n = int(np.floor((self.power_stop_dbm - self.power_start_dbm) / self.power_step_db + 1e-9)) + 1
        return self.power_start_dbm + self.power_step_db * np.arange(n)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    frequency_hz: float
    seed: int = 0
    tx_m: Vec3 | None = None
    surface: PlaneConfig | None = None
    oracle: OracleConfig = field(default_factory=OracleConfig)
    regimes: RegimesConfig | None = None
    correlation: CorrelationConfig | None = None
    pdf: PdfConfig | None = None
    length_correlation: LengthCorrelationConfig | None = None
    bs: UpaConfig | None = None
    users_m: tuple[Vec3, ...] = ()
    wall: PlaneConfig | None = None
    path_loss: PathLossConfig = field(default_factory=PathLossConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    tradeoff: TradeoffConfig | None = None
    smr: SmrConfig | None = None
    sumrate: SumRateConfig | None = None

    def __post_init__(self) -> None:
        if not self.frequency_hz > 0:
            raise ValidationError("frequency_hz must be positive")
        if self.surface is not None and self.tx_m is not None:
            if self.surface.plane().to_local(self.tx_m)[2] <= 0:
                raise ValidationError("tx_m must lie above the surface")

    @property
    def k(self) -> float:
        return wavenumber(self.frequency_hz)

    @property
    def wavelength(self) -> float:
        return wavelength(self.frequency_hz)

    def bs_array(self) -> ArrayGeometry:
        if self.bs is None:
            raise ValidationError("scenario has no bs section")
        return make_upa(self.bs.center_m, self.bs.n_y, self.bs.n_z, self.bs.spacing_wavelengths * self.wavelength)

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) in (None, ())]
        if missing:
            raise ValidationError(f"scenario {self.name!r} lacks required section(s): {', '.join(missing)}")

    def to_json(self) -> dict:
        return asdict(self)


# --- strict construction --------------------------------------------------------

def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _convert(tp, value, path: str):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if origin in (typing.Union, types.UnionType):
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _convert(inner[0], value, path)
    if is_dataclass(tp):
        return _build(tp, value, path)
    if origin is tuple:
        if not isinstance(value, list):
            raise ValidationError(f"{path}: expected a list")
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_convert(args[0], v, f"{path}[{i}]") for i, v in enumerate(value))
        if len(value) != len(args):
            raise ValidationError(f"{path}: expected {len(args)} entries, got {len(value)}")
        return tuple(_convert(a, v, f"{path}[{i}]") for i, (a, v) in enumerate(zip(args, value)))
    if tp is bool:
        if not isinstance(value, bool):
            raise ValidationError(f"{path}: expected true or false")
        return value
    if tp is int:
        if isinstance(value, bool) or not (isinstance(value, int) or (isinstance(value, float) and value.is_integer())):
            raise ValidationError(f"{path}: expected an integer")
        return int(value)
    if tp is float:
        if not _is_number(value) or not np.isfinite(value):
            raise ValidationError(f"{path}: expected a finite number")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ValidationError(f"{path}: expected a string")
        return value
    raise ValidationError(f"{path}: unsupported field type {tp!r}")


def _build(cls, data, path: str = ""):
    if not isinstance(data, dict):
        raise ValidationError(f"{path or 'scenario'}: expected an object")
    hints = typing.get_type_hints(cls)
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        where = f"{path}." if path else ""
        raise ValidationError(f"unknown field {where}{unknown[0]}")
    kwargs = {}
    for name, f in known.items():
        sub = f"{path}.{name}" if path else name
        if name in data:
            kwargs[name] = _convert(hints[name], data[name], sub)
        elif f.default is MISSING and f.default_factory is MISSING:
            raise ValidationError(f"missing required field {sub}")
    try:
        return cls(**kwargs)
    except ValidationError as exc:
        raise ValidationError(f"{path or 'scenario'}: {exc}") from None
    except ValueError as exc:
        raise ValidationError(f"{path or 'scenario'}: {exc}") from None


def parse_scenario(data: dict) -> ScenarioConfig:
    return _build(ScenarioConfig, data)


def _reject_constant(token: str):
    raise ValidationError(f"non-standard JSON constant {token}")


def load_scenario(path: str | Path) -> ScenarioConfig:
    p = Path(path)
    if not p.is_file():
        bundled = bundled_scenario_path(str(path))
        if bundled is None:
            raise ValidationError(f"scenario file {path} not found")
        p = bundled
    try:
        data = json.loads(p.read_text(encoding="utf-8"), parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{p}: invalid JSON ({exc})") from None
    return parse_scenario(data)


def bundled_scenario_path(name: str) -> Path | None:
    """Path of a scenario shipped with the package, by file name or stem."""
    stem = name[:-5] if name.endswith(".json") else name
    ref = resources.files("nfchan") / "scenarios" / f"{stem}.json"
    return Path(str(ref)) if ref.is_file() else None


def point(v) -> Point3:
    return Point3.of(v)
