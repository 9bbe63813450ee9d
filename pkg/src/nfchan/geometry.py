"""Positions, antenna arrays, planes and near-field array responses.

All coordinates are Cartesian, right-handed and in meters. Arrays are
immutable once built; element order is row-major over the (u, v) grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

SPEED_OF_LIGHT = 299_792_458.0

_ORTHO_TOL = 1e-12


def wavelength(frequency_hz: float) -> float:
    if not frequency_hz > 0:
        raise ValidationError("frequency must be positive")
    return SPEED_OF_LIGHT / frequency_hz


def wavenumber(frequency_hz: float) -> float:
    return 2.0 * np.pi / wavelength(frequency_hz)


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not np.all(np.isfinite([self.x, self.y, self.z])):
            raise ValidationError(f"non-finite point {self.x, self.y, self.z}")

    @classmethod
    def of(cls, p: "Point3 | Sequence[float] | np.ndarray") -> "Point3":
        if isinstance(p, Point3):
            return p
        a = np.asarray(p, dtype=float).reshape(-1)
        if a.size != 3:
            raise ValidationError(f"expected 3 coordinates, got {a.size}")
        return cls(float(a[0]), float(a[1]), float(a[2]))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def distance(self, other: "Point3 | Sequence[float]") -> float:
        return float(np.linalg.norm(self.array - as_array(other)))


def as_array(p: "Point3 | Sequence[float] | np.ndarray") -> np.ndarray:
    if isinstance(p, Point3):
        return p.array
    a = np.asarray(p, dtype=float)
    if a.shape != (3,):
        raise ValidationError(f"expected a 3-vector, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class ArrayGeometry:
    """Ordered antenna element positions, shape (N, 3)."""

    positions: np.ndarray

    def __post_init__(self) -> None:
        pos = np.array(self.positions, dtype=float).reshape(-1, 3)
        if pos.shape[0] < 1:
            raise ValidationError("an array needs at least one element")
        if not np.all(np.isfinite(pos)):
            raise ValidationError("non-finite element position")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @classmethod
    def single(cls, p: "Point3 | Sequence[float]") -> "ArrayGeometry":
        return cls(as_array(p)[None, :])

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def elements(self) -> list[Point3]:
        return [Point3.of(r) for r in self.positions]

    @property
    def center(self) -> Point3:
        return Point3.of(self.positions.mean(axis=0))

    def translated(self, offset: "Point3 | Sequence[float]") -> "ArrayGeometry":
        return ArrayGeometry(self.positions + as_array(offset))


def _unit(v: Sequence[float]) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    nrm = np.linalg.norm(a)
    if a.shape != (3,) or not nrm > 0:
        raise ValidationError("axis must be a non-zero 3-vector")
    return a / nrm


def _check_orthonormal(*vecs: np.ndarray) -> None:
    for i, a in enumerate(vecs):
        if abs(np.dot(a, a) - 1.0) > _ORTHO_TOL:
            raise ValidationError("axis is not unit length")
        for b in vecs[i + 1:]:
            if abs(np.dot(a, b)) > _ORTHO_TOL:
                raise ValidationError("axes are not mutually orthogonal")


def make_upa(
    center: "Point3 | Sequence[float]",
    n_u: int,
    n_v: int,
    spacing: float,
    axes: tuple[Sequence[float], Sequence[float]] = ((0.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
) -> ArrayGeometry:
    """Centered rectangular grid of ``n_u * n_v`` elements.

    Element ``k = i * n_v + j`` sits at ``center + (i - (n_u-1)/2) s au + (j - (n_v-1)/2) s av``.
    """
    if int(n_u) != n_u or int(n_v) != n_v or n_u < 1 or n_v < 1:
        raise ValidationError("n_u and n_v must be positive integers")
    if not spacing > 0:
        raise ValidationError("spacing must be positive")
    au = np.asarray(axes[0], dtype=float)
    av = np.asarray(axes[1], dtype=float)
    if au.shape != (3,) or av.shape != (3,):
        raise ValidationError("axes must be 3-vectors")
    _check_orthonormal(au, av)
    iu = (np.arange(n_u) - (n_u - 1) / 2.0) * spacing
    iv = (np.arange(n_v) - (n_v - 1) / 2.0) * spacing
    gu, gv = np.meshgrid(iu, iv, indexing="ij")
    pos = as_array(center) + gu.reshape(-1, 1) * au + gv.reshape(-1, 1) * av
    return ArrayGeometry(pos)


def make_ula(center, n: int, spacing: float, axis: Sequence[float] = (0.0, 1.0, 0.0)) -> ArrayGeometry:
    axis = _unit(axis)
    # any unit vector orthogonal to the axis completes the pair
    helper = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 0.0, 1.0])
    other = np.cross(axis, helper)
    other /= np.linalg.norm(other)
    return make_upa(center, n, 1, spacing, (axis, other))


@dataclass(frozen=True)
class PlaneSpec:
    """Finite rectangle ``origin + s*axis_u + t*axis_v`` with |s| <= length_u/2, |t| <= length_v/2."""

    origin: Point3
    normal: tuple[float, float, float]
    axis_u: tuple[float, float, float]
    axis_v: tuple[float, float, float]
    length_u: float
    length_v: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "origin", Point3.of(self.origin))
        n, u, v = (np.asarray(a, dtype=float) for a in (self.normal, self.axis_u, self.axis_v))
        if any(a.shape != (3,) for a in (n, u, v)):
            raise ValidationError("plane vectors must be 3-vectors")
        _check_orthonormal(n, u, v)
        if not (self.length_u > 0 and self.length_v > 0):
            raise ValidationError("plane extents must be positive")
        for name, a in (("normal", n), ("axis_u", u), ("axis_v", v)):
            object.__setattr__(self, name, tuple(float(c) for c in a))

    @classmethod
    def horizontal(cls, center=(0.0, 0.0, 0.0), length_x: float = 1.0, length_y: float = 1.0) -> "PlaneSpec":
        return cls(Point3.of(center), (0.0, 0.0, 1.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), length_x, length_y)

    @classmethod
    def from_normal(cls, center, normal: Sequence[float], length_u: float, length_v: float,
                    axis_u: Sequence[float] | None = None) -> "PlaneSpec":
        n = _unit(normal)
        if axis_u is None:
            helper = np.array([0.0, 0.0, 1.0]) if abs(n[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
            u = helper - np.dot(helper, n) * n
        else:
            u = np.asarray(axis_u, dtype=float)
            u = u - np.dot(u, n) * n
        u = u / np.linalg.norm(u)
        v = np.cross(n, u)
        return cls(Point3.of(center), tuple(n), tuple(u), tuple(v), length_u, length_v)

    @property
    def n_vec(self) -> np.ndarray:
        return np.asarray(self.normal)

    @property
    def u_vec(self) -> np.ndarray:
        return np.asarray(self.axis_u)

    @property
    def v_vec(self) -> np.ndarray:
        return np.asarray(self.axis_v)

    @property
    def area(self) -> float:
        return self.length_u * self.length_v

    def to_local(self, p) -> np.ndarray:
        """Coordinates (s, t, h) of ``p``; h is the signed height along the normal."""
        d = (p.array if isinstance(p, Point3) else np.asarray(p, dtype=float)) - self.origin.array
        basis = np.stack([self.u_vec, self.v_vec, self.n_vec])
        return d @ basis.T

    def to_global(self, local) -> np.ndarray:
        local = np.asarray(local, dtype=float)
        basis = np.stack([self.u_vec, self.v_vec, self.n_vec])
        return self.origin.array + local @ basis

    def height(self, p) -> float:
        return float(np.dot(as_array(p) - self.origin.array, self.n_vec))


def mirror_point(p, plane: PlaneSpec) -> Point3:
    """Reflect ``p`` across the infinite plane through ``plane``."""
    a = as_array(p)
    n = plane.n_vec
    return Point3.of(a - 2.0 * np.dot(a - plane.origin.array, n) * n)


def mirror_array(arr: ArrayGeometry, plane: PlaneSpec) -> ArrayGeometry:
    n = plane.n_vec
    h = (arr.positions - plane.origin.array) @ n
    return ArrayGeometry(arr.positions - 2.0 * h[:, None] * n)


def distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise distances between rows of ``a`` (M, 3) and ``b`` (N, 3)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    return np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=-1))


def nf_array_response(array: ArrayGeometry, focus, wavenumber: float) -> np.ndarray:
    """Entry n is ``exp(j k |u_n - focus|)``."""
    if not wavenumber > 0:
        raise ValidationError("wavenumber must be positive")
    d = np.linalg.norm(array.positions - as_array(focus), axis=1)
    return np.exp(1j * wavenumber * d)


def points(ps: Iterable) -> np.ndarray:
    return np.array([as_array(p) for p in ps])
