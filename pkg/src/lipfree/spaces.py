"""Normed ambient spaces, points, linear maps, and the two scalar modes.

Everything in the package runs in one of two arithmetic modes:

* ``"exact"`` -- scalars are :class:`fractions.Fraction`, comparisons are exact;
* ``"float"`` -- scalars are IEEE doubles, comparisons carry small tolerances.

Finite doubles are dyadic rationals, so converting float data to exact mode is
lossless; the reverse direction rounds.  Exact mode is only available over the
polyhedral norms (l1, linf): an l2 distance is generally irrational and cannot
enter a rational linear program.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Scalar = Union[int, float, Fraction]

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

NORM_KINDS = ("l1", "l2", "linf")
POLYHEDRAL_NORMS = ("l1", "linf")


class LipfreeError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(LipfreeError):
    pass


class SpaceMismatch(LipfreeError):
    pass


class DegenerateSample(LipfreeError):
    pass


class ExactModeError(LipfreeError):
    """Exact rational arithmetic cannot honour the request."""


def scalar_is_exact(x: Scalar) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def as_exact(x) -> Fraction:
    """Convert to Fraction; floats convert exactly (they are dyadic rationals)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, (int, float)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")


def as_float(x) -> float:
    if isinstance(x, str):
        return float(Fraction(x.strip()))
    return float(x)


def convert_scalar(x, mode: str) -> Scalar:
    return as_exact(x) if mode == EXACT else as_float(x)


def parse_scalar(text: str, mode: str) -> Scalar:
    """Parse "p/q", an integer or a decimal literal in the requested mode."""
    return convert_scalar(text, mode)


def format_scalar(x: Scalar) -> str:
    if isinstance(x, (Fraction, int)):
        return str(x)
    return repr(float(x))


@dataclass(frozen=True)
class Point:
    """A point of R^n; coordinates are exact or float scalars."""

    coords: tuple[Scalar, ...]

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __add__(self, other: "Point") -> "Point":
        if len(self.coords) != len(other.coords):
            raise DimensionMismatch("point dimensions differ")
        return Point(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Point") -> "Point":
        if len(self.coords) != len(other.coords):
            raise DimensionMismatch("point dimensions differ")
        return Point(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Point":
        return Point(tuple(-a for a in self.coords))

    def scale(self, s: Scalar) -> "Point":
        return Point(tuple(s * a for a in self.coords))

    def __rmul__(self, s: Scalar) -> "Point":
        return self.scale(s)

    def is_origin(self) -> bool:
        return all(c == 0 for c in self.coords)

    def convert(self, mode: str) -> "Point":
        return Point(tuple(convert_scalar(c, mode) for c in self.coords))


def point(*coords: Scalar) -> Point:
    return Point(tuple(coords))


def origin(dim: int) -> Point:
    return Point((0,) * dim)


def unit_vector(dim: int, index: int) -> Point:
    if not 0 <= index < dim:
        raise DimensionMismatch(f"unit vector index {index} out of range for dim {dim}")
    return Point(tuple(1 if i == index else 0 for i in range(dim)))


@dataclass(frozen=True)
class Space:
    """R^n equipped with one of the l1, l2 or linf norms."""

    dim: int
    norm_kind: str = "l2"

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError("space dimension must be a positive integer")
        if self.norm_kind not in NORM_KINDS:
            raise ValueError(f"unknown norm kind {self.norm_kind!r}; expected one of {NORM_KINDS}")

    def check_point(self, p: Point) -> None:
        if p.dim != self.dim:
            raise DimensionMismatch(f"point of dim {p.dim} in space of dim {self.dim}")

    def norm(self, p: Point) -> Scalar:
        self.check_point(p)
        cs = p.coords
        if self.norm_kind == "l1":
            return sum(abs(c) for c in cs)
        if self.norm_kind == "linf":
            return max(abs(c) for c in cs)
        return math.sqrt(sum(float(c) * float(c) for c in cs))

    def dist(self, p: Point, q: Point) -> Scalar:
        return self.norm(p - q)

    def is_polyhedral(self) -> bool:
        return self.norm_kind in POLYHEDRAL_NORMS


@dataclass(frozen=True)
class LinearMap:
    """An m-by-n matrix acting R^n -> R^m."""

    rows: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        if not self.rows or not self.rows[0]:
            raise ValueError("matrix needs at least one row and one column")
        width = len(self.rows[0])
        for row in self.rows:
            if len(row) != width:
                raise ValueError("matrix rows have unequal lengths")
            for entry in row:
                if isinstance(entry, float) and not math.isfinite(entry):
                    raise ValueError("matrix entries must be finite")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def apply(self, p: Point) -> Point:
        if p.dim != self.ncols:
            raise DimensionMismatch(f"matrix has {self.ncols} columns, point has dim {p.dim}")
        return Point(tuple(sum(a * c for a, c in zip(row, p.coords)) for row in self.rows))

    def entry(self, i: int, j: int) -> Scalar:
        return self.rows[i][j]

    @staticmethod
    def from_rows(rows) -> "LinearMap":
        return LinearMap(tuple(tuple(row) for row in rows))

    @staticmethod
    def zero(nrows: int, ncols: int) -> "LinearMap":
        return LinearMap(tuple(tuple(0 for _ in range(ncols)) for _ in range(nrows)))


def resolve_mode(requested: str | None, space: Space, scalars=()) -> str:
    """Pick the arithmetic mode for a computation over `space`.

    Exact mode requires a polyhedral norm; with requested=None the mode is
    exact iff the norm allows it and every scalar is already exact.
    """
    if requested not in (None, EXACT, FLOAT):
        raise ValueError(f"unknown mode {requested!r}")
    if requested == EXACT:
        if not space.is_polyhedral():
            raise ExactModeError(
                f"exact mode needs rational distances; the {space.norm_kind} norm is not polyhedral"
            )
        return EXACT
    if requested == FLOAT:
        return FLOAT
    if not space.is_polyhedral():
        return FLOAT
    return EXACT if all(scalar_is_exact(s) for s in scalars) else FLOAT
