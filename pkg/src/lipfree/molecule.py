"""Finitely supported elements of the free space: formal sums of point masses.

A molecule is a formal combination sum_i a_i * delta_{x_i}.  Canonical form
merges duplicate points, drops zero coefficients and drops masses at the
origin -- every anchored function vanishes there, so delta_0 acts as the zero
functional.  Terms are sorted lexicographically by coordinates so canonical
output is reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .spaces import (
    EXACT,
    FLOAT,
    DimensionMismatch,
    LipfreeError,
    Point,
    Scalar,
    Space,
    convert_scalar,
    format_scalar,
    origin,
    scalar_is_exact,
)


class NotKernel(LipfreeError):
    """eta was handed a pair whose second component is not in ker(beta)."""


@dataclass(frozen=True, eq=False)
class Molecule:
    space: Space
    terms: tuple[tuple[Scalar, Point], ...] = ()

    def __add__(self, other: "Molecule") -> "Molecule":
        if self.space != other.space:
            raise DimensionMismatch("molecules live in different spaces")
        return Molecule(self.space, self.terms + other.terms)

    def __sub__(self, other: "Molecule") -> "Molecule":
        return self + (-other)

    def __neg__(self) -> "Molecule":
        return Molecule(self.space, tuple((-a, p) for a, p in self.terms))

    def scale(self, s: Scalar) -> "Molecule":
        return Molecule(self.space, tuple((s * a, p) for a, p in self.terms))

    def __rmul__(self, s: Scalar) -> "Molecule":
        return self.scale(s)

    def is_zero(self) -> bool:
        return not canonicalize(self).terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, Molecule):
            return NotImplemented
        if self.space != other.space:
            return False
        return canonicalize(self).terms == canonicalize(other).terms

    def __hash__(self) -> int:
        return hash((self.space, canonicalize(self).terms))

    def __repr__(self) -> str:
        can = canonicalize(self)
        if not can.terms:
            return f"Molecule({self.space.dim}d, 0)"
        parts = " + ".join(f"{format_scalar(a)}*d{tuple(map(format_scalar, p.coords))}" for a, p in can.terms)
        return f"Molecule({parts})"


def delta(space: Space, p: Point) -> Molecule:
    space.check_point(p)
    return Molecule(space, ((1, p),))


def zero_molecule(space: Space) -> Molecule:
    return Molecule(space, ())


def support(m: Molecule) -> tuple[Point, ...]:
    return tuple(p for _a, p in canonicalize(m).terms)


def is_exact_molecule(m: Molecule) -> bool:
    return all(scalar_is_exact(a) and all(scalar_is_exact(c) for c in p.coords) for a, p in m.terms)


def convert_molecule(m: Molecule, mode: str) -> Molecule:
    return Molecule(m.space, tuple((convert_scalar(a, mode), p.convert(mode)) for a, p in m.terms))


def canonicalize(m: Molecule) -> Molecule:
    """Merge duplicate points, drop zero coefficients and origin masses, sort."""
    merged: dict[tuple, list] = {}
    for a, p in m.terms:
        m.space.check_point(p)
        key = tuple(p.coords)
        if key in merged:
            merged[key][0] += a
        else:
            merged[key] = [a, p]
    out = []
    for coeff, p in merged.values():
        if coeff == 0 or p.is_origin():
            continue
        out.append((coeff, p))
    out.sort(key=lambda term: tuple(term[1].coords))
    return Molecule(m.space, tuple(out))


def beta(m: Molecule) -> Point:
    """The barycentre map: sum a_i * x_i.  Left inverse of x -> delta_x."""
    acc = origin(m.space.dim)
    for a, p in m.terms:
        m.space.check_point(p)
        acc = acc + p.scale(a)
    return acc


def is_kernel(m: Molecule, tol: Scalar = 1e-9) -> bool:
    """Whether beta(m) vanishes: exactly for exact data, within tol otherwise."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    b = beta(m)
    if is_exact_molecule(m):
        return b.is_origin()
    return m.space.norm(b) <= tol


def elementary_kernel(space: Space, r: Scalar, x1: Point, x2: Point) -> Molecule:
    """-r*delta_{x1} - delta_{x2} + delta_{r x1 + x2}, the generating kernel elements."""
    combo = x1.scale(r) + x2
    raw = Molecule(space, ((-r, x1), (-1, x2), (1, combo)))
    return canonicalize(raw)


@dataclass(frozen=True)
class EtaPair:
    """A point of X paired with a kernel molecule: the l1-sum coordinates of the free space."""

    base: Point
    kernel_part: Molecule


def eta(pair: EtaPair, tol: Scalar = 1e-9) -> Molecule:
    space = pair.kernel_part.space
    space.check_point(pair.base)
    if not is_kernel(pair.kernel_part, tol):
        raise NotKernel(f"beta of the kernel part is {beta(pair.kernel_part).coords}, not 0")
    return canonicalize(delta(space, pair.base) + pair.kernel_part)


def eta_inverse(m: Molecule) -> EtaPair:
    b = beta(m)
    kernel_part = canonicalize(m - delta(m.space, b))
    return EtaPair(b, kernel_part)


# ---------------------------------------------------------------------------
# file format: {"space": {"dim": 1, "norm": "l2"}, "terms": [{"a": "2", "x": ["1"]}]}


def molecule_to_obj(m: Molecule) -> dict:
    can = canonicalize(m)
    exact = is_exact_molecule(can)

    def enc(x):
        return format_scalar(x) if exact else float(x)

    return {
        "space": {"dim": m.space.dim, "norm": m.space.norm_kind},
        "terms": [{"a": enc(a), "x": [enc(c) for c in p.coords]} for a, p in can.terms],
    }


def molecule_from_obj(obj: dict, mode: str = EXACT) -> Molecule:
    try:
        spc = obj["space"]
        space = Space(int(spc["dim"]), str(spc.get("norm", "l2")))
        terms = []
        for term in obj.get("terms", []):
            a = convert_scalar(term["a"], mode)
            coords = tuple(convert_scalar(c, mode) for c in term["x"])
            if len(coords) != space.dim:
                raise DimensionMismatch(
                    f"term has {len(coords)} coordinates in a dim-{space.dim} space"
                )
            terms.append((a, Point(coords)))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed molecule object: {exc}") from exc
    return Molecule(space, tuple(terms))


def dump_molecule(m: Molecule) -> str:
    return json.dumps(molecule_to_obj(m), indent=2)


def load_molecule(text: str, mode: str = EXACT) -> Molecule:
    return molecule_from_obj(json.loads(text), mode)
