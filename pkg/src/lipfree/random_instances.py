"""Seeded generators for random rational points, molecules and piecewise-affine functions."""

from __future__ import annotations

from fractions import Fraction
from random import Random

from .funcspec import FunctionSpec, parse_function
from .molecule import Molecule, beta, canonicalize, delta
from .spaces import EXACT, LinearMap, Point, Space


def rnd_fraction(rng: Random, lo: int = -10, hi: int = 10, max_den: int = 8) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(lo * den, hi * den), den)


def rnd_point(rng: Random, dim: int, lo: int = -10, hi: int = 10, max_den: int = 8, nonzero: bool = False) -> Point:
    while True:
        p = Point(tuple(rnd_fraction(rng, lo, hi, max_den) for _ in range(dim)))
        if not nonzero or not p.is_origin():
            return p


def rnd_molecule(rng: Random, space: Space, max_terms: int = 4, lo: int = -10, hi: int = 10, max_den: int = 8) -> Molecule:
    k = rng.randint(1, max_terms)
    terms = []
    for _ in range(k):
        a = rnd_fraction(rng, lo, hi, max_den)
        if a == 0:
            a = Fraction(1)
        terms.append((a, rnd_point(rng, space.dim, lo, hi, max_den, nonzero=True)))
    return Molecule(space, tuple(terms))


def rnd_kernel_molecule(rng: Random, space: Space, max_terms: int = 3) -> Molecule:
    m = rnd_molecule(rng, space, max_terms)
    return canonicalize(m - delta(space, beta(m)))


def rnd_linear_map(rng: Random, nrows: int, ncols: int, lo: int = -5, hi: int = 5, max_den: int = 4) -> LinearMap:
    return LinearMap(
        tuple(tuple(rnd_fraction(rng, lo, hi, max_den) for _ in range(ncols)) for _ in range(nrows))
    )


def _affine_atom(rng: Random, dim: int) -> str:
    parts = []
    for j in range(dim):
        c = rnd_fraction(rng, -4, 4, 4)
        if c == 0 and dim > 1 and rng.random() < 0.5:
            continue
        parts.append(f"{c}*x{j}")
    if not parts:
        parts.append(f"1*x{rng.randrange(dim)}")
    return " + ".join(parts)


def _pw_affine_text(rng: Random, dim: int, depth: int) -> str:
    if depth <= 0:
        return _affine_atom(rng, dim)
    roll = rng.random()
    a = _pw_affine_text(rng, dim, depth - 1)
    if roll < 0.3:
        return f"abs({a})"
    b = _pw_affine_text(rng, dim, depth - 1)
    if roll < 0.5:
        return f"min({a}, {b})"
    if roll < 0.7:
        return f"max({a}, {b})"
    if roll < 0.85:
        return f"({a}) + ({b})"
    return f"({a}) - ({b})"


def rnd_pw_affine(rng: Random, domain: Space, codomain: Space, depth: int = 2) -> FunctionSpec:
    text = "; ".join(_pw_affine_text(rng, domain.dim, depth) for _ in range(codomain.dim))
    return parse_function(text, domain, codomain, mode=EXACT)


def rnd_sample(rng: Random, space: Space, size: int, lo: int = -8, hi: int = 8, max_den: int = 6) -> list[Point]:
    from .spaces import origin

    pts = [origin(space.dim)]
    while len(pts) < size:
        p = rnd_point(rng, space.dim, lo, hi, max_den)
        if not any(p.coords == q.coords for q in pts):
            pts.append(p)
    return pts
