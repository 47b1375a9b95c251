"""The Y-valued pairing between functions and molecules, and its isometry checks.

pair(f, m) evaluates the molecule on the function: sum a_i f(x_i).  The
hat-norm check compares the sampled Lipschitz constant of f against the best
pairing over unit-ball molecules supported on the sample -- one joint LP over
coefficients and transport flows per sup-norm component.  The linearity test
probes f against random elementary kernel molecules; a nonzero pairing is a
certificate of nonlinearity, while a clean run only certifies the sampled
generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random

from . import lp_engine
from .funcspec import FunctionSpec, distinct_points, evaluate, lip_constant_on_sample
from .molecule import Molecule, canonicalize, elementary_kernel, is_kernel
from .spaces import (
    EXACT,
    FLOAT,
    Point,
    Scalar,
    Space,
    SpaceMismatch,
    origin,
    resolve_mode,
    scalar_is_exact,
)

HAT_TOL_FLOAT = 1e-7


def pair(f: FunctionSpec, m: Molecule) -> Point:
    """The duality pairing <f, m> = sum a_i f(x_i), a point of the codomain."""
    if f.domain != m.space:
        raise SpaceMismatch(f"function domain {f.domain} != molecule space {m.space}")
    can = canonicalize(m)
    acc = origin(f.codomain.dim)
    for a, p in can.terms:
        acc = acc + evaluate(f, p).scale(a)
    return acc


def _sample_mode(f: FunctionSpec, sample, requested: str | None) -> str:
    scalars = [c for p in sample for c in p.coords]
    mode = resolve_mode(requested, f.domain, scalars)
    if f.mode == FLOAT and mode == EXACT and requested is None:
        return FLOAT
    return mode


def _unit_ball_pairing_sup(space: Space, pts: list[Point], fvals: list[Scalar], mode: str):
    """max sum a_i fvals_i over molecules on pts with transport cost <= 1.

    Joint LP: coefficients a (free) plus nonnegative flows on the complete
    digraph over {0} u pts; each support node must ship its coefficient, the
    base absorbs the imbalance, and the total shipping cost is capped at 1.
    """
    base = origin(space.dim)
    nodes = [base] + pts
    k = len(nodes)
    edges = [(i, j) for i in range(k) for j in range(k) if i != j]
    na = len(pts)
    ncols = na + len(edges)
    cons = []
    for v in range(1, k):
        row = [0] * ncols
        row[v - 1] = -1
        for e, (i, j) in enumerate(edges):
            if i == v:
                row[na + e] += 1
            if j == v:
                row[na + e] -= 1
        cons.append((row, lp_engine.EQ, 0))
    cost_row = [0] * na + [space.dist(nodes[i], nodes[j]) for i, j in edges]
    cons.append((cost_row, lp_engine.LE, 1))
    objective = list(fvals) + [0] * len(edges)
    bounds = [(None, None)] * na + [(0, None)] * len(edges)
    sol = lp_engine.solve(lp_engine.LpProblem(objective, cons, bounds), mode=mode)
    if sol.status != lp_engine.OPTIMAL:
        raise lp_engine.LipfreeError(f"pairing LP came back {sol.status}")
    return sol.value, sol.witness[:na]


@dataclass
class HatNormReport:
    lip_lower: Scalar
    pairing_sup: Scalar
    gap: Scalar
    tol: Scalar
    ok: bool
    witness: Molecule | None = None


def hat_norm_check(f: FunctionSpec, sample, mode: str | None = None, tol: Scalar | None = None) -> HatNormReport:
    """Check that the sampled Lipschitz constant equals the unit-ball pairing sup."""
    pts = distinct_points(sample)
    if len(pts) < 2 or not any(p.is_origin() for p in pts):
        raise ValueError("sample needs >= 2 distinct points including the origin")
    resolved = _sample_mode(f, pts, mode)
    pts = [p.convert(resolved) for p in pts]
    lip = lip_constant_on_sample(f, pts)
    supp = [p for p in pts if not p.is_origin()]
    values = [evaluate(f, p) for p in supp]
    best = None
    best_a = None
    for comp in range(f.codomain.dim):
        fvals = [v.coords[comp] for v in values]
        value, a = _unit_ball_pairing_sup(f.domain, supp, fvals, resolved)
        if best is None or value > best:
            best, best_a = value, a
    witness = canonicalize(Molecule(f.domain, tuple(zip(best_a, supp))))
    if tol is None:
        tol = Fraction(0) if resolved == EXACT else HAT_TOL_FLOAT
    gap = abs(best - lip)
    return HatNormReport(lip, best, gap, tol, gap <= tol, witness)


@dataclass
class LinearityReport:
    is_linear: bool
    witness: Molecule | None = None
    pairing: Point | None = None
    trial: int | None = None


def linearity_test(
    f: FunctionSpec,
    trials: int = 200,
    tol: float = 1e-8,
    box: tuple[float, float] = (-10.0, 10.0),
    seed: int = 42,
) -> LinearityReport:
    """Probe f on random elementary kernel molecules.

    Returns a violating molecule as witness when some pairing exceeds tol; a
    clean run certifies linearity only on the sampled generators.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    lo, hi = float(box[0]), float(box[1])
    n = f.domain.dim
    for t in range(trials):
        rng = Random(seed * 1_000_003 + t)  # per-trial derivation, parallel-safe
        r = rng.uniform(lo, hi)
        x1 = Point(tuple(rng.uniform(lo, hi) for _ in range(n)))
        x2 = Point(tuple(rng.uniform(lo, hi) for _ in range(n)))
        w = elementary_kernel(f.domain, r, x1, x2)
        v = pair(f, w)
        if f.codomain.norm(v) > tol:
            return LinearityReport(False, w, v, t)
    return LinearityReport(True)
