"""Distance to the linear maps versus the kernel-ball supremum.

dist_to_linear minimises the sampled Lipschitz constant of f - T over
matrices T (an LP once the codomain norm is the sup-norm or the codomain is a
line: rows decouple).  kernel_ball_sup maximises the pairing of f over
molecules that are supported on the sample, annihilated by the barycentre map
and of free norm at most one.  On a finite sample these are a primal/dual LP
pair, so their values agree -- exactly in exact mode; a persistent gap means
an engine bug, not a mathematical failure, and raises IsometryViolation.

quotient_oracle_1d is the independent closed form on the line: half the
spread of consecutive difference quotients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import lp_engine
from .duality import _sample_mode
from .funcspec import FunctionSpec, distinct_points, evaluate
from .molecule import Molecule, canonicalize
from .spaces import (
    EXACT,
    DegenerateSample,
    LinearMap,
    LipfreeError,
    Point,
    Scalar,
    Space,
    origin,
)

THETA_TOL_FLOAT = 1e-7


class UnsupportedCodomainNorm(LipfreeError):
    """Only sup-norm (or one-dimensional) codomains keep these problems linear."""


class IsometryViolation(LipfreeError):
    pass


def operator_norm(T: LinearMap, domain: Space, codomain: Space) -> Scalar:
    """Operator norm of T between the configured norms.

    With a sup-norm (or scalar) codomain this is the largest dual norm of a
    row: max-abs entry for an l1 domain, row sum for linf, Euclidean row norm
    for l2.
    """
    _require_codomain(codomain)
    if T.ncols != domain.dim or T.nrows != codomain.dim:
        raise ValueError(f"{T.nrows}x{T.ncols} matrix between dims {domain.dim} -> {codomain.dim}")
    best: Scalar = 0
    for row in T.rows:
        if domain.norm_kind == "l1":
            r = max(abs(e) for e in row)
        elif domain.norm_kind == "linf":
            r = sum(abs(e) for e in row)
        else:
            r = math.sqrt(sum(float(e) * float(e) for e in row))
        if r > best:
            best = r
    return best


def _require_codomain(codomain: Space) -> None:
    if codomain.dim > 1 and codomain.norm_kind != "linf":
        raise UnsupportedCodomainNorm(
            f"codomain must be sup-normed or one-dimensional, got dim {codomain.dim} with {codomain.norm_kind}"
        )


def _checked_sample(f: FunctionSpec, sample, mode: str | None):
    _require_codomain(f.codomain)
    pts = distinct_points(sample)
    if len(pts) < 2:
        raise DegenerateSample("need at least 2 distinct sample points")
    if not any(p.is_origin() for p in pts):
        raise ValueError("sample must contain the origin")
    resolved = _sample_mode(f, pts, mode)
    return [p.convert(resolved) for p in pts], resolved


@dataclass
class DistanceReport:
    value: Scalar
    best: LinearMap


def dist_to_linear(f: FunctionSpec, sample, mode: str | None = None) -> DistanceReport:
    """min over matrices T of the sampled Lipschitz constant of f - T."""
    pts, resolved = _checked_sample(f, sample, mode)
    values = [evaluate(f, p) for p in pts]
    n = f.domain.dim
    rows = []
    worst: Scalar = 0
    for comp in range(f.codomain.dim):
        fvals = [v.coords[comp] for v in values]
        value, row = _dist_component(f.domain, pts, fvals, resolved)
        rows.append(tuple(row))
        if value > worst:
            worst = value
    return DistanceReport(worst, LinearMap(tuple(rows)))


def _dist_component(space: Space, pts, fvals, mode):
    # variables: T row entries t_1..t_n, then the bound t; minimise t
    n = space.dim
    cons = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            dx = pts[i] - pts[j]
            df = fvals[i] - fvals[j]
            d = space.dist(pts[i], pts[j])
            row = list(dx.coords) + [-d]
            cons.append((row, lp_engine.LE, df))
            cons.append(([-v for v in row], lp_engine.LE, -df))
    objective = [0] * n + [-1]
    sol = lp_engine.solve(lp_engine.LpProblem(objective, cons), mode=mode)
    if sol.status != lp_engine.OPTIMAL:
        raise LipfreeError(f"distance LP came back {sol.status}")
    return -sol.value, sol.witness[:n]


@dataclass
class KernelSupReport:
    value: Scalar
    witness: Molecule


def kernel_ball_sup(f: FunctionSpec, sample, mode: str | None = None) -> KernelSupReport:
    """sup of the pairing over kernel molecules of norm <= 1 supported on the sample."""
    pts, resolved = _checked_sample(f, sample, mode)
    supp = [p for p in pts if not p.is_origin()]
    values = [evaluate(f, p) for p in supp]
    best = None
    best_a = None
    for comp in range(f.codomain.dim):
        fvals = [v.coords[comp] for v in values]
        value, a = _kernel_component(f.domain, supp, fvals, resolved)
        if best is None or value > best:
            best, best_a = value, a
    witness = canonicalize(Molecule(f.domain, tuple(zip(best_a, supp))))
    return KernelSupReport(best, witness)


def _kernel_component(space: Space, pts, fvals, mode):
    base = origin(space.dim)
    nodes = [base] + list(pts)
    k = len(nodes)
    edges = [(i, j) for i in range(k) for j in range(k) if i != j]
    na = len(pts)
    ncols = na + len(edges)
    cons = []
    for d in range(space.dim):  # barycentre constraint: sum a_i x_i = 0
        row = [p.coords[d] for p in pts] + [0] * len(edges)
        cons.append((row, lp_engine.EQ, 0))
    for v in range(1, k):  # divergence: node v ships its coefficient
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
        raise LipfreeError(f"kernel-ball LP came back {sol.status}")
    return sol.value, sol.witness[:na]


@dataclass
class ThetaReport:
    distance: DistanceReport
    kernel_sup: KernelSupReport
    gap: Scalar
    tol: Scalar


def theta_isometry_check(
    f: FunctionSpec, sample, tol: Scalar | None = None, mode: str | None = None
) -> ThetaReport:
    """Certify dist_to_linear == kernel_ball_sup on the sample."""
    pts, resolved = _checked_sample(f, sample, mode)
    dist = dist_to_linear(f, pts, resolved)
    ksup = kernel_ball_sup(f, pts, resolved)
    if tol is None:
        tol = Fraction(0) if resolved == EXACT else THETA_TOL_FLOAT
    gap = abs(dist.value - ksup.value)
    if gap > tol:
        raise IsometryViolation(
            f"distance {dist.value} vs kernel-ball sup {ksup.value}: gap {gap} exceeds {tol}"
        )
    return ThetaReport(dist, ksup, gap, tol)


def quotient_oracle_1d(f: FunctionSpec, sample) -> Scalar:
    """Half the spread of consecutive difference quotients of a 1-d sample.

    Independent closed form for dist_to_linear on the line.
    """
    if f.domain.dim != 1:
        raise ValueError("the 1-d oracle needs a one-dimensional domain")
    pts = sorted(distinct_points(sample), key=lambda p: p.coords[0])
    if len(pts) < 2:
        raise DegenerateSample("need at least 2 distinct sample points")
    values = [evaluate(f, p) for p in pts]
    worst: Scalar = 0
    for comp in range(f.codomain.dim):
        slopes = [
            (values[i + 1].coords[comp] - values[i].coords[comp])
            / (pts[i + 1].coords[0] - pts[i].coords[0])
            for i in range(len(pts) - 1)
        ]
        spread = (max(slopes) - min(slopes)) / 2
        if spread > worst:
            worst = spread
    return worst
