"""Windowed translation averaging: projecting Lipschitz maps onto linear maps.

The translation difference phi_translate(f, x) = (z -> f(x+z) - f(z)) is
bounded by Lip(f)*||x||.  Averaging it over growing centred windows realises
an invariant mean on an admissible class: functions whose window averages
settle.  Admissibility is a first-class outcome -- a generic invariant mean
exists only non-constructively, so windowed_mean reports convergence instead
of pretending to it.

Window rules:

* grid(P), 1-d: trapezoid nodes with spacing fixed by the base window,
  h = 2*R0/(P-1); level k uses ~P*g^k nodes.  The fixed resolution is what
  lets oscillatory integrands cancel to O(1/R) instead of O(1/P).
* grid(P), 2-d: P x P trapezoid nodes per level (fixed count; coarser).
* monte_carlo(N, seed): N uniform samples per level, deterministic per-level
  seeds.  Required for dim >= 3.

A level whose samples are constant to ~1e-12 short-circuits immediately
("constant-window shortcut"), which recovers linear maps to machine
precision: their translation differences are constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

from .funcspec import (
    FunctionSpec,
    evaluate,
    from_callable,
    lip_constant_on_sample,
)
from .quotient import operator_norm
from .spaces import (
    EXACT,
    FLOAT,
    LinearMap,
    LipfreeError,
    Point,
    Scalar,
    Space,
    scalar_is_exact,
    unit_vector,
)

CONSTANT_SPREAD_TOL = 1e-12


class NotAdmissible(LipfreeError):
    """Window averages failed to settle within the schedule."""


@dataclass(frozen=True)
class WindowSchedule:
    """Geometric window schedule with an integration rule.

    rule is ("grid", points_per_dim) or ("monte_carlo", samples, seed).
    """

    base_radius: float = 8.0
    growth: float = 2.0
    max_levels: int = 8
    rule: tuple = ("grid", 129)
    tol: float = 1e-4

    def __post_init__(self):
        if not self.base_radius > 0:
            raise ValueError("base_radius must be positive")
        if not self.growth > 1:
            raise ValueError("growth must exceed 1")
        if self.max_levels < 2:
            raise ValueError("max_levels must be at least 2")
        if self.rule[0] == "grid":
            if len(self.rule) != 2 or int(self.rule[1]) < 3:
                raise ValueError("grid rule needs points_per_dim >= 3")
        elif self.rule[0] == "monte_carlo":
            if len(self.rule) != 3 or int(self.rule[1]) < 1:
                raise ValueError("monte_carlo rule needs (samples, seed)")
        else:
            raise ValueError(f"unknown rule {self.rule[0]!r}")


def default_schedule(dim: int) -> WindowSchedule:
    if dim <= 2:
        return WindowSchedule()
    return WindowSchedule(rule=("monte_carlo", 20000, 42))


@dataclass
class MeanResult:
    value: Point
    converged: bool
    levels: list[Point]


def phi_translate(f: FunctionSpec, x: Point) -> FunctionSpec:
    """The bounded translation difference z -> f(x + z) - f(z)."""
    f.domain.check_point(x)

    def shifted(z: Point) -> Point:
        return evaluate(f, x + z) - evaluate(f, z)

    label = f"translate[{f.describe()}; {tuple(map(str, x.coords))}]"
    return from_callable(f.domain, f.codomain, shifted, label=label, mode=f.mode)


def _grid_nodes_1d(radius: float, base_radius: float, points_per_dim: int):
    h = 2.0 * base_radius / (points_per_dim - 1)
    half = max(1, round(radius / h))
    pts = [Point((i * h,)) for i in range(-half, half + 1)]
    wts = [1.0] * len(pts)
    wts[0] = wts[-1] = 0.5
    return pts, wts

def _grid_nodes_2d(radius: float, points_per_dim: int):
    p = points_per_dim
    h = 2.0 * radius / (p - 1)
    axis = [-radius + i * h for i in range(p)]
    wx = [1.0] * p
    wx[0] = wx[-1] = 0.5
    pts = []
    wts = []
    for i, xi in enumerate(axis):
        for j, xj in enumerate(axis):
            pts.append(Point((xi, xj)))
            wts.append(wx[i] * wx[j])
    return pts, wts


def _window_nodes(dim: int, radius: float, sched: WindowSchedule, level: int):
    kind = sched.rule[0]
    if kind == "grid":
        if dim == 1:
            return _grid_nodes_1d(radius, sched.base_radius, int(sched.rule[1]))
        if dim == 2:
            return _grid_nodes_2d(radius, int(sched.rule[1]))
        raise ValueError("the grid rule supports dim <= 2; use monte_carlo for higher dims")
    samples, seed = int(sched.rule[1]), int(sched.rule[2])
    rng = Random(seed + 7919 * level)  # deterministic per-level derivation
    pts = [Point(tuple(rng.uniform(-radius, radius) for _ in range(dim))) for _ in range(samples)]
    return pts, [1.0] * samples


def windowed_mean(g: FunctionSpec, sched: WindowSchedule | None = None) -> MeanResult:
    """Average g over growing centred windows until two levels agree within tol.

    Returns the last computed average with a convergence flag; an unconverged
    result is reported, not raised.
    """
    sched = sched or default_schedule(g.domain.dim)
    m = g.codomain.dim
    levels: list[Point] = []
    prev: Point | None = None
    for level in range(sched.max_levels):
        radius = sched.base_radius * sched.growth**level
        pts, wts = _window_nodes(g.domain.dim, radius, sched, level)
        vals = [evaluate(g, p).coords for p in pts]
        total_w = sum(wts)
        avg = Point(
            tuple(sum(w * float(v[c]) for w, v in zip(wts, vals)) / total_w for c in range(m))
        )
        if level == 0 and _constant_spread(vals, avg):
            return MeanResult(avg, True, [avg])
        levels.append(avg)
        if prev is not None and g.codomain.norm(avg - prev) <= sched.tol:
            return MeanResult(avg, True, levels)
        prev = avg
    return MeanResult(levels[-1], False, levels)


def _constant_spread(vals, avg: Point) -> bool:
    for c, a in enumerate(avg.coords):
        allow = CONSTANT_SPREAD_TOL * (1.0 + abs(a))
        for v in vals:
            if abs(float(v[c]) - a) > allow:
                return False
    return True


@dataclass
class ProjectionReport:
    linear_map: LinearMap
    columns: list[MeanResult]
    additivity_defect: float | None = None


def project_linear(f: FunctionSpec, sched: WindowSchedule | None = None, strict: bool = False) -> LinearMap:
    """The linear map whose j-th column is the windowed mean of phi_translate(f, e_j)."""
    return project_linear_report(f, sched, strict=strict).linear_map


def project_linear_report(
    f: FunctionSpec,
    sched: WindowSchedule | None = None,
    additivity_pairs: int = 0,
    seed: int = 42,
    strict: bool = False,
) -> ProjectionReport:
    sched = sched or default_schedule(f.domain.dim)
    n, m = f.domain.dim, f.codomain.dim
    columns = []
    for j in range(n):
        g = phi_translate(f, unit_vector(n, j))
        columns.append(windowed_mean(g, sched))
    if strict:
        bad = [j for j, col in enumerate(columns) if not col.converged]
        if bad:
            raise NotAdmissible(f"window averages did not converge for columns {bad}")
    rows = tuple(tuple(columns[j].value.coords[i] for j in range(n)) for i in range(m))
    report = ProjectionReport(LinearMap(rows), columns)
    if additivity_pairs > 0:
        report.additivity_defect = _additivity_defect(f, sched, additivity_pairs, seed)
    return report


def _additivity_defect(f: FunctionSpec, sched: WindowSchedule, pairs: int, seed: int) -> float:
    """max ||P(f)(x+x') - P(f)(x) - P(f)(x')|| over random pairs (diagnostic)."""
    rng = Random(seed)
    n = f.domain.dim
    worst = 0.0

    def mean_at(x: Point) -> Point:
        return windowed_mean(phi_translate(f, x), sched).value

    for _ in range(pairs):
        x = Point(tuple(rng.uniform(-sched.base_radius, sched.base_radius) for _ in range(n)))
        y = Point(tuple(rng.uniform(-sched.base_radius, sched.base_radius) for _ in range(n)))
        defect = f.codomain.norm(mean_at(x + y) - mean_at(x) - mean_at(y))
        worst = max(worst, float(defect))
    return worst


def as_function(T: LinearMap, domain: Space, codomain: Space) -> FunctionSpec:
    """Wrap a matrix as an evaluable anchored function."""
    mode = EXACT if all(scalar_is_exact(e) for row in T.rows for e in row) else FLOAT
    return from_callable(domain, codomain, T.apply, label=f"linear{T.rows!r}", mode=mode)


def subtract_linear(f: FunctionSpec, T: LinearMap) -> FunctionSpec:
    """The residual f - T as an evaluable function."""

    def residual(z: Point) -> Point:
        return evaluate(f, z) - T.apply(z)

    return from_callable(
        f.domain, f.codomain, residual, label=f"residual[{f.describe()}]", mode=f.mode
    )


@dataclass
class DecomposeReport:
    linear_map: LinearMap
    residual_lip: Scalar
    lip_sample: Scalar
    operator_norm: Scalar
    lower_ok: bool
    upper_ok: bool
    tol: float
    columns: list[MeanResult]


def decompose(
    f: FunctionSpec,
    sample,
    sched: WindowSchedule | None = None,
    tol: float = 1e-6,
    strict: bool = False,
) -> DecomposeReport:
    """Split f into its projected linear part and a residual, with norm bookkeeping.

    Checks lip(f) <= ||T|| + lip(f - T) <= 3*lip(f) + tol on the sample.
    """
    report = project_linear_report(f, sched, strict=strict)
    T = report.linear_map
    residual = subtract_linear(f, T)
    residual_lip = lip_constant_on_sample(residual, sample)
    lip_sample = lip_constant_on_sample(f, sample)
    opn = operator_norm(T, f.domain, f.codomain)
    slack = 1e-9 * (1.0 + float(lip_sample))
    lower_ok = float(lip_sample) <= float(opn) + float(residual_lip) + slack
    upper_ok = float(opn) + float(residual_lip) <= 3.0 * float(lip_sample) + tol
    return DecomposeReport(T, residual_lip, lip_sample, opn, lower_ok, upper_ok, tol, report.columns)
