"""A dense two-phase simplex solver over exact rationals or doubles.

Problems maximise ``objective . v`` over free variables subject to '<=' / '=='
rows and optional per-variable box bounds.  The solver rewrites everything to
standard form (nonnegative variables, equality rows, nonnegative right-hand
sides), runs phase 1 with artificial variables, then phase 2.

Pivoting follows Bland's smallest-index rule throughout: the entering column
is the lowest-index improving column, and ratio-test ties leave the
lowest-index basic variable.  Bland's rule cannot cycle; a generous iteration
cap raises CycleDetected purely defensively.  In exact mode the tableau is all
Fractions and every comparison is exact; float mode compares against 1e-9.

Witnesses are reported in the original variable space and the value is
recomputed as objective . witness, so an Optimal solution attains its value by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .spaces import (
    EXACT,
    FLOAT,
    DimensionMismatch,
    LipfreeError,
    Scalar,
    as_exact,
    as_float,
    scalar_is_exact,
)

LE = "<="
EQ = "=="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

MAX_NONZEROS = 20_000
_MAX_PIVOTS = 200_000


class SizeLimit(LipfreeError):
    pass


class CycleDetected(LipfreeError):
    pass


@dataclass
class LpProblem:
    """maximise objective . v  s.t.  rows (coeffs, '<='|'==', rhs); bounds optional.

    bounds is a per-variable list of (lower, upper) with None meaning
    unbounded on that side; bounds=None leaves every variable free.
    """

    objective: list
    constraints: list = field(default_factory=list)
    bounds: list | None = None


@dataclass
class LpSolution:
    status: str
    value: Scalar | None = None
    witness: list | None = None


def _validate(problem: LpProblem) -> None:
    n = len(problem.objective)
    nonzeros = 0
    for coeffs, rel, _rhs in problem.constraints:
        if len(coeffs) != n:
            raise DimensionMismatch(f"constraint row of length {len(coeffs)}, expected {n}")
        if rel not in (LE, EQ):
            raise ValueError(f"unknown relation {rel!r}")
        nonzeros += sum(1 for a in coeffs if a)
    if problem.bounds is not None and len(problem.bounds) != n:
        raise DimensionMismatch(f"{len(problem.bounds)} bound pairs for {n} variables")
    if nonzeros > MAX_NONZEROS:
        raise SizeLimit(f"{nonzeros} nonzeros exceeds the {MAX_NONZEROS} limit")


def _infer_mode(problem: LpProblem) -> str:
    scalars = list(problem.objective)
    for coeffs, _rel, rhs in problem.constraints:
        scalars.extend(coeffs)
        scalars.append(rhs)
    for lo, hi in problem.bounds or ():
        if lo is not None:
            scalars.append(lo)
        if hi is not None:
            scalars.append(hi)
    return EXACT if all(scalar_is_exact(s) for s in scalars) else FLOAT


def _pivot(rows, obj, basis, r, c):
    piv = rows[r][c]
    if piv == 1:
        row = rows[r]
    else:
        rows[r] = row = [v / piv if v else v for v in rows[r]]
    for i, other in enumerate(rows):
        if i != r:
            f = other[c]
            if f:
                rows[i] = [a - f * b if b else a for a, b in zip(other, row)]
    f = obj[c]
    if f:
        obj[:] = [a - f * b if b else a for a, b in zip(obj, row)]
    basis[r] = c


def _run(rows, obj, basis, allowed, eps, budget):
    """Pivot until optimal/unbounded; returns (status, pivots used)."""
    pivots = 0
    while True:
        if pivots > budget:
            raise CycleDetected("pivot budget exhausted (should be unreachable with Bland's rule)")
        basic = set(basis)
        enter = None
        for j in allowed:
            if j not in basic and obj[j] > eps:
                enter = j
                break
        if enter is None:
            return OPTIMAL, pivots
        best_ratio = None
        leave = None
        for i, row in enumerate(rows):
            a = row[enter]
            if a > eps:
                ratio = row[-1] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave is None:
            return UNBOUNDED, pivots
        _pivot(rows, obj, basis, leave, enter)
        pivots += 1


def solve(problem: LpProblem, mode: str | None = None) -> LpSolution:
    _validate(problem)
    if mode is None:
        mode = _infer_mode(problem)
    conv = as_exact if mode == EXACT else as_float
    zero = Fraction(0) if mode == EXACT else 0.0
    one = Fraction(1) if mode == EXACT else 1.0
    eps = Fraction(0) if mode == EXACT else 1e-9

    n = len(problem.objective)
    c_orig = [conv(c) for c in problem.objective]
    bounds = problem.bounds or [(None, None)] * n

    # Rewrite each variable as shift + signed sum of nonnegative columns.
    shifts: list = []
    var_cols: list[list[tuple[int, int]]] = []
    box_rows: list[tuple[int, Scalar]] = []  # (column, upper bound on it)
    ncols = 0
    for lo, hi in bounds:
        lo = None if lo is None else conv(lo)
        hi = None if hi is None else conv(hi)
        if lo is not None and hi is not None and lo > hi:
            return LpSolution(INFEASIBLE)
        if lo is None and hi is None:
            var_cols.append([(ncols, 1), (ncols + 1, -1)])
            shifts.append(zero)
            ncols += 2
        elif hi is None:
            var_cols.append([(ncols, 1)])
            shifts.append(lo)
            ncols += 1
        elif lo is None:
            var_cols.append([(ncols, -1)])
            shifts.append(hi)
            ncols += 1
        else:
            var_cols.append([(ncols, 1)])
            shifts.append(lo)
            box_rows.append((ncols, hi - lo))
            ncols += 1

    raw_rows: list[tuple[list, str, Scalar]] = []
    for coeffs, rel, rhs in problem.constraints:
        dense = [zero] * ncols
        shifted_rhs = conv(rhs)
        for j, a in enumerate(coeffs):
            if not a:
                continue
            a = conv(a)
            shifted_rhs -= a * shifts[j]
            for col, sign in var_cols[j]:
                dense[col] += a if sign > 0 else -a
        raw_rows.append((dense, rel, shifted_rhs))
    for col, ub in box_rows:
        dense = [zero] * ncols
        dense[col] = one
        raw_rows.append((dense, LE, ub))

    nslack = sum(1 for _d, rel, _r in raw_rows if rel == LE)
    nrows = len(raw_rows)
    width = ncols + nslack
    rows: list[list] = []
    basis: list[int] = []
    needs_artificial: list[int] = []
    slack_at = 0
    for i, (dense, rel, rhs) in enumerate(raw_rows):
        row = dense + [zero] * nslack + [rhs]
        slack_col = None
        if rel == LE:
            slack_col = ncols + slack_at
            row[slack_col] = one
            slack_at += 1
        if row[-1] < 0:
            row = [-v for v in row]
            slack_col = None  # slack coefficient is now -1: not a basis candidate
        rows.append(row)
        if slack_col is None:
            basis.append(-1)  # artificial assigned below
            needs_artificial.append(i)
        else:
            basis.append(slack_col)

    art_start = width
    for k, i in enumerate(needs_artificial):
        col = art_start + k
        for row in rows:
            row.insert(-1, zero)
        rows[i][col] = one
        basis[i] = col
    total = width + len(needs_artificial)

    if needs_artificial:
        # phase 1: maximise -(sum of artificials)
        obj1 = [zero] * total + [zero]
        for col in range(art_start, total):
            obj1[col] = -one
        for i, b in enumerate(basis):
            if obj1[b]:
                f = obj1[b]
                obj1 = [a - f * r for a, r in zip(obj1, rows[i])]
        status, _ = _run(rows, obj1, basis, range(total), eps, _MAX_PIVOTS)
        if status != OPTIMAL or obj1[-1] > (eps if mode == FLOAT else 0):
            return LpSolution(INFEASIBLE)
        # drive leftover artificials out of the basis where possible
        for i, b in enumerate(basis):
            if b >= art_start:
                for j in range(width):
                    entry = rows[i][j]
                    if entry > eps or entry < -eps:
                        _pivot(rows, obj1, basis, i, j)
                        break
                # else: redundant row, the artificial stays basic at value 0

    # phase 2 objective over the standard columns
    obj = [zero] * total + [zero]
    for j, cols in enumerate(var_cols):
        for col, sign in cols:
            obj[col] += c_orig[j] if sign > 0 else -c_orig[j]
    for i, b in enumerate(basis):
        if obj[b]:
            f = obj[b]
            obj = [a - f * r for a, r in zip(obj, rows[i])]
    status, _ = _run(rows, obj, basis, range(width), eps, _MAX_PIVOTS)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED)

    xstd = [zero] * total
    for i, b in enumerate(basis):
        xstd[b] = rows[i][-1]
    witness = []
    for j in range(n):
        x = shifts[j]
        for col, sign in var_cols[j]:
            x = x + xstd[col] if sign > 0 else x - xstd[col]
        witness.append(x)
    value = sum((c * x for c, x in zip(c_orig, witness)), zero)
    return LpSolution(OPTIMAL, value, witness)


def check_solution(problem: LpProblem, sol: LpSolution, tol: Scalar = 0) -> bool:
    """Re-substitute a witness into every constraint (used by tests)."""
    if sol.status != OPTIMAL:
        return False
    x = sol.witness
    for coeffs, rel, rhs in problem.constraints:
        lhs = sum(a * v for a, v in zip(coeffs, x))
        if rel == LE and lhs > rhs + tol:
            return False
        if rel == EQ and abs(lhs - rhs) > tol:
            return False
    for j, (lo, hi) in enumerate(problem.bounds or []):
        if lo is not None and x[j] < lo - tol:
            return False
        if hi is not None and x[j] > hi + tol:
            return False
    return True
