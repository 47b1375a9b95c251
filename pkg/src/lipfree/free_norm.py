"""The free-space norm of a molecule, two independent ways.

Dual route: the norm is the best pairing against a 1-Lipschitz anchored
potential, an LP over potential values on the support with pairwise
difference constraints (the base point is pinned to 0 and takes part in every
pair).  Primal route: a min-cost transshipment on the complete graph over the
support plus the base point, where node i must ship its coefficient a_i and
the base point absorbs the imbalance.  LP strong duality makes both values
agree -- exactly so in exact mode.

The norm does not depend on the target space: vector-valued pairings are
maximised by scalar potentials times a unit vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import lp_engine
from .molecule import Molecule, canonicalize, convert_molecule, is_exact_molecule
from .spaces import EXACT, Point, Scalar, Space, origin, resolve_mode


@dataclass
class NormCertificate:
    """Norm value with an optimality witness.

    potential maps support points (and the origin) to values of an anchored
    1-Lipschitz function attaining the norm; flow maps ordered point pairs to
    shipped mass.  Dual certificates carry a potential, primal ones a flow.
    Witnesses are LP vertices and need not be unique.
    """

    value: Scalar
    potential: dict[Point, Scalar] | None = None
    flow: dict[tuple[Point, Point], Scalar] | None = None


def _prepare(m: Molecule, mode: str | None):
    can = canonicalize(m)
    scalars = [a for a, _p in can.terms]
    scalars.extend(c for _a, p in can.terms for c in p.coords)
    resolved = resolve_mode(mode, m.space, scalars)
    return convert_molecule(can, resolved), resolved


def free_norm_dual(m: Molecule, mode: str | None = None) -> NormCertificate:
    """sup { sum a_i f(x_i) : f anchored, 1-Lipschitz on the support and 0 }."""
    can, resolved = _prepare(m, mode)
    space = m.space
    zero = Fraction(0) if resolved == EXACT else 0.0
    base = origin(space.dim)
    if not can.terms:
        return NormCertificate(zero, potential={base: zero}, flow={})
    coeffs = [a for a, _p in can.terms]
    pts = [p for _a, p in can.terms]
    k = len(pts)
    cons = []
    for i in range(k):
        for j in range(i + 1, k):
            d = space.dist(pts[i], pts[j])
            row_ij = [0] * k
            row_ij[i], row_ij[j] = 1, -1
            cons.append((row_ij, lp_engine.LE, d))
            cons.append(([-v for v in row_ij], lp_engine.LE, d))
    for i in range(k):
        d = space.dist(pts[i], base)
        row = [0] * k
        row[i] = 1
        cons.append((row, lp_engine.LE, d))
        cons.append(([-v for v in row], lp_engine.LE, d))
    sol = lp_engine.solve(lp_engine.LpProblem(coeffs, cons), mode=resolved)
    if sol.status != lp_engine.OPTIMAL:
        raise lp_engine.LipfreeError(f"norm LP came back {sol.status}")
    potential = {base: zero}
    for p, v in zip(pts, sol.witness):
        potential[p] = v
    return NormCertificate(sol.value, potential=potential)


def free_norm_primal(m: Molecule, mode: str | None = None) -> NormCertificate:
    """min-cost transshipment realising the coefficients as divergences."""
    can, resolved = _prepare(m, mode)
    space = m.space
    zero = Fraction(0) if resolved == EXACT else 0.0
    base = origin(space.dim)
    if not can.terms:
        return NormCertificate(zero, potential={base: zero}, flow={})
    coeffs = [a for a, _p in can.terms]
    nodes = [base] + [p for _a, p in can.terms]
    k = len(nodes)
    edges = [(i, j) for i in range(k) for j in range(k) if i != j]
    ncols = len(edges)
    cost = [space.dist(nodes[i], nodes[j]) for i, j in edges]
    cons = []
    for v in range(1, k):  # the base point (node 0) is unconstrained
        row = [0] * ncols
        for e, (i, j) in enumerate(edges):
            if i == v:
                row[e] += 1
            if j == v:
                row[e] -= 1
        cons.append((row, lp_engine.EQ, coeffs[v - 1]))
    objective = [-c for c in cost]  # minimise cost
    bounds = [(0, None)] * ncols
    sol = lp_engine.solve(lp_engine.LpProblem(objective, cons, bounds), mode=resolved)
    if sol.status != lp_engine.OPTIMAL:
        raise lp_engine.LipfreeError(f"transshipment LP came back {sol.status}")
    flow = {}
    for e, (i, j) in enumerate(edges):
        w = sol.witness[e]
        if w:
            flow[(nodes[i], nodes[j])] = w
    return NormCertificate(-sol.value, flow=flow)


def free_norm(m: Molecule, mode: str | None = None) -> Scalar:
    return free_norm_dual(m, mode).value
