"""Exact step functions on the line and the molecule <-> L1 dictionary.

Everything here is exact rational arithmetic; float inputs are converted to
Fractions losslessly.  Step functions are open-interval valued (values at
breakpoints are measure zero and never stored) and kept canonical: adjacent
intervals with equal values merge, zero-valued end intervals are trimmed.

Because canonical form trims zero ends, a derivative profile cannot encode
"slope zero beyond my span": pairing_via_derivative extends profiles by their
boundary values, matching the slope-at-infinity reading.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .molecule import Molecule, canonicalize
from .spaces import LipfreeError, Scalar, as_exact


class NotOneDimensional(LipfreeError):
    pass


@dataclass(frozen=True)
class StepFunction:
    """Canonical piecewise-constant function with rational breakpoints.

    values[i] is taken on the open interval (breaks[i], breaks[i+1]); the
    function vanishes outside [breaks[0], breaks[-1]].  The zero function is
    the empty instance.
    """

    breaks: tuple[Fraction, ...] = ()
    values: tuple[Fraction, ...] = ()

    def is_zero(self) -> bool:
        return not self.values

    def intervals(self):
        for i, v in enumerate(self.values):
            yield self.breaks[i], self.breaks[i + 1], v


def step_function(breaks, values) -> StepFunction:
    """Build a canonical step function from raw breakpoints/values."""
    bs = [as_exact(b) for b in breaks]
    vs = [as_exact(v) for v in values]
    if len(bs) != len(vs) + 1 and not (len(bs) == 0 and len(vs) == 0):
        raise ValueError(f"{len(bs)} breakpoints need {max(len(bs) - 1, 0)} values, got {len(vs)}")
    for a, b in zip(bs, bs[1:]):
        if not a < b:
            raise ValueError("breakpoints must be strictly increasing")
    return _canonical(bs, vs)


def _canonical(bs: list[Fraction], vs: list[Fraction]) -> StepFunction:
    # merge equal neighbours
    mb: list[Fraction] = []
    mv: list[Fraction] = []
    for i, v in enumerate(vs):
        if mv and mv[-1] == v:
            mb[-1] = bs[i + 1]  # extend the previous interval
            continue
        if not mv:
            mb.append(bs[i])
        mb.append(bs[i + 1])
        mv.append(v)
    # trim zero ends
    while mv and mv[0] == 0:
        mv.pop(0)
        mb.pop(0)
    while mv and mv[-1] == 0:
        mv.pop()
        mb.pop()
    if not mv:
        return StepFunction((), ())
    return StepFunction(tuple(mb), tuple(mv))


def indicator(a, b) -> StepFunction:
    """The indicator of the open interval (a, b); empty when a >= b."""
    a, b = as_exact(a), as_exact(b)
    if not a < b:
        return StepFunction((), ())
    return StepFunction((a, b), (Fraction(1),))


def scale(s: StepFunction, c) -> StepFunction:
    c = as_exact(c)
    if c == 0 or s.is_zero():
        return StepFunction((), ())
    return _canonical(list(s.breaks), [c * v for v in s.values])


def add(s: StepFunction, t: StepFunction) -> StepFunction:
    if s.is_zero():
        return t
    if t.is_zero():
        return s
    cuts = sorted(set(s.breaks) | set(t.breaks))
    values = []
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) / 2
        values.append(_value_inside(s, mid) + _value_inside(t, mid))
    return _canonical(cuts, values)


def negate(s: StepFunction) -> StepFunction:
    return scale(s, -1)


def _value_inside(s: StepFunction, x: Fraction) -> Fraction:
    """Value at a point that is not a breakpoint; zero outside the span."""
    if s.is_zero() or x <= s.breaks[0] or x >= s.breaks[-1]:
        return Fraction(0)
    i = bisect_right(s.breaks, x) - 1
    return s.values[i]


def l1_norm(s: StepFunction) -> Fraction:
    return sum((abs(v) * (b - a) for a, b, v in s.intervals()), Fraction(0))


def integral(s: StepFunction) -> Fraction:
    """Lebesgue integral; the linear functional whose kernel is the zero-mean slice."""
    return sum((v * (b - a) for a, b, v in s.intervals()), Fraction(0))


def phi_map(m: Molecule) -> StepFunction:
    """The isometry taking delta_x to the signed indicator between 0 and x.

    delta_x maps to the indicator of (0, x) for x > 0, to minus the indicator
    of (x, 0) for x < 0, and to zero at the origin; extended linearly.
    """
    if m.space.dim != 1:
        raise NotOneDimensional(f"phi_map needs a molecule on the line, got dim {m.space.dim}")
    can = canonicalize(m)
    acc = StepFunction((), ())
    for a, p in can.terms:
        x = as_exact(p.coords[0])
        a = as_exact(a)
        if x > 0:
            acc = add(acc, scale(indicator(0, x), a))
        elif x < 0:
            acc = add(acc, scale(indicator(x, 0), -a))
    return acc


def pairing_via_derivative(fprime: StepFunction, m: Molecule) -> Fraction:
    """integral of fprime * phi(m); equals the pairing of m with the antiderivative.

    Outside its breakpoint span fprime is extended by its boundary values
    (constant slope continuation).
    """
    s = phi_map(m)
    if s.is_zero():
        return Fraction(0)
    total = Fraction(0)
    for a, b, v in s.intervals():
        cuts = [a] + [c for c in fprime.breaks if a < c < b] + [b]
        for lo, hi in zip(cuts, cuts[1:]):
            total += v * _extended_value(fprime, (lo + hi) / 2) * (hi - lo)
    return total


def _extended_value(fprime: StepFunction, x: Fraction) -> Fraction:
    if fprime.is_zero():
        return Fraction(0)
    if x <= fprime.breaks[0]:
        return fprime.values[0]
    if x >= fprime.breaks[-1]:
        return fprime.values[-1]
    i = bisect_right(fprime.breaks, x) - 1
    return fprime.values[i]


# ---------------------------------------------------------------------------
# file format: {"breaks": ["-2", "0", "1"], "values": ["-1", "2"]}


def step_to_obj(s: StepFunction) -> dict:
    return {"breaks": [str(b) for b in s.breaks], "values": [str(v) for v in s.values]}


def step_from_obj(obj: dict) -> StepFunction:
    try:
        return step_function(obj["breaks"], obj["values"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed step function object: {exc}") from exc


def dump_step(s: StepFunction) -> str:
    return json.dumps(step_to_obj(s), indent=2)


def load_step(text: str) -> StepFunction:
    return step_from_obj(json.loads(text))
