"""Lipschitz functions on R^n: a small expression language, tables, sampling.

Grammar (vector bodies are ';'-separated component expressions)::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := NUMBER | 'x'INDEX | '(' expr ')' | '-' factor
            | FUNC '(' expr (',' expr)? ')'
    FUNC   := abs | min | max | sin | cos
    NUMBER := digits | digits '.' digits | digits '/' digits

Unary minus is accepted on top of the published grammar as a convenience.
Parsed functions must vanish at the origin.  Exact mode keeps every scalar a
Fraction and is limited to piecewise-affine bodies (sums, differences,
constant multiples, abs, min, max); a body using sin/cos, or a product of two
non-constant factors, forces float mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import cos, sin
from typing import Callable, Union

from .spaces import (
    EXACT,
    FLOAT,
    DegenerateSample,
    DimensionMismatch,
    ExactModeError,
    LinearMap,
    LipfreeError,
    Point,
    Scalar,
    Space,
    as_exact,
    origin,
    scalar_is_exact,
)

ANCHOR_TOL = 1e-12


class ParseError(LipfreeError):
    """Grammar violation; carries the 0-based position in the source text."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class NotAnchored(LipfreeError):
    """The function does not vanish at the origin."""


class PointNotInTable(LipfreeError):
    pass


# ---------------------------------------------------------------------------
# tokens and AST


@dataclass(frozen=True)
class Token:
    kind: str  # NUM | VAR | NAME | OP | END
    text: str
    pos: int


_OPS = "+-*(),;"


def _tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPS:
            toks.append(Token("OP", ch, i))
            i += 1
            continue
        if ch.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            if i < n and text[i] == "." and i + 1 < n and text[i + 1].isdigit():
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
            elif i < n and text[i] == "/" and i + 1 < n and text[i + 1].isdigit():
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
            toks.append(Token("NUM", text[start:i], start))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            if word[0] == "x" and word[1:].isdigit():
                toks.append(Token("VAR", word, start))
            else:
                toks.append(Token("NAME", word, start))
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    toks.append(Token("END", "", n))
    return toks


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Lit(Expr):
    value: Fraction


@dataclass(frozen=True)
class Var(Expr):
    index: int


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # '+', '-', '*'
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    args: tuple[Expr, ...]


_FUNC_ARITY = {"abs": 1, "sin": 1, "cos": 1, "min": 2, "max": 2}


class _Parser:
    def __init__(self, tokens: list[Token], dim: int):
        self.toks = tokens
        self.i = 0
        self.dim = dim

    def peek(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok.kind == "OP" and tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        tok = self.peek()
        if not (tok.kind == "OP" and tok.text == text):
            raise ParseError(f"expected {text!r}, found {tok.text or '<end>'!r}", tok.pos)
        self.i += 1

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while True:
            tok = self.peek()
            if tok.kind == "OP" and tok.text in "+-":
                self.i += 1
                node = BinOp(tok.text, node, self.parse_term())
            else:
                return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while self.accept("*"):
            node = BinOp("*", node, self.parse_factor())
        return node

    def parse_factor(self) -> Expr:
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "-":
            self.i += 1
            return Neg(self.parse_factor())
        if tok.kind == "NUM":
            self.i += 1
            return Lit(Fraction(tok.text))
        if tok.kind == "VAR":
            self.i += 1
            index = int(tok.text[1:])
            if index >= self.dim:
                raise ParseError(f"variable {tok.text} exceeds domain dimension {self.dim}", tok.pos)
            return Var(index)
        if tok.kind == "NAME":
            if tok.text not in _FUNC_ARITY:
                raise ParseError(f"unknown function {tok.text!r}", tok.pos)
            self.i += 1
            self.expect("(")
            args = [self.parse_expr()]
            if self.accept(","):
                args.append(self.parse_expr())
            self.expect(")")
            arity = _FUNC_ARITY[tok.text]
            if len(args) != arity:
                raise ParseError(f"{tok.text} takes {arity} argument(s), got {len(args)}", tok.pos)
            return Call(tok.text, tuple(args))
        if tok.kind == "OP" and tok.text == "(":
            self.i += 1
            node = self.parse_expr()
            self.expect(")")
            return node
        raise ParseError(f"expected a factor, found {tok.text or '<end>'!r}", tok.pos)


def _eval_node(node: Expr, coords, mode: str):
    if isinstance(node, Lit):
        return node.value if mode == EXACT else float(node.value)
    if isinstance(node, Var):
        return coords[node.index]
    if isinstance(node, BinOp):
        a = _eval_node(node.left, coords, mode)
        b = _eval_node(node.right, coords, mode)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        return a * b
    if isinstance(node, Neg):
        return -_eval_node(node.arg, coords, mode)
    if isinstance(node, Call):
        args = [_eval_node(a, coords, mode) for a in node.args]
        if node.func == "abs":
            return abs(args[0])
        if node.func == "min":
            return min(args)
        if node.func == "max":
            return max(args)
        if node.func == "sin":
            return sin(args[0])
        return cos(args[0])
    raise TypeError(f"not an expression node: {node!r}")


def _uses_trig(node: Expr) -> bool:
    if isinstance(node, Call):
        if node.func in ("sin", "cos"):
            return True
        return any(_uses_trig(a) for a in node.args)
    if isinstance(node, BinOp):
        return _uses_trig(node.left) or _uses_trig(node.right)
    if isinstance(node, Neg):
        return _uses_trig(node.arg)
    return False


def _is_constant(node: Expr) -> bool:
    if isinstance(node, Lit):
        return True
    if isinstance(node, Var):
        return False
    if isinstance(node, BinOp):
        return _is_constant(node.left) and _is_constant(node.right)
    if isinstance(node, Neg):
        return _is_constant(node.arg)
    if isinstance(node, Call):
        return all(_is_constant(a) for a in node.args)
    return False


def _is_piecewise_affine(node: Expr) -> bool:
    if isinstance(node, (Lit, Var)):
        return True
    if isinstance(node, Neg):
        return _is_piecewise_affine(node.arg)
    if isinstance(node, BinOp):
        if node.op == "*" and not (_is_constant(node.left) or _is_constant(node.right)):
            return False
        return _is_piecewise_affine(node.left) and _is_piecewise_affine(node.right)
    if isinstance(node, Call):
        if node.func in ("sin", "cos"):
            return False
        return all(_is_piecewise_affine(a) for a in node.args)
    return False


# ---------------------------------------------------------------------------
# function bodies


@dataclass(frozen=True)
class ExprBody:
    components: tuple[Expr, ...]


@dataclass(frozen=True)
class TableBody:
    points: tuple[Point, ...]
    values: tuple[Point, ...]

    def lookup(self, x: Point) -> Point:
        for p, v in zip(self.points, self.values):
            if p.coords == x.coords or all(a == b for a, b in zip(p.coords, x.coords)):
                return v
        raise PointNotInTable(f"point {x.coords} is not a table point")


@dataclass(frozen=True)
class CallableBody:
    fn: Callable[[Point], Point]
    label: str


Body = Union[ExprBody, TableBody, CallableBody]


@dataclass(frozen=True)
class FunctionSpec:
    """An evaluable Lipschitz function with a declared arithmetic mode."""

    domain: Space
    codomain: Space
    body: Body
    mode: str
    source: str | None = None

    def describe(self) -> str:
        if self.source is not None:
            return self.source
        if isinstance(self.body, CallableBody):
            return self.body.label
        if isinstance(self.body, TableBody):
            return f"<table on {len(self.body.points)} points>"
        return "<expression>"


def parse_function(text: str, domain: Space, codomain: Space, mode: str | None = None) -> FunctionSpec:
    """Parse an expression body and anchor-check it at the origin.

    mode=None picks exact when the body is piecewise-affine (and trig-free),
    float otherwise; mode="exact" raises ExactModeError for bodies outside the
    piecewise-affine fragment.
    """
    tokens = _tokenize(text)
    # split on ';' at token level so error positions refer to the whole text
    groups: list[list[Token]] = [[]]
    for tok in tokens[:-1]:
        if tok.kind == "OP" and tok.text == ";":
            groups.append([])
        else:
            groups[-1].append(tok)
    if len(groups) != codomain.dim:
        raise ParseError(
            f"{len(groups)} component(s) for codomain of dimension {codomain.dim}", tokens[-1].pos
        )
    components = []
    for group in groups:
        end_pos = group[-1].pos + len(group[-1].text) if group else tokens[-1].pos
        parser = _Parser(group + [Token("END", "", end_pos)], domain.dim)
        node = parser.parse_expr()
        tok = parser.peek()
        if tok.kind != "END":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
        components.append(node)

    trig = any(_uses_trig(c) for c in components)
    affine = all(_is_piecewise_affine(c) for c in components)
    if mode == EXACT:
        if trig:
            raise ExactModeError("sin/cos force float mode")
        if not affine:
            raise ExactModeError("exact mode requires a piecewise-affine body")
    if mode is None:
        mode = EXACT if (affine and not trig) else FLOAT

    spec = FunctionSpec(domain, codomain, ExprBody(tuple(components)), mode, source=text)
    _check_anchor(spec)
    return spec


def _check_anchor(f: FunctionSpec) -> None:
    value = evaluate(f, origin(f.domain.dim))
    if f.mode == EXACT:
        if not value.is_origin():
            raise NotAnchored(f"f(0) = {value.coords}, expected 0")
    elif any(abs(float(c)) > ANCHOR_TOL for c in value.coords):
        raise NotAnchored(f"f(0) = {value.coords}, expected 0 within {ANCHOR_TOL}")


def table_function(domain: Space, codomain: Space, points, values, mode: str | None = None) -> FunctionSpec:
    """Build a sampled-table function; the table must contain the origin with value 0."""
    pts = tuple(points)
    vals = tuple(values)
    if len(pts) != len(vals):
        raise ValueError("points and values differ in length")
    for p in pts:
        domain.check_point(p)
    for v in vals:
        codomain.check_point(v)
    seen = []
    for p in pts:
        if any(p.coords == q.coords for q in seen):
            raise ValueError(f"duplicate table point {p.coords}")
        seen.append(p)
    if not any(p.is_origin() for p in pts):
        raise ValueError("table must contain the origin")
    if mode is None:
        exact = all(scalar_is_exact(c) for p in pts for c in p.coords) and all(
            scalar_is_exact(c) for v in vals for c in v.coords
        )
        mode = EXACT if exact else FLOAT
    spec = FunctionSpec(domain, codomain, TableBody(pts, vals), mode)
    _check_anchor(spec)
    return spec


def from_callable(domain: Space, codomain: Space, fn, label: str = "<callable>", mode: str = FLOAT) -> FunctionSpec:
    """Wrap a host callable Point -> Point; no anchor check (internal plumbing)."""
    return FunctionSpec(domain, codomain, CallableBody(fn, label), mode)


def wrap_linear(T: LinearMap, domain: Space, codomain: Space) -> FunctionSpec:
    if T.ncols != domain.dim or T.nrows != codomain.dim:
        raise DimensionMismatch(
            f"{T.nrows}x{T.ncols} matrix does not map dim {domain.dim} to dim {codomain.dim}"
        )
    mode = EXACT if all(scalar_is_exact(e) for row in T.rows for e in row) else FLOAT
    return from_callable(domain, codomain, T.apply, label=f"linear{T.rows!r}", mode=mode)


def evaluate(f: FunctionSpec, x: Point) -> Point:
    """Evaluate f at x.  Table-backed functions only know their table points."""
    f.domain.check_point(x)
    body = f.body
    if isinstance(body, ExprBody):
        if f.mode == EXACT:
            coords = tuple(as_exact(c) for c in x.coords)
        else:
            coords = tuple(float(c) for c in x.coords)
        return Point(tuple(_eval_node(c, coords, f.mode) for c in body.components))
    if isinstance(body, TableBody):
        return body.lookup(x)
    value = body.fn(x)
    f.codomain.check_point(value)
    return value


def distinct_points(sample) -> list[Point]:
    out: list[Point] = []
    for p in sample:
        if not any(all(a == b for a, b in zip(p.coords, q.coords)) for q in out):
            out.append(p)
    return out


def lip_constant_on_sample(f: FunctionSpec, sample) -> Scalar:
    """Largest difference quotient ||f(x)-f(y)||_Y / ||x-y||_X over sample pairs.

    A lower bound for Lip(f); monotone under sample growth.
    """
    pts = distinct_points(sample)
    if len(pts) < 2:
        raise DegenerateSample("need at least 2 distinct sample points")
    values = [evaluate(f, p) for p in pts]
    best: Scalar = 0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            dx = f.domain.dist(pts[i], pts[j])
            dy = f.codomain.norm(values[i] - values[j])
            ratio = dy / dx
            if ratio > best:
                best = ratio
    return best
