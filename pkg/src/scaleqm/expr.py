"""Potential-energy expression DSL: parser, printer, evaluator, Taylor jets.

Grammar (whitespace-insensitive, one coordinate symbol ``x``)::

    expr      := term (('+'|'-') term)*
    term      := unary (('*'|'/') unary)*
    unary     := '-' unary | power
    power     := atom ('^' exponent)?
    exponent  := int | '(' [+-] int [ '/' int ] ')'
    atom      := number | name | name '(' expr ')' | '(' expr ')' | piecewise
    piecewise := 'piecewise' '(' piece (',' piece)* ')'
    piece     := '[' endpoint ',' endpoint ']' '->' expr

Functions: exp, sin, cos, sinh, abs.  Piecewise guards are half-open
``[lo, hi)`` intervals (the final one closed), must be listed in order, and
consecutive endpoints must match structurally.  ``inf`` is a literal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

FUNCTIONS = ("exp", "sin", "cos", "sinh", "abs")

COORDINATE = "x"


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class EvalError(ValueError):
    pass


class SmoothnessError(ValueError):
    """Taylor expansion requested at a non-smooth point."""


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

Span = tuple[int, int]


@dataclass(frozen=True)
class Num:
    value: float
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Sym:
    name: str
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*', '/'
    left: "Expr"
    right: "Expr"
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: Fraction
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Piece:
    lo: "Expr"
    hi: "Expr"
    body: "Expr"


@dataclass(frozen=True)
class Piecewise:
    pieces: tuple[Piece, ...]
    span: Span | None = field(default=None, compare=False)


Expr = Union[Num, Sym, Neg, BinOp, Pow, Call, Piecewise]


def free_symbols(expr: Expr) -> set[str]:
    """All symbol names in the expression, the coordinate included."""
    out: set[str] = set()

    def walk(e: Expr) -> None:
        if isinstance(e, Sym):
            out.add(e.name)
        elif isinstance(e, Neg):
            walk(e.operand)
        elif isinstance(e, BinOp):
            walk(e.left)
            walk(e.right)
        elif isinstance(e, Pow):
            walk(e.base)
        elif isinstance(e, Call):
            walk(e.arg)
        elif isinstance(e, Piecewise):
            for p in e.pieces:
                walk(p.lo)
                walk(p.hi)
                walk(p.body)

    walk(expr)
    return out


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_OPS = set("+-*/^(),[]")


@dataclass(frozen=True)
class _Token:
    kind: str  # 'num', 'name', 'op', 'arrow', 'end'
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "-" and text[i:i + 2] == "->":
            tokens.append(_Token("arrow", "->", i))
            i += 2
            continue
        if ch in _OPS:
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            tokens.append(_Token("num", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character '{ch}'", text, i)
    tokens.append(_Token("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            raise ParseError(f"expected '{want}' but found '{tok.text or 'end of input'}'",
                             self.text, tok.pos)
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected '{tok.text}'", self.text, tok.pos)
        return e

    def expr(self) -> Expr:
        start = self.peek().pos
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next().text
            rhs = self.term()
            node = BinOp(op, node, rhs, span=(start, self._end()))
        return node

    def term(self) -> Expr:
        start = self.peek().pos
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.next().text
            rhs = self.unary()
            node = BinOp(op, node, rhs, span=(start, self._end()))
        return node

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.next()
            operand = self.unary()
            return Neg(operand, span=(tok.pos, self._end()))
        return self.power()

    def power(self) -> Expr:
        start = self.peek().pos
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.next()
            exponent = self.exponent()
            node = Pow(base, exponent, span=(start, self._end()))
            if self.peek().kind == "op" and self.peek().text == "^":
                raise ParseError("chained '^' needs parentheses", self.text, self.peek().pos)
            return node
        return base

    def exponent(self) -> Fraction:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            if "." in tok.text or "e" in tok.text or "E" in tok.text:
                raise ParseError("exponent must be an integer or (p/q)", self.text, tok.pos)
            return Fraction(int(tok.text))
        if tok.kind == "op" and tok.text == "-":
            self.next()
            return -self.exponent()
        if tok.kind == "op" and tok.text == "(":
            self.next()
            sign = 1
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.next()
                sign = -1 if tok.text == "-" else 1
            num_tok = self.expect("num")
            if "." in num_tok.text:
                raise ParseError("exponent must be rational p/q", self.text, num_tok.pos)
            num = int(num_tok.text)
            den = 1
            if self.peek().kind == "op" and self.peek().text == "/":
                self.next()
                den_tok = self.expect("num")
                den = int(den_tok.text)
            self.expect("op", ")")
            return Fraction(sign * num, den)
        raise ParseError("expected exponent after '^'", self.text, tok.pos)

    def atom(self) -> Expr:
        tok = self.next()
        if tok.kind == "num":
            return Num(float(tok.text), span=(tok.pos, tok.pos + len(tok.text)))
        if tok.kind == "name":
            if tok.text == "piecewise":
                return self.piecewise(tok.pos)
            if self.peek().kind == "op" and self.peek().text == "(":
                if tok.text not in FUNCTIONS:
                    raise ParseError(f"unknown function '{tok.text}'", self.text, tok.pos)
                self.next()
                arg = self.expr()
                self.expect("op", ")")
                return Call(tok.text, arg, span=(tok.pos, self._end()))
            if tok.text == "inf":
                return Num(math.inf, span=(tok.pos, tok.pos + 3))
            return Sym(tok.text, span=(tok.pos, tok.pos + len(tok.text)))
        if tok.kind == "op" and tok.text == "(":
            e = self.expr()
            self.expect("op", ")")
            return e
        raise ParseError(f"unexpected '{tok.text or 'end of input'}'", self.text, tok.pos)

    def piecewise(self, start: int) -> Expr:
        self.expect("op", "(")
        pieces = [self.piece()]
        while self.peek().kind == "op" and self.peek().text == ",":
            self.next()
            pieces.append(self.piece())
        self.expect("op", ")")
        node = Piecewise(tuple(pieces), span=(start, self._end()))
        _validate_piecewise(node, self.text, start)
        return node

    def piece(self) -> Piece:
        self.expect("op", "[")
        lo = self.expr()
        self.expect("op", ",")
        hi = self.expr()
        self.expect("op", "]")
        self.expect("arrow")
        body = self.expr()
        for endpoint in (lo, hi):
            if COORDINATE in free_symbols(endpoint):
                raise ParseError("piecewise guard endpoints may not contain x",
                                 self.text, self.peek().pos)
        return Piece(lo, hi, body)

    def _end(self) -> int:
        return self.tokens[self.i - 1].pos + len(self.tokens[self.i - 1].text)


def _strip_spans(e: Expr) -> Expr:
    if isinstance(e, Num):
        return Num(e.value)
    if isinstance(e, Sym):
        return Sym(e.name)
    if isinstance(e, Neg):
        return Neg(_strip_spans(e.operand))
    if isinstance(e, BinOp):
        return BinOp(e.op, _strip_spans(e.left), _strip_spans(e.right))
    if isinstance(e, Pow):
        return Pow(_strip_spans(e.base), e.exponent)
    if isinstance(e, Call):
        return Call(e.func, _strip_spans(e.arg))
    if isinstance(e, Piecewise):
        return Piecewise(tuple(Piece(_strip_spans(p.lo), _strip_spans(p.hi),
                                     _strip_spans(p.body)) for p in e.pieces))
    raise TypeError(type(e))


def _validate_piecewise(node: Piecewise, text: str, pos: int) -> None:
    # guards must be ordered and share endpoints so [lo, hi) pieces tile the domain
    for a, b in zip(node.pieces, node.pieces[1:]):
        if _strip_spans(a.hi) != _strip_spans(b.lo):
            raise ParseError("piecewise guards must be adjacent: each upper endpoint "
                             "has to equal the next lower endpoint", text, pos)


def parse(text: str) -> Expr:
    """Parse DSL text into an AST; raises ParseError with line/column on bad input."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _fmt_num(v: float) -> str:
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    if float(v).is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(float(v))


def print_expr(expr: Expr) -> str:
    """Render an AST back to DSL text; parse(print_expr(e)) == e structurally."""

    def render(e: Expr, parent_prec: int) -> str:
        if isinstance(e, Num):
            s = _fmt_num(e.value)
            if (e.value < 0 or s.startswith("-")) and parent_prec > _PREC["+"]:
                return f"({s})"
            return s
        if isinstance(e, Sym):
            return e.name
        if isinstance(e, Neg):
            s = "-" + render(e.operand, _PREC["neg"])
            return f"({s})" if parent_prec > _PREC["neg"] else s
        if isinstance(e, BinOp):
            prec = _PREC[e.op]
            left = render(e.left, prec)
            # '-' and '/' are left-associative: right operand needs a bump
            right = render(e.right, prec + (1 if e.op in "-/" else 0))
            joiner = f" {e.op} " if e.op in "+-" else e.op
            s = f"{left}{joiner}{right}"
            return f"({s})" if parent_prec > prec else s
        if isinstance(e, Pow):
            base = render(e.base, _PREC["^"] + 1)
            exp = e.exponent
            if exp.denominator == 1:
                return f"{base}^{exp.numerator}" if exp >= 0 else f"{base}^({exp.numerator})"
            return f"{base}^({exp.numerator}/{exp.denominator})"
        if isinstance(e, Call):
            return f"{e.func}({render(e.arg, 0)})"
        if isinstance(e, Piecewise):
            parts = [f"[{render(p.lo, 0)}, {render(p.hi, 0)}] -> {render(p.body, 0)}"
                     for p in e.pieces]
            return "piecewise(" + ", ".join(parts) + ")"
        raise TypeError(type(e))

    return render(expr, 0)


# ---------------------------------------------------------------------------
# Evaluation (scalar or numpy array in x)
# ---------------------------------------------------------------------------

_FUNC_IMPL = {"exp": np.exp, "sin": np.sin, "cos": np.cos, "sinh": np.sinh, "abs": np.abs}


def evaluate(expr: Expr, x, params: dict[str, float] | None = None):
    """Evaluate at coordinate value(s) x with all parameters bound to reals.

    x may be a scalar or a numpy array; the result matches its shape.
    """
    params = params or {}

    def ev(e: Expr):
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Sym):
            if e.name == COORDINATE:
                return x
            try:
                return params[e.name]
            except KeyError:
                raise EvalError(f"unbound parameter '{e.name}'") from None
        if isinstance(e, Neg):
            return -ev(e.operand)
        if isinstance(e, BinOp):
            a, b = ev(e.left), ev(e.right)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            return a / b
        if isinstance(e, Pow):
            base = ev(e.base)
            p = e.exponent
            if p.denominator == 1:
                return base ** int(p)
            return base ** float(p)
        if isinstance(e, Call):
            return _FUNC_IMPL[e.func](ev(e.arg))
        if isinstance(e, Piecewise):
            return _eval_piecewise(e, x, params)
        raise TypeError(type(e))

    return ev(expr)


def _eval_piecewise(e: Piecewise, x, params):
    bounds = [(evaluate(p.lo, math.nan, params), evaluate(p.hi, math.nan, params))
              for p in e.pieces]
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xv = np.atleast_1d(xs)
    out = np.empty_like(xv)
    covered = np.zeros(xv.shape, dtype=bool)
    last = len(e.pieces) - 1
    for idx, (piece, (lo, hi)) in enumerate(zip(e.pieces, bounds)):
        mask = (xv >= lo) & ((xv <= hi) if idx == last else (xv < hi))
        mask &= ~covered
        if mask.any():
            out[mask] = evaluate(piece.body, xv[mask], params)
        covered |= mask
    if not covered.all():
        bad = float(xv[~covered][0])
        raise EvalError(f"x={bad!r} lies outside every piecewise guard")
    return float(out[0]) if scalar else out.reshape(xs.shape)


# ---------------------------------------------------------------------------
# Taylor jets (truncated Taylor-series arithmetic, forward-mode AD)
# ---------------------------------------------------------------------------

class Jet:
    """Truncated Taylor polynomial sum c[k] t^k used to propagate derivatives."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = list(coeffs)

    @classmethod
    def constant(cls, value: float, order: int) -> "Jet":
        return cls([float(value)] + [0.0] * order)

    @classmethod
    def variable(cls, value: float, order: int) -> "Jet":
        c = [float(value)] + [0.0] * order
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    def __add__(self, o: "Jet") -> "Jet":
        return Jet([a + b for a, b in zip(self.c, o.c)])

    def __sub__(self, o: "Jet") -> "Jet":
        return Jet([a - b for a, b in zip(self.c, o.c)])

    def __neg__(self) -> "Jet":
        return Jet([-a for a in self.c])

    def __mul__(self, o: "Jet") -> "Jet":
        n = len(self.c)
        out = [0.0] * n
        for i, a in enumerate(self.c):
            if a == 0.0:
                continue
            for j in range(n - i):
                out[i + j] += a * o.c[j]
        return Jet(out)

    def __truediv__(self, o: "Jet") -> "Jet":
        if o.c[0] == 0.0:
            raise SmoothnessError("division by a quantity vanishing at the expansion point")
        n = len(self.c)
        out = [0.0] * n
        out[0] = self.c[0] / o.c[0]
        for k in range(1, n):
            s = self.c[k]
            for i in range(1, k + 1):
                s -= o.c[i] * out[k - i]
            out[k] = s / o.c[0]
        return Jet(out)

    def ipow(self, m: int) -> "Jet":
        if m == 0:
            return Jet.constant(1.0, len(self.c) - 1)
        if m < 0:
            return Jet.constant(1.0, len(self.c) - 1) / self.ipow(-m)
        result = None
        base = self
        while m:
            if m & 1:
                result = base if result is None else result * base
            m >>= 1
            if m:
                base = base * base
        return result

    def rpow(self, p: Fraction) -> "Jet":
        if p.denominator == 1:
            return self.ipow(int(p))
        u0 = self.c[0]
        if u0 <= 0.0:
            raise SmoothnessError("fractional power of a non-positive quantity "
                                  "at the expansion point")
        n = len(self.c)
        out = [0.0] * n
        out[0] = u0 ** float(p)
        fp = float(p)
        for k in range(1, n):
            s = 0.0
            for i in range(1, k + 1):
                s += (fp * i - (k - i)) * self.c[i] * out[k - i]
            out[k] = s / (k * u0)
        return Jet(out)

    def exp(self) -> "Jet":
        n = len(self.c)
        out = [0.0] * n
        out[0] = math.exp(self.c[0])
        for k in range(1, n):
            s = 0.0
            for i in range(1, k + 1):
                s += i * self.c[i] * out[k - i]
            out[k] = s / k
        return Jet(out)

    def sincos(self) -> tuple["Jet", "Jet"]:
        n = len(self.c)
        s = [0.0] * n
        c = [0.0] * n
        s[0] = math.sin(self.c[0])
        c[0] = math.cos(self.c[0])
        for k in range(1, n):
            ss = cc = 0.0
            for i in range(1, k + 1):
                ss += i * self.c[i] * c[k - i]
                cc -= i * self.c[i] * s[k - i]
            s[k] = ss / k
            c[k] = cc / k
        return Jet(s), Jet(c)

    def sinhcosh(self) -> tuple["Jet", "Jet"]:
        n = len(self.c)
        s = [0.0] * n
        c = [0.0] * n
        s[0] = math.sinh(self.c[0])
        c[0] = math.cosh(self.c[0])
        for k in range(1, n):
            ss = cc = 0.0
            for i in range(1, k + 1):
                ss += i * self.c[i] * c[k - i]
                cc += i * self.c[i] * s[k - i]
            s[k] = ss / k
            c[k] = cc / k
        return Jet(s), Jet(c)


def taylor_jet(expr: Expr, x0: float, order: int, params: dict[str, float]) -> list[float]:
    """Taylor coefficients c[0..order] of the expression about x0 (c_k = f^(k)/k!)."""

    def ev(e: Expr) -> Jet:
        if isinstance(e, Num):
            return Jet.constant(e.value, order)
        if isinstance(e, Sym):
            if e.name == COORDINATE:
                return Jet.variable(x0, order)
            try:
                return Jet.constant(params[e.name], order)
            except KeyError:
                raise EvalError(f"unbound parameter '{e.name}'") from None
        if isinstance(e, Neg):
            return -ev(e.operand)
        if isinstance(e, BinOp):
            a, b = ev(e.left), ev(e.right)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            return a / b
        if isinstance(e, Pow):
            return ev(e.base).rpow(e.exponent)
        if isinstance(e, Call):
            arg = ev(e.arg)
            if e.func == "exp":
                return arg.exp()
            if e.func == "sin":
                return arg.sincos()[0]
            if e.func == "cos":
                return arg.sincos()[1]
            if e.func == "sinh":
                return arg.sinhcosh()[0]
            # abs: smooth only away from the cusp
            if arg.c[0] > 0.0:
                return arg
            if arg.c[0] < 0.0:
                return -arg
            raise SmoothnessError("abs() has a cusp at the expansion point")
        if isinstance(e, Piecewise):
            bounds = [(evaluate(p.lo, math.nan, params), evaluate(p.hi, math.nan, params))
                      for p in e.pieces]
            last = len(e.pieces) - 1
            for idx, (piece, (lo, hi)) in enumerate(zip(e.pieces, bounds)):
                if lo < x0 < hi:
                    return ev(piece.body)
                at_closed_top = idx == last and x0 == hi
                if x0 == lo or x0 == hi or at_closed_top:
                    raise SmoothnessError("expansion point sits on a piecewise breakpoint")
            raise EvalError(f"x0={x0!r} lies outside every piecewise guard")
        raise TypeError(type(e))

    return ev(expr).c


def substitute(expression: Expr, name: str, replacement: Expr) -> Expr:
    """New AST with every occurrence of the symbol `name` replaced."""
    def sub(e: Expr) -> Expr:
        if isinstance(e, Num):
            return e
        if isinstance(e, Sym):
            return replacement if e.name == name else e
        if isinstance(e, Neg):
            return Neg(sub(e.operand))
        if isinstance(e, BinOp):
            return BinOp(e.op, sub(e.left), sub(e.right))
        if isinstance(e, Pow):
            return Pow(sub(e.base), e.exponent)
        if isinstance(e, Call):
            return Call(e.func, sub(e.arg))
        if isinstance(e, Piecewise):
            return Piecewise(tuple(Piece(sub(p.lo), sub(p.hi), sub(p.body))
                                   for p in e.pieces))
        raise TypeError(type(e))

    return sub(expression)


@dataclass(frozen=True)
class TaylorCoeffs:
    """Derivative coefficients f_j = f^(j)(x0), so f(x0+q) = sum f_j q^j / j!."""

    x0: float
    f: tuple[float, ...]  # f[j] for j = 2..order, i.e. f[0] is f_2
    order: int

    def coefficient(self, j: int) -> float:
        if not 2 <= j <= self.order:
            raise IndexError(f"order {j} outside 2..{self.order}")
        return self.f[j - 2]


def taylor(expression: Expr, x0: float, order: int,
           params: dict[str, float] | None = None,
           at_minimum: bool = True) -> TaylorCoeffs:
    """Expand about x0 up to the given order (>= 2) by forward-mode jets.

    With at_minimum=True (the default) the expansion point must be a genuine
    minimum: f(x0) and f'(x0) vanish and f_2 > 0.
    """
    if order < 2:
        raise ValueError("taylor order must be at least 2")
    jet = taylor_jet(expression, x0, order, params or {})
    fact = 1.0
    deriv = []
    for k, c in enumerate(jet):
        if k >= 2:
            deriv.append(c * fact)
        fact *= (k + 1)
    scale = max(1.0, max(abs(d) for d in deriv) if deriv else 1.0)
    if at_minimum:
        if abs(jet[0]) > 1e-9 * scale or abs(jet[1]) > 1e-9 * scale:
            raise ValueError(f"x0={x0!r} is not a stationary zero of the potential "
                             f"(f={jet[0]!r}, f'={jet[1]!r})")
        if deriv[0] <= 0.0:
            raise ValueError(f"f_2 = {deriv[0]!r} is not positive at x0={x0!r}")
    return TaylorCoeffs(x0, tuple(deriv), order)


def _scaled_endpoint(endpoint: Expr, factor: Expr) -> Expr:
    """endpoint * factor with the 0 and +-inf cases kept literal."""
    if isinstance(endpoint, Num) and endpoint.value in (0.0, math.inf, -math.inf):
        return endpoint
    if isinstance(endpoint, Neg):
        return Neg(_scaled_endpoint(endpoint.operand, factor))
    if isinstance(endpoint, Num) and endpoint.value == 1.0:
        return factor
    return BinOp("*", endpoint, factor)


def stretch(expression: Expr, factor: Expr) -> Expr:
    """g(x) = f(x / factor) for positive `factor`.

    Plain subtrees get x replaced by x/factor; piecewise guards are intervals
    in the coordinate itself, so their endpoints multiply by the factor
    instead.
    """
    replacement = BinOp("/", Sym(COORDINATE), factor)

    def walk(e: Expr) -> Expr:
        if isinstance(e, Num):
            return e
        if isinstance(e, Sym):
            return replacement if e.name == COORDINATE else e
        if isinstance(e, Neg):
            return Neg(walk(e.operand))
        if isinstance(e, BinOp):
            return BinOp(e.op, walk(e.left), walk(e.right))
        if isinstance(e, Pow):
            return Pow(walk(e.base), e.exponent)
        if isinstance(e, Call):
            return Call(e.func, walk(e.arg))
        if isinstance(e, Piecewise):
            return Piecewise(tuple(
                Piece(_scaled_endpoint(p.lo, factor),
                      _scaled_endpoint(p.hi, factor),
                      walk(p.body)) for p in e.pieces))
        raise TypeError(type(e))

    return walk(expression)
