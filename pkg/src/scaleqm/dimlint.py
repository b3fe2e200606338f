"""Dimensional linting of potential expressions and parameter declarations.

Arguments of exp/sin/cos/sinh have to be dimensionless, sums may only add
equal dimensions, piecewise branches must agree, and a dimensional quantity
must never be declared equal to a bare number.  The literal 0 (and infinite
interval endpoints) are dimension-neutral.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import expr as ex
from .dimensions import DIMENSIONLESS, LENGTH, Dimension


class UnknownSymbolError(KeyError):
    """A free symbol has no declared dimension (distinct from a lint diagnostic)."""

    def __str__(self) -> str:  # KeyError quotes its payload; keep the message plain
        return str(self.args[0]) if self.args else ""


@dataclass(frozen=True)
class Diagnostic:
    message: str
    subexpr: str
    dim: str
    span: ex.Span | None = None

    def __str__(self) -> str:
        return f"{self.message}: '{self.subexpr}' [{self.dim}]"


# sentinels threaded through inference:
#   _POISON - subtree already reported, stop cascading
#   _ZERO   - exact zero literal, compatible with any dimension
_POISON = object()
_ZERO = object()


class _Linter:
    def __init__(self, dims: dict[str, Dimension]):
        self.dims = dims
        self.diagnostics: list[Diagnostic] = []

    def report(self, message: str, node: ex.Expr, dim) -> None:
        dim_text = "?" if dim in (_POISON, _ZERO) or dim is None else str(dim)
        self.diagnostics.append(Diagnostic(message, ex.print_expr(node), dim_text,
                                           getattr(node, "span", None)))

    def infer(self, node: ex.Expr):
        if isinstance(node, ex.Num):
            return _ZERO if node.value == 0.0 else DIMENSIONLESS
        if isinstance(node, ex.Sym):
            try:
                return self.dims[node.name]
            except KeyError:
                raise UnknownSymbolError(f"symbol '{node.name}' has no declared dimension") from None
        if isinstance(node, ex.Neg):
            return self.infer(node.operand)
        if isinstance(node, ex.BinOp):
            a = self.infer(node.left)
            b = self.infer(node.right)
            if a is _POISON or b is _POISON:
                return _POISON
            if node.op in "+-":
                if a is _ZERO:
                    return b
                if b is _ZERO:
                    return a
                if a != b:
                    self.report(f"'{node.op}' combines unequal dimensions ({a} vs {b})",
                                node, None)
                    return _POISON
                return a
            if node.op == "*":
                if a is _ZERO or b is _ZERO:
                    return _ZERO
                return a * b
            if a is _ZERO:
                return _ZERO
            if b is _ZERO:
                return a  # dividing by an exact zero literal: dimension of numerator wins
            return a / b
        if isinstance(node, ex.Pow):
            base = self.infer(node.base)
            if base in (_POISON, _ZERO):
                return base
            return base ** node.exponent
        if isinstance(node, ex.Call):
            arg = self.infer(node.arg)
            if node.func == "abs":
                return arg
            if arg not in (_POISON, _ZERO) and not arg.is_dimensionless:
                self.report(f"argument of {node.func}() must be dimensionless",
                            node.arg, arg)
            return DIMENSIONLESS
        if isinstance(node, ex.Piecewise):
            return self._infer_piecewise(node)
        raise TypeError(type(node))

    def _infer_piecewise(self, node: ex.Piecewise):
        coord_dim = self.dims[ex.COORDINATE]
        branch_dims = []
        for piece in node.pieces:
            for endpoint in (piece.lo, piece.hi):
                d = self.infer(endpoint)
                if d in (_POISON, _ZERO) or _is_infinite(endpoint):
                    continue
                if d != coord_dim:
                    self.report("piecewise guard endpoint must carry the coordinate "
                                f"dimension ({coord_dim})", endpoint, d)
            branch_dims.append(self.infer(piece.body))
        known = [d for d in branch_dims if d not in (_POISON, _ZERO)]
        if known and any(d != known[0] for d in known[1:]):
            self.report("piecewise branches have unequal dimensions", node, None)
            return _POISON
        if known:
            return known[0]
        return _ZERO if _ZERO in branch_dims else _POISON


def _is_infinite(node: ex.Expr) -> bool:
    if isinstance(node, ex.Num):
        return node.value in (float("inf"), float("-inf"))
    if isinstance(node, ex.Neg):
        return _is_infinite(node.operand)
    return False


def _with_coordinate(param_dims: dict[str, Dimension]) -> dict[str, Dimension]:
    dims = dict(param_dims)
    dims.setdefault(ex.COORDINATE, LENGTH)
    return dims


def lint(expression: ex.Expr, param_dims: dict[str, Dimension]) -> list[Diagnostic]:
    """Dimension-check an expression; empty list means clean.

    Every free symbol must appear in param_dims; the coordinate ``x`` defaults
    to length if the caller did not declare it.  Unknown symbols raise
    UnknownSymbolError rather than producing a diagnostic.
    """
    dims = _with_coordinate(param_dims)
    for name in ex.free_symbols(expression):
        if name not in dims:
            raise UnknownSymbolError(f"symbol '{name}' has no declared dimension")
    linter = _Linter(dims)
    linter.infer(expression)
    return linter.diagnostics


def infer_dimension(expression: ex.Expr, param_dims: dict[str, Dimension]
                    ) -> Dimension | None:
    """Dimension of an expression; None if inference fails (lint would flag it).

    An exact-zero expression reports as dimensionless.
    """
    linter = _Linter(_with_coordinate(param_dims))
    result = linter.infer(expression)
    if result is _POISON:
        return None
    if result is _ZERO:
        return DIMENSIONLESS
    return result


def lint_assumption(lhs: ex.Expr, rhs: float, param_dims: dict[str, Dimension]
                    ) -> list[Diagnostic]:
    """Check a declaration 'lhs = number'; a dimensional lhs is flagged."""
    dims = _with_coordinate(param_dims)
    linter = _Linter(dims)
    result = linter.infer(lhs)
    diagnostics = linter.diagnostics
    if result not in (_POISON, _ZERO) and not result.is_dimensionless:
        diagnostics.append(Diagnostic(
            f"dimensional quantity equated to the bare number {rhs:g}",
            ex.print_expr(lhs), str(result), getattr(lhs, "span", None)))
    return diagnostics
