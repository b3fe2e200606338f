"""Exact dimension algebra over (mass, length, time, charge) and SI quantities.

Dimensions are 4-vectors of exact rationals, so products, powers and the
exponent linear systems behind unit derivation never accumulate round-off.
Magnitudes are plain binary64 SI values.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

RationalLike = Fraction | int | str

BASE_DIMENSIONS = ("mass", "length", "time", "charge")
_BASE_LETTERS = ("M", "L", "T", "Q")


class DimensionError(ValueError):
    """Dimension mismatch or an exponent system without a solution."""


def _frac(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise TypeError("dimension exponents must be exact rationals, not floats")
    return Fraction(value)


@dataclass(frozen=True)
class Dimension:
    """Physical dimension as exact rational exponents of (M, L, T, Q)."""

    exponents: tuple[Fraction, Fraction, Fraction, Fraction]

    def __init__(self, mass: RationalLike = 0, length: RationalLike = 0,
                 time: RationalLike = 0, charge: RationalLike = 0):
        object.__setattr__(self, "exponents",
                           (_frac(mass), _frac(length), _frac(time), _frac(charge)))

    def __mul__(self, other: "Dimension") -> "Dimension":
        return Dimension(*(a + b for a, b in zip(self.exponents, other.exponents)))

    def __truediv__(self, other: "Dimension") -> "Dimension":
        return Dimension(*(a - b for a, b in zip(self.exponents, other.exponents)))

    def __pow__(self, p: RationalLike) -> "Dimension":
        p = _frac(p)
        return Dimension(*(a * p for a in self.exponents))

    @property
    def is_dimensionless(self) -> bool:
        return all(a == 0 for a in self.exponents)

    def __str__(self) -> str:
        if self.is_dimensionless:
            return "1"
        parts = []
        for letter, a in zip(_BASE_LETTERS, self.exponents):
            if a != 0:
                parts.append(f"{letter}{a}" if a.denominator == 1 else f"{letter}{a.numerator}/{a.denominator}")
        return " ".join(parts)


DIMENSIONLESS = Dimension()
MASS = Dimension(mass=1)
LENGTH = Dimension(length=1)
TIME = Dimension(time=1)
CHARGE = Dimension(charge=1)
ENERGY = Dimension(mass=1, length=2, time=-2)
ACTION = Dimension(mass=1, length=2, time=-1)
ANGULAR_FREQUENCY = Dimension(time=-1)


@dataclass(frozen=True)
class Quantity:
    """SI magnitude plus exact Dimension; the carrier for every physical value."""

    magnitude: float
    dim: Dimension

    def __add__(self, other: "Quantity") -> "Quantity":
        if self.dim != other.dim:
            raise DimensionError(f"cannot add {self.dim} to {other.dim}")
        return Quantity(self.magnitude + other.magnitude, self.dim)

    def __sub__(self, other: "Quantity") -> "Quantity":
        if self.dim != other.dim:
            raise DimensionError(f"cannot subtract {other.dim} from {self.dim}")
        return Quantity(self.magnitude - other.magnitude, self.dim)

    def __mul__(self, other: "Quantity | float | int") -> "Quantity":
        if isinstance(other, Quantity):
            return Quantity(self.magnitude * other.magnitude, self.dim * other.dim)
        return Quantity(self.magnitude * other, self.dim)

    __rmul__ = __mul__

    def __truediv__(self, other: "Quantity | float | int") -> "Quantity":
        if isinstance(other, Quantity):
            return Quantity(self.magnitude / other.magnitude, self.dim / other.dim)
        return Quantity(self.magnitude / other, self.dim)

    def __rtruediv__(self, other: float | int) -> "Quantity":
        return Quantity(other / self.magnitude, DIMENSIONLESS / self.dim)

    def __pow__(self, p: RationalLike) -> "Quantity":
        p = _frac(p)
        if self.magnitude < 0 and p.denominator != 1:
            raise DimensionError("fractional power of a negative magnitude")
        if p.denominator == 1:
            mag = self.magnitude ** int(p)
        else:
            mag = self.magnitude ** float(p)
        return Quantity(mag, self.dim ** p)

    def __neg__(self) -> "Quantity":
        return Quantity(-self.magnitude, self.dim)

    @property
    def is_dimensionless(self) -> bool:
        return self.dim.is_dimensionless

    def __str__(self) -> str:
        return f"{self.magnitude:.10g} [{self.dim}]"


def combine(quantities: Sequence[Quantity], exponents: Sequence[RationalLike]) -> Quantity:
    """Product of quantities raised to rational exponents, dimension and all."""
    if len(quantities) != len(exponents) or not quantities:
        raise ValueError("quantities and exponents must have equal nonzero length")
    out = Quantity(1.0, DIMENSIONLESS)
    for q, p in zip(quantities, exponents):
        out = out * q ** _frac(p)
    return out


# ---------------------------------------------------------------------------
# Exact rational linear algebra for exponent systems
# ---------------------------------------------------------------------------

def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form in place; returns (matrix, pivot columns)."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]
                 ) -> tuple[list[Fraction], list[list[Fraction]]] | str:
    """Solve matrix*p = rhs exactly.

    Returns (particular solution, nullspace basis), or the name of a base
    dimension that makes the system inconsistent.
    """
    nrows = len(matrix)
    ncols = len(matrix[0])
    aug = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    red, pivots = _rref(aug)
    # inconsistency: a zero row of coefficients with nonzero rhs
    for row in red:
        if all(v == 0 for v in row[:ncols]) and row[ncols] != 0:
            # identify which base dimension cannot be matched: find a rational
            # certificate y with y^T M = 0, y^T rhs != 0, and name its largest
            # component.  Rows of M are indexed by base dimensions.
            cert = _inconsistency_certificate(matrix, rhs)
            idx = max(range(nrows), key=lambda i: abs(cert[i]))
            return BASE_DIMENSIONS[idx]
    particular = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        particular[c] = red[r][ncols]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, c in enumerate(pivots):
            vec[c] = -red[r][fc]
        basis.append(vec)
    return particular, basis


def _inconsistency_certificate(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Rational y with y^T M = 0 and y^T rhs != 0 for an inconsistent system."""
    nrows = len(matrix)
    ncols = len(matrix[0])
    # transpose system: find y in nullspace of M^T not orthogonal to rhs
    t_rows = [[matrix[i][j] for i in range(nrows)] for j in range(ncols)]
    red, pivots = _rref([row[:] for row in t_rows])
    free = [c for c in range(nrows) if c not in pivots]
    for fc in free:
        y = [Fraction(0)] * nrows
        y[fc] = Fraction(1)
        for r, c in enumerate(pivots):
            y[c] = -red[r][fc]
        if sum(yi * ri for yi, ri in zip(y, rhs)) != 0:
            return y
    return [Fraction(1)] * nrows  # unreachable for genuinely inconsistent input


def _minimum_norm(particular: list[Fraction], basis: list[list[Fraction]]) -> list[Fraction]:
    """Project the particular solution to the minimum-norm point of the affine set."""
    if not basis:
        return particular
    k = len(basis)
    gram = [[sum(a * b for a, b in zip(basis[i], basis[j])) for j in range(k)] for i in range(k)]
    rhs = [-sum(p * b for p, b in zip(particular, basis[i])) for i in range(k)]
    solved = _solve_exact(gram, rhs)
    assert not isinstance(solved, str)  # Gram matrix of independent vectors is invertible
    coeffs, _ = solved
    out = particular[:]
    for ci, vec in zip(coeffs, basis):
        out = [o + ci * v for o, v in zip(out, vec)]
    return out


@dataclass(frozen=True)
class ScaleSolution:
    """Result of solve_scale: exponents p with combine(params, p) matching target."""

    exponents: tuple[Fraction, ...]
    quantity: Quantity
    ambiguous: bool


def solve_scale(params: Sequence[Quantity], target: Dimension) -> ScaleSolution:
    """Find exact rational exponents p so that prod(params[i]**p[i]) has `target` dimension.

    If several independent combinations exist the minimum-norm exponent vector
    is returned and the result is flagged ambiguous; the caller has to pick an
    explicit scaling rule in that case.
    """
    if not params or len(params) > 6:
        raise ValueError("solve_scale needs between 1 and 6 parameters")
    matrix = [[q.dim.exponents[row] for q in params] for row in range(4)]
    rhs = list(target.exponents)
    solved = _solve_exact(matrix, rhs)
    if isinstance(solved, str):
        raise DimensionError(f"scale underdetermined: no combination yields base dimension '{solved}'")
    particular, basis = solved
    exponents = _minimum_norm(particular, basis) if basis else particular
    quantity = combine(params, exponents)
    if quantity.dim != target:
        raise DimensionError("internal error: solved exponents do not reproduce target")
    return ScaleSolution(tuple(exponents), quantity, ambiguous=bool(basis))


# ---------------------------------------------------------------------------
# Constant registry
# ---------------------------------------------------------------------------

_DEFAULT_CONSTANTS_FILE = os.path.join(os.path.dirname(__file__), "data", "constants.txt")

_KAPPA_REL_TOL = 1e-10


class ConstantRegistry:
    """Named physical constants loaded from the line-oriented constants file.

    File format, one constant per line::

        name  value_SI  dim=M<p> L<p> T<p> Q<p>

    with each exponent an integer or rational ``p/q``; ``#`` starts a comment.
    The registry is read-only after load; lookups by attribute or item.
    """

    def __init__(self, quantities: dict[str, Quantity]):
        self._quantities = dict(quantities)
        self._check_consistency()

    @classmethod
    def load(cls, path: str | None = None) -> "ConstantRegistry":
        path = path or os.environ.get("SCALEQM_CONSTANTS") or _DEFAULT_CONSTANTS_FILE
        quantities: dict[str, Quantity] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                try:
                    name, value, dim = parse_constant_line(line)
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
                quantities[name] = Quantity(value, dim)
        return cls(quantities)

    def override(self, **constants: Quantity) -> "ConstantRegistry":
        """New registry with some constants replaced (tests use exact toy values)."""
        merged = dict(self._quantities)
        merged.update(constants)
        return ConstantRegistry(merged)

    def _check_consistency(self) -> None:
        q = self._quantities
        if all(k in q for k in ("kappa", "e", "eps0")):
            expected = q["e"].magnitude ** 2 / (4.0 * math.pi * q["eps0"].magnitude)
            got = q["kappa"].magnitude
            if abs(got - expected) > _KAPPA_REL_TOL * abs(expected):
                raise ValueError(
                    f"registry inconsistent: kappa={got!r} but e^2/(4 pi eps0)={expected!r}")

    def __getitem__(self, name: str) -> Quantity:
        try:
            return self._quantities[name]
        except KeyError:
            raise KeyError(f"unknown constant '{name}'") from None

    def __getattr__(self, name: str) -> Quantity:
        if name.startswith("_"):
            raise AttributeError(name)
        try:
            return self._quantities[name]
        except KeyError:
            raise AttributeError(f"unknown constant '{name}'") from None

    def __contains__(self, name: str) -> bool:
        return name in self._quantities

    def names(self) -> Iterable[str]:
        return self._quantities.keys()


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def parse_dim_tokens(tokens: Sequence[str]) -> Dimension:
    """Parse ['M1', 'L2', 'T-1', 'Q0'] style exponent tokens (any subset, any order)."""
    exps = {letter: Fraction(0) for letter in _BASE_LETTERS}
    for tok in tokens:
        letter, rest = tok[0], tok[1:]
        if letter not in exps or not rest:
            raise ValueError(f"bad dimension token '{tok}'")
        exps[letter] = parse_rational(rest)
    return Dimension(exps["M"], exps["L"], exps["T"], exps["Q"])


def format_dim(dim: Dimension) -> str:
    parts = []
    for letter, a in zip(_BASE_LETTERS, dim.exponents):
        parts.append(f"{letter}{a.numerator}" if a.denominator == 1 else f"{letter}{a.numerator}/{a.denominator}")
    return " ".join(parts)


def parse_constant_line(line: str) -> tuple[str, float, Dimension]:
    fields = line.split()
    if len(fields) < 3 or not fields[2].startswith("dim="):
        raise ValueError(f"expected 'name value dim=...' but got '{line}'")
    name = fields[0]
    value = float(fields[1])
    dim_tokens = [fields[2][len("dim="):]] + fields[3:]
    return name, value, parse_dim_tokens(dim_tokens)


_default_registry: ConstantRegistry | None = None


def default_registry() -> ConstantRegistry:
    """The bundled CODATA registry (honors SCALEQM_CONSTANTS), loaded once."""
    global _default_registry
    if _default_registry is None:
        _default_registry = ConstantRegistry.load()
    return _default_registry


# ---------------------------------------------------------------------------
# Unit derivation
# ---------------------------------------------------------------------------

def energy_unit(mass: Quantity, length: Quantity,
                registry: ConstantRegistry | None = None) -> Quantity:
    """hbar^2/(m L^2): the energy scale fixed by a mass and a length."""
    if mass.dim != MASS:
        raise DimensionError(f"energy_unit: expected a mass, got {mass.dim}")
    if length.dim != LENGTH:
        raise DimensionError(f"energy_unit: expected a length, got {length.dim}")
    if mass.magnitude <= 0 or length.magnitude <= 0:
        raise DimensionError("energy_unit: mass and length must be positive")
    hbar = (registry or default_registry())["hbar"]
    return hbar * hbar / (mass * length * length)


def time_unit(mass: Quantity, length: Quantity,
              registry: ConstantRegistry | None = None) -> Quantity:
    """Angular frequency omega with hbar*omega = hbar^2/(m L^2)."""
    hbar = (registry or default_registry())["hbar"]
    return energy_unit(mass, length, registry) / hbar
