"""Potential catalog: the model families, their parameter contracts, and the
line-oriented problem config format.

Every family constructor returns a fully dimensional PotentialSpec whose
expression lints clean against its declared parameter dimensions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

from . import expr as ex
from . import dimlint
from .dimensions import (DIMENSIONLESS, ENERGY, LENGTH, MASS, Dimension,
                         Quantity, format_dim, parse_dim_tokens)

FORCE_CONSTANT = Dimension(mass=1, time=-2)            # energy / length^2
QUARTIC_CONSTANT = Dimension(mass=1, length=-2, time=-2)
INV_SQUARE_STRENGTH = Dimension(mass=1, length=4, time=-2)  # energy * length^2
INV_LENGTH = Dimension(length=-1)


class Family(enum.Enum):
    BOX = "box"
    HARMONIC = "harmonic"
    SCALED_FORM = "scaled_form"
    RECT_BARRIER = "rect_barrier"
    MORSE = "morse"
    AHMED_BIC = "ahmed_bic"
    TRUNC_INV_SQUARE = "trunc_inv_square"
    POLY_ANHARMONIC = "poly_anharmonic"
    CUSTOM = "custom"


class BoundaryCondition(enum.Enum):
    DIRICHLET = "dirichlet"      # hard walls at finite endpoints
    DECAY = "decay"              # bound states on an open line
    SCATTERING = "scattering"
    RADIAL = "radial"            # u(0) = 0 on the half line


@dataclass(frozen=True)
class Domain:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty domain [{self.lo}, {self.hi}]")

    @property
    def is_half_line(self) -> bool:
        return math.isfinite(self.lo) and self.hi == math.inf

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


FULL_LINE = Domain(-math.inf, math.inf)
HALF_LINE = Domain(0.0, math.inf)

# required parameter dimensions per family
FAMILY_PARAM_DIMS: dict[Family, dict[str, Dimension]] = {
    Family.BOX: {"L": LENGTH},
    Family.HARMONIC: {"k": FORCE_CONSTANT},
    Family.SCALED_FORM: {"V0": ENERGY, "a": LENGTH},
    Family.RECT_BARRIER: {"V0": ENERGY, "a": LENGTH},
    Family.MORSE: {"D": ENERGY, "a": INV_LENGTH},
    Family.AHMED_BIC: {"V0": ENERGY, "a": LENGTH},
    Family.TRUNC_INV_SQUARE: {"alpha": INV_SQUARE_STRENGTH, "eps": LENGTH},
    Family.POLY_ANHARMONIC: {"k2": FORCE_CONSTANT, "k4": QUARTIC_CONSTANT},
}

# parameters that must be strictly positive
FAMILY_POSITIVE: dict[Family, tuple[str, ...]] = {
    Family.BOX: ("L",),
    Family.HARMONIC: ("k",),
    Family.SCALED_FORM: ("V0", "a"),
    Family.RECT_BARRIER: ("V0", "a"),
    Family.MORSE: ("D", "a"),
    Family.AHMED_BIC: ("V0", "a"),
    Family.TRUNC_INV_SQUARE: ("alpha", "eps"),
    Family.POLY_ANHARMONIC: ("k2", "k4"),
}


@dataclass(frozen=True)
class PotentialSpec:
    """A dimensional potential: expression, bound parameters, family, domain."""

    expr: ex.Expr
    params: dict[str, Quantity]
    family: Family
    domain: Domain = FULL_LINE
    bc: BoundaryCondition = BoundaryCondition.DECAY
    shape: ex.Expr | None = None  # dimensionless f with V = V0 * f(x/a), where applicable

    def __post_init__(self):
        _validate_family_params(self.family, self.params)
        diagnostics = dimlint.lint(self.expr, self.param_dims())
        if diagnostics:
            msgs = "; ".join(str(d) for d in diagnostics)
            raise ValueError(f"potential does not lint clean: {msgs}")
        _validate_piecewise_coverage(self.expr, self.param_magnitudes(), self.domain)

    def param_dims(self) -> dict[str, Dimension]:
        return {name: q.dim for name, q in self.params.items()}

    def param_magnitudes(self) -> dict[str, float]:
        return {name: q.magnitude for name, q in self.params.items()}

    def evaluate(self, x):
        """Potential value in SI at SI coordinate(s) x."""
        return ex.evaluate(self.expr, x, self.param_magnitudes())


def _validate_piecewise_coverage(expression: ex.Expr, params: dict[str, float],
                                 domain: Domain) -> None:
    """A piecewise potential has to tile the declared domain with its guards."""
    if not isinstance(expression, ex.Piecewise):
        return
    lo = ex.evaluate(expression.pieces[0].lo, math.nan, params)
    hi = ex.evaluate(expression.pieces[-1].hi, math.nan, params)
    if lo > domain.lo or hi < domain.hi:
        raise ValueError(f"piecewise guards cover [{lo:g}, {hi:g}] but the "
                         f"domain is [{domain.lo:g}, {domain.hi:g}]")


def _validate_family_params(family: Family, params: dict[str, Quantity]) -> None:
    required = FAMILY_PARAM_DIMS.get(family)
    if required is not None:
        for name, dim in required.items():
            if name not in params:
                raise ValueError(f"{family.value} requires parameter '{name}'")
            if params[name].dim != dim:
                raise ValueError(f"{family.value} parameter '{name}' must have "
                                 f"dimension {dim}, got {params[name].dim}")
    for name in FAMILY_POSITIVE.get(family, ()):
        if params[name].magnitude <= 0:
            raise ValueError(f"{family.value} parameter '{name}' must be positive")


# ---------------------------------------------------------------------------
# Family constructors
# ---------------------------------------------------------------------------

def box(length: Quantity) -> PotentialSpec:
    """Impenetrable box of the given length: V = 0 on [0, L], walls outside."""
    return PotentialSpec(ex.Num(0.0), {"L": length}, Family.BOX,
                         Domain(0.0, length.magnitude), BoundaryCondition.DIRICHLET)


def harmonic(k: Quantity) -> PotentialSpec:
    return PotentialSpec(ex.parse("k/2*x^2"), {"k": k}, Family.HARMONIC)


def scaled_form(shape: str | ex.Expr, v0: Quantity, a: Quantity,
                bc: BoundaryCondition = BoundaryCondition.DECAY) -> PotentialSpec:
    """V(x) = V0 * f(x/a) for a dimensionless shape f given as DSL text in x."""
    shape_ast = ex.parse(shape) if isinstance(shape, str) else shape
    full = ex.BinOp("*", ex.Sym("V0"),
                    ex.substitute(shape_ast, ex.COORDINATE,
                                  ex.BinOp("/", ex.Sym(ex.COORDINATE), ex.Sym("a"))))
    return PotentialSpec(full, {"V0": v0, "a": a}, Family.SCALED_FORM,
                         FULL_LINE, bc, shape=shape_ast)


def rect_barrier(v0: Quantity, a: Quantity) -> PotentialSpec:
    shape = ex.parse("piecewise([-inf, 0] -> 0, [0, 1] -> 1, [1, inf] -> 0)")
    full = ex.parse("piecewise([-inf, 0] -> 0, [0, a] -> V0, [a, inf] -> 0)")
    return PotentialSpec(full, {"V0": v0, "a": a}, Family.RECT_BARRIER,
                         FULL_LINE, BoundaryCondition.SCATTERING, shape=shape)


def morse(d_e: Quantity, a: Quantity) -> PotentialSpec:
    """Morse oscillator D*(1 - exp(-a*x))^2 with well depth D and range 1/a."""
    return PotentialSpec(ex.parse("D*(1 - exp(-a*x))^2"), {"D": d_e, "a": a},
                         Family.MORSE, shape=ex.parse("(1 - exp(-x))^2"))


def ahmed_bic(v0: Quantity, a: Quantity) -> PotentialSpec:
    shape = ex.parse("1 - exp(2*abs(x))")
    full = ex.parse("V0*(1 - exp(2*abs(x)/a))")
    return PotentialSpec(full, {"V0": v0, "a": a}, Family.AHMED_BIC,
                         FULL_LINE, BoundaryCondition.DECAY, shape=shape)


def trunc_inv_square(alpha: Quantity, eps: Quantity) -> PotentialSpec:
    """Attractive -alpha/x^2 truncated to the constant -alpha/eps^2 inside x < eps."""
    full = ex.parse("piecewise([0, eps] -> -alpha/eps^2, [eps, inf] -> -alpha/x^2)")
    return PotentialSpec(full, {"alpha": alpha, "eps": eps},
                         Family.TRUNC_INV_SQUARE, HALF_LINE, BoundaryCondition.RADIAL)


def poly_anharmonic(k2: Quantity, k4: Quantity) -> PotentialSpec:
    return PotentialSpec(ex.parse("k2/2*x^2 + k4*x^4"), {"k2": k2, "k4": k4},
                         Family.POLY_ANHARMONIC)


def custom(expression: str | ex.Expr, params: dict[str, Quantity],
           domain: Domain = FULL_LINE,
           bc: BoundaryCondition = BoundaryCondition.DECAY) -> PotentialSpec:
    ast = ex.parse(expression) if isinstance(expression, str) else expression
    return PotentialSpec(ast, params, Family.CUSTOM, domain, bc)


CONSTRUCTORS: dict[Family, Callable[..., PotentialSpec]] = {
    Family.BOX: lambda params: box(params["L"]),
    Family.HARMONIC: lambda params: harmonic(params["k"]),
    Family.RECT_BARRIER: lambda params: rect_barrier(params["V0"], params["a"]),
    Family.MORSE: lambda params: morse(params["D"], params["a"]),
    Family.AHMED_BIC: lambda params: ahmed_bic(params["V0"], params["a"]),
    Family.TRUNC_INV_SQUARE: lambda params: trunc_inv_square(params["alpha"], params["eps"]),
    Family.POLY_ANHARMONIC: lambda params: poly_anharmonic(params["k2"], params["k4"]),
}


# ---------------------------------------------------------------------------
# Problem config files
# ---------------------------------------------------------------------------
#
# Line-oriented `key = value`; '#' starts a comment.  Keys:
#   family    = box | harmonic | scaled_form | rect_barrier | morse
#             | ahmed_bic | trunc_inv_square | poly_anharmonic | custom
#   potential = <DSL expression>          (custom only)
#   shape     = <DSL expression>          (scaled_form only)
#   param.<name> = <value> [dim=M<p> L<p> T<p> Q<p>]
#   mass      = <value> [dim=...]         (defaults to dim=M1)
#   domain    = <lo> <hi>                 (inf / -inf allowed)
#   bc        = dirichlet | decay | scattering | radial
#   assume.<id> = <DSL expression> == <number>   (linted declarations)

@dataclass
class RawParam:
    value: float
    dim: Dimension | None  # None: no dimension declared in the file


@dataclass
class RawConfig:
    """Syntactic view of a config file, permissive enough for linting bad ones."""

    family: str | None = None
    potential: str | None = None
    shape: str | None = None
    params: dict[str, RawParam] = field(default_factory=dict)
    mass: RawParam | None = None
    domain: tuple[float, float] | None = None
    bc: str | None = None
    assumptions: list[tuple[str, str, float]] = field(default_factory=list)  # (id, lhs, rhs)


def parse_config(text: str) -> RawConfig:
    cfg = RawConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            _apply_config_line(cfg, key, value)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return cfg


def _parse_value_with_dim(value: str) -> RawParam:
    fields = value.split()
    if not fields:
        raise ValueError("missing value")
    magnitude = float(fields[0])
    if len(fields) == 1:
        return RawParam(magnitude, None)
    if not fields[1].startswith("dim="):
        raise ValueError(f"expected dim=..., got '{fields[1]}'")
    tokens = [fields[1][len("dim="):]] + fields[2:]
    return RawParam(magnitude, parse_dim_tokens(tokens))


def _apply_config_line(cfg: RawConfig, key: str, value: str) -> None:
    if key == "family":
        cfg.family = value
    elif key == "potential":
        cfg.potential = value
    elif key == "shape":
        cfg.shape = value
    elif key == "mass":
        cfg.mass = _parse_value_with_dim(value)
        if cfg.mass.dim is None:
            cfg.mass = RawParam(cfg.mass.value, MASS)
    elif key == "domain":
        fields = value.split()
        if len(fields) != 2:
            raise ValueError("domain needs two endpoints")
        cfg.domain = (float(fields[0]), float(fields[1]))
    elif key == "bc":
        cfg.bc = value
    elif key.startswith("param."):
        cfg.params[key[len("param."):]] = _parse_value_with_dim(value)
    elif key.startswith("assume."):
        if "==" not in value:
            raise ValueError("assumption must be '<expr> == <number>'")
        lhs, rhs = value.split("==", 1)
        cfg.assumptions.append((key[len("assume."):], lhs.strip(), float(rhs)))
    else:
        raise ValueError(f"unknown config key '{key}'")


def write_config(cfg: RawConfig) -> str:
    """Render a RawConfig back to text; parse_config(write_config(c)) == c."""
    lines: list[str] = []
    if cfg.family is not None:
        lines.append(f"family = {cfg.family}")
    if cfg.potential is not None:
        lines.append(f"potential = {cfg.potential}")
    if cfg.shape is not None:
        lines.append(f"shape = {cfg.shape}")
    for name, p in cfg.params.items():
        dim = "" if p.dim is None else f" dim={format_dim(p.dim)}"
        lines.append(f"param.{name} = {p.value!r}{dim}")
    if cfg.mass is not None:
        lines.append(f"mass = {cfg.mass.value!r} dim={format_dim(cfg.mass.dim)}")
    if cfg.domain is not None:
        lines.append(f"domain = {cfg.domain[0]!r} {cfg.domain[1]!r}")
    if cfg.bc is not None:
        lines.append(f"bc = {cfg.bc}")
    for ident, lhs, rhs in cfg.assumptions:
        lines.append(f"assume.{ident} = {lhs} == {rhs!r}")
    return "\n".join(lines) + "\n"


def load_config(path: str) -> RawConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def build_spec(cfg: RawConfig) -> tuple[PotentialSpec, Quantity]:
    """Strict construction of (PotentialSpec, mass) from a parsed config."""
    if cfg.family is None:
        raise ValueError("config must set 'family'")
    try:
        family = Family(cfg.family)
    except ValueError:
        raise ValueError(f"unknown family '{cfg.family}'") from None
    if cfg.mass is None:
        raise ValueError("config must set 'mass'")
    if cfg.mass.dim != MASS:
        raise ValueError("mass must have dimension M1")
    mass = Quantity(cfg.mass.value, cfg.mass.dim)

    quantities: dict[str, Quantity] = {}
    required = FAMILY_PARAM_DIMS.get(family, {})
    for name, p in cfg.params.items():
        dim = p.dim
        if dim is None:
            dim = required.get(name)
            if dim is None:
                raise ValueError(f"param.{name} needs an explicit dim=...")
        quantities[name] = Quantity(p.value, dim)

    if family is Family.CUSTOM:
        if cfg.potential is None:
            raise ValueError("custom family requires 'potential'")
        domain = Domain(*cfg.domain) if cfg.domain else FULL_LINE
        bc = BoundaryCondition(cfg.bc) if cfg.bc else BoundaryCondition.DECAY
        return custom(cfg.potential, quantities, domain, bc), mass
    if family is Family.SCALED_FORM:
        if cfg.shape is None:
            raise ValueError("scaled_form family requires 'shape'")
        bc = BoundaryCondition(cfg.bc) if cfg.bc else BoundaryCondition.DECAY
        return scaled_form(cfg.shape, quantities["V0"], quantities["a"], bc), mass
    constructor = CONSTRUCTORS[family]
    missing = [n for n in required if n not in quantities]
    if missing:
        raise ValueError(f"{family.value} config missing param.{missing[0]}")
    return constructor(quantities), mass


def lint_config(cfg: RawConfig, registry) -> list[dimlint.Diagnostic]:
    """Permissive lint of a possibly broken config.

    Flags parameters that a family declares dimensional but the file sets to a
    bare number, dimensional assumption left-hand sides equated to numbers,
    and any dimension faults inside the potential expression itself.
    """
    diagnostics: list[dimlint.Diagnostic] = []
    family = None
    if cfg.family is not None:
        try:
            family = Family(cfg.family)
        except ValueError:
            pass
    required = FAMILY_PARAM_DIMS.get(family, {}) if family else {}

    dims: dict[str, Dimension] = {name: q.dim for name, q in _registry_dims(registry).items()}
    dims["m"] = MASS
    for name, p in cfg.params.items():
        expected = required.get(name)
        if p.dim is not None:
            dims[name] = p.dim
            if expected is not None and p.dim != expected:
                diagnostics.append(dimlint.Diagnostic(
                    f"parameter '{name}' should have dimension {expected}",
                    name, str(p.dim)))
        elif expected is not None and not expected.is_dimensionless:
            diagnostics.append(dimlint.Diagnostic(
                f"dimensional parameter '{name}' set to the bare number {p.value:g}",
                name, str(expected)))
            dims[name] = expected
        else:
            dims[name] = DIMENSIONLESS
    if family is not None and family in FAMILY_PARAM_DIMS:
        for name, dim in FAMILY_PARAM_DIMS[family].items():
            dims.setdefault(name, dim)

    for _, lhs_text, rhs in cfg.assumptions:
        try:
            lhs = ex.parse(lhs_text)
        except ex.ParseError as exc:
            diagnostics.append(dimlint.Diagnostic(f"unparseable assumption ({exc})",
                                                  lhs_text, "?"))
            continue
        diagnostics.extend(dimlint.lint_assumption(lhs, rhs, dims))

    potential_text = cfg.potential
    if potential_text is None and family is not None and family is not Family.CUSTOM:
        try:
            params = {name: Quantity(p.value, dims.get(name, DIMENSIONLESS))
                      for name, p in cfg.params.items()}
            spec = CONSTRUCTORS[family](params) if family in CONSTRUCTORS else None
        except Exception:
            spec = None
        if spec is not None:
            potential_text = ex.print_expr(spec.expr)
    if potential_text is not None:
        try:
            ast = ex.parse(potential_text)
            diagnostics.extend(dimlint.lint(ast, dims))
        except ex.ParseError as exc:
            diagnostics.append(dimlint.Diagnostic(f"unparseable potential ({exc})",
                                                  potential_text, "?"))
        except dimlint.UnknownSymbolError as exc:
            diagnostics.append(dimlint.Diagnostic(str(exc.args[0]), potential_text, "?"))
    return diagnostics


def _registry_dims(registry) -> dict[str, Quantity]:
    return {name: registry[name] for name in registry.names()}
