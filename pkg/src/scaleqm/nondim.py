"""Turn a dimensional potential into a dimensionless problem.

Given a PotentialSpec, a mass and a scaling rule this module picks the length
unit L, forms the dimensionless potential with every physical parameter
collapsed into named dimensionless couplings, and records the units needed to
map dimensionless energies back to SI.  Every construction is verified on the
spot by comparing (m L^2/hbar^2) V(L x) against the collapsed form at random
points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from . import expr as ex
from . import dimlint
from .catalog import (BoundaryCondition, Domain, Family, FULL_LINE, HALF_LINE,
                      PotentialSpec)
from .dimensions import (DIMENSIONLESS, LENGTH, MASS, ConstantRegistry,
                         Quantity, default_registry, energy_unit, solve_scale,
                         time_unit)


class NondimError(ValueError):
    """Scaling rule not applicable, or the collapse failed verification."""


# ---------------------------------------------------------------------------
# Scaling rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GivenLength:
    """Rule A: the length unit is the power of a named parameter that is a length."""
    param: str = "a"


@dataclass(frozen=True)
class DepthBased:
    """Rule B: L = hbar/sqrt(m V0) built from the depth/strength of the well."""


@dataclass(frozen=True)
class HarmonicBalance:
    """L = (hbar^2/(m k2))^(1/4), balancing kinetic against the quadratic term."""


@dataclass(frozen=True)
class QuarticBased:
    """L = (hbar^2/(m k4))^(1/6), balancing kinetic against the quartic term."""


@dataclass(frozen=True)
class CoulombBased:
    """L = 4 pi eps0 hbar^2/(mu e^2); mu defaults to the electron mass."""
    mu: Quantity | None = None


@dataclass(frozen=True)
class Explicit:
    length: Quantity


ScalingRule = Union[GivenLength, DepthBased, HarmonicBalance, QuarticBased,
                    CoulombBased, Explicit]


DEFAULT_RULES: dict[Family, ScalingRule] = {
    Family.BOX: GivenLength("L"),
    Family.HARMONIC: HarmonicBalance(),
    Family.SCALED_FORM: GivenLength("a"),
    Family.RECT_BARRIER: GivenLength("a"),
    Family.MORSE: GivenLength("a"),
    Family.AHMED_BIC: GivenLength("a"),
    Family.TRUNC_INV_SQUARE: DepthBased(),
    Family.POLY_ANHARMONIC: HarmonicBalance(),
}


@dataclass(frozen=True)
class ScaledProblem:
    """Dimensionless eigenvalue/scattering problem plus the units to undo it."""

    ftilde: ex.Expr                 # dimensionless potential, coordinate x
    couplings: dict[str, float]
    length_unit: Quantity           # L
    energy_unit: Quantity           # eps_E with E = eps_E * Etilde
    time_unit: Quantity             # omega = eps_E / hbar
    domain: Domain
    bc: BoundaryCondition
    family: Family
    rule: ScalingRule
    even_parity: bool = False

    def potential(self, x):
        """ftilde evaluated at dimensionless coordinate(s) x."""
        return ex.evaluate(self.ftilde, x, self.couplings)

    def to_physical(self, etilde: float) -> Quantity:
        """Map a dimensionless energy to SI: E = eps_E * Etilde."""
        return self.energy_unit * float(etilde)

    def lint(self) -> list[dimlint.Diagnostic]:
        dims = {name: DIMENSIONLESS for name in self.couplings}
        dims[ex.COORDINATE] = DIMENSIONLESS
        return dimlint.lint(self.ftilde, dims)


# families that are V0 * f(x / a) in disguise: (depth param, length exponent of 'a')
_SCALED_LIKE: dict[Family, tuple[str, str]] = {
    Family.SCALED_FORM: ("V0", "a"),
    Family.RECT_BARRIER: ("V0", "a"),
    Family.AHMED_BIC: ("V0", "a"),
    Family.MORSE: ("D", "a"),
}


def nondimensionalize(spec: PotentialSpec, mass: Quantity,
                      rule: ScalingRule | None = None,
                      registry: ConstantRegistry | None = None) -> ScaledProblem:
    """Build the ScaledProblem for a catalog potential under the given rule.

    The kinetic term of the dimensionless Hamiltonian is -1/2 d^2/dx^2 and the
    energy map is E = (hbar^2/(m L^2)) * Etilde.  Raises NondimError when the
    rule does not apply to the family or the collapsed potential fails the
    random-point identity check.
    """
    registry = registry or default_registry()
    if mass.dim != MASS or mass.magnitude <= 0:
        raise NondimError("mass must be a positive quantity of dimension M1")
    rule = rule if rule is not None else DEFAULT_RULES.get(spec.family)
    if rule is None:
        raise NondimError(f"no default scaling rule for family {spec.family.value}")

    hbar = registry["hbar"]
    builder = _BUILDERS.get(spec.family)
    if builder is None:
        raise NondimError(f"family {spec.family.value} has no nondimensionalization rule")
    problem = builder(spec, mass, rule, hbar, registry)
    _verify_collapse(spec, mass, hbar, problem)
    bad = problem.lint()
    if bad:
        raise NondimError("internal: scaled potential does not lint dimensionless: "
                          + "; ".join(str(d) for d in bad))
    return problem


def couplings_of(spec: PotentialSpec, mass: Quantity,
                 rule: ScalingRule | None = None,
                 registry: ConstantRegistry | None = None) -> dict[str, float]:
    """Just the dimensionless couplings of nondimensionalize."""
    return nondimensionalize(spec, mass, rule, registry).couplings


def _units(mass: Quantity, length: Quantity, registry) -> tuple[Quantity, Quantity]:
    eps = energy_unit(mass, length, registry)
    return eps, time_unit(mass, length, registry)


def _problem(spec, rule, ftilde, couplings, length, mass, registry,
             domain, even_parity=False) -> ScaledProblem:
    eps, omega = _units(mass, length, registry)
    return ScaledProblem(ftilde, couplings, length, eps, omega, domain,
                         spec.bc, spec.family, rule, even_parity)


def _build_box(spec, mass, rule, hbar, registry) -> ScaledProblem:
    if not isinstance(rule, (GivenLength, Explicit)):
        raise NondimError("box supports GivenLength('L') or an Explicit length")
    if isinstance(rule, GivenLength):
        if rule.param != "L":
            raise NondimError(f"box has no length parameter '{rule.param}'")
        length = spec.params["L"]
    else:
        length = rule.length
    scale = spec.params["L"].magnitude / length.magnitude
    return _problem(spec, rule, ex.Num(0.0), {}, length, mass, registry,
                    Domain(0.0, scale))


def _build_harmonic(spec, mass, rule, hbar, registry) -> ScaledProblem:
    if not isinstance(rule, HarmonicBalance):
        raise NondimError("harmonic potential takes the HarmonicBalance rule")
    length = solve_scale([hbar, mass, spec.params["k"]], LENGTH).quantity
    return _problem(spec, rule, ex.parse("x^2/2"), {}, length, mass, registry,
                    FULL_LINE, even_parity=True)


def _scaled_like_parts(spec, hbar, mass):
    depth_name, a_name = _SCALED_LIKE[spec.family]
    depth = spec.params[depth_name]
    a_len = solve_scale([spec.params[a_name]], LENGTH).quantity
    lam = (mass * a_len * a_len * depth / (hbar * hbar)).magnitude
    return depth, a_len, lam


def _build_scaled_like(spec, mass, rule, hbar, registry) -> ScaledProblem:
    depth, a_len, lam = _scaled_like_parts(spec, hbar, mass)
    if spec.shape is None:
        raise NondimError(f"{spec.family.value} potential carries no shape to scale")
    even = spec.family is Family.AHMED_BIC
    if isinstance(rule, GivenLength):
        # L = a: ftilde = lambda * f(x)
        expected = _SCALED_LIKE[spec.family][1]
        if rule.param != expected:
            raise NondimError(f"{spec.family.value} expects GivenLength('{expected}')")
        ftilde = ex.BinOp("*", ex.Sym("lambda"), spec.shape)
        domain = _scaled_domain(spec.domain, a_len.magnitude)
        return _problem(spec, rule, ftilde, {"lambda": lam}, a_len, mass,
                        registry, domain, even_parity=even)
    if isinstance(rule, DepthBased):
        # L = hbar/sqrt(m V0): ftilde = f(x / sqrt(lambda))
        length = combine_depth_length(hbar, mass, depth)
        ftilde = ex.stretch(spec.shape, ex.Pow(ex.Sym("lambda"), Fraction(1, 2)))
        domain = _scaled_domain(spec.domain, length.magnitude)
        return _problem(spec, rule, ftilde, {"lambda": lam}, length, mass,
                        registry, domain, even_parity=even)
    raise NondimError(f"{spec.family.value} supports GivenLength or DepthBased")


def combine_depth_length(hbar: Quantity, mass: Quantity, depth: Quantity) -> Quantity:
    return hbar * (mass * depth) ** Fraction(-1, 2)


def _build_trunc_inv_square(spec, mass, rule, hbar, registry) -> ScaledProblem:
    if not isinstance(rule, DepthBased):
        raise NondimError("trunc_inv_square takes the DepthBased rule "
                          "(L = hbar eps/sqrt(m alpha), so eps_E = alpha/eps^2)")
    alpha = spec.params["alpha"]
    eps = spec.params["eps"]
    depth = alpha / (eps * eps)                      # well depth alpha/eps^2
    length = combine_depth_length(hbar, mass, depth)  # = hbar*eps/sqrt(m alpha)
    rho0 = math.sqrt((2.0 * mass * alpha / (hbar * hbar)).magnitude)
    ftilde = ex.parse("piecewise([0, rho0/2^(1/2)] -> -1, "
                      "[rho0/2^(1/2), inf] -> -rho0^2/(2*x^2))")
    return _problem(spec, rule, ftilde, {"rho0": rho0}, length, mass,
                    registry, HALF_LINE)


def _build_poly_anharmonic(spec, mass, rule, hbar, registry) -> ScaledProblem:
    k2 = spec.params["k2"]
    k4 = spec.params["k4"]
    lam = (hbar * k4 * (mass * k2 ** 3) ** Fraction(-1, 2)).magnitude
    if isinstance(rule, HarmonicBalance):
        length = solve_scale([hbar, mass, k2], LENGTH).quantity
        ftilde = ex.parse("x^2/2 + lambda*x^4")
    elif isinstance(rule, QuarticBased):
        length = solve_scale([hbar, mass, k4], LENGTH).quantity
        ftilde = ex.parse("x^2/(2*lambda^(2/3)) + x^4")
    else:
        raise NondimError("poly_anharmonic supports HarmonicBalance or QuarticBased")
    return _problem(spec, rule, ftilde, {"lambda": lam}, length, mass,
                    registry, FULL_LINE, even_parity=True)


def _build_custom(spec, mass, rule, hbar, registry) -> ScaledProblem:
    if not isinstance(rule, Explicit):
        raise NondimError("custom potentials need an Explicit length unit")
    length = rule.length
    if length.dim != LENGTH or length.magnitude <= 0:
        raise NondimError("explicit length unit must be a positive length")
    scale = (mass * length * length / (hbar * hbar)).magnitude
    folded = spec.expr
    for name, q in spec.params.items():
        folded = ex.substitute(folded, name, ex.Num(q.magnitude))
    # V(L x) with x now dimensionless: guards shrink by 1/L, bodies see x*L
    stretched = ex.stretch(folded, ex.Num(1.0 / length.magnitude))
    ftilde = ex.BinOp("*", ex.Num(scale), stretched)
    domain = _scaled_domain(spec.domain, length.magnitude)
    return _problem(spec, rule, ftilde, {}, length, mass, registry, domain)


def _scaled_domain(domain: Domain, length_si: float) -> Domain:
    lo = domain.lo / length_si if math.isfinite(domain.lo) else domain.lo
    hi = domain.hi / length_si if math.isfinite(domain.hi) else domain.hi
    return Domain(lo, hi)


_BUILDERS = {
    Family.BOX: _build_box,
    Family.HARMONIC: _build_harmonic,
    Family.SCALED_FORM: _build_scaled_like,
    Family.RECT_BARRIER: _build_scaled_like,
    Family.AHMED_BIC: _build_scaled_like,
    Family.MORSE: _build_scaled_like,
    Family.TRUNC_INV_SQUARE: _build_trunc_inv_square,
    Family.POLY_ANHARMONIC: _build_poly_anharmonic,
    Family.CUSTOM: _build_custom,
}

_VERIFY_POINTS = 25
_VERIFY_RTOL = 1e-10


def _verify_collapse(spec: PotentialSpec, mass: Quantity, hbar: Quantity,
                     problem: ScaledProblem) -> None:
    """Random-point identity (m L^2/hbar^2) V(L x) == ftilde(x)."""
    rng = np.random.default_rng(20260808)
    lo, hi = problem.domain.lo, problem.domain.hi
    lo = max(lo, -8.0)
    hi = min(hi, 8.0)
    if not (lo < hi):
        lo, hi = 0.0, 1.0
    xt = rng.uniform(lo + 1e-6 * (hi - lo), hi - 1e-6 * (hi - lo), _VERIFY_POINTS)
    L = problem.length_unit.magnitude
    scale = (mass * problem.length_unit ** 2 / (hbar * hbar)).magnitude
    direct = scale * np.asarray(spec.evaluate(xt * L), dtype=float)
    collapsed = np.asarray(problem.potential(xt), dtype=float)
    ref = np.maximum(np.abs(direct), 1.0)
    err = np.max(np.abs(direct - collapsed) / ref)
    if not err < _VERIFY_RTOL:
        raise NondimError(f"internal: collapsed potential deviates from "
                          f"(m L^2/hbar^2) V(L x) by {err:.3e} relative")


# ---------------------------------------------------------------------------
# Atoms: effective mass, atomic units, 1/Z scaling
# ---------------------------------------------------------------------------

def hydrogen_effective_mass(m_n: Quantity,
                            registry: ConstantRegistry | None = None) -> float:
    """mtilde = m_n/(m_n + m_e); the reduced mass in units of m_e, in (0, 1)."""
    registry = registry or default_registry()
    if m_n.dim != MASS or not m_n.magnitude > 0:
        raise ValueError("nuclear mass must be a positive mass")
    m_e = registry["m_e"].magnitude
    if math.isinf(m_n.magnitude):
        return 1.0
    return m_n.magnitude / (m_n.magnitude + m_e)


def bohr_radius(registry: ConstantRegistry | None = None) -> Quantity:
    registry = registry or default_registry()
    sol = solve_scale([registry["hbar"], registry["m_e"], registry["kappa"]], LENGTH)
    return sol.quantity


@dataclass(frozen=True)
class AtomicDescriptor:
    """K-particle problem in atomic units; symbolic, there is no K-particle solver."""

    m_tilde: tuple[float, ...]
    q_tilde: tuple[float, ...]
    length_unit: Quantity                      # a0
    energy_unit: Quantity                      # hbar^2/(m_e a0^2)
    coulomb_coefficients: dict[tuple[int, int], float]  # qi*qj per pair i<j


def atomic_units(particles: list[tuple[Quantity, Quantity]],
                 registry: ConstantRegistry | None = None) -> AtomicDescriptor:
    """Scale a list of (mass, charge) particles to atomic units."""
    registry = registry or default_registry()
    if not particles:
        raise ValueError("need at least one particle")
    m_e = registry["m_e"]
    e = registry["e"]
    for mass, charge in particles:
        if mass.dim != MASS:
            raise ValueError(f"particle mass has dimension {mass.dim}")
        if charge.dim != e.dim:
            raise ValueError(f"particle charge has dimension {charge.dim}")
    a0 = bohr_radius(registry)
    m_tilde = tuple(mass.magnitude / m_e.magnitude for mass, _ in particles)
    q_tilde = tuple(charge.magnitude / e.magnitude for _, charge in particles)
    pairs = {(i, j): q_tilde[i] * q_tilde[j]
             for i in range(len(particles)) for j in range(i + 1, len(particles))}
    return AtomicDescriptor(m_tilde, q_tilde, a0,
                            energy_unit(m_e, a0, registry), pairs)


@dataclass(frozen=True)
class ZScaledAtom:
    """N-electron atom with 1/Z-scaled Coulomb couplings and its series template."""

    n_electrons: int
    z: int
    length_unit: Quantity                       # a0 / Z
    energy_prefactor: Quantity                  # hbar^2 Z^2/(m_e a0^2)
    nucleus_coefficients: tuple[Fraction, ...]  # exactly -1 per electron
    ee_coefficient: Fraction | None             # exactly 1/Z; None when N == 1

    def series_template(self) -> str:
        """Shape of the perturbation series; the coefficients stay symbolic."""
        body = " + ".join(f"E({j})*Z^(-{j})" if j else "E(0)"
                          for j in range(3)) + " + ..."
        return (f"E = (hbar^2*Z^2/(m_e*a0^2)) * ({body})"
                f"  # E(j) unknown, N-dependent (N={self.n_electrons})")


def z_scaled_atom(n_electrons: int, z: int,
                  registry: ConstantRegistry | None = None) -> ZScaledAtom:
    """Clamped-nucleus N-electron atom scaled with L = a0/Z."""
    if n_electrons < 1 or z < 1:
        raise ValueError("need N >= 1 electrons and Z >= 1")
    registry = registry or default_registry()
    a0 = bohr_radius(registry)
    length = a0 * (1.0 / z)
    m_e = registry["m_e"]
    prefactor = energy_unit(m_e, a0, registry) * float(z * z)
    ee = Fraction(1, z) if n_electrons >= 2 else None
    return ZScaledAtom(n_electrons, z, length, prefactor,
                       tuple([Fraction(-1)] * n_electrons), ee)


# ---------------------------------------------------------------------------
# Equivalence of parameterizations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    couplings_a: dict[str, float]
    couplings_b: dict[str, float]
    max_rel_diff: float


_EQUIV_RTOL = 1e-12


def equivalence_witness(spec_a: PotentialSpec, spec_b: PotentialSpec,
                        mass_a: Quantity, mass_b: Quantity,
                        rule: ScalingRule | None = None,
                        registry: ConstantRegistry | None = None) -> EquivalenceVerdict:
    """Two parameterizations are equivalent iff every coupling agrees to 1e-12."""
    if spec_a.family is not spec_b.family:
        raise NondimError(f"family mismatch: {spec_a.family.value} vs {spec_b.family.value}")
    ca = couplings_of(spec_a, mass_a, rule, registry)
    cb = couplings_of(spec_b, mass_b, rule, registry)
    worst = 0.0
    for name in set(ca) | set(cb):
        if name not in ca or name not in cb:
            worst = math.inf
            break
        ref = max(abs(ca[name]), abs(cb[name]), 1e-300)
        worst = max(worst, abs(ca[name] - cb[name]) / ref)
    return EquivalenceVerdict(worst <= _EQUIV_RTOL, ca, cb, worst)


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

def render_report(problem: ScaledProblem) -> str:
    """Human-readable summary plus a machine-readable key = value section."""
    rule_name = type(problem.rule).__name__
    lines = [
        f"scaled problem ({problem.family.value}, rule {rule_name})",
        f"  length unit L      = {problem.length_unit.magnitude:.12e} m",
        f"  energy unit eps_E  = {problem.energy_unit.magnitude:.12e} J",
        f"  time unit omega    = {problem.time_unit.magnitude:.12e} rad/s",
        f"  energy map         = E(SI) = eps_E * Etilde",
        f"  domain (scaled)    = [{problem.domain.lo:g}, {problem.domain.hi:g}],"
        f" bc {problem.bc.value}",
    ]
    if problem.couplings:
        lines.append("  couplings:")
        for name in sorted(problem.couplings):
            lines.append(f"    {name} = {problem.couplings[name]:.12g}")
    else:
        lines.append("  couplings: none (fully universal problem)")
    lines.append(f"  ftilde(x) = {ex.print_expr(problem.ftilde)}")
    lines.append("")
    lines.append("[machine]")
    lines.append(f"family = {problem.family.value}")
    lines.append(f"rule = {rule_name}")
    lines.append(f"L_SI = {problem.length_unit.magnitude!r}")
    lines.append(f"eps_E_SI = {problem.energy_unit.magnitude!r}")
    lines.append(f"omega_SI = {problem.time_unit.magnitude!r}")
    for name in sorted(problem.couplings):
        lines.append(f"coupling.{name} = {problem.couplings[name]!r}")
    lines.append(f"ftilde = {ex.print_expr(problem.ftilde)}")
    lines.append(f"domain = {problem.domain.lo!r} {problem.domain.hi!r}")
    lines.append(f"bc = {problem.bc.value}")
    return "\n".join(lines) + "\n"


def both_rules(spec: PotentialSpec, mass: Quantity,
               registry: ConstantRegistry | None = None
               ) -> dict[str, ScaledProblem]:
    """Both scalings of a V0*f(x/a)-style potential, keyed 'A' and 'B'.

    The two dimensionless problems differ, but mapping their spectra back to
    SI has to agree; neither is preferred.
    """
    if spec.family not in _SCALED_LIKE:
        raise NondimError(f"{spec.family.value} does not have the A/B rule pair")
    a_name = _SCALED_LIKE[spec.family][1]
    return {
        "A": nondimensionalize(spec, mass, GivenLength(a_name), registry),
        "B": nondimensionalize(spec, mass, DepthBased(), registry),
    }
