"""Rayleigh-Schrodinger coefficients for polynomial perturbations of the
harmonic oscillator, in exact rational arithmetic, with an independent
hypervirial/Hellmann-Feynman recursion as the second route for the quartic.

Two completely different algorithms produce the same exact rationals:

* rs_series works in the oscillator eigenbasis.  With the unnormalized
  ladder basis |k>' = (a+)^k |0> the operator y = sqrt(2) x acts with integer
  coefficients, (y c)_j = (j+1) c_{j+1} + c_{j-1}, and stray factors of
  sqrt(2) live in a tiny Q[sqrt2] number type until they cancel.
* hypervirial_series never sees a basis: it recurses on the moments <x^N>
  expanded in the coupling, closed by the Hellmann-Feynman theorem.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import expr as ex
from .catalog import BoundaryCondition, Family, FULL_LINE
from .dimensions import Dimension, Quantity
from .nondim import HarmonicBalance, ScaledProblem
from . import solver1d

MAX_ORDER = 12
MAX_DEGREE = 8


class OrderError(ValueError):
    """Requested order beyond the exactness-guaranteed cap."""


Polynomial = dict[int, Fraction]


def _normalize_poly(perturbation) -> Polynomial:
    if isinstance(perturbation, dict):
        items = perturbation.items()
    else:
        items = perturbation
    poly: Polynomial = {}
    for degree, coeff in items:
        degree = int(degree)
        coeff = Fraction(coeff)
        if coeff == 0:
            continue
        if degree < 1:
            raise ValueError("perturbation powers start at x^1")
        if degree > MAX_DEGREE:
            raise ValueError(f"perturbation degree {degree} exceeds {MAX_DEGREE}")
        poly[degree] = poly.get(degree, Fraction(0)) + coeff
    if not poly:
        raise ValueError("perturbation polynomial is empty")
    return poly


@dataclass(frozen=True)
class RationalSeries:
    """Exact perturbation coefficients: E(lam) ~ sum_j coefficients[j] lam^j."""

    n: int
    order: int
    coefficients: tuple[Fraction, ...]
    perturbation: tuple[tuple[int, Fraction], ...]

    def coefficient(self, j: int) -> Fraction:
        return self.coefficients[j]

    def partial_sum(self, lam: float, j_max: int | None = None) -> float:
        j_max = self.order if j_max is None else j_max
        return float(sum(float(c) * lam ** j
                         for j, c in enumerate(self.coefficients[:j_max + 1])))


def emit_series_report(series: RationalSeries) -> str:
    """One line per order: j, numerator, denominator, float value."""
    lines = ["j,numerator,denominator,float_value"]
    for j, c in enumerate(series.coefficients):
        lines.append(f"{j},{c.numerator},{c.denominator},{float(c)!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Exact arithmetic in Q[sqrt(2)]
# ---------------------------------------------------------------------------

class _Q2:
    """a + b*sqrt(2) with exact rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = a if isinstance(a, Fraction) else Fraction(a)
        self.b = b if isinstance(b, Fraction) else Fraction(b)

    def __add__(self, o):
        return _Q2(self.a + o.a, self.b + o.b)

    def __sub__(self, o):
        return _Q2(self.a - o.a, self.b - o.b)

    def __mul__(self, o):
        if isinstance(o, _Q2):
            return _Q2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)
        return _Q2(self.a * o, self.b * o)

    __rmul__ = __mul__

    def scaled(self, r: Fraction) -> "_Q2":
        return _Q2(self.a * r, self.b * r)

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def rational_part(self) -> Fraction:
        if self.b != 0:
            raise ArithmeticError(f"sqrt(2) component failed to cancel: {self.b}")
        return self.a


def _apply_y(c: list[_Q2]) -> list[_Q2]:
    # y = sqrt(2) x on unnormalized ladder coefficients
    size = len(c)
    out = [_Q2() for _ in range(size)]
    for j in range(size):
        if j + 1 < size and not c[j + 1].is_zero:
            out[j] = out[j] + c[j + 1] * (j + 1)
        if j >= 1 and not c[j - 1].is_zero:
            out[j] = out[j] + c[j - 1]
    return out


def _apply_poly(poly: Polynomial, c: list[_Q2]) -> list[_Q2]:
    total = [_Q2() for _ in range(len(c))]
    for degree, coeff in poly.items():
        v = c
        for _ in range(degree):
            v = _apply_y(v)
        # x^d = 2^(-d/2) y^d; odd d leaves one factor of sqrt(2)/2
        if degree % 2 == 0:
            factor = _Q2(Fraction(coeff, 2 ** (degree // 2)), 0)
        else:
            factor = _Q2(0, Fraction(coeff, 2 ** ((degree + 1) // 2)))
        total = [t + vi * factor for t, vi in zip(total, v)]
    return total


def rs_series(n: int, order: int, perturbation) -> RationalSeries:
    """Rayleigh-Schrodinger coefficients of H = H_osc + lam * V(x), V polynomial.

    Exact rationals: the basis is truncated at n + order*deg + 1 states, which
    a degree-deg perturbation at this order provably cannot escape, so no
    approximation enters.  Orders beyond MAX_ORDER raise instead of silently
    truncating.
    """
    if n < 0:
        raise ValueError("state index must be >= 0")
    if order > MAX_ORDER:
        raise OrderError(f"order {order} beyond the exactness cap {MAX_ORDER}")
    if order < 0:
        raise ValueError("order must be >= 0")
    poly = _normalize_poly(perturbation)
    dmax = max(poly)
    size = n + order * dmax + 2

    psi0 = [_Q2() for _ in range(size)]
    psi0[n] = _Q2(1, 0)
    psis = [psi0]
    energies: list[_Q2] = [_Q2(Fraction(2 * n + 1, 2), 0)]
    for j in range(1, order + 1):
        v_psi = _apply_poly(poly, psis[j - 1])
        energies.append(_Q2(v_psi[n].a, v_psi[n].b))
        rhs = [_Q2() for _ in range(size)]
        for i in range(1, j + 1):
            ei = energies[i]
            if ei.is_zero:
                continue
            rhs = [r + p * ei for r, p in zip(rhs, psis[j - i])]
        rhs = [r - v for r, v in zip(rhs, v_psi)]
        new_psi = [_Q2() for _ in range(size)]
        for k in range(size):
            if k != n and not rhs[k].is_zero:
                new_psi[k] = rhs[k].scaled(Fraction(1, k - n))
        psis.append(new_psi)
    coeffs = tuple(e.rational_part() for e in energies)
    return RationalSeries(n, order, coeffs, tuple(sorted(poly.items())))


# ---------------------------------------------------------------------------
# Hypervirial / Hellmann-Feynman route (quartic-specific)
# ---------------------------------------------------------------------------

def hypervirial_series(n: int, order: int) -> RationalSeries:
    """Quartic-oscillator coefficients from the moment recursion.

    Hypervirial relations for H = -1/2 d^2/dx^2 + x^2/2 + lam x^4 close the
    moments M_N = <x^N> order by order in lam; Hellmann-Feynman then gives
    E^(j+1) = M_4^(j)/(j+1).  No eigenbasis is ever constructed.
    """
    if n < 0:
        raise ValueError("state index must be >= 0")
    if order > MAX_ORDER:
        raise OrderError(f"order {order} beyond the exactness cap {MAX_ORDER}")
    energies: list[Fraction] = [Fraction(2 * n + 1, 2)]
    moments: dict[tuple[int, int], Fraction] = {}

    def moment(p: int, j: int) -> Fraction:
        if p % 2 == 1:
            return Fraction(0)
        if p == 0:
            return Fraction(1) if j == 0 else Fraction(0)
        if (p, j) in moments:
            return moments[(p, j)]
        big_n = p - 1  # the relation that produces M_{N+1}
        acc = 2 * big_n * sum(energies[i] * moment(big_n - 1, j - i)
                              for i in range(j + 1))
        if big_n >= 3:
            acc += Fraction(big_n * (big_n - 1) * (big_n - 2), 4) * moment(big_n - 3, j)
        if j >= 1:
            acc -= (2 * big_n + 4) * moment(big_n + 3, j - 1)
        value = acc / (big_n + 1)
        moments[(p, j)] = value
        return value

    for j in range(order):
        energies.append(moment(4, j) / (j + 1))
    return RationalSeries(n, order, tuple(energies), ((4, Fraction(1)),))


# ---------------------------------------------------------------------------
# Weak- and strong-coupling evaluation against the solver
# ---------------------------------------------------------------------------

def weak_coupling_eval(series: RationalSeries, lam: float,
                       j_max: int | None = None) -> list[float]:
    """Partial sums S_j = sum_{i<=j} E^(i) lam^i for j = 0..j_max."""
    if lam < 0:
        raise ValueError("coupling must be >= 0")
    j_max = series.order if j_max is None else min(j_max, series.order)
    sums = []
    total = 0.0
    for j in range(j_max + 1):
        total += float(series.coefficients[j]) * lam ** j
        sums.append(total)
    return sums


def quartic_problem(lam: float) -> ScaledProblem:
    """Dimensionless quartic oscillator x^2/2 + lam x^4 with unit SI units."""
    one = Quantity(1.0, Dimension(length=1))
    return ScaledProblem(
        ftilde=ex.parse("x^2/2 + lambda*x^4"),
        couplings={"lambda": float(lam)},
        length_unit=one,
        energy_unit=Quantity(1.0, Dimension(mass=1, length=2, time=-2)),
        time_unit=Quantity(1.0, Dimension(time=-1)),
        domain=FULL_LINE,
        bc=BoundaryCondition.DECAY,
        family=Family.POLY_ANHARMONIC,
        rule=HarmonicBalance(),
        even_parity=True,
    )


def solve_quartic_level(lam: float, n: int = 0, h: float = solver1d.DEFAULT_STEP) -> float:
    """Numerov eigenvalue of the dimensionless quartic problem."""
    states = solver1d.bound_states(quartic_problem(lam), count=n + 1, h=h,
                                   compute_residual=False)
    if len(states) <= n:
        raise solver1d.SolverError(f"quartic level n={n} did not converge at lam={lam}")
    return states[n].energy


@dataclass(frozen=True)
class StrongCouplingProbe:
    """E(lam)/lam^(1/3) samples and the fitted limit of the pure quartic."""

    e0_estimate: float
    slope_estimate: float           # coefficient of lam^(-2/3)
    samples: tuple[float, ...]
    ratios: tuple[float, ...]


def strong_coupling_probe(samples, n: int = 0,
                          h: float = solver1d.DEFAULT_STEP) -> StrongCouplingProbe:
    """Solve the quartic problem on increasing couplings and extrapolate.

    E(lam)/lam^(1/3) -> e0 with a lam^(-2/3) leading correction; the fit uses
    unweighted least squares on the top three samples.
    """
    samples = [float(s) for s in samples]
    if not samples or any(s <= 0 for s in samples):
        raise ValueError("samples must be positive")
    if sorted(samples) != samples:
        raise ValueError("samples must be increasing")
    if max(samples) < 1e3:
        raise ValueError("largest sample must reach 1e3 for the asymptotic fit")
    ratios = []
    for lam in samples:
        energy = solve_quartic_level(lam, n, h)
        ratios.append(energy / lam ** (1.0 / 3.0))
    top = min(3, len(samples))
    u = np.array([s ** (-2.0 / 3.0) for s in samples[-top:]])
    y = np.array(ratios[-top:])
    if top >= 2:
        slope, intercept = np.polyfit(u, y, 1)
    else:
        slope, intercept = 0.0, y[0]
    return StrongCouplingProbe(float(intercept), float(slope),
                               tuple(samples), tuple(ratios))


def pure_quartic_reference(n: int = 0, window: float = 4.0,
                           h: float = 2e-3) -> float:
    """Independent oracle: FD matrix diagonalization of -1/2 psi'' + x^4 psi."""
    m = int(round(2 * window / h))
    x = -window + h * np.arange(m + 1)
    f = x ** 4
    vals = solver1d._fd_lowest(f, h, n + 1)
    return float(vals[n])


def atomic_series_template(n_electrons: int, z: int) -> str:
    """Structural 1/Z series shape; numeric coefficients stay out of scope."""
    from .nondim import z_scaled_atom

    return z_scaled_atom(n_electrons, z).series_template()
