"""Barrier transmission: the closed rectangular-barrier form and a
piecewise-constant transfer-matrix solver for general compact potentials.

Both work in dimensionless variables.  The closed form uses the barrier's own
units (energy in units of the height V0, width as the dimensionless coupling
lambda = m a^2 V0 / hbar^2); the numeric routine takes energies in whatever
unit the ScaledProblem carries, so with the depth-based scaling the two speak
the same scale directly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .nondim import ScaledProblem

_UNITARITY_TOL = 1e-10


class ScatteringError(ValueError):
    pass


@dataclass(frozen=True)
class TransmissionResult:
    e_tilde: float
    lam: float | None
    T: float
    R: float

    def __post_init__(self):
        if not -1e-9 <= self.T <= 1.0 + 1e-9:
            raise ScatteringError(f"transmission {self.T!r} outside [0, 1]")
        if abs(self.T + self.R - 1.0) > _UNITARITY_TOL:
            raise ScatteringError(f"T + R = {self.T + self.R!r} violates unitarity")


def transmission_closed(e_tilde: float, lam: float) -> TransmissionResult:
    """Rectangular-barrier transmission T(E/V0, lambda), all three branches.

    Continuous across e_tilde = 1, where it equals 2/(2 + lambda).
    """
    if e_tilde <= 0.0 or lam <= 0.0:
        raise ScatteringError("need e_tilde > 0 and lambda > 0")
    if e_tilde < 1.0:
        s = math.sinh(math.sqrt(2.0 * lam * (1.0 - e_tilde))) ** 2
        t = 4.0 * e_tilde * (1.0 - e_tilde)
        T = t / (t + s)
    elif e_tilde == 1.0:
        T = 2.0 / (2.0 + lam)
    else:
        s = math.sin(math.sqrt(2.0 * lam * (e_tilde - 1.0))) ** 2
        t = 4.0 * e_tilde * (e_tilde - 1.0)
        T = t / (t + s)
    return TransmissionResult(e_tilde, lam, T, 1.0 - T)


def _slice_transfer(k: complex, w: float) -> np.ndarray:
    """Propagate (psi, psi') across a constant-potential slice of width w.

    Exact for the slice; the k -> 0 limit is taken by series so the E = V0
    case costs nothing special.
    """
    kw = k * w
    if abs(kw) < 1e-6:
        kw2 = kw * kw
        c = 1.0 - kw2 / 2.0 + kw2 * kw2 / 24.0
        s_over_k = w * (1.0 - kw2 / 6.0 + kw2 * kw2 / 120.0)
        k_s = k * k * s_over_k
    else:
        c = cmath.cos(kw)
        s = cmath.sin(kw)
        s_over_k = s / k
        k_s = k * s
    return np.array([[c, s_over_k], [-k_s, c]], dtype=complex)


def _support_window(problem: ScaledProblem) -> tuple[float, float]:
    """Interval outside which ftilde is numerically constant (the asymptotes)."""
    breaks = _finite_breakpoints(problem.ftilde, problem.couplings)
    if breaks:
        return min(breaks), max(breaks)
    # numeric scan for decaying potentials
    xs = np.linspace(-60.0, 60.0, 24001)
    fv = np.asarray(problem.potential(xs), dtype=float)
    if fv.ndim == 0:
        fv = np.full_like(xs, float(fv))
    scale = max(1e-12, float(np.max(np.abs(fv))))
    live = np.nonzero(np.abs(fv - fv[0]) + np.abs(fv - fv[-1]) > 1e-12 * scale)[0]
    if len(live) == 0:
        return -1.0, 1.0
    return float(xs[live[0]]), float(xs[live[-1]])


def _finite_breakpoints(expression: ex.Expr, params: dict[str, float]) -> list[float]:
    out: list[float] = []

    def walk(e: ex.Expr) -> None:
        if isinstance(e, ex.Piecewise):
            for p in e.pieces:
                for endpoint in (p.lo, p.hi):
                    v = ex.evaluate(endpoint, math.nan, params)
                    if math.isfinite(v):
                        out.append(float(v))
                walk(p.body)
        elif isinstance(e, ex.Neg):
            walk(e.operand)
        elif isinstance(e, ex.BinOp):
            walk(e.left)
            walk(e.right)
        elif isinstance(e, ex.Pow):
            walk(e.base)
        elif isinstance(e, ex.Call):
            walk(e.arg)

    walk(expression)
    return out


def transmission_numeric(problem: ScaledProblem, e_tilde: float,
                         h: float = 1e-3) -> TransmissionResult:
    """Transfer-matrix transmission at dimensionless energy e_tilde.

    The potential is sliced into piecewise-constant segments of width ~h
    between its outermost breakpoints; each slice propagates (psi, psi')
    exactly, so genuinely piecewise-constant barriers are solved to round-off.
    Incidence is from the left.  An energy below both asymptotes cannot
    scatter and raises; below only the transmitted side it totally reflects.
    """
    lo, hi = _support_window(problem)
    f_left = float(problem.potential(lo - 10.0))
    f_right = float(problem.potential(hi + 10.0))
    lam = problem.couplings.get("lambda")
    if e_tilde <= f_left and e_tilde <= f_right:
        raise ScatteringError(f"energy {e_tilde!r} is evanescent on both sides; "
                              "no scattering state exists")
    if e_tilde <= f_left:
        raise ScatteringError(f"energy {e_tilde!r} is below the incidence-side "
                              "asymptote; no incoming wave")
    if e_tilde <= f_right:
        return TransmissionResult(e_tilde, lam, 0.0, 1.0)

    n = max(1, int(round((hi - lo) / h)))
    w = (hi - lo) / n
    mids = lo + (np.arange(n) + 0.5) * w
    f_mid = np.asarray(problem.potential(mids), dtype=float)
    if f_mid.ndim == 0:
        f_mid = np.full_like(mids, float(f_mid))

    k_left = math.sqrt(2.0 * (e_tilde - f_left))
    k_right = math.sqrt(2.0 * (e_tilde - f_right))
    # transmitted wave of unit amplitude at the right edge, pulled back to lo;
    # the slice matrix is unimodular, so its inverse is propagation by -w
    state = np.array([1.0 + 0.0j, 1j * k_right])
    for fm in f_mid[::-1]:
        k = cmath.sqrt(2.0 * (e_tilde - fm))
        state = _slice_transfer(k, -w) @ state
    a = 0.5 * (state[0] + state[1] / (1j * k_left))
    b = 0.5 * (state[0] - state[1] / (1j * k_left))
    T = (k_right / k_left) / abs(a) ** 2
    R = abs(b / a) ** 2
    return TransmissionResult(e_tilde, lam, float(T), float(R))
