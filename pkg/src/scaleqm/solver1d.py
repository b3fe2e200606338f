"""Dimensionless bound-state solver: Numerov shooting plus a finite-difference
matrix backend, closed-form reference spectra, and the map back to SI energy.

The eigenvalue search isolates each state by node-count bisection (a single
left-to-right Numerov sweep per trial energy) and then refines the zero of the
two-sided matching mismatch: left and right integrations glued at a matching
index must satisfy the Numerov three-term recurrence there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.optimize import brentq

from .catalog import BoundaryCondition, Family
from .dimensions import Quantity
from .nondim import ScaledProblem

DEFAULT_STEP = 1e-3
ENERGY_TOL = 1e-10          # |delta Etilde| convergence target
_PAD_ACTION = 13.0          # int kappa dx beyond the turning point (exp(-26) leakage)
_CEILING_MARGIN = 1e-6
_RESCALE = 1e250
_MAX_GRID_POINTS = 4_000_000


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid with a left boundary tag.

    bc: 'dirichlet' | 'parity-even' | 'parity-odd' | 'radial-regular'
    """

    x_min: float
    x_max: float
    h: float = DEFAULT_STEP
    bc: str = "dirichlet"

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("grid step must be positive")
        steps = (self.x_max - self.x_min) / self.h
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError("(x_max - x_min)/h must be an integer")
        if round(steps) < 16:
            raise ValueError("grid needs at least 16 steps")

    @property
    def n_points(self) -> int:
        return int(round((self.x_max - self.x_min) / self.h)) + 1

    def points(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(self.n_points)


@dataclass
class BoundState:
    """One bound level: index equals the interior node count of its eigenfunction."""

    index: int
    energy: float                     # Etilde
    converged: bool
    residual: float | None = None     # |Etilde(h) - Etilde(h/2)|
    nodes: int | None = None
    grid: np.ndarray | None = None
    wavefunction: np.ndarray | None = None


class Spectrum(list):
    """List of BoundState with a completeness flag for truncated windows."""

    def __init__(self, states: Sequence[BoundState], requested: int):
        super().__init__(states)
        self.requested = requested
        self.complete = len(states) >= requested


# ---------------------------------------------------------------------------
# Numerov core
# ---------------------------------------------------------------------------

def _sweep(T: list, y0: float, y1: float, count_from: int = 1) -> tuple[int, float, float]:
    """Forward Numerov over the whole grid; returns (nodes, y[-2], y[-1]).

    Magnitudes are rescaled by positive factors when they grow large, which
    leaves node counts and the sign of the endpoint value intact.
    """
    n = len(T)
    prev, cur = y0, y1
    nodes = 0
    cm1 = 1.0 - T[count_from - 1]
    c0 = 1.0 - T[count_from]
    for i in range(count_from, n - 1):
        cp1 = 1.0 - T[i + 1]
        nxt = ((2.0 + 10.0 * T[i]) * cur - cm1 * prev) / cp1
        if cur != 0.0 and (nxt < 0.0) != (cur < 0.0):
            nodes += 1
        prev, cur = cur, nxt
        cm1, c0 = c0, cp1
        if cur > _RESCALE or cur < -_RESCALE or (abs(cur) < 1.0 / _RESCALE and cur != 0.0):
            scale = 1.0 / max(abs(cur), abs(prev))
            prev *= scale
            cur *= scale
    return nodes, prev, cur


def _sweep_until(T: list, y0: float, y1: float, stop: int,
                 count_from: int = 1) -> tuple[float, float]:
    """Forward Numerov stopping at index `stop`; returns (y[stop-1], y[stop])."""
    prev, cur = y0, y1
    cm1 = 1.0 - T[count_from - 1]
    for i in range(count_from, stop):
        cp1 = 1.0 - T[i + 1]
        nxt = ((2.0 + 10.0 * T[i]) * cur - cm1 * prev) / cp1
        prev, cur = cur, nxt
        cm1 = 1.0 - T[i]
        if abs(cur) > _RESCALE:
            prev /= _RESCALE
            cur /= _RESCALE
    return prev, cur


def _sweep_back_until(T: list, yn: float, yn1: float, stop: int) -> tuple[float, float]:
    """Backward Numerov from the right edge down to `stop`; returns (y[stop], y[stop+1])."""
    n = len(T)
    nxt, cur = yn, yn1  # y[n-1], y[n-2]
    for i in range(n - 2, stop, -1):
        cm1 = 1.0 - T[i - 1]
        prv = ((2.0 + 10.0 * T[i]) * cur - (1.0 - T[i + 1]) * nxt) / cm1
        nxt, cur = cur, prv
        if abs(cur) > _RESCALE:
            nxt /= _RESCALE
            cur /= _RESCALE
    return cur, nxt


class _Shooter:
    """Shooting machinery for u'' = gfac (f - E) u on a fixed uniform grid."""

    def __init__(self, x: np.ndarray, f: np.ndarray, h: float, bc: str,
                 gfac: float = 2.0,
                 series_start: Callable[[float, float], float] | None = None):
        self.x = x
        self.f = f
        self.h = h
        self.bc = bc
        self.gfac = gfac
        self.series_start = series_start  # (E, x) -> regular-solution value
        # coarse subsampling for the early bisection phase
        self.stride = 8 if len(x) > 4000 else 1

    def _T(self, E: float, stride: int = 1) -> list:
        h = self.h * stride
        g = self.gfac * (self.f[::stride] - E)
        return ((h * h / 12.0) * g).tolist()

    def _start(self, E: float, T: list, stride: int = 1) -> tuple[float, float]:
        h = self.h * stride
        if self.bc in ("dirichlet", "parity-odd"):
            return 0.0, h
        if self.bc == "parity-even":
            y0 = 1.0
            y1 = (2.0 + 10.0 * T[0]) * y0 / (2.0 * (1.0 - T[1]))
            return y0, y1
        if self.bc == "radial-regular":
            x0 = float(self.x[0])
            if self.series_start is not None:
                return self.series_start(E, x0), self.series_start(E, x0 + h)
            return x0, x0 + h
        raise ValueError(f"unknown boundary tag '{self.bc}'")

    def count_nodes(self, E: float, coarse: bool = False) -> int:
        stride = self.stride if coarse else 1
        T = self._T(E, stride)
        y0, y1 = self._start(E, T, stride)
        extra = 1 if (y0 > 0.0 and y1 < 0.0) or (y0 < 0.0 and y1 > 0.0) else 0
        nodes, _, _ = _sweep(T, y0, y1)
        return nodes + extra

    def match_index(self, E: float) -> int:
        """Outermost classically allowed point, clamped away from the edges."""
        allowed = np.nonzero(self.f <= E)[0]
        if len(allowed) == 0:
            return len(self.f) // 2
        m = int(allowed[-1])
        return min(max(m, 2), len(self.f) - 3)

    def mismatch(self, E: float, m: int) -> float:
        """Recurrence defect of the glued two-sided solution at index m."""
        T = self._T(E)
        y0, y1 = self._start(E, T)
        lm1, lm = _sweep_until(T, y0, y1, m)
        rm, rm1 = _sweep_back_until(T, 0.0, self.h, m)
        d = ((1.0 - T[m + 1]) * rm1 * lm
             + (1.0 - T[m - 1]) * lm1 * rm
             - (2.0 + 10.0 * T[m]) * lm * rm)
        norm = (abs(lm1) + abs(lm)) * (abs(rm) + abs(rm1)) + 1e-300
        return d / norm

    def solve_state(self, k: int, lo: float, hi: float) -> tuple[float, bool]:
        """Isolate the k-th node-count transition in [lo, hi], then refine."""
        # coarse node bisection to localize
        span = hi - lo
        a, b = lo, hi
        for _ in range(18):
            mid = 0.5 * (a + b)
            if self.count_nodes(mid, coarse=self.stride > 1) > k:
                b = mid
            else:
                a = mid
        # fine node bisection; correct any coarse-grid miscount first
        guard = 0
        while self.count_nodes(b) <= k:
            b = min(hi, b + max(1e-12, 0.05 * span))
            guard += 1
            if guard > 40 or (b >= hi and self.count_nodes(hi) <= k):
                raise SolverError(f"state {k} escaped its bracket")
        guard = 0
        while self.count_nodes(a) > k:
            a = max(lo, a - max(1e-12, 0.05 * span))
            guard += 1
            if guard > 40:
                raise SolverError(f"state {k} lost its lower bracket")
        for _ in range(14):
            mid = 0.5 * (a + b)
            if self.count_nodes(mid) > k:
                b = mid
            else:
                a = mid
        # refine on the matching mismatch when it brackets a sign change
        m = self.match_index(0.5 * (a + b))
        fa = self.mismatch(a, m)
        fb = self.mismatch(b, m)
        if math.isfinite(fa) and math.isfinite(fb) and fa * fb < 0.0:
            energy = brentq(lambda E: self.mismatch(E, m), a, b,
                            xtol=ENERGY_TOL * 1e-2, rtol=8.9e-16)
            return energy, True
        # fall back to pure node bisection, which converges unconditionally
        scale = max(1.0, abs(a), abs(b))
        while b - a > ENERGY_TOL * 1e-2 * scale:
            mid = 0.5 * (a + b)
            if self.count_nodes(mid) > k:
                b = mid
            else:
                a = mid
        return 0.5 * (a + b), True

    def wavefunction(self, E: float) -> np.ndarray:
        """Two-sided glued, normalized eigenfunction for a converged energy."""
        m = self.match_index(E)
        T = self._T(E)
        y0, y1 = self._start(E, T)
        left = _numerov_array(T, y0, y1, 0, m)
        right = _numerov_array_back(T, 0.0, self.h, m)
        if right[0] != 0.0 and math.isfinite(right[0]):
            right *= left[-1] / right[0]
        psi = np.concatenate([left[:-1], right])
        peak = float(np.max(np.abs(psi)))
        if peak > 0 and math.isfinite(peak):
            psi /= peak
        norm = math.sqrt(np.trapezoid(psi * psi, dx=self.h))
        if norm > 0 and math.isfinite(norm):
            psi /= norm
        return psi


def _numerov_array(T: list, y0: float, y1: float, start: int, stop: int) -> np.ndarray:
    out = np.empty(stop - start + 1)
    out[0], out[1] = y0, y1
    prev, cur = y0, y1
    for i in range(start + 1, stop):
        nxt = ((2.0 + 10.0 * T[i]) * cur - (1.0 - T[i - 1]) * prev) / (1.0 - T[i + 1])
        prev, cur = cur, nxt
        out[i - start + 1] = cur
        if abs(cur) > _RESCALE:
            out[:i - start + 2] /= _RESCALE
            prev /= _RESCALE
            cur /= _RESCALE
    return out


def _numerov_array_back(T: list, yn: float, yn1: float, stop: int) -> np.ndarray:
    n = len(T)
    out = np.empty(n - stop)
    out[-1], out[-2] = yn, yn1
    nxt, cur = yn, yn1
    for i in range(n - 2, stop, -1):
        prv = ((2.0 + 10.0 * T[i]) * cur - (1.0 - T[i + 1]) * nxt) / (1.0 - T[i - 1])
        nxt, cur = cur, prv
        out[i - 1 - stop] = cur
        if abs(cur) > _RESCALE:
            out[i - 1 - stop:] /= _RESCALE
            nxt /= _RESCALE
            cur /= _RESCALE
    return out


def count_sign_changes(psi: np.ndarray, rtol: float = 1e-8) -> int:
    """Interior sign changes, ignoring numerically dead tails."""
    cutoff = rtol * float(np.max(np.abs(psi)))
    live = psi[np.abs(psi) > cutoff]
    if len(live) < 2:
        return 0
    return int(np.sum(np.signbit(live[:-1]) != np.signbit(live[1:])))


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------

def _safe_potential(problem_potential, x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        v = np.asarray(problem_potential(x), dtype=float)
    if v.shape != x.shape:
        v = np.full_like(x, float(v))
    return np.nan_to_num(v, nan=1e300, posinf=1e300, neginf=-1e300)


def _fd_lowest(f: np.ndarray, h: float, count: int, gfac: float = 2.0) -> np.ndarray:
    """Lowest eigenvalues of the Dirichlet finite-difference matrix."""
    interior = f[1:-1]
    n = len(interior)
    count = min(count, n - 1)
    diag = 2.0 / (gfac * h * h) + interior
    off = np.full(n - 1, -1.0 / (gfac * h * h))
    return eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))


def _fd_interior(problem: ScaledProblem, grid: GridSpec) -> np.ndarray:
    f = _safe_potential(problem.potential, grid.points())
    if grid.bc == "radial-regular":
        # the left wall u(0) = 0 sits one step before the first grid point
        return f[:-1]
    return f[1:-1]


def _fd_richardson(problem: ScaledProblem, grid: GridSpec, count: int) -> np.ndarray:
    """Matrix backend: second-order FD at h and h/2, Richardson-extrapolated.

    The h^2 discretization bias cancels, leaving h^4-level eigenvalues from
    pure diagonalization, independent of the shooting machinery.
    """
    coarse = _fd_lowest_interior(_fd_interior(problem, grid), grid.h, count)
    if grid.bc == "radial-regular":
        fine_grid = GridSpec(grid.h / 2.0, grid.x_max, grid.h / 2.0, grid.bc)
    else:
        fine_grid = GridSpec(grid.x_min, grid.x_max, grid.h / 2.0, grid.bc)
    fine = _fd_lowest_interior(_fd_interior(problem, fine_grid), fine_grid.h, count)
    n = min(len(coarse), len(fine))
    return (4.0 * fine[:n] - coarse[:n]) / 3.0


def _fd_lowest_interior(interior: np.ndarray, h: float, count: int,
                        gfac: float = 2.0) -> np.ndarray:
    n = len(interior)
    count = min(count, n - 1)
    diag = 2.0 / (gfac * h * h) + interior
    off = np.full(n - 1, -1.0 / (gfac * h * h))
    return eigvalsh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))


def _extend_edge(pot, start: float, direction: float, e_top: float,
                 gfac: float, hard_limit: float) -> float:
    """March outward until the WKB action beyond the turning point reaches
    _PAD_ACTION, so truncation leakage stays below tolerance."""
    step = 0.05
    action = 0.0
    xx = start
    while action < _PAD_ACTION:
        xx_next = xx + direction * step
        if abs(xx_next) > hard_limit:
            return direction * hard_limit
        fv = float(_safe_potential(pot, np.array([xx_next]))[0])
        if fv > e_top:
            action += math.sqrt(gfac * (fv - e_top)) * step
        xx = xx_next
        step = min(step * 1.05, 2.0)
    return xx


def auto_grid(problem: ScaledProblem, count: int, h: float = DEFAULT_STEP,
              e_hint: float | None = None) -> GridSpec:
    """Choose a window large enough for `count` states (or all bound states).

    Finite domains are used verbatim with Dirichlet walls.  Open sides get a
    turning-point search plus enough classically forbidden padding that the
    truncation error is far below the energy tolerance.
    """
    dom = problem.domain
    pot = problem.potential
    if dom.is_finite:
        n = max(16, int(math.ceil((dom.hi - dom.lo) / h)))
        return GridSpec(dom.lo, dom.lo + n * h, h, "dirichlet")

    lo_open = not math.isfinite(dom.lo)
    hi_open = not math.isfinite(dom.hi)
    scan_lo = dom.lo if not lo_open else -20.0
    scan_hi = dom.hi if not hi_open else 20.0
    if not lo_open and lo_open != hi_open:
        scan_lo = dom.lo + 1e-9
    xs = np.linspace(scan_lo + 1e-12, scan_hi, 4001)
    fv = _safe_potential(pot, xs)
    x_center = float(xs[int(np.argmin(fv))])
    f_min = float(np.min(fv))

    # iterate: trial window -> coarse FD estimate of the top requested state
    w = 3.0
    e_top_prev = None
    n_below_prev = None
    e_bottom_prev = None
    diving = 0
    e_top = e_hint if e_hint is not None else f_min + 1.0
    for _ in range(28):
        t_lo = x_center - w if lo_open else dom.lo
        t_hi = x_center + w if hi_open else dom.hi
        n_c = int(min(40000, max(2000, (t_hi - t_lo) * 60.0)))
        hc = (t_hi - t_lo) / n_c
        xc = t_lo + hc * np.arange(n_c + 1)
        fc = np.minimum(_safe_potential(pot, np.maximum(xc, dom.lo + 1e-12)), 1e9)
        est = _fd_lowest(fc, hc, count)
        # a ground estimate that dives without limit as the window grows marks
        # a potential unbounded below: no bound-state window exists
        if e_bottom_prev is not None and est[0] < e_bottom_prev - 10.0 * max(1.0, abs(e_bottom_prev)):
            diving += 1
            if diving >= 2:
                raise SolverError("potential is unbounded below; it has no "
                                  "bound-state spectrum to discretize")
        else:
            diving = 0
        e_bottom_prev = float(est[0])
        ceiling = math.inf
        if lo_open:
            ceiling = min(ceiling, fc[0])
        if hi_open:
            ceiling = min(ceiling, fc[-1])
        margin = _CEILING_MARGIN * max(1.0, abs(ceiling)) if math.isfinite(ceiling) else 0.0
        below = [e for e in est if e < ceiling - margin]
        n_below = len(below)
        if n_below:
            e_top = below[-1]
        if n_below >= count:
            break
        # break once the window saturates: count stops growing and the top level
        # drifts by less than the coarse resolution (e_top only sizes the padding)
        stable = (e_top_prev is not None and n_below == n_below_prev and n_below > 0
                  and abs(e_top - e_top_prev) < 1e-4 * max(1.0, abs(e_top)))
        if stable:
            break
        e_top_prev, n_below_prev = e_top, n_below
        w *= 1.7
    hard = min(max(abs(x_center) + w, 10.0) * 8 + 200.0, 2e5)

    edge_lo = dom.lo
    edge_hi = dom.hi
    if lo_open:
        edge_lo = _extend_edge(pot, _turning_point(pot, x_center, -1.0, e_top, dom),
                               -1.0, e_top, 2.0, hard)
    if hi_open:
        edge_hi = _extend_edge(pot, _turning_point(pot, x_center, +1.0, e_top, dom),
                               +1.0, e_top, 2.0, hard)
    if problem.even_parity and lo_open and hi_open:
        edge = max(abs(edge_lo), abs(edge_hi))
        edge_lo, edge_hi = -edge, edge

    n = int(math.ceil((edge_hi - edge_lo) / h))
    if n > _MAX_GRID_POINTS:
        raise SolverError(f"window [{edge_lo:g}, {edge_hi:g}] needs {n} points at h={h}")
    n = max(n, 16)
    bc = "dirichlet"
    if not lo_open and lo_open != hi_open:
        bc = "radial-regular"
        edge_lo = dom.lo + h  # grid starts one step inside the u(0)=0 wall
        n = max(16, int(math.ceil((edge_hi - edge_lo) / h)))
    return GridSpec(edge_lo, edge_lo + n * h, h, bc)


def _turning_point(pot, center: float, direction: float, e_top: float, dom) -> float:
    x = center
    step = 0.05
    limit = 1e6
    while abs(x) < limit:
        x_next = x + direction * step
        if x_next <= dom.lo:
            return dom.lo + 1e-9
        if float(_safe_potential(pot, np.array([x_next]))[0]) > e_top:
            return x_next
        x = x_next
        step *= 1.05
    return x


# ---------------------------------------------------------------------------
# Public solvers
# ---------------------------------------------------------------------------

def bound_states(problem: ScaledProblem, grid: GridSpec | None = None,
                 count: int = 1, h: float = DEFAULT_STEP,
                 method: str = "numerov", compute_residual: bool = True,
                 keep_wavefunctions: bool = False) -> Spectrum:
    """Lowest `count` eigenvalues of -1/2 psi'' + ftilde psi = Etilde psi.

    Returns a Spectrum (list of BoundState ordered by energy, index = node
    count).  When the potential supports fewer bound states than requested the
    list is shorter and its `complete` flag is False.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if problem.bc is BoundaryCondition.SCATTERING:
        raise SolverError("scattering problems have no bound-state spectrum here")

    if problem.even_parity and grid is None:
        return _parity_bound_states(problem, count, h, method,
                                    compute_residual, keep_wavefunctions)

    grid = grid or auto_grid(problem, count, h)
    x = grid.points()
    f = _safe_potential(problem.potential, x)
    if method == "fd":
        vals = _fd_richardson(problem, grid, count)
        states = [BoundState(k, float(e), True) for k, e in enumerate(vals)]
        return Spectrum(states, count)
    if method != "numerov":
        raise ValueError(f"unknown method '{method}'")

    shooter = _Shooter(x, f, grid.h, grid.bc)
    ceiling = _window_ceiling(problem, f)
    lo = float(np.min(f)) - 1e-9 * max(1.0, abs(float(np.min(f))))
    hi = ceiling
    n_avail = shooter.count_nodes(hi)
    if problem.domain.is_finite:
        # hard walls: every state is bound, raise the search ceiling as needed
        while n_avail < count:
            hi = 2.0 * abs(hi) + 10.0
            n_avail = shooter.count_nodes(hi)
    states: list[BoundState] = []
    for k in range(min(count, n_avail)):
        energy, ok = shooter.solve_state(k, lo, hi)
        state = BoundState(k, energy, ok)
        _finish_state(state, shooter, problem, grid, compute_residual,
                      keep_wavefunctions)
        states.append(state)
        lo = energy
    return Spectrum(states, count)


def _window_ceiling(problem: ScaledProblem, f: np.ndarray,
                    lo_is_open: bool | None = None) -> float:
    dom = problem.domain
    if lo_is_open is None:
        lo_is_open = not math.isfinite(dom.lo)
    ceiling = math.inf
    if lo_is_open:
        ceiling = min(ceiling, float(f[0]))
    if not math.isfinite(dom.hi):
        ceiling = min(ceiling, float(f[-1]))
    if not math.isfinite(ceiling):
        ceiling = float(np.max(np.minimum(f, 1e9))) + 10.0
        ceiling += _CEILING_MARGIN * max(1.0, abs(ceiling))
        return ceiling
    return ceiling - _CEILING_MARGIN * max(1.0, abs(ceiling))


def _finish_state(state: BoundState, shooter: _Shooter, problem, grid,
                  compute_residual: bool, keep_wavefunctions: bool) -> None:
    psi = shooter.wavefunction(state.energy)
    state.nodes = count_sign_changes(psi)
    if keep_wavefunctions:
        state.grid = shooter.x
        state.wavefunction = psi
    if compute_residual:
        state.residual = _refine_residual(problem, grid, state)


def _refine_residual(problem: ScaledProblem, grid: GridSpec, state: BoundState) -> float:
    """|Etilde(h) - Etilde(h/2)| by re-solving locally on the halved grid."""
    fine = GridSpec(grid.x_min, grid.x_max, grid.h / 2.0, grid.bc)
    x = fine.points()
    f = _safe_potential(problem.potential, x)
    shooter = _Shooter(x, f, fine.h, fine.bc)
    scale = max(1.0, abs(state.energy))
    for width in (1e-6 * scale, 1e-4 * scale, 1e-2 * scale):
        a, b = state.energy - width, state.energy + width
        if shooter.count_nodes(a) <= state.index < shooter.count_nodes(b):
            e2, _ = shooter.solve_state(state.index, a, b)
            return abs(e2 - state.energy)
    return math.nan


def _parity_bound_states(problem: ScaledProblem, count: int, h: float,
                         method: str, compute_residual: bool,
                         keep_wavefunctions: bool) -> Spectrum:
    """Solve even and odd sequences on the half line and interleave by energy."""
    full = auto_grid(problem, count, h)
    if method == "fd":
        return bound_states(problem, full, count, h, "fd",
                            compute_residual, keep_wavefunctions)
    n_half = max(16, int(math.ceil(full.x_max / h)))
    per_parity = (count + 1) // 2 + 1

    states: list[BoundState] = []
    for parity, bc in ((0, "parity-even"), (1, "parity-odd")):
        half = GridSpec(0.0, n_half * h, h, bc)
        x = half.points()
        f = _safe_potential(problem.potential, x)
        shooter = _Shooter(x, f, h, bc)
        ceiling = _window_ceiling(problem, f, lo_is_open=False)
        lo = float(np.min(f)) - 1e-9 * max(1.0, abs(float(np.min(f))))
        n_avail = shooter.count_nodes(ceiling)
        for k in range(min(per_parity, n_avail)):
            energy, ok = shooter.solve_state(k, lo, ceiling)
            st = BoundState(2 * k + parity, energy, ok)
            psi_half = shooter.wavefunction(energy)
            st.nodes = _full_line_nodes(psi_half, parity)
            if keep_wavefunctions:
                sign = -1.0 if parity else 1.0
                st.grid = np.concatenate([-x[:0:-1], x])
                st.wavefunction = np.concatenate([sign * psi_half[:0:-1], psi_half])
                st.wavefunction /= math.sqrt(np.trapezoid(st.wavefunction ** 2, dx=h))
            if compute_residual:
                st.residual = _parity_residual(problem, half, st, k)
            states.append(st)
            lo = energy
    states.sort(key=lambda s: s.energy)
    states = states[:count]
    for idx, st in enumerate(states):
        if st.index != idx:
            raise SolverError(f"parity interleaving produced index {st.index} "
                              f"at position {idx}")
    return Spectrum(states, count)


def _parity_residual(problem, half: GridSpec, state: BoundState, k: int) -> float:
    fine = GridSpec(half.x_min, half.x_max, half.h / 2.0, half.bc)
    x = fine.points()
    f = _safe_potential(problem.potential, x)
    shooter = _Shooter(x, f, fine.h, fine.bc)
    scale = max(1.0, abs(state.energy))
    for width in (1e-6 * scale, 1e-4 * scale, 1e-2 * scale):
        a, b = state.energy - width, state.energy + width
        if shooter.count_nodes(a) <= k < shooter.count_nodes(b):
            e2, _ = shooter.solve_state(k, a, b)
            return abs(e2 - state.energy)
    return math.nan


def _full_line_nodes(psi_half: np.ndarray, parity: int) -> int:
    half_nodes = count_sign_changes(psi_half)
    return 2 * half_nodes + (1 if parity else 0)


# ---------------------------------------------------------------------------
# Radial hydrogen
# ---------------------------------------------------------------------------

def radial_hydrogen(mtilde: float, l: int = 0, count: int = 1,
                    grid: GridSpec | None = None, h: float = DEFAULT_STEP,
                    compute_residual: bool = False) -> Spectrum:
    """Eigenvalues of -(1/2m) u'' + [l(l+1)/(2m x^2) - 1/x] u = E u, u(0) = 0.

    Coulomb units: expect E_n = -mtilde/(2 n^2) with n = l+1, l+2, ...
    The integration starts on the analytic power series of the regular
    solution, which keeps the origin from polluting the fourth-order accuracy.
    """
    if not 0.0 < mtilde <= 1.0:
        raise ValueError("mtilde must lie in (0, 1]")
    if l < 0 or count < 1:
        raise ValueError("need l >= 0 and count >= 1")

    if grid is None:
        n_top = l + count
        r_max = 2.0 * n_top * n_top / mtilde + _PAD_ACTION * 1.6 * n_top / mtilde + 10.0
        n = int(math.ceil(r_max / h))
        grid = GridSpec(h, h * (n + 1), h, "radial-regular")
    x = grid.points()
    veff = -1.0 / x if l == 0 else l * (l + 1) / (2.0 * mtilde * x * x) - 1.0 / x
    gfac = 2.0 * mtilde

    def series_start(E: float, r: float) -> float:
        return _coulomb_series(r, l, mtilde, E)

    shooter = _Shooter(x, veff, grid.h, "radial-regular", gfac, series_start)
    states: list[BoundState] = []
    lo = -2.0 * mtilde * (1.0 + 1e-9)
    hi = -1e-12
    n_avail = shooter.count_nodes(hi)
    for k in range(min(count, n_avail)):
        energy, ok = shooter.solve_state(k, lo, hi)
        st = BoundState(k, energy, ok)
        psi = shooter.wavefunction(energy)
        st.nodes = count_sign_changes(psi)
        if compute_residual:
            st.residual = _radial_residual(mtilde, l, grid, st, k)
        states.append(st)
        lo = energy
    return Spectrum(states, count)


def _radial_residual(mtilde, l, grid: GridSpec, state: BoundState, k: int) -> float:
    fine = GridSpec(grid.h / 2.0, grid.x_max, grid.h / 2.0, grid.bc)
    result = radial_hydrogen(mtilde, l, k + 1, fine, fine.h)
    if len(result) > k:
        return abs(result[k].energy - state.energy)
    return math.nan


def _coulomb_series(r: float, l: int, mtilde: float, E: float, terms: int = 10) -> float:
    """Power-series value of the regular Coulomb solution u ~ r^(l+1)(1+...)."""
    a_prev2 = 0.0
    a_prev = 1.0
    total = r ** (l + 1)
    rk = r ** (l + 1)
    for k in range(l + 2, l + 1 + terms):
        a_k = (-2.0 * mtilde * a_prev - 2.0 * mtilde * E * a_prev2) / (k * (k - 1) - l * (l + 1))
        rk *= r
        total += a_k * rk
        a_prev2, a_prev = a_prev, a_k
    return total


# ---------------------------------------------------------------------------
# Closed-form references and the energy map
# ---------------------------------------------------------------------------

def exact_reference(family: Family, couplings: dict[str, float], n: int) -> float:
    """Closed-form Etilde for the exactly solvable families.

    Box counts n = 1, 2, ...; harmonic and Morse count n = 0, 1, ...
    Morse levels exist only while dE/dn > 0, i.e. n < sqrt(2 lambda) - 1/2.
    """
    if family is Family.BOX:
        if n < 1:
            raise ValueError("box states are numbered n = 1, 2, ...")
        return n * n * math.pi * math.pi / 2.0
    if family is Family.HARMONIC:
        if n < 0:
            raise ValueError("harmonic states are numbered n = 0, 1, ...")
        return n + 0.5
    if family is Family.MORSE:
        lam = couplings["lambda"]
        cutoff = math.sqrt(2.0 * lam) - 0.5
        if n < 0:
            raise ValueError("Morse states are numbered n = 0, 1, ...")
        if n >= cutoff:
            raise ValueError(f"no such bound state: Morse with lambda={lam:g} "
                             f"holds only n < {cutoff:g}")
        v = n + 0.5
        return math.sqrt(2.0 * lam) * v - 0.5 * v * v
    raise ValueError(f"no closed-form reference for family {family.value}")


def morse_state_count(lam: float) -> int:
    """Number of Morse bound states: n = 0 .. ceil(sqrt(2 lambda) - 1/2) - 1."""
    cutoff = math.sqrt(2.0 * lam) - 0.5
    return max(0, math.ceil(cutoff - 1e-12))


def to_physical(etilde: float, problem: ScaledProblem) -> Quantity:
    """E = eps_E * Etilde in SI."""
    return problem.to_physical(etilde)
