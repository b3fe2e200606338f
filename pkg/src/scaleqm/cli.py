"""scaleqm command line: nondimensionalize, solve, scatter, expand, sweep, lint.

Exit codes: 0 success, 1 usage/config error, 2 numeric non-convergence or a
truncated spectrum, 3 lint diagnostics found.  Diagnostics go to stderr,
results to stdout or --out.  SCALEQM_CONSTANTS overrides the constants file.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import catalog as cat
from . import expr as ex
from . import dimlint
from . import nondim as nd
from . import perturbation as pt
from . import scattering as sc
from . import solver1d as s1
from .dimensions import ConstantRegistry, LENGTH, Quantity

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_LINT = 3

CSV_HEADER = ["family", "coupling_name", "coupling_value", "n",
              "E_tilde", "E_SI", "residual"]

_UNITS_EPILOG = """\
units of config keys (all SI):
  param.<name>   value in SI units of its dim=... declaration
  mass           kg (dim=M1 implied)
  domain         metres; inf/-inf allowed
  assume.<id>    '<expr> == <number>'; the expression is dimension-checked
rule names: A | given-length[:param]   (length unit from a parameter)
            B | depth                  (L = hbar/sqrt(m V0))
            harmonic | quartic         (oscillator balances)
            explicit:<metres>          (numeric length unit)
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); keep 2 for numerics
        raise UsageError(message)


def _parse_rule(text: str | None):
    if text is None:
        return None
    low = text.strip().lower()
    if low in ("a", "given-length"):
        return nd.GivenLength("a")
    if low.startswith("given-length:"):
        return nd.GivenLength(text.split(":", 1)[1])
    if low in ("b", "depth"):
        return nd.DepthBased()
    if low == "harmonic":
        return nd.HarmonicBalance()
    if low == "quartic":
        return nd.QuarticBased()
    if low.startswith("explicit:"):
        return nd.Explicit(Quantity(float(text.split(":", 1)[1]), LENGTH))
    raise UsageError(f"unknown scaling rule '{text}'")


def _load_problem(path: str, rule_text: str | None, registry):
    cfg = cat.load_config(path)
    spec, mass = cat.build_spec(cfg)
    rule = _parse_rule(rule_text)
    problem = nd.nondimensionalize(spec, mass, rule, registry)
    return cfg, spec, mass, problem


def _write_out(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def _primary_coupling(problem: nd.ScaledProblem) -> tuple[str, float | None]:
    if not problem.couplings:
        return "", None
    name = sorted(problem.couplings)[0]
    return name, problem.couplings[name]


def _states_csv(problem: nd.ScaledProblem, states) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    name, value = _primary_coupling(problem)
    for st in states:
        writer.writerow([problem.family.value, name, _fmt(value), st.index,
                         _fmt(st.energy),
                         _fmt(problem.to_physical(st.energy).magnitude),
                         _fmt(st.residual)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_nondim(args, registry) -> int:
    _, _, _, problem = _load_problem(args.config, args.rule, registry)
    _write_out(nd.render_report(problem), args.out)
    return EXIT_OK


def _cmd_units(args, registry) -> int:
    _, _, _, problem = _load_problem(args.config, args.rule, registry)
    lines = [
        f"L_SI = {problem.length_unit.magnitude!r}",
        f"eps_E_SI = {problem.energy_unit.magnitude!r}",
        f"omega_SI = {problem.time_unit.magnitude!r}",
    ]
    _write_out("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_solve(args, registry) -> int:
    _, _, _, problem = _load_problem(args.config, args.rule, registry)
    states = s1.bound_states(problem, count=args.count, h=args.h,
                             compute_residual=not args.no_residual)
    _write_out(_states_csv(problem, states), args.out)
    if not states.complete:
        print(f"warning: only {len(states)} of {args.count} requested states "
              "are bound in the window", file=sys.stderr)
        return EXIT_NUMERIC
    if any(not st.converged for st in states):
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_scatter(args, registry) -> int:
    if args.config:
        # depth-based scaling by default so --etilde means E/V0 here too
        rule = args.rule if args.rule is not None else "depth"
        _, _, _, problem = _load_problem(args.config, rule, registry)
        lam = problem.couplings.get("lambda")
    else:
        if args.lam is None:
            raise UsageError("scatter needs --lambda (or a barrier config)")
        lam = args.lam
        problem = None
    energies = [args.etilde]
    if args.etilde_to is not None:
        n = max(2, args.steps)
        step = (args.etilde_to - args.etilde) / (n - 1)
        energies = [args.etilde + i * step for i in range(n)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["E_tilde", "lambda", "T", "R"])
    for e_tilde in energies:
        if args.method == "closed":
            if lam is None:
                raise UsageError("closed-form scatter needs a lambda coupling")
            r = sc.transmission_closed(e_tilde, lam)
        else:
            prob = problem if problem is not None else _dimensionless_barrier(lam)
            r = sc.transmission_numeric(prob, e_tilde, h=args.h)
        writer.writerow([_fmt(e_tilde), _fmt(lam), _fmt(r.T), _fmt(r.R)])
    _write_out(buf.getvalue(), args.out)
    return EXIT_OK


def _dimensionless_barrier(lam: float) -> nd.ScaledProblem:
    """Depth-scaled barrier: height 1, width sqrt(lambda); energies in V0 units."""
    from .catalog import BoundaryCondition, Family, FULL_LINE
    from .dimensions import Dimension

    return nd.ScaledProblem(
        ftilde=ex.parse("piecewise([-inf, 0] -> 0, [0, lambda^(1/2)] -> 1, "
                        "[lambda^(1/2), inf] -> 0)"),
        couplings={"lambda": float(lam)},
        length_unit=Quantity(1.0, LENGTH),
        energy_unit=Quantity(1.0, Dimension(mass=1, length=2, time=-2)),
        time_unit=Quantity(1.0, Dimension(time=-1)),
        domain=FULL_LINE,
        bc=BoundaryCondition.SCATTERING,
        family=Family.RECT_BARRIER,
        rule=nd.DepthBased(),
    )


def _parse_poly(text: str) -> dict[int, Fraction]:
    poly: dict[int, Fraction] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise UsageError(f"perturbation terms are 'degree:coeff', got '{part}'")
        deg, coeff = part.split(":", 1)
        poly[int(deg)] = Fraction(coeff.strip())
    if not poly:
        raise UsageError("empty perturbation polynomial")
    return poly


def _cmd_pt(args, registry) -> int:
    poly = _parse_poly(args.perturbation)
    if args.method == "hypervirial":
        if set(poly) != {4} or poly[4] != 1:
            raise UsageError("the hypervirial route is specific to x^4")
        series = pt.hypervirial_series(args.n, args.order)
    else:
        series = pt.rs_series(args.n, args.order, poly)
    out = [pt.emit_series_report(series)]
    if args.lam is not None:
        sums = pt.weak_coupling_eval(series, args.lam)
        out.append("j,partial_sum\n")
        out.extend(f"{j},{_fmt(s)}\n" for j, s in enumerate(sums))
    _write_out("".join(out), args.out)
    return EXIT_OK


def _cmd_lint(args, registry) -> int:
    cfg = cat.load_config(args.config)
    diagnostics = cat.lint_config(cfg, registry)
    for d in diagnostics:
        print(f"lint: {d}", file=sys.stderr)
    if diagnostics:
        return EXIT_LINT
    print("lint: clean", file=sys.stderr)
    return EXIT_OK


def _sweep_values(args) -> list[float]:
    if args.steps < 1:
        raise UsageError("sweep needs at least one step")
    if args.steps == 1:
        return [args.start]
    step = (args.stop - args.start) / (args.steps - 1)
    values = [args.start + i * step for i in range(args.steps)]
    if not all(math.isfinite(v) for v in values):
        raise UsageError("sweep range must be finite")
    return values


def _respec_with_coupling(cfg: cat.RawConfig, family: cat.Family,
                          mass: Quantity, value: float, registry) -> cat.PotentialSpec:
    """Rebuild the dimensional spec so its primary coupling equals `value`.

    The depth-like parameter absorbs the coupling; every other parameter stays
    at its config value, i.e. the one-coupling-many-experiments equivalence
    read backwards.
    """
    hbar = registry["hbar"]
    spec, _ = cat.build_spec(cfg)
    params = dict(spec.params)
    if family in (cat.Family.SCALED_FORM, cat.Family.RECT_BARRIER, cat.Family.AHMED_BIC):
        a = params["a"]
        params["V0"] = Quantity(value * (hbar * hbar / (mass * a * a)).magnitude,
                                params["V0"].dim)
    elif family is cat.Family.MORSE:
        a = params["a"]
        params["D"] = Quantity(value * (hbar * hbar * a * a / mass).magnitude,
                               params["D"].dim)
    elif family is cat.Family.TRUNC_INV_SQUARE:
        params["alpha"] = Quantity(value * value * (hbar * hbar / (2.0 * mass)).magnitude,
                                   params["alpha"].dim)
    elif family is cat.Family.POLY_ANHARMONIC:
        k2 = params["k2"]
        params["k4"] = Quantity(value * ((mass * k2 ** 3) ** Fraction(1, 2) / hbar).magnitude,
                                params["k4"].dim)
    else:
        raise UsageError(f"family {family.value} has no sweepable coupling")
    return _rebuild_spec(cfg, params)


def _respec_with_param(cfg: cat.RawConfig, name: str, value: float) -> cat.PotentialSpec:
    spec, _ = cat.build_spec(cfg)
    if name not in spec.params:
        raise UsageError(f"config has no parameter '{name}'")
    params = dict(spec.params)
    params[name] = Quantity(value, params[name].dim)
    return _rebuild_spec(cfg, params)


def _rebuild_spec(cfg: cat.RawConfig, params: dict[str, Quantity]) -> cat.PotentialSpec:
    family = cat.Family(cfg.family)
    if family is cat.Family.SCALED_FORM:
        return cat.scaled_form(cfg.shape, params["V0"], params["a"])
    if family is cat.Family.CUSTOM:
        raise UsageError("custom potentials cannot be swept")
    return cat.CONSTRUCTORS[family](params)


def _cmd_sweep(args, registry) -> int:
    cfg = cat.load_config(args.config)
    spec, mass = cat.build_spec(cfg)
    family = spec.family
    rule = _parse_rule(args.rule)
    values = _sweep_values(args)

    def solve_row(idx_value):
        idx, value = idx_value
        if args.physical:
            row_spec = _respec_with_param(cfg, args.physical, value)
        else:
            row_spec = _respec_with_coupling(cfg, family, mass, value, registry)
        problem = nd.nondimensionalize(row_spec, mass, rule, registry)
        states = s1.bound_states(problem, count=args.count, h=args.h,
                                 compute_residual=not args.no_residual)
        name, coupling = _primary_coupling(problem)
        rows = []
        for st in states:
            rows.append([problem.family.value, name, _fmt(coupling), st.index,
                         _fmt(st.energy),
                         _fmt(problem.to_physical(st.energy).magnitude),
                         _fmt(st.residual)])
        return idx, rows, states.complete

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    tasks = list(enumerate(values))
    incomplete = False
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(solve_row, tasks))
    else:
        results = [solve_row(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    for _, rows, complete in results:
        incomplete = incomplete or not complete
        for row in rows:
            writer.writerow(row)
    _write_out(buf.getvalue(), args.out)
    return EXIT_NUMERIC if incomplete else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="scaleqm",
                     description="units-aware nondimensionalization and "
                                 "dimensionless quantum solvers",
                     epilog=_UNITS_EPILOG,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("config", help="problem config file (SI units throughout)")
        p.add_argument("--rule", help="scaling rule (see main --help for names)")
        p.add_argument("--out", help="write results to this file instead of stdout")

    p = sub.add_parser("nondim", help="emit the scaled-problem report",
                       epilog=_UNITS_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.set_defaults(func=_cmd_nondim)

    p = sub.add_parser("units", help="print L, eps_E, omega in SI",
                       epilog=_UNITS_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.set_defaults(func=_cmd_units)

    p = sub.add_parser("solve", help="bound states as CSV",
                       epilog=_UNITS_EPILOG + "--h is the dimensionless grid step.",
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.add_argument("--count", type=int, default=1, help="number of states (dimensionless)")
    p.add_argument("--h", type=float, default=s1.DEFAULT_STEP,
                   help="grid step in scaled coordinates (dimensionless)")
    p.add_argument("--no-residual", action="store_true",
                   help="skip the h/2 refinement residual column")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("scatter", help="barrier transmission as CSV",
                       epilog="--etilde is E/V0 (dimensionless), --lambda is "
                              "m a^2 V0/hbar^2 (dimensionless).",
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("config", nargs="?", help="optional barrier config (SI units)")
    p.add_argument("--rule", help="scaling rule for the config path")
    p.add_argument("--out")
    p.add_argument("--lambda", dest="lam", type=float,
                   help="dimensionless barrier strength")
    p.add_argument("--etilde", type=float, required=True,
                   help="dimensionless energy E/V0")
    p.add_argument("--etilde-to", type=float, help="sweep upper end (dimensionless)")
    p.add_argument("--steps", type=int, default=50, help="sweep point count")
    p.add_argument("--method", choices=("closed", "numeric"), default="closed")
    p.add_argument("--h", type=float, default=1e-3,
                   help="transfer-matrix slice width (dimensionless)")
    p.set_defaults(func=_cmd_scatter)

    p = sub.add_parser("pt", help="perturbation series report",
                       epilog="perturbation terms 'degree:coeff' with exact "
                              "rational coeff, e.g. 4:1 or 3:1/2,4:1; "
                              "--lambda (dimensionless) adds partial sums.",
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--n", type=int, default=0, help="oscillator state index")
    p.add_argument("--order", type=int, default=8, help="series order J <= 12")
    p.add_argument("--perturbation", default="4:1",
                   help="polynomial terms degree:coeff[,degree:coeff...]")
    p.add_argument("--method", choices=("rs", "hypervirial"), default="rs")
    p.add_argument("--lambda", dest="lam", type=float,
                   help="evaluate partial sums at this coupling")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_pt)

    p = sub.add_parser("sweep", help="solve across a coupling or SI parameter range",
                       epilog=_UNITS_EPILOG + "default sweeps the dimensionless "
                              "coupling; --physical <param> sweeps that SI "
                              "parameter and reports the induced coupling.",
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.add_argument("--from", dest="start", type=float, required=True,
                   help="sweep start (dimensionless, or SI with --physical)")
    p.add_argument("--to", dest="stop", type=float, required=True,
                   help="sweep end (same units as --from)")
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--h", type=float, default=s1.DEFAULT_STEP)
    p.add_argument("--physical", help="SI parameter name to sweep instead")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-residual", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("lint", help="dimension-check a config",
                       epilog=_UNITS_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("config")
    p.set_defaults(func=_cmd_lint)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        registry = ConstantRegistry.load()
    except (OSError, ValueError) as exc:
        print(f"constants: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, registry)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (s1.SolverError, sc.ScatteringError) as exc:
        print(f"numeric: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (dimlint.UnknownSymbolError, ex.ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
