"""Command-line interface: ``dampedq <subcommand> [options]``.

Physical inputs are dimensionless: ``--gamma`` is gamma/omega and times are
given as omega*t.  ``--m``, ``--omega`` and ``--hbar`` default to 1.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 domain error (singular time, non-integrable symbol).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

import numpy as np

from .dissipation_lab import GammaSchedule, expected_energy, pipeline, schedule_trace
from .eigensystem import MAX_LEVEL, Picture, eigenstate, energy_level
from .errors import DampedQError, DegreeOverflow, NonIntegrable, SingularTime, SingularWidth
from .phase_poly import PhysParams, length_scales
from .star_engine import damped, star_exp_closed, star_exp_series
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    """Bad flag combination or value detected after argument parsing."""


def _fmt(x: float) -> str:
    return repr(float(x))


def _float_list(text: str) -> list[float]:
    """``"a,b,c"`` or ``"start:stop:count"`` (inclusive, evenly spaced)."""
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            n = int(count)
            if n < 1:
                raise ValueError
            return [float(v) for v in np.linspace(float(start), float(stop), n)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b,c or start:stop:count, got {text!r}")


def _segment(text: str) -> tuple[float, float]:
    try:
        g, d = text.split(":")
        return float(g), float(d)
    except ValueError:
        raise argparse.ArgumentTypeError(f"segment must be GAMMA_OVER_OMEGA:OMEGA_DURATION, got {text!r}")


# -- parser --------------------------------------------------------------------

def _add_physics(p: argparse.ArgumentParser, gamma_list: bool = False):
    p.add_argument("--m", type=float, default=1.0, help="mass (default 1)")
    p.add_argument("--omega", type=float, default=1.0, help="angular frequency (default 1)")
    p.add_argument("--hbar", type=float, default=1.0, help="reduced Planck constant (default 1)")
    if gamma_list:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--gamma", type=float, help="damping ratio gamma/omega (default 0)")
        g.add_argument("--gamma-list", type=_float_list, help="several gamma/omega values")
    else:
        p.add_argument("--gamma", type=float, default=0.0, help="damping ratio gamma/omega (default 0)")


def _add_output(p: argparse.ArgumentParser, default: str = "csv"):
    p.add_argument("--format", choices=("csv", "json"), default=default)
    p.add_argument("--output", "-o", help="write to this file instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dampedq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    _add_physics(p)
    p.add_argument("--output", "-o", help="write the report to this file")

    p = sub.add_parser("spectrum", help="complex energy levels in units of hbar*omega")
    _add_physics(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--n-max", type=int, default=None)
    g.add_argument("--n", type=int, default=None)
    _add_output(p, "json")

    p = sub.add_parser("states", help="sample an eigenstate on a square grid")
    _add_physics(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--picture", choices=("schrodinger", "heisenberg"), default="schrodinger")
    p.add_argument("--grid", type=int, default=5, help="points per axis")
    p.add_argument("--extent", type=float, default=2.0, help="half-width in oscillator units")
    _add_output(p)

    p = sub.add_parser("starexp", help="truncated series against closed star-exponential")
    _add_physics(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--t", type=float, help="omega * t")
    g.add_argument("--t-grid", type=_float_list, help="several omega * t values")
    p.add_argument("--terms", type=int, default=40)
    p.add_argument("--grid", type=int, default=5)
    p.add_argument("--extent", type=float, default=1.0)
    _add_output(p)

    p = sub.add_parser("transition", help="inject/evolve/eject transition table")
    _add_physics(p, gamma_list=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--n-max", type=int)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--tau", type=float, help="omega * tau")
    g.add_argument("--tau-grid", type=_float_list, help="several omega * tau values")
    p.add_argument("--convention", choices=("unit", "l2"), default="unit")
    _add_output(p)

    p = sub.add_parser("schedule", help="piecewise-constant damping schedule")
    _add_physics(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--segment", type=_segment, action="append", required=True,
                   metavar="G:D", help="gamma/omega and omega*duration; repeat in order")
    p.add_argument("--convention", choices=("unit", "l2"), default="unit")
    _add_output(p)
    return parser


# -- helpers -------------------------------------------------------------------

def _params(args, ratio: float | None = None) -> PhysParams:
    ratio = getattr(args, "gamma", None) if ratio is None else ratio
    ratio = 0.0 if ratio is None else ratio
    try:
        return PhysParams(m=args.m, omega=args.omega, hbar=args.hbar, gamma=ratio * args.omega)
    except ValueError as exc:
        raise UsageError(str(exc))


def _check_level(n: int, flag: str):
    if n < 0 or n > MAX_LEVEL:
        raise UsageError(f"{flag} must be in 0..{MAX_LEVEL}, got {n}")


def _emit(args, header: Sequence[str], rows: list[list]) -> str:
    if args.format == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _grid(params: PhysParams, n: int, extent: float):
    if n < 1:
        raise UsageError("--grid must be positive")
    lq, lp = length_scales(params)
    x = np.linspace(-extent, extent, n) if n > 1 else np.zeros(1)
    return [(float(a * lq), float(b * lp)) for a in x for b in x]


# -- commands ------------------------------------------------------------------

def cmd_verify(args) -> tuple[int, str]:
    params = _params(args)
    checks = run_suite(args.suite, params)
    lines = [c.line() for c in checks]
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    return (EXIT_VERIFY if failed else EXIT_OK), "\n".join(lines) + "\n"


def cmd_spectrum(args) -> tuple[int, str]:
    params = _params(args)
    if args.n is not None:
        levels = [args.n]
    else:
        levels = list(range((5 if args.n_max is None else args.n_max) + 1))
    for n in levels:
        _check_level(n, "--n-max")
    kind = damped(params)
    unit = params.hbar * params.omega
    rows = []
    for n in levels:
        E = energy_level(kind, n) / unit
        rows.append([n, float(E.real), float(E.imag), "hbar_omega"])
    return EXIT_OK, _emit(args, ["n", "re", "im", "units"], rows)


def cmd_states(args) -> tuple[int, str]:
    params = _params(args)
    _check_level(args.n, "--n")
    state = eigenstate(damped(params), args.n, Picture(args.picture))
    rows = []
    for q, p in _grid(params, args.grid, args.extent):
        v = state(q, p)
        rows.append([q, p, float(v.real), float(v.imag)])
    return EXIT_OK, _emit(args, ["q", "p", "re", "im"], rows)


def cmd_starexp(args) -> tuple[int, str]:
    params = _params(args)
    if args.terms < 0:
        raise UsageError("--terms must be non-negative")
    times = args.t_grid if args.t_grid is not None else [0.1 if args.t is None else args.t]
    kind = damped(params)
    pts = _grid(params, args.grid, args.extent)
    q = np.array([a for a, _ in pts])
    p = np.array([b for _, b in pts])
    rows = []
    for wt in times:
        t = wt / params.omega
        try:
            closed = star_exp_closed(kind, t)(q, p)
        except SingularTime as exc:
            raise SingularTime(f"{exc} (omega_t={wt})")
        series = star_exp_series(kind, t, args.terms)(q, p)
        for i in range(len(pts)):
            s, c = complex(series[i]), complex(closed[i])
            rows.append([float(wt), float(q[i]), float(p[i]), s.real, s.imag, c.real, c.imag, abs(s - c)])
    header = ["t", "q", "p", "re_series", "im_series", "re_closed", "im_closed", "abs_err"]
    return EXIT_OK, _emit(args, header, rows)


def cmd_transition(args) -> tuple[int, str]:
    levels = [args.n] if args.n is not None else list(range(args.n_max + 1))
    for n in levels:
        _check_level(n, "--n" if args.n is not None else "--n-max")
    ratios = args.gamma_list if args.gamma_list is not None else [args.gamma or 0.0]
    taus = args.tau_grid if args.tau_grid is not None else [args.tau]
    rows = []
    for n in levels:
        for ratio in ratios:
            params = _params(args, ratio)
            for wt in taus:
                sv, norm = pipeline(n, params.gamma, wt / params.omega, params, args.convention)
                probs = sv.probabilities(args.convention)
                energy = expected_energy(sv, params, args.convention) / (params.hbar * params.omega)
                for k in range(n // 2 + 1):
                    rows.append([n, float(ratio), float(wt), k, n - 2 * k, probs[n - 2 * k], energy, norm])
    header = ["n", "gamma_over_omega", "omega_tau", "k", "level", "prob",
              "expected_energy_over_hbar_omega", "norm_N"]
    return EXIT_OK, _emit(args, header, rows)


def cmd_schedule(args) -> tuple[int, str]:
    params = _params(args)
    _check_level(args.n, "--n")
    try:
        schedule = GammaSchedule(tuple((g * params.omega, d / params.omega) for g, d in args.segment))
    except ValueError as exc:
        raise UsageError(str(exc))
    trace = schedule_trace(args.n, schedule, params, args.convention)
    rows = []
    for i, ((ratio, wd), sv) in enumerate(zip(args.segment, trace)):
        probs = sv.probabilities(args.convention)
        for k in range(args.n // 2 + 1):
            rows.append([i, float(ratio), float(wd), k, args.n - 2 * k, probs.get(args.n - 2 * k, 0.0)])
    header = ["segment_index", "gamma_over_omega", "omega_duration", "k", "level", "prob"]
    return EXIT_OK, _emit(args, header, rows)


COMMANDS = {
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "states": cmd_states,
    "starexp": cmd_starexp,
    "transition": cmd_transition,
    "schedule": cmd_schedule,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    try:
        code, text = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"dampedq {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegreeOverflow as exc:
        print(f"dampedq {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularTime, SingularWidth, NonIntegrable) as exc:
        print(f"dampedq {args.command}: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except DampedQError as exc:
        print(f"dampedq {args.command}: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
