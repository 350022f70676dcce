"""Command-line entry point: ``qedentropy {simulate,sweep,validate-basis,check-invariants}``.

Exit codes: 0 success, 1 invariant violation, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from typing import Iterator, Optional, Sequence, TextIO

import numpy as np

from . import basis
from .config import ConfigError, load_params, parse_quantity
from .entropy import Bipartition, preset_partitions, reduced_density, von_neumann_entropy
from .evolve import DEFAULT_DT, NormDriftError, paper_space, propagator, run
from .harness import (
    INEQUALITY_SLACK, PEAK_MAPS, QUIET_EPS, ParamAxis, check_inequalities, envelope_period,
    peak_entropy, peak_map_setup, simulate, steps_for, sweep2d, write_sweep_csv, write_trace_csv,
)
from .model import ModelParams, build_hamiltonian, validate_rwa
from .numerics import expm_oracle, hermitian_defect, unitarity_defect

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG = 0, 1, 2


@contextmanager
def _output(path: Optional[str]) -> Iterator[TextIO]:
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def parse_keep(text: str) -> Bipartition:
    try:
        keep = tuple(int(q) for q in text.split(",") if q.strip())
        return Bipartition(keep)
    except ValueError as exc:
        raise ConfigError(f"bad keep set {text!r}: {exc}") from None


def parse_values(text: str) -> tuple[float, ...]:
    """``start:stop:num`` (inclusive linspace) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be start:stop:num, got {text!r}")
        start, stop = parse_quantity(parts[0]), parse_quantity(parts[1])
        try:
            num = int(parts[2])
        except ValueError:
            raise ConfigError(f"bad point count in {text!r}") from None
        if num < 1:
            raise ConfigError("range needs at least one point")
        return tuple(float(v) for v in np.linspace(start, stop, num))
    return tuple(parse_quantity(v) for v in text.split(",") if v.strip())


def _params(args) -> ModelParams:
    return load_params(args.config, args.param or ())


def cmd_simulate(args) -> int:
    params = _params(args)
    steps = args.steps if args.steps is not None else steps_for(args.horizon, args.dt)
    parts = preset_partitions()
    for text in args.keep or ():
        part = parse_keep(text)
        parts[part.label] = part
    try:
        trace = simulate(params, args.dt, steps, args.sample_every, parts)
    except NormDriftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    with _output(args.output) as out:
        write_trace_csv(trace, out)
    if args.summary:
        for name in trace.values:
            try:
                period = f"{envelope_period(trace, name, args.quiet_eps):.6e} s"
            except ValueError as exc:
                period = f"n/a ({exc})"
            print(f"{name}: peak {peak_entropy(trace, name):.6f}, envelope period {period}",
                  file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = _params(args)
    if args.map:
        x, y, fixed = peak_map_setup(args.map, args.points, base)
    else:
        if not (args.x and args.y and args.x_values and args.y_values):
            raise ConfigError("sweep needs --map or all of --x/--x-values/--y/--y-values")
        try:
            x = ParamAxis.of(args.x, parse_values(args.x_values))
            y = ParamAxis.of(args.y, parse_values(args.y_values))
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        fixed = base
    grid = sweep2d(x, y, fixed, args.preset, args.horizon, args.dt, args.workers)
    with _output(args.output) as out:
        write_sweep_csv(grid, out)
    return EXIT_OK


def cmd_validate_basis(args) -> int:
    space = paper_space()
    for i, state in enumerate(space.states):
        print(i, *state)
    if set(space.states) != set(basis.REFERENCE_BASIS):
        missing = set(basis.REFERENCE_BASIS) - set(space.states)
        extra = set(space.states) - set(basis.REFERENCE_BASIS)
        print(f"mismatch with reference table: missing {sorted(missing)}, extra {sorted(extra)}",
              file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def invariant_suite(
    params: ModelParams, dt: float, steps: int, slack: float
) -> list[tuple[str, bool, str]]:
    """Structural and dynamical checks at one parameter point."""
    results = []

    def record(name: str, ok: bool, detail: str) -> None:
        results.append((name, bool(ok), detail))

    space = paper_space()
    record("basis", set(space.states) == set(basis.REFERENCE_BASIS), f"{len(space)} states")
    h = build_hamiltonian(params, space)
    record("hermitian", hermitian_defect(h) == 0.0, f"defect {hermitian_defect(h):.1e}")
    rwa = validate_rwa(params)
    record("rwa", rwa.ok, f"photon {rwa.ratio_photon:.3g}, phonon {rwa.ratio_phonon:.3g}")
    u = propagator(h, dt, params.hbar)
    defect = unitarity_defect(u)
    record("unitarity", defect <= 1e-11, f"{defect:.2e}")
    gap = float(np.linalg.norm(u - expm_oracle(h, -1j * dt / params.hbar)))
    record("ptsim-vs-oracle", gap <= 1e-10, f"{gap:.2e}")

    traj = run(params, space, dt=dt, n_steps=steps)
    norm, energy = traj.observables()
    nd = float(np.max(np.abs(norm - 1.0)))
    ed = float(np.max(np.abs(energy - energy[0])) / abs(energy[0])) if energy[0] else 0.0
    record("norm", nd <= 1e-9, f"max drift {nd:.2e}")
    record("energy", ed <= 1e-8, f"max relative drift {ed:.2e}")

    parts = preset_partitions()
    initial = {n: von_neumann_entropy(reduced_density(traj.states[0], space, p))
               for n, p in parts.items()}
    worst0 = max(initial.values())
    record("initial-separable", worst0 <= 1e-12, f"max S(0) {worst0:.1e}")

    probe = traj.states[:: max(1, len(traj) // 200)]
    comp = 0.0
    for part in parts.values():
        s = von_neumann_entropy(reduced_density(probe, space, part))
        sc = von_neumann_entropy(reduced_density(probe, space, part.complement()))
        comp = max(comp, float(np.max(np.abs(s - sc))))
    record("complement", comp <= 1e-9, f"max |S(K)-S(~K)| {comp:.1e}")

    trace = simulate(params, dt, steps, observables=False)
    report = check_inequalities(trace, slack)
    for name, count in report.counts.items():
        record(f"ineq {name}", count == 0,
               f"{count} violations, worst margin {report.worst[name]:.2e}")
    return results


def cmd_check_invariants(args) -> int:
    params = _params(args)
    steps = args.steps if args.steps is not None else steps_for(args.horizon, args.dt)
    results = invariant_suite(params, args.dt, steps, args.slack)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_INVARIANT


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value parameter file")
    p.add_argument("-p", "--param", action="append", metavar="KEY=VALUE",
                   help="override one parameter (repeatable); values like 0.1g are "
                        "multiples of g=1e7; g_Omega sets both photon couplings")
    p.add_argument("--dt", type=float, default=DEFAULT_DT, help="time step in seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qedentropy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one entropy trace as CSV")
    _add_model_args(p)
    p.add_argument("--steps", type=int, help="number of steps (overrides --horizon)")
    p.add_argument("--horizon", type=float, default=1e-5, help="simulated time in seconds")
    p.add_argument("--sample-every", type=int, default=1)
    p.add_argument("--keep", action="append", metavar="Q,Q,...",
                   help="extra entropy column for these qubit indices (0=p1 ... 6=k)")
    p.add_argument("--summary", action="store_true",
                   help="print peak and envelope period per column to stderr")
    p.add_argument("--quiet-eps", type=float, default=QUIET_EPS,
                   help="entropy level a quiet zone must dip below (bits)")
    p.add_argument("-o", "--output", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="peak-entropy map over two parameters as CSV")
    _add_model_args(p)
    p.add_argument("--map", choices=list(PEAK_MAPS),
                   help="use the default grid of a named peak map")
    p.add_argument("--points", type=int, default=21, help="grid points per axis with --map")
    p.add_argument("--x")
    p.add_argument("--x-values", help="start:stop:num or comma list")
    p.add_argument("--y")
    p.add_argument("--y-values", help="start:stop:num or comma list")
    p.add_argument("--preset", default="S_Omega", choices=list(preset_partitions()))
    p.add_argument("--horizon", type=float, default=2e-5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate-basis", help="print the reachable basis and compare to the reference")
    p.set_defaults(func=cmd_validate_basis)

    p = sub.add_parser("check-invariants", help="run the invariant checks at one parameter point")
    _add_model_args(p)
    p.add_argument("--steps", type=int)
    p.add_argument("--horizon", type=float, default=1e-5)
    p.add_argument("--slack", type=float, default=INEQUALITY_SLACK)
    p.set_defaults(func=cmd_check_invariants)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
