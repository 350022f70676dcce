"""Entropy traces, envelope analysis, 2-D parameter sweeps and CSV output."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Optional, TextIO

import numpy as np

from .entropy import Bipartition, entropies, preset_partitions
from .evolve import DEFAULT_DT, paper_space, run
from .model import G_DEFAULT, PARAM_KEYS, ModelParams

TRACE_HEADER = ("t", "norm", "energy")
DEFAULT_HORIZON = 1e-5
SWEEP_HORIZON = 2e-5
QUIET_EPS = 0.02
ENVELOPE_LEVEL = 0.25  # fraction of the envelope maximum
INEQUALITY_SLACK = 1e-9
FLOAT_FMT = "{:.16e}"  # 17 significant digits round-trip a double


@dataclass
class EntropyTrace:
    times: np.ndarray
    values: dict[str, np.ndarray]
    norm: Optional[np.ndarray] = None
    energy: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.values = {k: np.asarray(v, dtype=float) for k, v in self.values.items()}
        for name, series in self.values.items():
            if series.shape != self.times.shape:
                raise ValueError(f"series {name} has {series.size} samples, times {self.times.size}")

    def __len__(self) -> int:
        return len(self.times)

    def series(self, preset: str) -> np.ndarray:
        try:
            return self.values[preset]
        except KeyError:
            raise KeyError(
                f"unknown preset {preset!r}; trace holds {', '.join(self.values)}"
            ) from None

    def subsample(self, factor: int) -> "EntropyTrace":
        sl = slice(None, None, factor)
        return EntropyTrace(
            self.times[sl],
            {k: v[sl] for k, v in self.values.items()},
            None if self.norm is None else self.norm[sl],
            None if self.energy is None else self.energy[sl],
        )


def simulate(
    params: ModelParams,
    dt: float = DEFAULT_DT,
    n_steps: int = int(round(DEFAULT_HORIZON / DEFAULT_DT)),
    sample_every: int = 1,
    parts: Optional[dict[str, Bipartition]] = None,
    observables: bool = True,
) -> EntropyTrace:
    """Propagate the reference initial state and collect entropy series."""
    parts = preset_partitions() if parts is None else parts
    traj = run(params, paper_space(), dt=dt, n_steps=n_steps, sample_every=sample_every)
    values = entropies(traj.states, traj.space, parts)
    norm = energy = None
    if observables:
        norm, energy = traj.observables()
    return EntropyTrace(traj.times, values, norm, energy)


def steps_for(horizon: float, dt: float) -> int:
    return int(round(horizon / dt))


def peak_entropy(trace: EntropyTrace, preset: str) -> float:
    series = trace.series(preset)
    if series.size == 0:
        raise ValueError("empty trace")
    return float(series.max())


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive ``(start, end)`` index pairs of the True runs of ``mask``."""
    padded = np.concatenate(([False], mask, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return [(int(a), int(b) - 1) for a, b in zip(edges[::2], edges[1::2])]


def envelope(trace: EntropyTrace, preset: str) -> list[tuple[float, float]]:
    """Strict local maxima ``(time, value)``; a flat top reports its midpoint."""
    x = trace.series(preset)
    t = trace.times
    if x.size < 3:
        return []
    change = np.flatnonzero(np.diff(x) != 0)
    starts = np.concatenate(([0], change + 1))
    ends = np.concatenate((change, [x.size - 1]))
    vals = x[starts]
    peaks = []
    for r in range(1, len(starts) - 1):
        if vals[r - 1] < vals[r] > vals[r + 1]:
            peaks.append((0.5 * (t[starts[r]] + t[ends[r]]), float(vals[r])))
    return peaks


def envelope_curve(trace: EntropyTrace, preset: str) -> np.ndarray:
    """Upper envelope on the trace's time grid, linear between local maxima."""
    peaks = envelope(trace, preset)
    if not peaks:
        return trace.series(preset).copy()
    pt, pv = np.array(peaks).T
    return np.interp(trace.times, pt, pv)


def envelope_period(
    trace: EntropyTrace, preset: str, eps: float = QUIET_EPS, level: float = ENVELOPE_LEVEL
) -> float:
    """Mean spacing between quiet zones of the wave-packet envelope.

    A quiet zone is a maximal run where the upper envelope stays below
    ``level`` times its maximum and the series itself drops below ``eps``
    somewhere inside. The envelope condition rejects the carrier zeros in
    the middle of a packet; the ``eps`` condition rejects shallow ripples.
    Runs cut by either end of the trace have an unknown centre and are
    ignored.
    """
    x = trace.series(preset)
    env = envelope_curve(trace, preset)
    last = env.size - 1
    zones = [
        (a, b) for a, b in _runs(env < level * env.max())
        if a > 0 and b < last and (x[a:b + 1] < eps).any()
    ]
    if len(zones) < 2:
        raise ValueError(
            f"horizon too short: found {len(zones)} interior quiet zone(s) for {preset}"
        )
    mids = np.array([0.5 * (trace.times[a] + trace.times[b]) for a, b in zones])
    return float(np.mean(np.diff(mids)))


# --- inequalities ----------------------------------------------------------

_Margin = Callable[[dict[str, np.ndarray]], np.ndarray]

# Each margin must be >= -slack; an equality is encoded as -|difference|.
INEQUALITIES: dict[str, _Margin] = {
    "S_Omega_up+S_Omega_down>=S_Omega":
        lambda v: v["S_Omega_up"] + v["S_Omega_down"] - v["S_Omega"],
    "S_Omega>=S_Omega_up": lambda v: v["S_Omega"] - v["S_Omega_up"],
    "S_Omega_up==S_Omega_down": lambda v: -np.abs(v["S_Omega_up"] - v["S_Omega_down"]),
    "S_Omega+S_omega>=S_Omega_omega":
        lambda v: v["S_Omega"] + v["S_omega"] - v["S_Omega_omega"],
    "S_Omega_omega>=S_omega": lambda v: v["S_Omega_omega"] - v["S_omega"],
    "S_omega>=S_Omega": lambda v: v["S_omega"] - v["S_Omega"],
}


class InequalityReport(NamedTuple):
    counts: dict[str, int]
    worst: dict[str, float]  # most negative margin per relation
    slack: float

    @property
    def ok(self) -> bool:
        return not any(self.counts.values())

    def violations(self) -> dict[str, int]:
        return {k: n for k, n in self.counts.items() if n}


def check_inequalities(trace: EntropyTrace, slack: float = INEQUALITY_SLACK) -> InequalityReport:
    counts, worst = {}, {}
    for name, margin in INEQUALITIES.items():
        m = margin(trace.values)
        counts[name] = int(np.count_nonzero(m < -slack))
        worst[name] = float(m.min()) if m.size else 0.0
    return InequalityReport(counts, worst, slack)


# --- sweeps ----------------------------------------------------------------

SWEEP_KEYS = PARAM_KEYS + ("g_Omega",)


class ParamAxis(NamedTuple):
    name: str
    values: tuple[float, ...]

    @classmethod
    def of(cls, name: str, values: Iterable[float]) -> "ParamAxis":
        if name not in SWEEP_KEYS:
            raise KeyError(f"cannot sweep {name!r}; choose from {', '.join(SWEEP_KEYS)}")
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValueError(f"axis {name} has no values")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError(f"axis {name} values must be strictly ascending")
        return cls(name, vals)


@dataclass
class SweepGrid:
    x_name: str
    y_name: str
    x_values: np.ndarray
    y_values: np.ndarray
    peak: np.ndarray = field(repr=False)  # shape (len(y), len(x))

    def value(self, x: float, y: float) -> float:
        i = int(np.flatnonzero(np.isclose(self.y_values, y, rtol=1e-12, atol=0))[0])
        j = int(np.flatnonzero(np.isclose(self.x_values, x, rtol=1e-12, atol=0))[0])
        return float(self.peak[i, j])


def peak_for(params: ModelParams, preset: str, horizon: float, dt: float) -> float:
    part = preset_partitions().get(preset)
    if part is None:
        raise KeyError(f"unknown preset {preset!r}")
    trace = simulate(params, dt, steps_for(horizon, dt), parts={preset: part}, observables=False)
    return peak_entropy(trace, preset)


def _grid_point(job: tuple[ModelParams, str, float, float]) -> float:
    return peak_for(*job)


def sweep2d(
    x: ParamAxis,
    y: ParamAxis,
    fixed: ModelParams,
    preset: str = "S_Omega",
    horizon: float = SWEEP_HORIZON,
    dt: float = DEFAULT_DT,
    workers: int = 1,
) -> SweepGrid:
    """Peak entropy of ``preset`` at every ``(x, y)`` grid point.

    Each point is an independent simulation; results land in pre-indexed
    slots so the grid does not depend on worker scheduling.
    """
    jobs = [
        (fixed.with_(**{x.name: xv, y.name: yv}), preset, horizon, dt)
        for yv in y.values
        for xv in x.values
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(_grid_point, jobs, chunksize=1))
    else:
        flat = [_grid_point(job) for job in jobs]
    peak = np.array(flat, dtype=float).reshape(len(y.values), len(x.values))
    return SweepGrid(x.name, y.name, np.array(x.values), np.array(y.values), peak)


def axis_values(start: float, stop: float, num: int) -> tuple[float, ...]:
    return tuple(float(v) for v in np.linspace(start, stop, num))


# Default grids for the named peak maps. Ranges are choices spanning the
# quoted parameter values, in units of g.
PEAK_MAPS: dict[str, dict] = {
    "photon-tunnel": dict(x=("g_Omega", 0.5, 4.0), y=("zeta", 0.5, 4.0), fixed={"g_bond": 0.1}),
    "bond-tunnel": dict(x=("g_bond", 0.01, 0.2), y=("zeta", 0.1, 3.0), fixed={"g_Omega": 1.0}),
    "photon-bond": dict(x=("g_Omega", 0.5, 4.0), y=("g_bond", 0.01, 0.2), fixed={"zeta": 1.0}),
    "photon-bond-strong-tunnel": dict(
        x=("g_Omega", 0.5, 4.0), y=("g_bond", 0.01, 0.2), fixed={"zeta": 2.0}
    ),
}


def peak_map_setup(
    name: str, points: int = 21, base: Optional[ModelParams] = None
) -> tuple[ParamAxis, ParamAxis, ModelParams]:
    """Axes and fixed parameters for one of ``PEAK_MAPS``."""
    layout = PEAK_MAPS[name]
    base = ModelParams() if base is None else base
    fixed = base.with_(**{k: v * G_DEFAULT for k, v in layout["fixed"].items()})
    xn, x0, x1 = layout["x"]
    yn, y0, y1 = layout["y"]
    x = ParamAxis.of(xn, axis_values(x0 * G_DEFAULT, x1 * G_DEFAULT, points))
    y = ParamAxis.of(yn, axis_values(y0 * G_DEFAULT, y1 * G_DEFAULT, points))
    return x, y, fixed


# --- CSV -------------------------------------------------------------------

def _fmt(v: float) -> str:
    return FLOAT_FMT.format(float(v))


def write_trace_csv(trace: EntropyTrace, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    names = list(trace.values)
    writer.writerow(list(TRACE_HEADER) + names)
    n = len(trace)
    norm = trace.norm if trace.norm is not None else np.full(n, np.nan)
    energy = trace.energy if trace.energy is not None else np.full(n, np.nan)
    for i in range(n):
        row = [trace.times[i], norm[i], energy[i]] + [trace.values[k][i] for k in names]
        writer.writerow([_fmt(v) for v in row])


def write_sweep_csv(grid: SweepGrid, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["x", "y", "peak"])
    for i, yv in enumerate(grid.y_values):
        for j, xv in enumerate(grid.x_values):
            writer.writerow([_fmt(xv), _fmt(yv), _fmt(grid.peak[i, j])])


def read_trace_csv(src: TextIO) -> EntropyTrace:
    reader = csv.reader(src)
    header = next(reader)
    rows = np.array([[float(v) for v in row] for row in reader], dtype=float).reshape(-1, len(header))
    cols = {name: rows[:, i] for i, name in enumerate(header)}
    values = {k: v for k, v in cols.items() if k not in TRACE_HEADER}
    return EntropyTrace(cols["t"], values, cols.get("norm"), cols.get("energy"))


def trace_csv_text(trace: EntropyTrace) -> str:
    buf = io.StringIO()
    write_trace_csv(trace, buf)
    return buf.getvalue()
