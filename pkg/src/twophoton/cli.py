"""Command-line interface.

Four subcommands cover the standard workflows: detuning sweeps that
tabulate every computation route side by side, phase-space density
exports, critical power-law tables with exponent fits, and stochastic
trajectory or ensemble runs.  A fifth mode, --check, runs the built-in
cross-validation suite.

All output is deterministic: fixed seeds give byte-identical files on
repeated invocations regardless of thread count or kernel backend, and
no timestamps or machine identifiers are ever written.  Exit codes:
0 success, 1 usage error, 2 numerical failure, 3 self-check failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import simpson

from . import __version__, criticality, equilibrium, exact, langevin
from .model import METHODS, ModelParams, ObservableSet
from .selfcheck import run_selfcheck
from .semiclassical import semiclassical_observables

__all__ = ["SweepSpec", "WignerGrid", "main"]

NORMALIZATION_NOTE = (
    "densities are normalized so that the integral over dx dp / 2 is 1; "
    "reduced profiles integrate to 1 over dx"
)

_OBS_FIELDS = ("n", "re_a2", "im_a2", "x2", "p2", "xp_sym", "g2")
_ERROR_KEYS = ("n", "a2_re", "a2_im", "x2", "p2", "xp_sym", "g2")
_SLOPE_BANDS = {
    "x2": (2.0 / 3.0, 0.02),
    "n": (2.0 / 3.0, 0.02),
    "re_a2": (2.0 / 3.0, 0.02),
    "neg_im_a2": (1.0 / 3.0, 0.03),
}

# Settings that control execution but not the numbers; they stay out
# of the echoed header so that outputs compare byte-identical across
# thread counts and backends.
_ECHO_EXCLUDE = {
    "command",
    "func",
    "check",
    "out",
    "format",
    "config",
    "threads",
    "backend",
    "preset",
}

_PRESETS: Dict[str, Dict[str, Dict[str, object]]] = {
    "sweep": {
        "fig2": {
            "g_over_eta": 20.0,
            "delta_min": 10.0,
            "delta_max": 30.0,
            "points": 81,
            "methods": "semiclassical,exact",
        },
        "fig4a": {
            "g_over_eta": 20.0,
            "delta_min": 14.0,
            "delta_max": 26.0,
            "points": 121,
            "methods": "exact,boltzmann",
        },
        "fig7": {
            "g_over_eta": 20.0,
            "delta_min": 10.0,
            "delta_max": 30.0,
            "points": 81,
            "methods": "exact",
        },
    },
    "wigner": {
        "fig5": {
            "method": "exact",
            "reduced": True,
            "delta_over_eta": 20.0,
            "g_over_eta": 20.0,
            "resolution": 513,
        },
    },
    "critical": {
        "fig6": {
            "g_min": 20.0,
            "g_max": 100.0,
            "points": 9,
            "methods": "exact,boltzmann",
        },
    },
    "simulate": {},
}


class _UsageError(Exception):
    """Bad invocation; mapped to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


@dataclass(frozen=True)
class SweepSpec:
    """Validated description of a detuning sweep."""

    g_over_eta: float
    delta_min: float
    delta_max: float
    points: int
    methods: Tuple[str, ...]
    eta: float = 1.0

    def __post_init__(self) -> None:
        if self.points < 2:
            raise ValueError("a sweep needs at least two points")
        if not (self.delta_min < self.delta_max):
            raise ValueError("delta_min must be below delta_max")
        if not self.methods:
            raise ValueError("no methods requested")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.g_over_eta <= 0.0 or self.eta <= 0.0:
            raise ValueError("g_over_eta and eta must be positive")

    def detunings(self) -> np.ndarray:
        return np.linspace(self.delta_min, self.delta_max, self.points)

    def params_at(self, delta_over_eta: float) -> ModelParams:
        return ModelParams(
            delta=delta_over_eta * self.eta,
            g=self.g_over_eta * self.eta,
            eta=self.eta,
        )


@dataclass(frozen=True)
class WignerGrid:
    """Phase-space density on a rectangular grid, ready for export."""

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray
    method: str
    params: ModelParams
    normalization: float
    normalization_note: str = NORMALIZATION_NOTE


# ---------------------------------------------------------------------------
# Output formatting
# ---------------------------------------------------------------------------


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _json_safe(value: object) -> object:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@dataclass
class TableDocument:
    """One command's output: echoed settings, columns, extra notes."""

    command: str
    echo: Dict[str, object]
    header: List[str]
    rows: List[List[object]]
    notes: Dict[str, object] = field(default_factory=dict)

    def render_csv(self) -> str:
        buf = io.StringIO()
        eol = "\r\n"
        buf.write(f"# twophoton {self.command}{eol}")
        buf.write(f"# version = {__version__}{eol}")
        for key in sorted(self.echo):
            buf.write(f"# {key} = {_fmt(self.echo[key])}{eol}")
        for key in sorted(self.notes):
            buf.write(f"# {key} = {_fmt(self.notes[key])}{eol}")
        writer = csv.writer(buf, lineterminator=eol)
        writer.writerow(self.header)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def render_json(self) -> str:
        columns = {
            name: [_json_safe(row[i]) for row in self.rows]
            for i, name in enumerate(self.header)
        }
        payload = {
            "command": self.command,
            "version": __version__,
            "config": {k: _json_safe(v) for k, v in self.echo.items()},
            "notes": {k: _json_safe(v) for k, v in self.notes.items()},
            "columns": columns,
        }
        return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"

    def write(self, out: Optional[str], fmt: str) -> None:
        text = self.render_csv() if fmt == "csv" else self.render_json()
        if out is None:
            sys.stdout.write(text)
        else:
            with open(out, "w", newline="") as fh:
                fh.write(text)


def _echo_from_namespace(ns: argparse.Namespace) -> Dict[str, object]:
    echo: Dict[str, object] = {}
    for key, value in vars(ns).items():
        if key in _ECHO_EXCLUDE or value is None:
            continue
        echo[key.replace("_", "-")] = value
    return echo


# ---------------------------------------------------------------------------
# Observable rows
# ---------------------------------------------------------------------------


def _obs_values(obs: ObservableSet) -> List[float]:
    g2 = math.nan if obs.g2 is None else obs.g2
    return [obs.n, obs.a2.real, obs.a2.imag, obs.x2, obs.p2, obs.xp_sym, g2]


def _nan_values() -> List[float]:
    return [math.nan] * len(_OBS_FIELDS)


def _method_header(method: str) -> List[str]:
    cols = [f"{method}_{f}" for f in _OBS_FIELDS]
    if method == "langevin":
        cols += [f"langevin_{f}_stderr" for f in _OBS_FIELDS]
    cols.append(f"{method}_status")
    return cols


def _method_cells(
    method: str,
    params: ModelParams,
    config: Optional[langevin.TrajectoryConfig],
    threads: int,
    backend: Optional[str],
) -> List[object]:
    try:
        if method == "semiclassical":
            obs = semiclassical_observables(params)
        elif method == "exact":
            obs = exact.exact_observables(params).to_observable_set()
        elif method == "boltzmann":
            obs = equilibrium.boltzmann_observables(params)
        else:
            assert config is not None
            obs = langevin.run_ensemble(
                params, config, threads=threads, backend=backend
            )
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        cells: List[object] = list(_nan_values())
        if method == "langevin":
            cells += _nan_values()
        cells.append(f"failed: {exc}")
        return cells
    cells = list(_obs_values(obs))
    if method == "langevin":
        errors = obs.errors or {}
        cells += [float(errors.get(k, math.nan)) for k in _ERROR_KEYS]
    cells.append("ok")
    return cells


def _ordered_methods(raw: str) -> Tuple[str, ...]:
    requested = {m.strip() for m in raw.split(",") if m.strip()}
    unknown = requested.difference(METHODS)
    if unknown:
        raise _UsageError(
            f"unknown methods: {', '.join(sorted(unknown))} "
            f"(choose from {', '.join(METHODS)})"
        )
    if not requested:
        raise _UsageError("no methods requested")
    return tuple(m for m in METHODS if m in requested)


def _trajectory_config(ns: argparse.Namespace) -> langevin.TrajectoryConfig:
    try:
        return langevin.TrajectoryConfig(
            dt=ns.dt,
            t_burn=ns.t_burn,
            t_sample=ns.t_sample,
            sample_stride=ns.stride,
            n_traj=ns.n_traj,
            seed=ns.seed,
            scheme=ns.scheme,
            system=ns.system,
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_sweep(ns: argparse.Namespace) -> int:
    try:
        spec = SweepSpec(
            g_over_eta=ns.g_over_eta,
            delta_min=ns.delta_min,
            delta_max=ns.delta_max,
            points=ns.points,
            methods=_ordered_methods(ns.methods),
            eta=ns.eta,
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    config = (
        _trajectory_config(ns) if "langevin" in spec.methods else None
    )

    header = ["delta_over_eta"]
    for method in spec.methods:
        header += _method_header(method)

    rows: List[List[object]] = []
    n_ok = 0
    for delta in spec.detunings():
        params = spec.params_at(float(delta))
        row: List[object] = [float(delta)]
        for method in spec.methods:
            cells = _method_cells(method, params, config, ns.threads, ns.backend)
            if cells[-1] == "ok":
                n_ok += 1
            row += cells
        rows.append(row)
    if n_ok == 0:
        raise RuntimeError("every sweep cell failed; nothing to report")

    doc = TableDocument(
        command="sweep",
        echo=_echo_from_namespace(ns),
        header=header,
        rows=rows,
    )
    doc.write(ns.out, ns.format)
    return 0


def _build_wigner_grid(ns: argparse.Namespace) -> WignerGrid:
    params = ModelParams(
        delta=ns.delta_over_eta * ns.eta, g=ns.g_over_eta * ns.eta, eta=ns.eta
    )
    if ns.resolution % 2 == 0 or ns.resolution < 65:
        raise _UsageError("resolution must be odd and at least 65")
    if ns.method == "exact":
        if ns.resolution < 257:
            raise _UsageError("exact grids need at least 257 points per axis")
        half = ns.half_width or exact.default_grid_half_width(params)
        x_axis = np.linspace(-half, half, ns.resolution)
        p_axis = x_axis.copy()
        values = exact.exact_wigner_grid(params, x_axis, p_axis)
    else:
        eq = equilibrium.effective_equilibrium(params)
        lx = ns.half_width or equilibrium._support_half_width(
            eq.quad_coeff, eq.sextic_coeff, eq.t_eff
        )
        lp = ns.half_width or (
            params.eta * lx ** 3 / (4.0 * params.g) + 4.0
        )
        x_axis = np.linspace(-lx, lx, ns.resolution)
        p_axis = np.linspace(-lp, lp, ns.resolution)
        values = equilibrium.boltzmann_wigner(
            eq, x_axis[:, None], p_axis[None, :]
        )
    norm = exact.grid_moment(x_axis, p_axis, values, 0, 0)
    return WignerGrid(
        x_axis=x_axis,
        p_axis=p_axis,
        values=values,
        method=ns.method,
        params=params,
        normalization=norm,
    )


def _reduced_profile(ns: argparse.Namespace):
    params = ModelParams(
        delta=ns.delta_over_eta * ns.eta, g=ns.g_over_eta * ns.eta, eta=ns.eta
    )
    if ns.method == "exact":
        if ns.resolution < 257:
            raise _UsageError("exact grids need at least 257 points per axis")
        half = ns.half_width or exact.default_grid_half_width(params)
        x_axis = np.linspace(-half, half, ns.resolution)
        w, norm = exact.reduced_wigner_profile(params, x_axis)
    else:
        eq = equilibrium.effective_equilibrium(params)
        half = ns.half_width or equilibrium._support_half_width(
            eq.quad_coeff, eq.sextic_coeff, eq.t_eff
        )
        x_axis = np.linspace(-half, half, ns.resolution)
        w = np.asarray(equilibrium.reduced_wigner(eq, x_axis))
        norm = float(simpson(w, x=x_axis))
    return x_axis, w, norm


def cmd_wigner(ns: argparse.Namespace) -> int:
    echo = _echo_from_namespace(ns)
    if ns.reduced:
        x_axis, w, norm = _reduced_profile(ns)
        if abs(norm - 1.0) > 1.0e-3:
            raise RuntimeError(
                f"reduced profile norm {norm:.6f} deviates from 1 by more "
                "than 1e-3; enlarge --half-width or --resolution"
            )
        doc = TableDocument(
            command="wigner",
            echo=echo,
            header=["x", "w"],
            rows=[[float(x), float(v)] for x, v in zip(x_axis, w)],
            notes={"normalization": norm, "note": NORMALIZATION_NOTE},
        )
        doc.write(ns.out, ns.format)
        return 0

    grid = _build_wigner_grid(ns)
    if abs(grid.normalization - 1.0) > 1.0e-3:
        raise RuntimeError(
            f"grid normalization {grid.normalization:.6f} deviates from 1 "
            "by more than 1e-3; enlarge --half-width or --resolution"
        )
    rows = [
        [float(x), float(p), float(grid.values[i, j])]
        for i, x in enumerate(grid.x_axis)
        for j, p in enumerate(grid.p_axis)
    ]
    doc = TableDocument(
        command="wigner",
        echo=echo,
        header=["x", "p", "W"],
        rows=rows,
        notes={
            "normalization": grid.normalization,
            "note": grid.normalization_note,
        },
    )
    doc.write(ns.out, ns.format)
    return 0


def cmd_critical(ns: argparse.Namespace) -> int:
    methods = _ordered_methods(ns.methods)
    if "semiclassical" in methods:
        raise _UsageError(
            "the semiclassical route has no critical fluctuations to tabulate"
        )
    if ns.points < 2 or ns.g_min <= 0 or ns.g_max <= ns.g_min:
        raise _UsageError("need 0 < g-min < g-max and at least two points")
    config = _trajectory_config(ns) if "langevin" in methods else None
    ratios = np.geomspace(ns.g_min, ns.g_max, ns.points)

    header = ["g_over_eta"]
    for method in methods:
        header += _method_header(method)
    rows: List[List[object]] = []
    ok_ratios: List[float] = []
    exact_series: Dict[str, Dict[float, float]] = {k: {} for k in _SLOPE_BANDS}
    for ratio in ratios:
        r = float(ratio)
        params = ModelParams(delta=r * ns.eta, g=r * ns.eta, eta=ns.eta)
        row: List[object] = [r]
        for method in methods:
            if method == "boltzmann":
                cells: List[object] = list(
                    _obs_values(equilibrium.critical_closed_forms(params))
                )
                cells.append("ok")
            else:
                cells = _method_cells(
                    method, params, config, ns.threads, ns.backend
                )
            if method == "exact" and cells[-1] == "ok":
                ok_ratios.append(r)
                exact_series["n"][r] = float(cells[0])
                exact_series["re_a2"][r] = float(cells[1])
                exact_series["neg_im_a2"][r] = -float(cells[2])
                exact_series["x2"][r] = float(cells[3])
            row += cells
        rows.append(row)

    notes: Dict[str, object] = {"note": "delta = g along the critical line"}
    if "exact" in methods and len(ok_ratios) >= 5:
        for key, series in exact_series.items():
            fit = criticality.fit_exponent(
                series.__getitem__, ok_ratios, sign_handling="none"
            )
            center, width = _SLOPE_BANDS[key]
            verdict = "ok" if abs(fit.slope - center) <= width else "out_of_band"
            notes[f"fit_{key}_slope"] = fit.slope
            notes[f"fit_{key}_r_squared"] = fit.r_squared
            notes[f"fit_{key}_band"] = (
                f"{center:.4f} +- {width:.4f} ({verdict})"
            )

    doc = TableDocument(
        command="critical",
        echo=_echo_from_namespace(ns),
        header=header,
        rows=rows,
        notes=notes,
    )
    doc.write(ns.out, ns.format)
    return 0


def cmd_simulate(ns: argparse.Namespace) -> int:
    params = ModelParams(
        delta=ns.delta_over_eta * ns.eta, g=ns.g_over_eta * ns.eta, eta=ns.eta
    )
    config = _trajectory_config(ns)
    noise_scale = 0.0 if ns.zero_noise else 1.0
    echo = _echo_from_namespace(ns)

    if config.n_traj == 1:
        times, xs, ps = langevin.simulate_trajectory(
            params, config, backend=ns.backend, noise_scale=noise_scale
        )
        doc = TableDocument(
            command="simulate",
            echo=echo,
            header=["time", "x", "p"],
            rows=[
                [float(t), float(x), float(p)]
                for t, x, p in zip(times, xs, ps)
            ],
        )
        doc.write(ns.out, ns.format)
        return 0

    result = langevin.run_ensemble_detailed(
        params,
        config,
        threads=ns.threads,
        backend=ns.backend,
        noise_scale=noise_scale,
    )
    rows = [
        [
            key,
            result.estimates[key].mean,
            result.estimates[key].std_error,
            result.estimates[key].n_samples,
            result.estimates[key].autocorrelation_time_estimate,
        ]
        for key in sorted(result.estimates)
    ]
    doc = TableDocument(
        command="simulate",
        echo=echo,
        header=[
            "observable",
            "mean",
            "std_error",
            "n_samples",
            "autocorrelation_time",
        ],
        rows=rows,
        notes={
            "aborted-fraction": result.aborted_fraction,
            "noise-step-variance-ratio": result.noise_step_variance_ratio,
            "noise-walk-variance-ratio": result.noise_walk_variance_ratio,
        },
    )
    doc.write(ns.out, ns.format)
    return 0


def cmd_check(ns: argparse.Namespace) -> int:
    report = run_selfcheck(threads=ns.threads)
    for line in report.summary_lines():
        print(line)
    return 0 if report.passed else 3


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--eta", type=float, default=1.0, help="nonlinear rate scale")
    sub.add_argument("--seed", type=int, default=20250814, help="RNG seed")
    sub.add_argument("--threads", type=int, default=1, help="worker threads")
    sub.add_argument("--out", type=str, default=None, help="output path (default stdout)")
    sub.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )
    sub.add_argument("--config", type=str, default=None, help="key = value settings file")
    sub.add_argument(
        "--backend",
        choices=("auto", "compiled", "python"),
        default=None,
        help="kernel backend (results are identical; this is a speed knob)",
    )


def _add_trajectory_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--dt", type=float, default=1.0e-3, help="integration step")
    sub.add_argument("--t-burn", type=float, default=20.0, help="burn-in time")
    sub.add_argument("--t-sample", type=float, default=200.0, help="sampling window")
    sub.add_argument("--stride", type=int, default=10, help="steps between samples")
    sub.add_argument("--n-traj", type=int, default=2000, help="trajectory count")
    sub.add_argument(
        "--scheme",
        choices=langevin.SCHEMES,
        default="stratonovich_heun",
        help="stochastic integration scheme",
    )
    sub.add_argument(
        "--system",
        choices=langevin.SYSTEMS,
        default="full_quadrature",
        help="which stochastic system to integrate",
    )


def build_parser() -> _Parser:
    parser = _Parser(
        prog="twophoton",
        description=__doc__.splitlines()[0] if __doc__ else None,
    )
    parser.add_argument(
        "--check",
        action="store_true",
        help="run the deterministic cross-validation suite and exit",
    )
    parser.add_argument(
        "--threads", type=int, default=2, help="worker threads for --check"
    )
    sub = parser.add_subparsers(dest="command")

    sweep = sub.add_parser("sweep", help="tabulate observables over a detuning range")
    sweep.add_argument("--g-over-eta", type=float, default=20.0)
    sweep.add_argument("--delta-min", type=float, default=10.0)
    sweep.add_argument("--delta-max", type=float, default=30.0)
    sweep.add_argument("--points", type=int, default=81)
    sweep.add_argument(
        "--methods",
        type=str,
        default="exact",
        help="comma-separated subset of " + ",".join(METHODS),
    )
    sweep.add_argument("--preset", choices=sorted(_PRESETS["sweep"]), default=None)
    _add_common(sweep)
    _add_trajectory_flags(sweep)
    sweep.set_defaults(func=cmd_sweep)

    wigner = sub.add_parser("wigner", help="export a phase-space density grid")
    wigner.add_argument("--method", choices=("exact", "boltzmann"), default="exact")
    wigner.add_argument("--delta-over-eta", type=float, default=20.0)
    wigner.add_argument("--g-over-eta", type=float, default=20.0)
    wigner.add_argument(
        "--half-width",
        type=float,
        default=None,
        help="grid half-width (default: automatic, state-aware)",
    )
    wigner.add_argument("--resolution", type=int, default=257, help="odd point count per axis")
    wigner.add_argument(
        "--reduced",
        action="store_true",
        help="export the x marginal instead of the joint density",
    )
    wigner.add_argument("--preset", choices=sorted(_PRESETS["wigner"]), default=None)
    _add_common(wigner)
    wigner.set_defaults(func=cmd_wigner)

    critical = sub.add_parser(
        "critical", help="critical observables and power-law fits along delta = g"
    )
    critical.add_argument("--g-min", type=float, default=50.0)
    critical.add_argument("--g-max", type=float, default=100.0)
    critical.add_argument("--points", type=int, default=6)
    critical.add_argument(
        "--methods", type=str, default="exact,boltzmann",
        help="comma-separated subset of exact,boltzmann,langevin",
    )
    critical.add_argument("--preset", choices=sorted(_PRESETS["critical"]), default=None)
    _add_common(critical)
    _add_trajectory_flags(critical)
    critical.set_defaults(func=cmd_critical)

    simulate = sub.add_parser(
        "simulate", help="stochastic trajectories or ensemble moment estimates"
    )
    simulate.add_argument("--delta-over-eta", type=float, default=20.0)
    simulate.add_argument("--g-over-eta", type=float, default=20.0)
    simulate.add_argument(
        "--zero-noise",
        action="store_true",
        help="switch off the noise (deterministic drift flow)",
    )
    _add_common(simulate)
    _add_trajectory_flags(simulate)
    simulate.set_defaults(func=cmd_simulate)

    return parser


def _load_config_flags(path: str, parser: argparse.ArgumentParser) -> List[str]:
    """Turn a key = value file into an argv fragment.

    Keys use the long option spelling without the leading dashes.
    Values for store-true flags may be true/false; anything else is
    passed through as the option's string argument.
    """
    known = {}
    for action in parser._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                known[opt[2:]] = action
    fragment: List[str] = []
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise _UsageError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _UsageError(
                f"{path}:{lineno}: expected 'key = value', got {line!r}"
            )
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise _UsageError(f"{path}:{lineno}: unknown setting {key!r}")
        action = known[key]
        if action.nargs == 0:
            if value.lower() in ("true", "1", "yes"):
                fragment.append(f"--{key}")
            elif value.lower() not in ("false", "0", "no"):
                raise _UsageError(
                    f"{path}:{lineno}: flag {key!r} takes true or false"
                )
        else:
            fragment.extend([f"--{key}", value])
    return fragment


def _subparser_for(parser: _Parser, command: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise AssertionError("subparsers missing")


def _run(argv: Sequence[str]) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.check:
        return cmd_check(ns)
    if ns.command is None:
        raise _UsageError("a subcommand or --check is required")

    # Preset and config-file settings become defaults, below explicit
    # flags: re-parse with preset defaults installed and config flags
    # injected ahead of the user's own (later flags win in argparse).
    preset = getattr(ns, "preset", None)
    config_path = getattr(ns, "config", None)
    if preset or config_path:
        parser = build_parser()
        subparser = _subparser_for(parser, ns.command)
        if preset:
            choices = _PRESETS.get(ns.command, {})
            if preset not in choices:
                raise _UsageError(
                    f"unknown preset {preset!r} for {ns.command}"
                )
            subparser.set_defaults(**choices[preset])
        rest = list(argv)
        rest.remove(ns.command)
        injected = (
            _load_config_flags(config_path, subparser) if config_path else []
        )
        ns = parser.parse_args([ns.command, *injected, *rest])
    return ns.func(ns)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        return _run(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
