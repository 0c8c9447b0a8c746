"""Parameter sweeps, figure presets and CSV output.

A sweep varies exactly one parameter (``lambda_r``, ``delta``, ``theta``,
``epsilon`` or ``R``) over a list of values and evaluates every point with
the simulator, the analytic engine or both.  All sweep points share the
experiment seed (common random numbers), so a point run alone reproduces
its row exactly.
"""

from __future__ import annotations

import copy
import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .analytic import AnalyticInputs, QuadratureConfig, UnsupportedPolicy, evaluate
from .geometry import ParameterError
from .policies import CenterBaseline, make_policy
from .simulation import SimulationConfig, estimate, max_workers

MODES = ("simulate", "analytic", "both")
SWEEP_AXES = ("lambda_r", "delta", "theta", "epsilon", "R")
AXIS_POLICY = {"delta": "rss", "theta": "sector", "epsilon": "distance"}

DEFAULTS = {
    "model": {"lambda_s": 0.1, "lambda_r": 1.0, "R": 1.0, "T": 3.0, "alpha": 4.0,
              "bounded": False},
    "policy": {"name": "all", "parameter": None},
    "simulation": {"half_width": 15.0, "guard_margin": 5.0, "n_trials": 100},
    "analytic": {"own_cluster": "oriented"},
    "quadrature": {"p2_rel_tol": 1e-3, "rel_tol": 1e-6, "max_refinements": 3,
                   "panels_per_cluster": 16},
}

COLUMNS = [
    "series", "mode", "policy", "sweep_axis", "sweep_value", "x_normalized",
    "lambda_s", "lambda_r", "R", "T", "alpha", "bounded", "parameter",
    "half_width", "guard_margin", "n_trials", "seed",
    "sim_P1", "sim_P2", "sim_Ps_composed", "sim_Ps_joint",
    "se_P1", "se_P2", "se_Ps_composed", "se_Ps_joint",
    "sim_mean_cluster_size", "se_mean_cluster_size", "n_measured",
    "an_P1", "an_P2", "an_Ps", "an_mean_cluster_size", "an_tolerance",
    "gap_Ps",
]
TIMING_COLUMN = "wall_time"


class ConfigError(ParameterError):
    """The experiment description is invalid; ``field`` names the offending entry."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _merge(base, override):
    out = copy.deepcopy(base)
    for k, v in (override or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def normalized_parameter(policy_name, value):
    """Common x-axis for comparing methods: delta, 4 theta / pi, epsilon / 6."""
    if value is None:
        return None
    if policy_name == "sector":
        return 4 * value / math.pi
    if policy_name == "distance":
        return value / 6
    return value


@dataclass
class ExperimentSpec:
    mode: str = "simulate"
    config: dict = field(default_factory=dict)
    sweep_axis: str = "lambda_r"
    sweep_values: list = field(default_factory=lambda: [1.0])
    output: str | None = None
    seed: int = 0
    series: str = ""
    record_timing: bool = False

    def __post_init__(self):
        self.config = _merge(DEFAULTS, self.config)
        self.validate()

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentSpec:
        data = dict(data)
        sweep = data.pop("sweep", {}) or {}
        known = {"mode", "output", "seed", "series", "record_timing"}
        unknown = set(data) - known - set(DEFAULTS)
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown configuration key")
        cfg = {k: data[k] for k in DEFAULTS if k in data}
        return cls(mode=data.get("mode", "simulate"), config=cfg,
                   sweep_axis=sweep.get("axis", "lambda_r"),
                   sweep_values=list(sweep.get("values", [cfg.get("model", {}).get(
                       "lambda_r", DEFAULTS["model"]["lambda_r"])])),
                   output=data.get("output"), seed=int(data.get("seed", 0)),
                   series=str(data.get("series", "")),
                   record_timing=bool(data.get("record_timing", False)))

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError("mode", f"expected one of {MODES}, got {self.mode!r}")
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError("sweep.axis", f"expected one of {SWEEP_AXES}, got {self.sweep_axis!r}")
        if not self.sweep_values:
            raise ConfigError("sweep.values", "at least one value is required")
        for v in self.sweep_values:
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError("sweep.values", f"non-finite or non-numeric value {v!r}")
        for section, keys in self.config.items():
            if section not in DEFAULTS:
                raise ConfigError(section, "unknown section")
            extra = set(keys) - set(DEFAULTS[section])
            if extra and section != "quadrature":
                raise ConfigError(f"{section}.{sorted(extra)[0]}", "unknown key")
        pol = self.config["policy"]["name"]
        need = AXIS_POLICY.get(self.sweep_axis)
        if need and make_policy(pol, 0.0 if need else None).name != need:
            raise ConfigError("sweep.axis",
                              f"axis {self.sweep_axis!r} requires policy {need!r}, got {pol!r}")
        if self.mode != "simulate" and isinstance(make_policy(pol, 0.0), CenterBaseline):
            raise ConfigError("policy.name", "the center baseline is simulation-only")
        # build every point once so that domain errors surface before any work
        for v in self.sweep_values:
            try:
                self.point_inputs(v)
                if self.mode != "analytic":
                    self.simulation_config(v)
                if self.mode != "simulate":
                    self.analytic_inputs(v)
            except ConfigError:
                raise
            except (ParameterError, TypeError, ValueError) as exc:
                raise ConfigError(f"sweep value {v!r}", str(exc)) from exc

    def point_inputs(self, value):
        """``(policy, model dict, simulation dict)`` for one sweep value."""
        c = self.config
        model = dict(c["model"])
        pname = c["policy"]["name"]
        param = c["policy"].get("parameter")
        if self.sweep_axis in ("lambda_r", "R"):
            model[self.sweep_axis] = float(value)
        else:
            param = float(value)
        try:
            policy = make_policy(pname, param)
        except ParameterError as exc:
            raise ConfigError("policy", str(exc)) from exc
        return policy, model, dict(c["simulation"])

    def simulation_config(self, value) -> SimulationConfig:
        policy, model, sim = self.point_inputs(value)
        return SimulationConfig(
            lambda_s=float(model["lambda_s"]), lambda_r=float(model["lambda_r"]),
            R=float(model["R"]), T=float(model["T"]), alpha=float(model["alpha"]),
            bounded=bool(model["bounded"]), half_width=float(sim["half_width"]),
            guard_margin=None if sim.get("guard_margin") is None else float(sim["guard_margin"]),
            policy=policy, n_trials=int(sim["n_trials"]), master_seed=int(self.seed))

    def analytic_inputs(self, value) -> AnalyticInputs:
        policy, model, _ = self.point_inputs(value)
        return AnalyticInputs(
            float(model["lambda_s"]), float(model["lambda_r"]), float(model["R"]),
            float(model["T"]), float(model["alpha"]), bool(model["bounded"]), policy,
            self.config["analytic"].get("own_cluster", "oriented"))

    def quadrature(self) -> QuadratureConfig:
        try:
            return QuadratureConfig(**self.config["quadrature"])
        except TypeError as exc:
            raise ConfigError("quadrature", str(exc)) from exc


def run_point(spec: ExperimentSpec, value) -> dict:
    """Evaluate one sweep point; returns a row dict keyed by :data:`COLUMNS`."""
    t0 = time.perf_counter()
    policy, model, sim = spec.point_inputs(value)
    row = dict.fromkeys(COLUMNS)
    row.update(series=spec.series, mode=spec.mode, policy=policy.name,
               sweep_axis=spec.sweep_axis, sweep_value=float(value),
               x_normalized=normalized_parameter(policy.name, policy.parameter),
               lambda_s=model["lambda_s"], lambda_r=model["lambda_r"], R=model["R"],
               T=model["T"], alpha=model["alpha"], bounded=bool(model["bounded"]),
               parameter=policy.parameter)
    if spec.mode in ("simulate", "both"):
        cfg = spec.simulation_config(value)
        est = estimate(cfg)
        row.update(half_width=cfg.half_width, guard_margin=cfg.window.guard_margin,
                   n_trials=cfg.n_trials, seed=spec.seed,
                   sim_P1=est.P1_hat, sim_P2=est.P2_hat, sim_Ps_composed=est.Ps_composed,
                   sim_Ps_joint=est.Ps_joint, se_P1=est.se_P1, se_P2=est.se_P2,
                   se_Ps_composed=est.se_Ps_composed, se_Ps_joint=est.se_Ps_joint,
                   sim_mean_cluster_size=est.mean_cluster_size,
                   se_mean_cluster_size=est.se_cluster_size,
                   n_measured=est.n_sources_measured)
    if spec.mode in ("analytic", "both"):
        res = evaluate(spec.analytic_inputs(value), spec.quadrature())
        row.update(an_P1=res.P1, an_P2=res.P2, an_Ps=res.Ps,
                   an_mean_cluster_size=res.mean_cluster_size, an_tolerance=res.achieved_tolerance)
    if spec.mode == "both":
        row["gap_Ps"] = abs(row["sim_Ps_composed"] - row["an_Ps"])
    row[TIMING_COLUMN] = time.perf_counter() - t0
    return row


def _run_point_packed(args):
    return run_point(*args)


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return str(v)


class CsvSink:
    """Writes rows as they arrive; the header names every column."""

    def __init__(self, path=None, timing=False, stream=None):
        self.columns = COLUMNS + ([TIMING_COLUMN] if timing else [])
        self.path = Path(path) if path else None
        self.buffer = stream if stream is not None else io.StringIO()
        self._fh = None
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = open(self.path, "w", newline="")
        self._writer = csv.writer(self._fh or self.buffer, lineterminator="\n")
        self._writer.writerow(self.columns)
        self._flush()

    def write(self, row):
        self._writer.writerow([format_value(row.get(c)) for c in self.columns])
        self._flush()

    def _flush(self):
        if self._fh:
            self._fh.flush()

    def close(self):
        if self._fh:
            self._fh.close()
            self._fh = None


def run_experiment(spec: ExperimentSpec, workers: int | None = 1, sink: CsvSink | None = None,
                   stream=None) -> list[dict]:
    """Run every sweep point in order and write the CSV (if ``spec.output`` is set).

    Rows already written stay on disk if the sweep is interrupted.
    """
    own = sink is None
    sink = sink or CsvSink(spec.output, spec.record_timing, stream)
    rows = []
    n = max_workers(workers) if workers != 1 else 1
    try:
        if n <= 1 or len(spec.sweep_values) < 2:
            for v in spec.sweep_values:
                row = run_point(spec, v)
                sink.write(row)
                rows.append(row)
        else:
            with ProcessPoolExecutor(min(n, len(spec.sweep_values))) as ex:
                for row in ex.map(_run_point_packed, [(spec, v) for v in spec.sweep_values]):
                    sink.write(row)
                    rows.append(row)
    finally:
        if own:
            sink.close()
    return rows


def compare_modes(spec: ExperimentSpec, workers: int | None = 1) -> tuple[list[dict], float]:
    """Run in ``both`` mode; returns the rows and the largest absolute Ps gap."""
    if spec.mode != "both":
        spec = replace(spec, mode="both")
    rows = run_experiment(spec, workers)
    return rows, max(r["gap_Ps"] for r in rows)


# -- figure presets ---------------------------------------------------------------

def _spec(mode, model, policy, sim, axis, values, seed, series, quad=None):
    cfg = {"model": model, "policy": policy, "simulation": sim}
    if quad:
        cfg["quadrature"] = quad
    return ExperimentSpec(mode=mode, config=cfg, sweep_axis=axis, sweep_values=list(values),
                          seed=seed, series=series)


FIG1_LAMBDA_R = [0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.2, 2.0]
FIG2_LAMBDA_R = [0.25, 0.5, 1.0, 2.0, 4.0]
FIG3_GRIDS = {
    "all": [None],
    "rss": [0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0],
    "sector": [math.pi / 16, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2,
               3 * math.pi / 4, math.pi],
    "distance": [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
}
FIG3_R = 1.0


def preset(name: str, scale: str = "desk", seed: int = 1) -> list[ExperimentSpec]:
    """Sweeps reproducing one figure.

    ``fig1``: sectorized selection against the midpoint relay for R = 2, 4.
    ``fig2``: sectorized selection, simulation against analysis over lambda_r.
    ``fig3``: all four rules over their parameter at lambda_s = 1, lambda_r = 1.5.
    """
    if scale not in ("desk", "full"):
        raise ConfigError("scale", f"expected 'desk' or 'full', got {scale!r}")
    full = scale == "full"
    if name == "fig1":
        sim = {"half_width": 30.0 if full else 10.0, "guard_margin": 10.0 if full else 4.0,
               "n_trials": 200}
        specs = []
        for R in (2.0, 4.0):
            model = {"lambda_s": 0.4, "lambda_r": 0.0, "R": R, "T": 3.0}
            specs.append(_spec("simulate", model, {"name": "sector", "parameter": math.pi / 4},
                               sim, "lambda_r", FIG1_LAMBDA_R, seed, f"method3_R{R:g}"))
            specs.append(_spec("simulate", model, {"name": "center"}, sim, "lambda_r",
                               FIG1_LAMBDA_R, seed, f"center_R{R:g}"))
        return specs
    if name == "fig2":
        sim = {"half_width": 30.0 if full else 20.0, "guard_margin": 10.0 if full else 8.0,
               "n_trials": 300 if full else 150}
        model = {"lambda_s": 0.05, "lambda_r": 1.0, "R": 2.0, "T": 3.0}
        return [_spec("both", model, {"name": "sector", "parameter": math.pi / 4}, sim,
                      "lambda_r", FIG2_LAMBDA_R, seed, "method3")]
    if name == "fig3":
        sim = {"half_width": 30.0 if full else 15.0, "guard_margin": 10.0 if full else 5.0,
               "n_trials": 200 if full else 60}
        model = {"lambda_s": 1.0, "lambda_r": 1.5, "R": FIG3_R, "T": 3.0}
        specs = [_spec("simulate", model, {"name": "all"}, sim, "lambda_r", [1.5], seed, "method1")]
        for pname, axis, label in (("rss", "delta", "method2"), ("sector", "theta", "method3"),
                                   ("distance", "epsilon", "method4")):
            specs.append(_spec("simulate", model, {"name": pname, "parameter": FIG3_GRIDS[pname][0]},
                               sim, axis, FIG3_GRIDS[pname], seed, label))
        return specs
    raise ConfigError("preset", f"unknown preset {name!r}; expected fig1, fig2 or fig3")


def run_preset(name, scale="desk", seed=1, output=None, workers=1, stream=None) -> list[dict]:
    """Run every sweep of a preset into one CSV (rows tagged by ``series``)."""
    specs = preset(name, scale, seed)
    sink = CsvSink(output, stream=stream)
    rows = []
    try:
        for spec in specs:
            rows.extend(run_experiment(spec, workers, sink))
    finally:
        sink.close()
    return rows


def check_analytic_support(spec: ExperimentSpec):
    try:
        spec.analytic_inputs(spec.sweep_values[0])
    except UnsupportedPolicy as exc:
        raise ConfigError("policy.name", str(exc)) from exc
