"""Experiment orchestration: config parsing, multi-seed paired runs,
aggregation, and deterministic CSV/SVG/manifest outputs.

Within one run every policy consumes the identical arm-set stream and the
identical per-step noise draws (the noise substream is indexed by the step,
not by the chosen arm, which is distributionally the same because the noise
is arm-independent), so cross-policy comparisons are paired. Runs execute
concurrently when ``workers > 1``; outputs do not depend on the scheduling.
"""

from __future__ import annotations

import concurrent.futures
import configparser
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import algorithms
from .algorithms import Inference, Kind, PolicyConfig, ScaleMode
from .environments import BanditInstance, RegretTrace, make_instance, sample_arm_set
from .linalg import ConfidenceParams, EstimateMode
from .svgplot import LinePlot

POLICY_NAMES = ("lints", "lints_approx", "linbucb", "linbucb_approx")

_SCHEMA = {
    "experiment": {
        "name",
        "family",
        "dim",
        "n_arms",
        "horizon",
        "n_runs",
        "base_seed",
        "instance_seed",
        "theta",
        "noise_sd",
        "arm_scaling",
        "output_dir",
        "workers",
    },
    "model": {"lambda", "nu", "s_bound", "delta"},
    "policies": {"policies", "gamma", "approx_mode", "posterior_scale"},
    "sweep": {"gamma_grid"},
}

_DEFAULTS = {
    "name": "experiment",
    "instance_seed": None,
    "theta": None,
    "noise_sd": 0.5,
    "arm_scaling": "ball",
    "output_dir": "out",
    "workers": 1,
    "lambda": 1.0,
    "nu": 0.5,
    "s_bound": "auto",
    "delta": 0.05,
    "gamma": 0.6,
    "approx_mode": "cov_only",
    "posterior_scale": "auto",
    "gamma_grid": None,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; round-trips losslessly through the
    sectioned key=value config format."""

    family: str
    dim: int
    n_arms: int
    horizon: int
    n_runs: int
    base_seed: int
    policies: tuple[str, ...]
    name: str = "experiment"
    instance_seed: int | None = None
    theta: tuple[float, ...] | None = None
    noise_sd: float = 0.5
    arm_scaling: str = "ball"
    output_dir: str = "out"
    workers: int = 1
    lam: float = 1.0
    nu: float = 0.5
    s_bound: float | str = "auto"
    delta: float = 0.05
    gamma: float = 0.6
    approx_mode: str = "cov_only"
    posterior_scale: str = "auto"
    gamma_grid: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.family not in ("P1", "P2", "P3", "custom"):
            raise ValueError(f"unknown family {self.family!r}")
        for name in ("dim", "n_arms", "horizon", "n_runs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.workers < 1:
            raise ValueError("workers must be a positive integer")
        if not self.policies:
            raise ValueError("at least one policy is required")
        for p in self.policies:
            if p not in POLICY_NAMES:
                raise ValueError(f"unknown policy {p!r}; valid: {POLICY_NAMES}")
        if len(set(self.policies)) != len(self.policies):
            raise ValueError("policies must be distinct")
        if self.arm_scaling not in ("ball", "sphere"):
            raise ValueError("arm_scaling must be 'ball' or 'sphere'")
        if not (0.0 < self.gamma < 1.0):
            raise ValueError("gamma must lie in (0, 1)")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if self.approx_mode not in ("mean_and_cov", "cov_only"):
            raise ValueError("approx_mode must be 'mean_and_cov' or 'cov_only'")
        if self.posterior_scale not in ("auto", "unit", "confidence_radius"):
            raise ValueError(
                "posterior_scale must be 'auto', 'unit', or 'confidence_radius'"
            )
        if isinstance(self.s_bound, str) and self.s_bound != "auto":
            raise ValueError("s_bound must be a number or 'auto'")
        if self.family == "P3" and self.instance_seed is None:
            raise ValueError("family P3 requires instance_seed")
        if self.family == "custom" and self.theta is None:
            raise ValueError("family custom requires theta")

    def instance(self) -> BanditInstance:
        return make_instance(
            self.family,
            self.dim,
            self.n_arms,
            noise_sd=self.noise_sd,
            seed=self.instance_seed,
            theta=self.theta,
        )

    def resolved_s_bound(self) -> float:
        if self.s_bound == "auto":
            return self.instance().theta_norm
        return float(self.s_bound)

    def confidence(self) -> ConfidenceParams:
        return ConfidenceParams(
            nu=self.nu, lam=self.lam, s_bound=self.resolved_s_bound(), delta=self.delta
        )

    def _scale_mode(self, kind: Kind) -> ScaleMode:
        """Per-policy spread scaling. ``auto`` matches the reference
        experiments: the sampling policy uses the plain conjugate posterior
        (a unit Gaussian prior at ridge 1), while the quantile policy keeps
        the confidence-radius scaling whose level sensitivity it reports."""
        if self.posterior_scale == "auto":
            return ScaleMode.UNIT if kind is Kind.LINTS else ScaleMode.CONFIDENCE_RADIUS
        return ScaleMode(self.posterior_scale)

    def policy_configs(self, gamma: float | None = None) -> list[PolicyConfig]:
        g = self.gamma if gamma is None else gamma
        conf = self.confidence()
        out = []
        for name in self.policies:
            kind = Kind.LINTS if name.startswith("lints") else Kind.LINBUCB
            inference = (
                Inference.APPROXIMATE if name.endswith("_approx") else Inference.EXACT
            )
            out.append(
                PolicyConfig(
                    kind=kind,
                    inference=inference,
                    confidence=conf,
                    horizon=self.horizon,
                    gamma=g if kind is Kind.LINBUCB else None,
                    approx_mode=EstimateMode(self.approx_mode),
                    scale_mode=self._scale_mode(kind),
                    label=name,
                )
            )
        return out


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in ("dim", "n_arms", "horizon", "n_runs", "base_seed", "instance_seed", "workers"):
        return int(raw)
    if key in ("noise_sd", "lambda", "nu", "delta", "gamma"):
        return float(raw)
    if key == "s_bound":
        return raw if raw == "auto" else float(raw)
    if key == "theta":
        return tuple(float(v) for v in raw.split(","))
    if key == "gamma_grid":
        return tuple(float(v) for v in raw.split(","))
    if key == "policies":
        return tuple(p.strip() for p in raw.split(",") if p.strip())
    return raw


def load_config(path: str) -> ExperimentConfig:
    """Parse and validate a sectioned key=value config file; unknown sections
    or keys are rejected outright."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(path)
    values: dict = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ValueError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ValueError(f"unknown key {key!r} in section [{section}]")
            values[key] = _parse_value(key, parser[section][key])
    missing = {"family", "dim", "n_arms", "horizon", "n_runs", "base_seed", "policies"} - set(
        values
    )
    if missing:
        raise ValueError(f"missing required config keys: {sorted(missing)}")
    merged = {**{k: v for k, v in _DEFAULTS.items()}, **values}
    return ExperimentConfig(
        family=merged["family"],
        dim=merged["dim"],
        n_arms=merged["n_arms"],
        horizon=merged["horizon"],
        n_runs=merged["n_runs"],
        base_seed=merged["base_seed"],
        policies=tuple(merged["policies"]),
        name=merged["name"],
        instance_seed=merged["instance_seed"],
        theta=merged["theta"],
        noise_sd=merged["noise_sd"],
        arm_scaling=merged["arm_scaling"],
        output_dir=merged["output_dir"],
        workers=merged["workers"],
        lam=merged["lambda"],
        nu=merged["nu"],
        s_bound=merged["s_bound"],
        delta=merged["delta"],
        gamma=merged["gamma"],
        approx_mode=merged["approx_mode"],
        posterior_scale=merged["posterior_scale"],
        gamma_grid=merged["gamma_grid"],
    )


def _format_value(key: str, value) -> str:
    if key in ("theta", "gamma_grid"):
        return ",".join(repr(float(v)) for v in value)
    if key == "policies":
        return ", ".join(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def save_config(config: ExperimentConfig, path: str) -> None:
    """Serialize back to the sectioned format; load(save(c)) == c."""
    parser = configparser.ConfigParser()
    sections = {
        "experiment": {
            "name": config.name,
            "family": config.family,
            "dim": config.dim,
            "n_arms": config.n_arms,
            "horizon": config.horizon,
            "n_runs": config.n_runs,
            "base_seed": config.base_seed,
            "noise_sd": config.noise_sd,
            "arm_scaling": config.arm_scaling,
            "output_dir": config.output_dir,
            "workers": config.workers,
        },
        "model": {
            "lambda": config.lam,
            "nu": config.nu,
            "s_bound": config.s_bound,
            "delta": config.delta,
        },
        "policies": {
            "policies": config.policies,
            "gamma": config.gamma,
            "approx_mode": config.approx_mode,
            "posterior_scale": config.posterior_scale,
        },
    }
    if config.instance_seed is not None:
        sections["experiment"]["instance_seed"] = config.instance_seed
    if config.theta is not None:
        sections["experiment"]["theta"] = config.theta
    if config.gamma_grid is not None:
        sections["sweep"] = {"gamma_grid": config.gamma_grid}
    for name, keys in sections.items():
        parser[name] = {k: _format_value(k, v) for k, v in keys.items()}
    with open(path, "w", newline="\n") as fh:
        parser.write(fh)


# ---------------------------------------------------------------------------
# Execution


@dataclass(frozen=True)
class AggregateResult:
    """Across-run mean and standard error of the cumulative regret."""

    label: str
    mean_cumulative: np.ndarray
    stderr_cumulative: np.ndarray
    per_run_final: np.ndarray


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    labels: tuple[str, ...]
    traces: dict[str, list[RegretTrace]] = field(default_factory=dict)

    def aggregate(self, label: str) -> AggregateResult:
        runs = np.stack([t.cumulative for t in self.traces[label]])
        mean = runs.mean(axis=0)
        if runs.shape[0] > 1:
            stderr = runs.std(axis=0, ddof=1) / math.sqrt(runs.shape[0])
        else:
            stderr = np.zeros_like(mean)
        return AggregateResult(
            label=label,
            mean_cumulative=mean,
            stderr_cumulative=stderr,
            per_run_final=runs[:, -1].copy(),
        )

    def aggregates(self) -> dict[str, AggregateResult]:
        return {label: self.aggregate(label) for label in self.labels}


def _run_streams(config: ExperimentConfig, run_idx: int):
    """Arm, noise, and per-policy rngs for one run, derived from disjoint
    spawn keys so scheduling cannot perturb them."""
    arm_rng = np.random.default_rng(
        np.random.SeedSequence(entropy=config.base_seed, spawn_key=(run_idx, 0))
    )
    noise_rng = np.random.default_rng(
        np.random.SeedSequence(entropy=config.base_seed, spawn_key=(run_idx, 1))
    )
    # keyed by the fixed policy-name table, so a policy's stream does not
    # depend on which other policies share the run
    policy_rngs = [
        np.random.default_rng(
            np.random.SeedSequence(
                entropy=config.base_seed,
                spawn_key=(run_idx, 2 + POLICY_NAMES.index(name)),
            )
        )
        for name in config.policies
    ]
    return arm_rng, noise_rng, policy_rngs


def _run_single(
    config: ExperimentConfig, run_idx: int, gamma: float | None = None
) -> dict[str, RegretTrace]:
    instance = config.instance()
    policy_configs = config.policy_configs(gamma)
    arm_rng, noise_rng, policy_rngs = _run_streams(config, run_idx)

    t_max, k, d = config.horizon, config.n_arms, config.dim
    arm_sets = np.empty((t_max, k, d))
    for t in range(t_max):
        arm_sets[t] = sample_arm_set(d, k, arm_rng, config.arm_scaling)
    noise = noise_rng.standard_normal(t_max) * config.noise_sd
    theta = instance.theta_star

    out: dict[str, RegretTrace] = {}
    for pcfg, prng in zip(policy_configs, policy_rngs):
        state = algorithms.init_policy(pcfg, d)
        inst = np.zeros(t_max)
        try:
            for t in range(t_max):
                arms = arm_sets[t]
                values = arms @ theta
                idx = algorithms.select_arm(state, pcfg, arms, prng)
                inst[t] = float(np.max(values) - values[idx])
                observed = float(values[idx] + noise[t])
                state = algorithms.update(state, pcfg, arms[idx], observed)
        except Exception as exc:
            raise RuntimeError(
                f"run failed at seed={config.base_seed}+run {run_idx}, "
                f"policy={pcfg.name}, step={t + 1}: {exc}"
            ) from exc
        out[pcfg.name] = RegretTrace.from_instantaneous(inst)
    return out


def run_experiment(config: ExperimentConfig, gamma: float | None = None) -> ExperimentResult:
    """Run every configured policy on paired streams across all seeds."""
    labels = tuple(p.name for p in config.policy_configs(gamma))
    result = ExperimentResult(config=config, labels=labels, traces={l: [] for l in labels})
    if config.workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=config.workers) as pool:
            run_outputs = list(
                pool.map(_run_single, [config] * config.n_runs, range(config.n_runs), [gamma] * config.n_runs)
            )
    else:
        run_outputs = [_run_single(config, i, gamma) for i in range(config.n_runs)]
    for traces in run_outputs:
        for label in labels:
            result.traces[label].append(traces[label])
    return result


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    label: str
    mean_final: float
    stderr_final: float


def sensitivity_sweep(config: ExperimentConfig, gamma_grid) -> list[SweepRow]:
    """Re-run the quantile-selection policies across a grid of levels with
    shared streams, so the comparison across gamma is paired."""
    grid = tuple(float(g) for g in gamma_grid)
    if not grid:
        raise ValueError("gamma_grid must be non-empty")
    bucb_only = tuple(p for p in config.policies if p.startswith("linbucb"))
    if not bucb_only:
        raise ValueError("sweep requires at least one quantile-selection policy")
    sweep_config = replace(config, policies=bucb_only)
    rows: list[SweepRow] = []
    for g in grid:
        result = run_experiment(sweep_config, gamma=g)
        for label, agg in result.aggregates().items():
            finals = agg.per_run_final
            stderr = (
                float(np.std(finals, ddof=1) / math.sqrt(finals.size))
                if finals.size > 1
                else 0.0
            )
            rows.append(SweepRow(g, label, float(np.mean(finals)), stderr))
    return rows


# ---------------------------------------------------------------------------
# Outputs


def _fmt_float(x: float) -> str:
    return repr(float(x))


def check_output_dir(path: str) -> None:
    """Fail before any run starts if the output location is unusable."""
    os.makedirs(path, exist_ok=True)
    if not os.access(path, os.W_OK):
        raise PermissionError(f"output directory {path!r} is not writable")


def write_traces_csv(result: ExperimentResult, path: str) -> None:
    lines = ["step,instant_regret,cum_regret,policy,seed"]
    for label in result.labels:
        for run_idx, trace in enumerate(result.traces[label]):
            for t in range(len(trace)):
                lines.append(
                    f"{t + 1},{_fmt_float(trace.instantaneous[t])},"
                    f"{_fmt_float(trace.cumulative[t])},{label},{run_idx}"
                )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_aggregate_csv(aggregates: dict[str, AggregateResult], path: str) -> None:
    lines = ["step,mean,stderr,policy"]
    for label, agg in aggregates.items():
        for t in range(agg.mean_cumulative.shape[0]):
            lines.append(
                f"{t + 1},{_fmt_float(agg.mean_cumulative[t])},"
                f"{_fmt_float(agg.stderr_cumulative[t])},{label}"
            )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sweep_csv(rows: list[SweepRow], path: str) -> None:
    lines = ["gamma,policy,mean_final_regret,stderr_final_regret"]
    for row in rows:
        lines.append(
            f"{_fmt_float(row.gamma)},{row.label},"
            f"{_fmt_float(row.mean_final)},{_fmt_float(row.stderr_final)}"
        )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_outputs(result: ExperimentResult, output_dir: str) -> dict[str, str]:
    """Write the per-run trace CSV, the aggregate CSV, the regret plot, and a
    manifest that reproduces the run byte-for-byte."""
    check_output_dir(output_dir)
    paths = {
        "traces": os.path.join(output_dir, "traces.csv"),
        "aggregate": os.path.join(output_dir, "aggregate.csv"),
        "plot": os.path.join(output_dir, "regret.svg"),
        "manifest": os.path.join(output_dir, "manifest.cfg"),
    }
    aggregates = result.aggregates()
    write_traces_csv(result, paths["traces"])
    write_aggregate_csv(aggregates, paths["aggregate"])

    plot = LinePlot(
        title=f"mean cumulative regret ({result.config.name})",
        x_label="step",
        y_label="cumulative regret",
    )
    for label, agg in aggregates.items():
        steps = np.arange(1, agg.mean_cumulative.shape[0] + 1)
        plot.add(label, steps, agg.mean_cumulative, agg.stderr_cumulative)
    with open(paths["plot"], "w", newline="\n") as fh:
        fh.write(plot.render())

    save_config(result.config, paths["manifest"])
    return paths


def emit_sweep_outputs(
    rows: list[SweepRow], config: ExperimentConfig, output_dir: str
) -> dict[str, str]:
    check_output_dir(output_dir)
    paths = {
        "sweep": os.path.join(output_dir, "sweep.csv"),
        "plot": os.path.join(output_dir, "sweep.svg"),
        "manifest": os.path.join(output_dir, "manifest.cfg"),
    }
    write_sweep_csv(rows, paths["sweep"])
    labels = sorted({row.label for row in rows})
    plot = LinePlot(
        title="final regret by quantile level", x_label="gamma", y_label="mean final regret"
    )
    for label in labels:
        sub = [row for row in rows if row.label == label]
        plot.add(
            label,
            [row.gamma for row in sub],
            [row.mean_final for row in sub],
            [row.stderr_final for row in sub],
        )
    with open(paths["plot"], "w", newline="\n") as fh:
        fh.write(plot.render())
    save_config(config, paths["manifest"])
    return paths
