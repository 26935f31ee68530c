"""Command-line front end: simulate, ensemble, grr, compare, sweep.

Every run is described by a RunSpec that can round-trip through a flat
INI config file; command-line flags override config values.  Output is
CSV (or a JSON mirror of the same rows) with shortest-round-trip float
formatting, so identical runs produce byte-identical files.

Exit codes: 0 success, 2 validation failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import functools
import io
import json
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import ModelDefinition, Population, run_simulation
from .ensemble import EnsembleConfig, Trajectory, run_ensemble
from .gol import GolParams, build_gol_model, uniform_random_init
from .grr import (
    ExpectedCounts,
    ProbeStepper,
    counts_from_population,
    gol_closed_form_stepper,
    grr_trajectory,
    rib_closed_form_stepper,
    trajectory_array,
)
from .rib import Genotype, RibParams, build_rib_model_from_params, rib_params, uniform_rib_init
from .rng import DEFAULT_SEED, RandomStream

__all__ = [
    "RunSpec",
    "spec_to_config",
    "spec_from_config",
    "cmd_simulate",
    "cmd_ensemble",
    "cmd_grr",
    "cmd_compare",
    "cmd_sweep",
    "build_parser",
    "main",
    "EXIT_OK",
    "EXIT_VALIDATION",
    "EXIT_IO",
]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3

# Stream key for the probe estimator's internal simulation; far above
# any replicate index so the two never share a child stream.
_GRR_SPLIT_KEY = 1 << 48

_RIB_FIELDS = tuple(f.name for f in dataclasses.fields(RibParams))
_RIB_INT_FIELDS = ("width", "height")
_GOL_SWEEPABLE = {"w", "l_surv", "u_surv", "l_rep", "u_rep", "n0"}
_RIB_SWEEPABLE = set(_RIB_FIELDS) | {"n0", "shh_log"}


@dataclass(frozen=True)
class RunSpec:
    """One run's full configuration; round-trips through the config file."""

    model: str = "gol"
    seed: int = DEFAULT_SEED
    out: Optional[str] = None
    fmt: str = "csv"
    workers: int = 1
    # gol parameters
    w: int = 20
    l_surv: int = 2
    u_surv: int = 8
    l_rep: int = 2
    u_rep: int = 4
    # rib parameters
    genotype: str = "normal"
    rib_overrides: tuple = ()  # sorted (field, value) pairs
    # initial population
    n0: int = 500
    n0_per_square: Optional[float] = None
    # ensemble
    replicates: int = 100
    horizon: int = 50
    # grr
    estimator: str = "closed"
    mode: str = "binomial"
    samples: int = 10000
    # simulate
    dump_every: int = 1
    # sweep
    sweep_param: Optional[str] = None
    sweep_values: tuple = ()

    def validate(self) -> "RunSpec":
        if self.model not in ("gol", "rib"):
            raise ValueError("model must be 'gol' or 'rib'")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")
        if self.estimator not in ("closed", "probe"):
            raise ValueError("estimator must be 'closed' or 'probe'")
        if self.mode not in ("binomial", "poisson"):
            raise ValueError("mode must be 'binomial' or 'poisson'")
        if self.n0 < 1:
            raise ValueError("n0 must be at least 1")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.dump_every < 0:
            raise ValueError("dump_every must be non-negative")
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        unknown = {k for k, _ in self.rib_overrides} - set(_RIB_FIELDS)
        if unknown:
            raise ValueError(f"unknown rib parameter(s): {sorted(unknown)}")
        return self


def spec_to_config(spec: RunSpec) -> str:
    """Serialize to INI text; floats keep shortest-round-trip precision."""
    cp = configparser.ConfigParser()
    cp["run"] = {
        "model": spec.model,
        "seed": str(spec.seed),
        "format": spec.fmt,
        "workers": str(spec.workers),
    }
    if spec.out is not None:
        cp["run"]["out"] = spec.out
    cp["gol"] = {k: str(getattr(spec, k)) for k in ("w", "l_surv", "u_surv", "l_rep", "u_rep")}
    cp["rib"] = {"genotype": spec.genotype}
    for name, value in spec.rib_overrides:
        cp["rib"][name] = repr(int(value)) if name in _RIB_INT_FIELDS else repr(float(value))
    cp["init"] = {"n0": str(spec.n0)}
    if spec.n0_per_square is not None:
        cp["init"]["n0_per_square"] = repr(float(spec.n0_per_square))
    cp["ensemble"] = {"replicates": str(spec.replicates), "horizon": str(spec.horizon)}
    cp["grr"] = {"estimator": spec.estimator, "mode": spec.mode, "samples": str(spec.samples)}
    cp["simulate"] = {"dump_every": str(spec.dump_every)}
    if spec.sweep_param is not None:
        cp["sweep"] = {
            "param": spec.sweep_param,
            "values": ",".join(repr(float(v)) for v in spec.sweep_values),
        }
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def spec_from_config(text: str, base: Optional[RunSpec] = None) -> RunSpec:
    """Parse INI text, overlaying values onto `base` (default RunSpec())."""
    spec = base if base is not None else RunSpec()
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValueError(f"bad config file: {exc}") from exc
    updates: dict = {}
    try:
        if cp.has_section("run"):
            sec = cp["run"]
            if "model" in sec:
                updates["model"] = sec["model"]
            if "seed" in sec:
                updates["seed"] = sec.getint("seed")
            if "format" in sec:
                updates["fmt"] = sec["format"]
            if "workers" in sec:
                updates["workers"] = sec.getint("workers")
            if "out" in sec:
                updates["out"] = sec["out"]
        if cp.has_section("gol"):
            sec = cp["gol"]
            for k in ("w", "l_surv", "u_surv", "l_rep", "u_rep"):
                if k in sec:
                    updates[k] = sec.getint(k)
        if cp.has_section("rib"):
            sec = cp["rib"]
            overrides = dict(spec.rib_overrides)
            for k in sec:
                if k == "genotype":
                    updates["genotype"] = sec[k]
                else:
                    overrides[k] = sec.getint(k) if k in _RIB_INT_FIELDS else sec.getfloat(k)
            if overrides:
                updates["rib_overrides"] = tuple(sorted(overrides.items()))
        if cp.has_section("init"):
            sec = cp["init"]
            if "n0" in sec:
                updates["n0"] = sec.getint("n0")
            if "n0_per_square" in sec:
                updates["n0_per_square"] = sec.getfloat("n0_per_square")
        if cp.has_section("ensemble"):
            sec = cp["ensemble"]
            if "replicates" in sec:
                updates["replicates"] = sec.getint("replicates")
            if "horizon" in sec:
                updates["horizon"] = sec.getint("horizon")
        if cp.has_section("grr"):
            sec = cp["grr"]
            for k in ("estimator", "mode"):
                if k in sec:
                    updates[k] = sec[k]
            if "samples" in sec:
                updates["samples"] = sec.getint("samples")
        if cp.has_section("simulate") and "dump_every" in cp["simulate"]:
            updates["dump_every"] = cp["simulate"].getint("dump_every")
        if cp.has_section("sweep"):
            sec = cp["sweep"]
            if "param" in sec:
                updates["sweep_param"] = sec["param"]
            if "values" in sec:
                updates["sweep_values"] = tuple(float(v) for v in sec["values"].split(",") if v.strip())
    except ValueError as exc:
        raise ValueError(f"bad config value: {exc}") from exc
    return dataclasses.replace(spec, **updates)


def _effective_n0(spec: RunSpec, area: float) -> int:
    if spec.n0_per_square is None:
        return spec.n0
    n0 = int(round(spec.n0_per_square * area))
    if n0 < 1:
        raise ValueError("n0_per_square yields an empty initial population")
    return n0


def build_model_and_init(spec: RunSpec):
    """(model, init callable, effective n0) for the selected model."""
    if spec.model == "gol":
        params = GolParams(spec.w, spec.l_surv, spec.u_surv, spec.l_rep, spec.u_rep)
        model = build_gol_model(params)
        n0 = _effective_n0(spec, model.environment.area)
        return model, functools.partial(uniform_random_init, n0), n0
    try:
        genotype = Genotype(spec.genotype)
    except ValueError:
        raise ValueError(f"unknown genotype {spec.genotype!r}") from None
    params = rib_params(genotype, **dict(spec.rib_overrides))
    model = build_rib_model_from_params(params, name=f"rib({genotype.value})")
    n0 = _effective_n0(spec, model.environment.area)
    return model, functools.partial(uniform_rib_init, n0), n0


def _model_params(spec: RunSpec):
    if spec.model == "gol":
        return GolParams(spec.w, spec.l_surv, spec.u_surv, spec.l_rep, spec.u_rep)
    return rib_params(Genotype(spec.genotype), **dict(spec.rib_overrides))


def _grr_counts(model: ModelDefinition, spec: RunSpec, n0: int):
    """Closed-form or probe-based expected-count trajectory, (T, S) array."""
    if spec.estimator == "closed":
        params = _model_params(spec)
        if spec.model == "gol":
            initial = ExpectedCounts(np.array([0.0, float(n0)]))
            stepper = gol_closed_form_stepper(params, spec.mode)
        else:
            initial = ExpectedCounts(np.array([float(n0), 0.0, 0.0, 0.0]))
            stepper = rib_closed_form_stepper(params)
    else:
        stream = RandomStream(spec.seed).split(_GRR_SPLIT_KEY)
        _, init, _ = build_model_and_init(spec)
        population = init(model, stream)
        initial = counts_from_population(population, model)
        stepper = ProbeStepper(model, population, stream, spec.samples)
    return trajectory_array(grr_trajectory(initial, stepper, max(spec.horizon, 1)))[: spec.horizon + 1]


def _write_rows(spec: RunSpec, header: tuple, rows: list) -> None:
    if spec.fmt == "json":
        text = json.dumps([dict(zip(header, row)) for row in rows], indent=1) + "\n"
    else:
        lines = [",".join(header)]
        lines.extend(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    if spec.out is None:
        sys.stdout.write(text)
    else:
        with open(spec.out, "w") as fh:
            fh.write(text)


def cmd_simulate(spec: RunSpec) -> int:
    """Single run; agent-level rows for the dumped steps."""
    model, init, _ = build_model_and_init(spec)
    stream = RandomStream(spec.seed)
    labels = model.state_labels
    rows = []
    for t, population in enumerate(run_simulation(init(model, stream), model, stream, spec.horizon)):
        dump = (t == spec.horizon) if spec.dump_every == 0 else (t % spec.dump_every == 0)
        if not dump:
            continue
        for i in range(len(population)):
            rows.append(
                (t, i, labels[population.states[i]], float(population.xy[i, 0]), float(population.xy[i, 1]))
            )
    _write_rows(spec, ("t", "agent_id", "state", "x", "y"), rows)
    return EXIT_OK


def _ensemble_trajectory(spec: RunSpec) -> Trajectory:
    model, init, _ = build_model_and_init(spec)
    config = EnsembleConfig(
        replicates=spec.replicates,
        horizon=max(spec.horizon, 1),
        master_seed=spec.seed,
        workers=spec.workers,
    )
    return run_ensemble(model, init, config)


def cmd_ensemble(spec: RunSpec) -> int:
    """Replicate means and sample standard deviations per state and step."""
    traj = _ensemble_trajectory(spec)
    rows = []
    for ti, t in enumerate(traj.times[: spec.horizon + 1]):
        for s, label in enumerate(traj.state_labels):
            rows.append((int(t), label, float(traj.mean[ti, s]), float(traj.std[ti, s]), traj.replicates))
    _write_rows(spec, ("t", "state", "sim_mean", "sim_std_sample", "replicates"), rows)
    return EXIT_OK


def cmd_grr(spec: RunSpec) -> int:
    """Expected-count trajectory from the recurrence estimator alone."""
    model, _, n0 = build_model_and_init(spec)
    estimates = _grr_counts(model, spec, n0)
    rows = []
    for t in range(estimates.shape[0]):
        for s, label in enumerate(model.state_labels):
            rows.append((t, label, float(estimates[t, s])))
    _write_rows(spec, ("t", "state", "grr_estimate"), rows)
    return EXIT_OK


def _compare_rows(spec: RunSpec) -> list:
    model, _, n0 = build_model_and_init(spec)
    traj = _ensemble_trajectory(spec)
    estimates = _grr_counts(model, spec, n0)
    rows = []
    for t in range(min(spec.horizon + 1, estimates.shape[0])):
        for s, label in enumerate(model.state_labels):
            sim_mean = float(traj.mean[t, s])
            est = float(estimates[t, s])
            abs_err = abs(est - sim_mean)
            rows.append(
                (
                    t,
                    label,
                    sim_mean,
                    float(traj.std[t, s]),
                    est,
                    abs_err,
                    abs_err / max(sim_mean, 1.0),
                )
            )
    return rows


_COMPARE_HEADER = ("t", "state", "sim_mean", "sim_std", "grr_estimate", "abs_err", "rel_err")


def cmd_compare(spec: RunSpec) -> int:
    """Ensemble means next to recurrence estimates, with error columns."""
    _write_rows(spec, _COMPARE_HEADER, _compare_rows(spec))
    return EXIT_OK


def _as_int(value: float, param: str) -> int:
    if float(value) != int(value):
        raise ValueError(f"swept parameter {param!r} takes integer values")
    return int(value)


def apply_sweep_value(spec: RunSpec, param: str, value: float) -> RunSpec:
    """One sweep block's RunSpec; rejects parameters the model lacks."""
    if spec.model == "gol":
        if param not in _GOL_SWEEPABLE:
            raise ValueError(f"unknown gol sweep parameter {param!r}")
        return dataclasses.replace(spec, **{param: _as_int(value, param)})
    if param not in _RIB_SWEEPABLE:
        raise ValueError(f"unknown rib sweep parameter {param!r}")
    if param == "n0":
        return dataclasses.replace(spec, n0=_as_int(value, param))
    name = "shh_log_intensity" if param == "shh_log" else param
    overrides = dict(spec.rib_overrides)
    overrides[name] = _as_int(value, name) if name in _RIB_INT_FIELDS else float(value)
    return dataclasses.replace(spec, rib_overrides=tuple(sorted(overrides.items())))


def cmd_sweep(spec: RunSpec) -> int:
    """One comparison block per swept value, keyed by a sweep_value column."""
    if spec.sweep_param is None or not spec.sweep_values:
        raise ValueError("sweep requires a parameter name and a value list")
    rows = []
    for value in spec.sweep_values:
        block_spec = apply_sweep_value(spec, spec.sweep_param, value)
        for row in _compare_rows(block_spec):
            rows.append((float(value),) + row)
    _write_rows(spec, ("sweep_value",) + _COMPARE_HEADER, rows)
    return EXIT_OK


_COMMANDS: dict = {
    "simulate": cmd_simulate,
    "ensemble": cmd_ensemble,
    "grr": cmd_grr,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grrsim",
        description="Agent-based birth/death simulations and recurrence estimates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "run one simulation and dump agent-level snapshots",
        "ensemble": "run seeded replicates and write mean/std trajectories",
        "grr": "iterate a recurrence estimator without simulating",
        "compare": "ensemble and estimator side by side with error columns",
        "sweep": "comparison blocks over a list of parameter values",
    }
    for name in _COMMANDS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED})")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--config", help="INI config file; flags override it")
        sp.add_argument("--workers", type=int, help="parallel replicate workers")
        sp.add_argument("--format", choices=("csv", "json"), help="output format")
        sp.add_argument("--model", choices=("gol", "rib"))
        sp.add_argument("--w", type=int, help="gol environment width")
        sp.add_argument("--lsurv", type=int, help="gol survival band lower bound")
        sp.add_argument("--usurv", type=int, help="gol survival band upper bound")
        sp.add_argument("--lrep", type=int, help="gol reproduction band lower bound")
        sp.add_argument("--urep", type=int, help="gol reproduction band upper bound")
        sp.add_argument("--genotype", choices=[g.value for g in Genotype])
        sp.add_argument("--shh-log", type=float, help="rib gradient log10 amplitude")
        sp.add_argument("--n0", type=int, help="initial population size")
        sp.add_argument("--n0-per-square", type=float, help="initial density per unit square")
        sp.add_argument("--replicates", type=int)
        sp.add_argument("--horizon", type=int, help="number of steps")
        sp.add_argument("--estimator", choices=("closed", "probe"))
        sp.add_argument("--mode", choices=("binomial", "poisson"), help="neighbor-count law")
        sp.add_argument("--samples", type=int, help="probe samples per state")
        if name == "simulate":
            sp.add_argument("--dump-every", type=int, help="dump period; 0 = final step only")
        if name == "sweep":
            sp.add_argument("--param", help="parameter to sweep")
            sp.add_argument("--values", help="comma-separated sweep values")
    return parser


_ARG_FIELDS = (
    ("seed", "seed"),
    ("out", "out"),
    ("workers", "workers"),
    ("format", "fmt"),
    ("model", "model"),
    ("w", "w"),
    ("lsurv", "l_surv"),
    ("usurv", "u_surv"),
    ("lrep", "l_rep"),
    ("urep", "u_rep"),
    ("genotype", "genotype"),
    ("n0", "n0"),
    ("n0_per_square", "n0_per_square"),
    ("replicates", "replicates"),
    ("horizon", "horizon"),
    ("estimator", "estimator"),
    ("mode", "mode"),
    ("samples", "samples"),
    ("dump_every", "dump_every"),
)


def spec_from_args(args: argparse.Namespace) -> RunSpec:
    spec = RunSpec()
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError:
            raise
        spec = spec_from_config(text, base=spec)
    updates: dict = {}
    for arg_name, field_name in _ARG_FIELDS:
        value = getattr(args, arg_name, None)
        if value is not None:
            updates[field_name] = value
    if getattr(args, "shh_log", None) is not None:
        overrides = dict(spec.rib_overrides)
        overrides["shh_log_intensity"] = args.shh_log
        updates["rib_overrides"] = tuple(sorted(overrides.items()))
    if getattr(args, "param", None) is not None:
        updates["sweep_param"] = args.param
    if getattr(args, "values", None) is not None:
        try:
            updates["sweep_values"] = tuple(float(v) for v in args.values.split(",") if v.strip())
        except ValueError:
            raise ValueError(f"bad sweep values {args.values!r}")
    return dataclasses.replace(spec, **updates).validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = spec_from_args(args)
        return _COMMANDS[args.command](spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
