"""Command-line front end: tail tables, simulation campaigns, hitting-time
samples, and closed-form constants.

Configuration comes from flags, optionally preloaded from a TOML file
(--config); flags override file values.  All floating output is printed
with 17 significant digits so written files round-trip exactly, and rows
are emitted sorted by (seed, t) regardless of worker scheduling.

Exit codes: 0 success, 2 configuration error, 3 numeric error,
4 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import _kernels, birth_death, queues
from .engine import MaxPath, normalized_trace, replica_rng, time_grid
from .errors import (
    BracketError,
    BudgetError,
    ConvergenceError,
    CycleOverflow,
    DomainError,
    ModelError,
    NoRootError,
)

DEFAULT_MASTER_SEED = 123456789  # fixed so default runs reproduce exactly
CYCLE_CAP = 10**9


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _kernel_dist_params(dist) -> tuple[int, float, float]:
    if isinstance(dist, queues.Exponential):
        return _kernels.EXP, 1.0 / dist.rate, 0.0
    if isinstance(dist, queues.Deterministic):
        return _kernels.DET, dist.value, 0.0
    if isinstance(dist, queues.Uniform):
        return _kernels.UNI, dist.lo, dist.hi
    raise ModelError(f"no compiled kernel for distribution {type(dist).__name__}")


def build_spec(model: str, cfg: dict):
    if model not in _MODEL_PARAM_KEYS:
        raise ModelError(f"unknown model {model!r}")
    missing = [k for k in _MODEL_PARAM_KEYS[model] if cfg.get(k) is None]
    if missing:
        raise ModelError(f"model {model!r} needs parameters: {', '.join(missing)}")
    if model == "mm1":
        return queues.GiG1Spec.mm1(cfg["lam"], cfg["mu"])
    if model == "md1":
        return queues.GiG1Spec.md1(cfg["lam"], cfg["d"])
    if model == "mmm":
        return queues.MMmSpec(cfg["lam"], cfg["mu"], int(cfg["m"]))
    return birth_death.BDSpec(cfg["lam"], cfg["mu"], cfg["a"])


def _model_envelope_alpha(model: str, spec):
    if model in ("mm1", "md1"):
        return queues.gig1_envelope(spec), spec.alpha_t_closed_form()
    if model == "mmm":
        return queues.mmm_envelope(spec), queues.mmm_alpha_t(spec)
    return birth_death.bd_envelope(spec), birth_death.mean_cycle_duration(spec)


def simulate_replica(model: str, cfg: dict, index: int) -> list[tuple]:
    """All CSV rows for one replica of a simulation campaign."""
    spec = build_spec(model, cfg)
    rng = replica_rng(cfg["master_seed"], index)
    ts = time_grid(cfg["t_min"], cfg["grid_ratio"], cfg["t_max"])
    t_max = float(cfg["t_max"])
    if model in ("mm1", "md1"):
        ia = _kernel_dist_params(spec.interarrival)
        sv = _kernel_dist_params(spec.service)
        xbars, counts, n_done, sum_t, sum_m, ok = _kernels.lindley_path(
            ia[0], ia[1], ia[2], sv[0], sv[1], sv[2], ts, t_max, CYCLE_CAP, rng
        )
    elif model == "mmm":
        xbars, counts, n_done, sum_t, sum_m, ok = _kernels.mmm_path(
            spec.lam, spec.mu, spec.m, ts, t_max, CYCLE_CAP, rng
        )
    else:
        xbars, counts, n_done, sum_t, sum_m, ok = _kernels.bd_path(
            spec.lam, spec.mu, spec.a, ts, t_max, CYCLE_CAP, rng
        )
    if not ok:
        raise CycleOverflow(f"replica {index}: a cycle exceeded {CYCLE_CAP} events")
    path = MaxPath(ts=ts, xbars=xbars, xbar_uppers=xbars.copy(), n_cycles=counts, exact=True)
    env, alpha_t = _model_envelope_alpha(model, spec)
    stats = normalized_trace(path, env, alpha_t)
    rows = []
    if model == "bd":
        _, u2, u3 = birth_death.bd_direct_stats(path, spec)
        for st, xb, nc, v2, v3 in zip(stats, path.xbars, path.n_cycles, u2, u3):
            rows.append((index, st.t, float(xb), int(nc), st.s2, st.s3, float(v2), float(v3)))
    else:
        for st, xb, nc in zip(stats, path.xbars, path.n_cycles):
            rows.append((index, st.t, float(xb), int(nc), st.s2, st.s3))
    return rows


def _simulate_worker(packed):
    model, cfg, index = packed
    return simulate_replica(model, cfg, index)


def cmd_simulate(cfg: dict) -> int:
    model = cfg["model"]
    replicas = int(cfg["replicas"])
    workers = _worker_count(cfg.get("workers"), replicas)
    jobs = [(model, cfg, i) for i in range(replicas)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_replica = list(pool.map(_simulate_worker, jobs))
    else:
        per_replica = [_simulate_worker(job) for job in jobs]
    header = ["seed", "t", "xbar", "n_cycles", "s2", "s3"]
    if model == "bd":
        header += ["u2", "u3"]
    rows = [row for chunk in per_replica for row in chunk]
    _emit_rows(cfg, header, rows)
    return 0


def cmd_tail(cfg: dict) -> int:
    model = cfg["model"]
    spec = build_spec(model, cfg)
    n_from, n_to = int(cfg["n_from"]), int(cfg["n_to"])
    if not 0 <= n_from <= n_to:
        raise ModelError(f"need 0 <= n_from <= n_to, got {n_from}, {n_to}")
    rows = []
    if model == "bd":
        c = spec.a / spec.lam
        log_q = birth_death.log_cycle_max_tail_grid(spec, n_to)
        for n in range(n_from, n_to + 1):
            q = math.exp(log_q[n])
            r0 = -n * math.log(spec.rho) - c * math.log(n) if n >= 1 else math.inf
            if n >= 1:
                qa = birth_death.cycle_max_tail_asymptotic(spec, n)
                ratio = math.exp(log_q[n] - birth_death.log_cycle_max_tail_asymptotic(spec, n))
            else:
                qa, ratio = math.nan, math.nan
            rows.append((n, q, qa, ratio, r0, -log_q[n] - r0))
    elif model == "mmm":
        n_ref = max(400, n_to)
        log_q = queues.mmm_log_tail_grid(spec, n_ref)
        log_rho = math.log(spec.rho)
        log_k = log_q[n_ref] - n_ref * log_rho  # stabilized prefactor
        for n in range(n_from, n_to + 1):
            q = math.exp(log_q[n])
            log_qa = log_k + n * log_rho
            r0 = -n * log_rho
            rows.append((n, q, math.exp(log_qa), math.exp(log_q[n] - log_qa), r0, -log_q[n] - r0))
    else:
        raise ModelError(f"tail tables exist for 'bd' and 'mmm', not {model!r}")
    _emit_rows(cfg, ["n", "q_exact", "q_asymptotic", "ratio", "r0", "r1"], rows)
    return 0


def cmd_hittime(cfg: dict) -> int:
    spec = build_spec("bd", cfg)
    level = int(cfg["level"])
    replicas = int(cfg["replicas"])
    result = birth_death.hitting_time_sample(
        spec,
        level,
        replicas,
        int(cfg["master_seed"]),
        initial_state=int(cfg.get("initial_state", 0)),
        event_cap=int(cfg.get("event_cap", 500_000_000)),
    )
    rows = [
        (int(cfg["master_seed"]), i, float(result.raw[i]), float(result.scaled[i]))
        for i in range(replicas)
    ]
    _emit_rows(cfg, ["seed", "replica", "raw_time", "scaled_time"], rows)
    summary = {
        "model": "bd",
        "params": {"lam": spec.lam, "mu": spec.mu, "a": spec.a},
        "constants": {
            "level": level,
            "scale": result.scale,
            "exp_rate": result.exp_rate,
            "replicas": replicas,
        },
        "ks_distance": result.ks,
        "mean_scaled": result.mean_scaled,
    }
    path = cfg.get("summary_out")
    text = json.dumps(summary, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_constants(cfg: dict) -> int:
    model = cfg["model"]
    spec = build_spec(model, cfg)
    consts: dict[str, dict] = {}

    def put(name, value, route):
        consts[name] = {"value": value, "route": route}

    if model in ("mm1", "md1"):
        put("rho", spec.rho, "mean service / mean interarrival")
        gamma = queues.cramer_gamma(spec)
        put("gamma", gamma, "positive root of E exp(g*(service - interarrival)) = 1, bisection")
        if model == "mm1":
            put("gamma_closed_form", spec.service.rate - spec.interarrival.rate, "mu - lambda")
        else:
            x_rho = queues.md1_decay_root(spec.rho)
            put("x_rho", x_rho, "positive root of e^x = 1 + x/rho, bisection")
            put("gamma_closed_form", x_rho / spec.service.value, "x_rho / d")
        put("alpha_t", spec.alpha_t_closed_form(), "mean interarrival / (1 - rho), Poisson arrivals")
        put("x0", 0.0, "linear envelope is increasing everywhere")
    elif model == "mmm":
        put("rho", spec.rho, "lambda / (m * mu)")
        p0 = queues.mmm_p0(spec)
        put("p0", p0, "Erlang delay formula")
        put("alpha_t", queues.mmm_alpha_t(spec), "1 / (lambda * p0)")
        put("r0_slope", -math.log(spec.rho), "envelope slope -log(rho)")
        put("x0", 0.0, "linear envelope is increasing everywhere")
    else:
        put("rho", spec.rho, "lambda / mu")
        law = birth_death.stationary(spec, 0)
        put("p0", law.p0, "normalized product weights, full series")
        put("alpha_t", 1.0 / (spec.a * law.p0), "1 / (a * p0)")
        const = birth_death.tail_constant(spec)
        put("C", const.value, "extrapolated limit of n^(a/lam) * product weights")
        put("C_error_estimate", const.error, "difference of successive extrapolants")
        put("x0", -(spec.a / spec.lam) / math.log(spec.rho), "envelope monotonicity threshold")
        put("a_over_lambda", spec.a / spec.lam, "tail power exponent")
    payload = {"model": model, "params": _model_params(model, cfg), "constants": consts}
    text = json.dumps(payload, indent=2, sort_keys=True)
    out = cfg.get("out")
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


# ---------------------------------------------------------------------------
# plumbing


def _worker_count(requested, replicas: int) -> int:
    workers = int(requested) if requested else 1
    cap = os.environ.get("REGEN_THREADS")
    if cap:
        workers = min(workers, max(1, int(cap)))
    return max(1, min(workers, replicas))


def _emit_rows(cfg: dict, header: list[str], rows: list[tuple]) -> None:
    fmt = cfg.get("format", "csv")
    out = cfg.get("out")
    if fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        text = json.dumps(payload, indent=2)
        if out:
            with open(out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    finally:
        if out:
            fh.close()


_MODEL_PARAM_KEYS = {
    "mm1": ("lam", "mu"),
    "md1": ("lam", "d"),
    "mmm": ("lam", "mu", "m"),
    "bd": ("lam", "mu", "a"),
}


def _model_params(model: str, cfg: dict) -> dict:
    return {k: cfg[k] for k in _MODEL_PARAM_KEYS[model]}


def _load_config_file(path: str) -> dict:
    try:
        import tomllib  # py311+
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


_REQUIRED = {
    "simulate": ("model", "t_max"),
    "tail": ("model",),
    "hittime": ("level",),
    "constants": ("model",),
}


def _merge_config(args: argparse.Namespace, command: str, defaults: dict) -> dict:
    file_cfg = _load_config_file(args.config) if getattr(args, "config", None) else {}
    cfg = dict(defaults)
    cfg.update(file_cfg)
    for key, val in vars(args).items():
        if key in ("config", "command"):
            continue
        if val is not None:
            cfg[key] = val
    missing = [k for k in _REQUIRED[command] if cfg.get(k) is None]
    if missing:
        raise ModelError(f"missing required settings: {', '.join(sorted(missing))}")
    return cfg


def _add_model_flags(p: argparse.ArgumentParser, models: tuple[str, ...]) -> None:
    p.add_argument("--model", choices=models, required=False)
    p.add_argument("--lam", type=float, help="arrival / per-capita birth rate")
    p.add_argument("--mu", type=float, help="service / per-capita death rate")
    p.add_argument("--d", type=float, help="deterministic service time (md1)")
    p.add_argument("--m", type=int, help="server count (mmm)")
    p.add_argument("--a", type=float, help="immigration rate (bd)")
    p.add_argument("--config", help="TOML file with defaults; flags override")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regenmax",
        description="Running-maximum statistics of regenerative queueing and birth-death models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="checkpointed running-maximum campaigns")
    _add_model_flags(p, ("mm1", "md1", "mmm", "bd"))
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--t-min", dest="t_min", type=float)
    p.add_argument("--grid-ratio", dest="grid_ratio", type=float)
    p.add_argument("--replicas", type=int)
    p.add_argument("--master-seed", dest="master_seed", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("tail", help="exact vs asymptotic cycle-maximum tails")
    _add_model_flags(p, ("bd", "mmm"))
    p.add_argument("--n-from", dest="n_from", type=int)
    p.add_argument("--n-to", dest="n_to", type=int)

    p = sub.add_parser("hittime", help="scaled first-passage samples (bd)")
    _add_model_flags(p, ("bd",))
    p.add_argument("--level", type=int, help="target state")
    p.add_argument("--replicas", type=int)
    p.add_argument("--master-seed", dest="master_seed", type=int)
    p.add_argument("--initial-state", dest="initial_state", type=int)
    p.add_argument("--event-cap", dest="event_cap", type=int)
    p.add_argument("--summary-out", dest="summary_out")

    p = sub.add_parser("constants", help="closed-form constants with provenance")
    _add_model_flags(p, ("mm1", "md1", "mmm", "bd"))
    return parser


_DEFAULTS = {
    "simulate": {
        "model": None,
        "lam": None,
        "mu": 1.0,
        "d": 1.0,
        "m": 1,
        "a": None,
        "t_max": None,
        "t_min": 100.0,
        "grid_ratio": 1.05,
        "replicas": 1,
        "master_seed": DEFAULT_MASTER_SEED,
        "workers": 1,
        "format": "csv",
        "out": None,
    },
    "tail": {
        "model": None,
        "lam": None,
        "mu": 1.0,
        "d": 1.0,
        "m": 1,
        "a": None,
        "n_from": 0,
        "n_to": 200,
        "format": "csv",
        "out": None,
    },
    "hittime": {
        "model": "bd",
        "lam": None,
        "mu": 1.0,
        "d": 1.0,
        "m": 1,
        "a": None,
        "level": None,
        "replicas": 2000,
        "master_seed": DEFAULT_MASTER_SEED,
        "initial_state": 0,
        "event_cap": 500_000_000,
        "summary_out": None,
        "format": "csv",
        "out": None,
    },
    "constants": {
        "model": None,
        "lam": None,
        "mu": 1.0,
        "d": 1.0,
        "m": 1,
        "a": None,
        "format": "json",
        "out": None,
    },
}

_COMMANDS = {
    "simulate": cmd_simulate,
    "tail": cmd_tail,
    "hittime": cmd_hittime,
    "constants": cmd_constants,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args, args.command, _DEFAULTS[args.command])
        _validate_common(args.command, cfg)
        return _COMMANDS[args.command](cfg)
    except (NoRootError, ConvergenceError, DomainError, BracketError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except (BudgetError, CycleOverflow) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 4
    except (ModelError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


def _validate_common(command: str, cfg: dict) -> None:
    if command == "simulate":
        if not cfg["grid_ratio"] > 1.0:
            raise ModelError("grid ratio must exceed 1")
        if int(cfg["replicas"]) < 1:
            raise ModelError("replicas must be >= 1")
        if not 0 < cfg["t_min"] <= cfg["t_max"]:
            raise ModelError("need 0 < t_min <= t_max")
        if cfg["t_min"] <= math.exp(math.e):
            raise ModelError("t_min must exceed e^e for the triple-log scale")
    if command == "hittime" and int(cfg["replicas"]) < 1:
        raise ModelError("replicas must be >= 1")


if __name__ == "__main__":
    sys.exit(main())
