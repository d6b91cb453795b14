"""Command-line front end.

Exit status: 0 on success, 1 when a checked inequality fails or a payload is
corrupt, 2 on configuration or budget errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import codec
from .bounds import dictionary_chain, verify_theorem2
from .empirical import empirical_distribution, plug_in_entropy
from .errors import ConfigError, DecodeError, ResourceError
from .exact import DEFAULT_BUDGET
from .experiments import (
    ETA_GRID,
    RegimeReport,
    RegimeSchedule,
    max_n_from_env,
    run_barron_check,
    run_regime,
    run_variational,
    write_csv,
)
from .models import from_json, model_id, read_sample, sample, write_sample

_MISSING = object()


def _get(d, key, path, kind=None, default=_MISSING):
    if not isinstance(d, dict):
        raise ConfigError("expected an object", path)
    if key not in d:
        if default is _MISSING:
            raise ConfigError("missing required field", f"{path}.{key}" if path else key)
        return default
    v = d[key]
    where = f"{path}.{key}" if path else key
    if kind is int and (isinstance(v, bool) or not isinstance(v, int)):
        raise ConfigError(f"expected an integer, got {v!r}", where)
    if kind is float and (isinstance(v, bool) or not isinstance(v, (int, float))):
        raise ConfigError(f"expected a number, got {v!r}", where)
    if kind is list and not isinstance(v, list):
        raise ConfigError(f"expected a list, got {v!r}", where)
    if kind is str and not isinstance(v, str):
        raise ConfigError(f"expected a string, got {v!r}", where)
    return float(v) if kind is float else v


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", str(path)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", str(path)) from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object", str(path))
    return cfg


def _schedule(cfg):
    s = _get(cfg, "schedule", "")
    try:
        return RegimeSchedule(
            _get(s, "k_min", "schedule", int),
            _get(s, "k_max", "schedule", int),
            _get(s, "rule", "schedule", str),
            _get(s, "epsilon", "schedule", float),
            _get(s, "code_trials", "schedule", int, 64),
        )
    except ConfigError as exc:
        if exc.path.startswith("schedule"):
            raise
        raise ConfigError(exc.message, f"schedule.{exc.path}") from None


def _budget(cfg):
    b = _get(cfg, "budget", "", dict, {}) if "budget" in cfg else {}
    max_n = _get(b, "max_n", "budget", int, max_n_from_env())
    enum = _get(b, "enumeration", "budget", int, DEFAULT_BUDGET)
    return min(max_n, max_n_from_env()), enum


def _output(cfg, args):
    out = args.out or _get(cfg, "output", "", str)
    return Path(out)


def _common(cfg, args):
    model = from_json(_get(cfg, "model", ""))
    trials = _get(cfg, "trials", "", int, 32)
    seed = _get(cfg, "seed", "", int, 0)
    workers = args.workers if args.workers is not None else _get(cfg, "workers", "", int, 1)
    return model, trials, seed, workers


# -- subcommands ------------------------------------------------------------------

def cmd_simulate(args):
    cfg = _load_config(args.model)
    raw = cfg.get("model", cfg)
    model = from_json(raw)
    n = args.n if args.n is not None else _get(cfg, "n", "", int)
    seed = args.seed if args.seed is not None else _get(cfg, "seed", "", int, 0)
    if model.alphabet_size > 256:
        raise ConfigError("raw sample files need an alphabet of at most 256 symbols", "model")
    x = sample(model, n, seed)
    write_sample(args.out, x.symbols)
    print(f"wrote {n} symbols of {model_id(model)} (seed {seed}) to {args.out}")
    return 0


def _relabel(raw, alphabet_size):
    if alphabet_size is not None:
        if raw.size and raw.max() >= alphabet_size:
            raise ConfigError(f"file holds symbol {raw.max()} >= alphabet size {alphabet_size}", "--alphabet-size")
        return raw, alphabet_size
    symbols, x = np.unique(raw, return_inverse=True)
    return x.ravel(), max(2, symbols.size)


def cmd_estimate(args):
    raw = read_sample(args.sample)
    if raw.size < args.k:
        raise ConfigError(f"k={args.k} exceeds the sample length {raw.size}", "--k")
    x, size = _relabel(raw, args.alphabet_size)
    d = empirical_distribution(x, args.k, size)
    h = plug_in_entropy(d)
    bound = codec.code_length_bound(x, args.k, size)
    print(f"H={h!r} D={d.distinct} K={bound.bound_bits!r}")
    if args.csv:
        write_csv(args.csv, [{"k": args.k, "n": int(x.size), "alphabet_size": size, "H": h, "D": d.distinct,
                              "K_bound": bound.bound_bits}], ["k", "n", "alphabet_size", "H", "D", "K_bound"])
    if args.blocks_csv:
        d.to_csv(args.blocks_csv)
    return 0


def cmd_encode(args):
    x = read_sample(args.input)
    if x.size == 0:
        raise ConfigError("cannot encode an empty file", "input")
    size = args.alphabet_size or max(2, int(x.max()) + 1)
    k = args.k or codec.min_code_length(x, size, k_max=args.k_max).k
    if k > x.size:
        raise ConfigError(f"k={k} exceeds the sample length {x.size}", "--k")
    s = codec.encode(x, k, size)
    Path(args.output).write_bytes(codec.to_container(s))
    bound = codec.code_length_bound(x, k, size).bound_bits
    print(f"k={k} n={s.n} measured_bits={s.measured_bits} K={bound!r}")
    if args.csv:
        write_csv(args.csv, [{"k": k, "n": s.n, "alphabet_size": size, "measured_bits": s.measured_bits,
                              "K_bound": bound, "within_bound": s.measured_bits <= bound}],
                  ["k", "n", "alphabet_size", "measured_bits", "K_bound", "within_bound"])
    return 0


def cmd_decode(args):
    s = codec.from_container(Path(args.input).read_bytes())
    if s.alphabet_size > 256:
        raise ConfigError("raw sample files need an alphabet of at most 256 symbols", "input")
    x = codec.decode(s)
    write_sample(args.output, x)
    print(f"decoded {s.n} symbols (k={s.k}) to {args.output}")
    return 0


def cmd_regimes(args):
    cfg = _load_config(args.config)
    model, trials, seed, workers = _common(cfg, args)
    schedule = _schedule(cfg)
    max_n, _ = _budget(cfg)
    eta_grid = tuple(_get(cfg, "eta_grid", "", list, list(ETA_GRID)))
    h = _get(cfg, "h", "", float, None)
    exp_id = _get(cfg, "experiment_id", "", str, "regimes")
    report = run_regime(model, schedule, trials, seed, workers=workers, max_n=max_n, eta_grid=eta_grid,
                        experiment_id=exp_id, h=h)
    out = _output(cfg, args)
    write_csv(out, [r.to_row() for r in report.records], RegimeReport.RECORD_COLUMNS)
    summary_path = Path(_get(cfg, "summary_output", "", str, str(out.with_name(out.stem + "_summary.csv"))))
    write_csv(summary_path, report.summary, report.summary_columns())
    for row in report.summary:
        print(f"k={row['k']:>3} n={row['n']:>10} mean={row['mean']:.5f} se={row['se']:.5f} "
              f"as_bound_all={row['as_bound_all']}")
    if report.skipped:
        print(f"skipped k={report.skipped} (n above {max_n})")
    ok = report.as_bound_all
    tol = _get(cfg, "tolerance", "", dict, {})
    if "final_mean_abs_error" in tol:
        limit = _get(tol, "final_mean_abs_error", "tolerance", float)
        last = report.summary[-1]
        err = abs(last["mean"] - last["h"])
        print(f"final |mean - h| = {err:.5f} (tolerance {limit})")
        ok = ok and err <= limit
    return 0 if ok else 1


def cmd_barron(args):
    cfg = _load_config(args.config)
    model, trials, seed, workers = _common(cfg, args)
    report = run_barron_check(model, _get(cfg, "k", "", int), _get(cfg, "n", "", int),
                              _get(cfg, "m_grid", "", list, [1, 2, 4, 8]), _get(cfg, "trials", "", int, 10_000),
                              seed, workers=workers, experiment_id=_get(cfg, "experiment_id", "", str, "barron"))
    out = _output(cfg, args)
    write_csv(out, report.summary, ["k", "n", "m", "trials", "frequency", "se", "bound", "pass"])
    if "trials_output" in cfg:
        write_csv(_get(cfg, "trials_output", "", str), report.rows, list(report.rows[0]))
    for row in report.summary:
        print(f"m={row['m']:<4} freq={row['frequency']:.5f} bound={row['bound']:.5f} pass={row['pass']}")
    return 0 if report.passed else 1


def cmd_variational(args):
    cfg = _load_config(args.config)
    model, trials, seed, workers = _common(cfg, args)
    max_n, enum = _budget(cfg)
    report = run_variational(model, _schedule(cfg), trials, seed, workers=workers, max_n=max_n, budget=enum,
                             h=_get(cfg, "h", "", float, None),
                             experiment_id=_get(cfg, "experiment_id", "", str, "variational"))
    out = _output(cfg, args)
    write_csv(out, report.rows, ["experiment_id", "model_id", "k", "n", "trial", "trial_seed", "distance"])
    write_csv(out.with_name(out.stem + "_summary.csv"), report.summary, ["k", "n", "trials", "median", "mean", "skipped"])
    for row in report.summary:
        if not row["skipped"]:
            print(f"k={row['k']:>3} n={row['n']:>10} median distance={row['median']:.5f}")
    return 0


def cmd_theorem2(args):
    cfg = _load_config(args.config)
    models = [from_json(m, f"models[{i}]") for i, m in enumerate(_get(cfg, "models", "", list))]
    n_max = _get(cfg, "n_max", "", int, 16)
    m_grid = _get(cfg, "m_grid", "", list, [1, 2, 4, 8])
    base = _get(cfg, "base", "", float, 2.0)
    seed = _get(cfg, "seed", "", int, 0)
    _, enum = _budget(cfg)
    chain_trials = _get(cfg, "chain_trials", "", int, 0)
    rows, violations = [], 0
    for model in models:
        mid = model_id(model)
        for k in range(1, n_max + 1):
            for p in range(1, n_max // k + 1):
                for r in verify_theorem2(model, k, p, m_grid, base, enum):
                    violations += not r.holds
                    rows.append({"kind": "theorem2", "model_id": mid, "k": r.k, "p": r.p, "n": r.n, "m": r.m,
                                 "lhs": r.lhs, "rhs": r.rhs, "slack": r.slack, "holds": r.holds, "seed_base": seed})
                if chain_trials:
                    for c in dictionary_chain(model, k, p * k, m_grid, chain_trials, seed, base, enum):
                        violations += not c.holds
                        rows.append({"kind": "chain", "model_id": mid, "k": k, "p": p, "n": p * k, "m": c.m,
                                     "lhs": c.scaled_dictionary, "rhs": c.rhs, "slack": c.rhs - c.scaled_dictionary,
                                     "holds": c.holds, "seed_base": seed})
    out = _output(cfg, args)
    write_csv(out, rows, ["kind", "model_id", "k", "p", "n", "m", "lhs", "rhs", "slack", "holds", "seed_base"])
    checked = len(rows)
    worst = min(rows, key=lambda r: r["slack"]) if rows else None
    print(f"{checked} inequalities checked across {len(models)} models, {violations} violations")
    if worst:
        print(f"smallest slack {worst['slack']:.6g} ({worst['kind']}, {worst['model_id']}, k={worst['k']}, "
              f"n={worst['n']}, m={worst['m']:g})")
    return 0 if violations == 0 else 1


def build_parser():
    p = argparse.ArgumentParser(prog="blockentropy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="draw a sample file from a model JSON")
    s.add_argument("model", help="model JSON, or an object with 'model', 'n', 'seed'")
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("estimate", help="plug-in entropy, distinct blocks and K bound of a sample file")
    s.add_argument("sample")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--alphabet-size", type=int, help="default: number of distinct symbols in the file")
    s.add_argument("--csv")
    s.add_argument("--blocks-csv", help="write the empirical block counts here")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("encode", help="compress a sample file into a KBC1 container")
    s.add_argument("input")
    s.add_argument("output")
    s.add_argument("--k", type=int, help="default: argmin of the K bound")
    s.add_argument("--k-max", type=int, default=8, help="search cap when --k is not given")
    s.add_argument("--alphabet-size", type=int, help="default: largest symbol + 1")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("decode", help="restore a sample file from a KBC1 container")
    s.add_argument("input")
    s.add_argument("output")
    s.set_defaults(func=cmd_decode)

    for name, fn, help_ in (
        ("regimes", cmd_regimes, "plug-in estimates along a sample-size schedule"),
        ("barron", cmd_barron, "Barron tail check of the K bound"),
        ("variational", cmd_variational, "variational distance to the true block law"),
        ("theorem2", cmd_theorem2, "exact check of the ergodic-decomposition entropy bound"),
    ):
        s = sub.add_parser(name, help=help_)
        s.add_argument("config")
        s.add_argument("--out", help="override the config's output path")
        s.add_argument("--workers", type=int, help="override the config's worker count")
        s.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DecodeError as exc:
        print(f"decode error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
