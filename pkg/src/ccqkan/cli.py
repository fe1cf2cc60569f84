"""Command-line entry point.

Subcommands::

    ccqkan resources [--n N --d D] [--csv PATH]
    ccqkan train        --config run.yaml  --out DIR
    ccqkan grid         --config grid.yaml --out DIR [--workers K] [--seed-range A..B]
    ccqkan stats        --config stats.yaml --out DIR [--results results.csv]
    ccqkan mnist-binary --config mnist.yaml --out DIR
    ccqkan mnist-ova    --config mnist.yaml --out DIR

Config files are YAML mappings; unknown keys are rejected. Exit codes:
0 success, 2 usage, 3 config error, 4 data error, 5 runtime error.
"""

import argparse
import csv
import hashlib
import io
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import DataParseError, DegenerateResultError, InvalidInputError
from .experiments import (
    GRID_CONFIGS,
    GridSpec,
    IncompletePairingError,
    MnistSpec,
    curves_to_csv,
    read_results_csv,
    records_to_csv,
    run_grid,
    run_mnist_binary,
    run_mnist_ova,
    summarize,
)
from .network import resources
from .statevector import EXACT_CHANNEL, IDEAL, SHOTS, SHOTS_NOISE, EvalCondition
from .training import MODELS, TrainConfig

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4, 5

TRAIN_KEYS = {
    "steps": 20, "lr": 0.05, "adam_beta1": 0.9, "adam_beta2": 0.999, "adam_eps": 1e-8, "fd_eps": 1e-5,
}
NOISE_KEYS = {"n_shots": 1000, "p_depol": 0.01, "noise_mode": EXACT_CHANNEL}

SCHEMAS = {
    "train": {
        "n": 2, "d": 2, "model": "original", "condition": IDEAL, "seed": 0,
        "data_seed": 0, "n_points": 30, "red_t_source": "same", **NOISE_KEYS, **TRAIN_KEYS,
    },
    "grid": {
        "configs": [list(c) for c in GRID_CONFIGS], "conditions": [IDEAL], "models": list(MODELS),
        "seeds": "0..15", "data_seed": 0, "n_points": 30, "red_t_source": "same",
        "curve_seeds": "0..9", "test_seeds": "0..15", "workers": 1, **NOISE_KEYS, **TRAIN_KEYS,
    },
    "stats": {"results": None, "curve_seeds": "0..9", "test_seeds": "0..15"},
    "mnist-binary": {
        "ns": [4], "d": 2, "n_splits": 10, "models": list(MODELS), "n_train": 100, "n_test": 50,
        "split_seed": 0, "digits_path": None, "workers": 1, **TRAIN_KEYS,
    },
    "mnist-ova": {
        "ns": [4], "d": 3, "n_splits": 10, "models": ["original", "red_i"], "n_train": 100, "n_test": 50,
        "split_seed": 0, "digits_path": None, "workers": 1, **TRAIN_KEYS,
    },
}
# keys that do not change results
NON_SEMANTIC = {"workers"}


class ConfigError(Exception):
    pass


def parse_range(text):
    """``"a..b"`` (inclusive) or a list of ints -> list of ints."""
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    if isinstance(text, int):
        return [text]
    try:
        a, b = str(text).split("..")
        a, b = int(a), int(b)
    except ValueError:
        raise ConfigError(f"bad seed range {text!r}, expected 'a..b'") from None
    if b < a:
        raise ConfigError(f"empty seed range {text!r}")
    return list(range(a, b + 1))


def load_config(path, command, overrides=None):
    schema = SCHEMAS[command]
    raw = {}
    if path is not None:
        try:
            raw = yaml.safe_load(Path(path).read_text()) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except yaml.YAMLError as exc:
            raise ConfigError(f"config {path} is not valid YAML: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must be a mapping")
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    cfg = {**schema, **raw}
    for k, v in (overrides or {}).items():
        if v is not None:
            cfg[k] = v
    return cfg


RANGE_KEYS = {"seeds", "curve_seeds", "test_seeds"}


def config_hash(cfg):
    """sha256 of the result-affecting settings; seed ranges are expanded first."""
    semantic = {k: (parse_range(v) if k in RANGE_KEYS else v) for k, v in cfg.items() if k not in NON_SEMANTIC}
    blob = json.dumps(semantic, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def _condition(cfg, kind):
    if kind == IDEAL:
        return EvalCondition.ideal()
    if kind == SHOTS:
        return EvalCondition.shots(int(cfg["n_shots"]))
    if kind == SHOTS_NOISE:
        return EvalCondition.shots_noise(int(cfg["n_shots"]), float(cfg["p_depol"]), cfg["noise_mode"])
    raise ConfigError(f"condition: unknown kind {kind!r}")


def _train_config(cfg):
    try:
        return TrainConfig(**{k: cfg[k] for k in TRAIN_KEYS})
    except (InvalidInputError, TypeError) as exc:
        raise ConfigError(f"training settings: {exc}") from None


def _write(out, name, text, artifacts):
    path = out / name
    path.write_text(text)
    artifacts.append(name)


def _manifest(out, command, cfg, t0, artifacts):
    manifest = {
        "command": command,
        "config": cfg,
        "config_hash": config_hash(cfg),
        "build": {"ccqkan": __version__, "numpy": np.__version__, "python": platform.python_version()},
        "wall_time_s": round(time.perf_counter() - t0, 3),
        "artifacts": sorted(artifacts),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")


def _grid_spec(cfg):
    try:
        return GridSpec(
            configs=[tuple(int(v) for v in c) for c in cfg["configs"]],
            conditions=[_condition(cfg, k) for k in cfg["conditions"]],
            models=tuple(cfg["models"]),
            seeds=parse_range(cfg["seeds"]),
            train=_train_config(cfg),
            data_seed=int(cfg["data_seed"]),
            n_points=int(cfg["n_points"]),
            red_t_source=cfg["red_t_source"],
            workers=int(cfg["workers"]),
        )
    except (InvalidInputError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def cmd_resources(args):
    if (args.n is None) != (args.d is None):
        print("error: --n and --d must be given together", file=sys.stderr)
        return EXIT_USAGE
    pairs = GRID_CONFIGS if args.n is None else [(args.n, args.d)]
    if any(n < 1 or d < 1 for n, d in pairs):
        print("error: n and d must be positive integers", file=sys.stderr)
        return EXIT_USAGE
    header = ("network", "d", "Q_par", "C_par", "Q_seq", "C_seq", "Q_red", "C_red", "dQ")
    rows = [(f"[{n},{n},1]", d, *resources(n, d).row()) for n, d in pairs]
    widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(len(header))]
    for r in [header] + rows:
        print("  ".join(str(v).rjust(w) for v, w in zip(r, widths)))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("n", "d", "q_par", "c_par", "q_seq", "c_seq", "q_red", "c_red", "delta_q"))
            for (n, d), r in zip(pairs, rows):
                w.writerow((n, d, *r[2:]))
    return EXIT_OK


def cmd_train(args, cfg, out, artifacts):
    model = cfg["model"]
    if model not in MODELS:
        raise ConfigError(f"model: unknown model {model!r}")
    gcfg = {
        **cfg, "configs": [[cfg["n"], cfg["d"]]], "conditions": [cfg["condition"]],
        "models": ["original", model] if model == "red_t" else [model], "seeds": [cfg["seed"]], "workers": 1,
    }
    records = [r for r in run_grid(_grid_spec(gcfg)) if r.model == model]
    if any(r.failed for r in records):
        raise RuntimeError("; ".join(r.message for r in records if r.failed))
    _write(out, "results.csv", records_to_csv(records), artifacts)


def _summary_outputs(records, cfg, out, artifacts):
    summary = summarize(records, parse_range(cfg["curve_seeds"]), parse_range(cfg["test_seeds"]))
    _write(out, "summary.json", summary.to_json() + "\n", artifacts)
    _write(out, "curves.csv", curves_to_csv(summary), artifacts)


def cmd_grid(args, cfg, out, artifacts):
    records = run_grid(_grid_spec(cfg))
    _write(out, "results.csv", records_to_csv(records), artifacts)
    failed = [r for r in records if r.failed]
    if failed:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("config_n", "config_d", "model", "condition", "seed", "message"))
        for r in failed:
            w.writerow((r.n, r.d, r.model, r.condition, r.seed, r.message))
        _write(out, "failures.csv", buf.getvalue(), artifacts)
    _summary_outputs(records, cfg, out, artifacts)


def cmd_stats(args, cfg, out, artifacts):
    if cfg["results"] is None:
        raise ConfigError("results: path to a results CSV is required")
    try:
        records = read_results_csv(cfg["results"])
    except OSError as exc:
        raise DataParseError(f"cannot read results {cfg['results']}: {exc}") from None
    _summary_outputs(records, cfg, out, artifacts)


def _mnist_spec(cfg):
    try:
        return MnistSpec(
            ns=[int(n) for n in cfg["ns"]], d=int(cfg["d"]), n_splits=int(cfg["n_splits"]),
            models=tuple(cfg["models"]), train=_train_config(cfg), n_train=int(cfg["n_train"]),
            n_test=int(cfg["n_test"]), split_seed=int(cfg["split_seed"]), digits_path=cfg["digits_path"],
            workers=int(cfg["workers"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _mnist_outputs(result, out, artifacts, with_class):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("config_n", "config_d", "model", "split") + (("cls",) if with_class else ()) + ("step", "loss"))
    for r in sorted(result["records"], key=lambda r: (r.n, r.model, r.seed, r.cls or 0)):
        for step, loss in enumerate(r.losses):
            w.writerow((r.n, r.d, r.model, r.seed) + ((r.cls,) if with_class else ()) + (step, repr(float(loss))))
    _write(out, "results.csv", buf.getvalue(), artifacts)
    res = {n: {m: {k: v for k, v in e.items() if k != "predictions"} if isinstance(e, dict) else e for m, e in r.items()}
           for n, r in result["results"].items()}
    _write(out, "accuracy.json", json.dumps(_jsonable(res), indent=2, sort_keys=True) + "\n", artifacts)


def cmd_mnist_binary(args, cfg, out, artifacts):
    _mnist_outputs(run_mnist_binary(_mnist_spec(cfg)), out, artifacts, with_class=False)


def cmd_mnist_ova(args, cfg, out, artifacts):
    _mnist_outputs(run_mnist_ova(_mnist_spec(cfg)), out, artifacts, with_class=True)


COMMANDS = {
    "train": cmd_train,
    "grid": cmd_grid,
    "stats": cmd_stats,
    "mnist-binary": cmd_mnist_binary,
    "mnist-ova": cmd_mnist_ova,
}


def build_parser():
    p = argparse.ArgumentParser(prog="ccqkan", description="Chebyshev quantum KAN simulator and experiment harness")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("resources", help="qubit / circuit-execution table")
    r.add_argument("--n", type=int)
    r.add_argument("--d", type=int)
    r.add_argument("--csv", help="also write the table to this CSV file")
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="YAML config file")
        s.add_argument("--out", required=True, help="output directory")
        s.add_argument("--workers", type=int)
        s.add_argument("--seed-range", help="override seeds, e.g. 0..15")
        if name == "stats":
            s.add_argument("--results", help="results CSV (overrides the config key)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "resources":
        return cmd_resources(args)
    overrides = {}
    if args.workers is not None and "workers" in SCHEMAS[args.command]:
        overrides["workers"] = args.workers
    if args.seed_range is not None:
        key = "seeds" if "seeds" in SCHEMAS[args.command] else "seed"
        if key not in SCHEMAS[args.command]:
            print(f"error: --seed-range does not apply to {args.command}", file=sys.stderr)
            return EXIT_USAGE
        overrides[key] = args.seed_range if key == "seeds" else int(args.seed_range.split("..")[0])
    if getattr(args, "results", None):
        overrides["results"] = args.results
    t0 = time.perf_counter()
    try:
        cfg = load_config(args.config, args.command, overrides)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        artifacts = []
        COMMANDS[args.command](args, cfg, out, artifacts)
        _manifest(out, args.command, cfg, t0, artifacts)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataParseError, IncompletePairingError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (RuntimeError, DegenerateResultError, InvalidInputError, ArithmeticError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
