"""Experiment grids over configurations, conditions, models and seeds.

Stream keys (see :mod:`ccqkan.rng`):

* initial parameters: ``(seed, "init", variant, n, d, task, cls)`` with
  ``variant`` 0 for the original model and 1 for the independently
  initialized merged model;
* shot noise: ``(seed, "shots", n, d, condition, task, cls)``. All models
  of one ``(seed, config, condition)`` cell draw from the same key so
  paired runs share their noise context.
"""

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import (
    binary_predict,
    load_digits,
    make_splits,
    ova_labels,
    ova_predict,
    prepare_features,
    synthetic_dataset,
)
from .errors import DegenerateResultError, InvalidInputError
from .network import NetworkConfig, forward_batch
from .rng import stream
from .statevector import IDEAL, SHOTS, SHOTS_NOISE, EvalCondition
from .stats import cohens_d, wilcoxon
from .training import (
    MODEL_MODE,
    MODELS,
    ORIGINAL,
    RED_I,
    RED_T,
    RunRecord,
    TrainConfig,
    init_params,
    train,
    transfer_params,
)

GRID_CONFIGS = ((2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (4, 4), (4, 5))
PAIRS = ((ORIGINAL, RED_T), (ORIGINAL, RED_I), (RED_T, RED_I))
CSV_FIELDS = ("config_n", "config_d", "model", "condition", "noise_mode", "seed", "step", "loss")

_COND_CODE = {IDEAL: 0, SHOTS: 1, SHOTS_NOISE: 2}
_INIT_VARIANT = {ORIGINAL: 0, RED_I: 1}
TASK_SYNTHETIC, TASK_BINARY, TASK_OVA = 0, 1, 2


class IncompletePairingError(ValueError):
    def __init__(self, missing):
        self.missing = list(missing)
        preview = ", ".join(map(str, self.missing[:10]))
        super().__init__(f"{len(self.missing)} missing cell(s): {preview}")


def init_stream(seed, model, n, d, task=TASK_SYNTHETIC, cls=0):
    return stream(seed, "init", _INIT_VARIANT[model], n, d, task, cls)


def shots_stream(seed, n, d, cond, task=TASK_SYNTHETIC, cls=0):
    return stream(seed, "shots", n, d, _COND_CODE[cond.kind], task, cls)


@dataclass
class GridSpec:
    configs: list = field(default_factory=lambda: list(GRID_CONFIGS))
    conditions: list = field(default_factory=lambda: [EvalCondition.ideal()])
    models: tuple = MODELS
    seeds: list = field(default_factory=lambda: list(range(16)))
    train: TrainConfig = field(default_factory=TrainConfig)
    data_seed: int = 0
    n_points: int = 30
    red_t_source: str = "same"  # or "ideal": always the ideal-trained Original
    workers: int = 1

    def __post_init__(self):
        unknown = set(self.models) - set(MODELS)
        if unknown:
            raise InvalidInputError(f"unknown model(s) {sorted(unknown)}")
        if RED_T in self.models and ORIGINAL not in self.models:
            raise InvalidInputError("red_t needs original in the same grid as its transfer source")
        if self.red_t_source not in ("ideal", "same"):
            raise InvalidInputError(f"red_t_source must be 'ideal' or 'same', got {self.red_t_source!r}")
        kinds = [c.kind for c in self.conditions]
        if len(set(kinds)) != len(kinds):
            raise InvalidInputError("at most one condition of each kind per grid")


# jobs are plain tuples so they pickle cleanly into worker processes
def _train_job(job):
    n, d, model, cond, seed, X, y, tcfg, params0, task, cls = job
    cfg = NetworkConfig(n, d, MODEL_MODE[model])
    if params0 is None:
        params0 = init_params(cfg, init_stream(seed, model, n, d, task, cls))
    rng = None if cond.kind == IDEAL else shots_stream(seed, n, d, cond, task, cls)
    return train(params0, X, y, cfg, tcfg, cond, rng, model=model, seed=seed)


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def _failed_transfer(n, d, cond, seed, reason):
    return RunRecord(n, d, RED_T, cond.kind, cond.noise_mode, seed, [], failed=True, message=reason)


def run_grid(spec):
    """Train every requested (config, condition, model, seed) cell.

    Red-T starts from the trained Original of the same seed: the one
    trained under the run's own condition by default, or the ideal-trained
    one with ``red_t_source="ideal"``. Failed runs are kept in the output
    with ``failed=True``.
    """
    ideal = EvalCondition.ideal()
    datasets = {n: synthetic_dataset(n, spec.n_points, spec.data_seed) for n in {n for n, _ in spec.configs}}
    tcfg = spec.train

    def job(n, d, model, cond, seed, params0=None):
        ds = datasets[n]
        return (n, d, model, cond, seed, ds.inputs, ds.targets, tcfg, params0, TASK_SYNTHETIC, 0)

    # phase 1: everything that starts from a random draw
    first = []
    for n, d in spec.configs:
        for cond in spec.conditions:
            for model in (ORIGINAL, RED_I):
                if model in spec.models:
                    first += [job(n, d, model, cond, s) for s in spec.seeds]
        need_hidden_source = (
            RED_T in spec.models
            and spec.red_t_source == "ideal"
            and all(c.kind != IDEAL for c in spec.conditions)
        )
        if need_hidden_source:
            first += [job(n, d, ORIGINAL, ideal, s) for s in spec.seeds]
    done = _map(_train_job, first, spec.workers)
    by_key = {(r.n, r.d, r.model, r.condition, r.seed): r for r in done}

    # phase 2: transfer runs
    second, skipped = [], []
    if RED_T in spec.models:
        for n, d in spec.configs:
            for cond in spec.conditions:
                src_kind = IDEAL if spec.red_t_source == "ideal" else cond.kind
                for s in spec.seeds:
                    src = by_key[(n, d, ORIGINAL, src_kind, s)]
                    if src.failed:
                        skipped.append(_failed_transfer(n, d, cond, s, f"source run failed: {src.message}"))
                    else:
                        second.append(job(n, d, RED_T, cond, s, transfer_params(src.final_params)))
    done_t = _map(_train_job, second, spec.workers)

    kinds = {c.kind for c in spec.conditions}
    records = [r for r in done if r.condition in kinds and r.model in spec.models] + done_t + skipped
    return sort_records(records)


def sort_records(records):
    cond_order = {IDEAL: 0, SHOTS: 1, SHOTS_NOISE: 2}
    model_order = {m: i for i, m in enumerate(MODELS)}
    return sorted(records, key=lambda r: (r.n, r.d, cond_order.get(r.condition, 9), model_order.get(r.model, 9), r.seed))


def records_to_csv(records):
    """Serialize loss traces, one row per step, full float precision."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in sort_records(records):
        for step, loss in enumerate(r.losses):
            w.writerow((r.n, r.d, r.model, r.condition, r.noise_mode, r.seed, step, repr(float(loss))))
    return buf.getvalue()


def write_results_csv(records, path):
    with open(path, "w", newline="") as fh:
        fh.write(records_to_csv(records))


def read_results_csv(path):
    """Rebuild run records (losses only) from a results CSV."""
    traces = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise InvalidInputError(f"results CSV lacks column(s) {sorted(missing)}")
        for row in reader:
            key = (int(row["config_n"]), int(row["config_d"]), row["model"], row["condition"], row["noise_mode"], int(row["seed"]))
            traces.setdefault(key, []).append((int(row["step"]), float(row["loss"])))
    out = []
    for (n, d, model, cond, mode, seed), steps in traces.items():
        steps.sort()
        out.append(RunRecord(n, d, model, cond, mode, seed, [loss for _, loss in steps]))
    return sort_records(out)


def config_label(n, d):
    return f"[{n},{n},1] d={d}"


@dataclass
class SummaryTable:
    cells: dict
    significance_counts: dict
    curves: dict

    def to_json(self):
        return json.dumps({"configs": self.cells, "significance_counts": self.significance_counts}, indent=2, sort_keys=True)


def _mean_std(values):
    values = np.asarray(values, dtype=float)
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return {"mean": float(values.mean()), "std": std, "n": int(values.size)}


def summarize(records, curve_seeds=range(10), test_seeds=range(16)):
    """Per-cell loss statistics and pairwise Wilcoxon tests.

    Means, standard deviations and loss-curve series use ``curve_seeds``;
    significance tests use ``test_seeds``. Only seeds that occur in the
    records are used, and each model of a (config, condition) cell must
    have every one of those seeds.
    """
    live = [r for r in records if not r.failed]
    present = {r.seed for r in live}
    curve = sorted(present & set(curve_seeds))
    test = sorted(present & set(test_seeds))
    cells = {}
    for r in live:
        cells.setdefault((r.n, r.d, r.condition), {}).setdefault(r.model, {})[r.seed] = r

    missing = []
    for (n, d, cond), models in cells.items():
        for model, by_seed in models.items():
            missing += [(n, d, cond, model, s) for s in sorted(set(curve) | set(test)) if s not in by_seed]
    if missing:
        raise IncompletePairingError(missing)

    table, curves = {}, {}
    counts = {}
    cond_order = {IDEAL: 0, SHOTS: 1, SHOTS_NOISE: 2}
    for (n, d, cond) in sorted(cells, key=lambda k: (k[0], k[1], cond_order.get(k[2], 9))):
        models = cells[(n, d, cond)]
        entry = {}
        for model in MODELS:
            if model not in models:
                continue
            by_seed = models[model]
            if curve:
                entry[model] = _mean_std([by_seed[s].final_loss for s in curve])
                L = np.array([by_seed[s].losses for s in curve])
                curves[(n, d, cond, model)] = (L.mean(axis=0), L.std(axis=0, ddof=1) if len(curve) > 1 else np.zeros(L.shape[1]))
        for a, b in PAIRS:
            if a not in models or b not in models or len(test) < 2:
                continue
            xa = [models[a][s].final_loss for s in test]
            xb = [models[b][s].final_loss for s in test]
            key = f"{a}_vs_{b}"
            try:
                res = wilcoxon(xa, xb).to_dict()
            except DegenerateResultError as exc:
                res = {"T": None, "n": 0, "p": None, "r": None, "label": "degenerate", "error": str(exc)}
            try:
                res["cohens_d"] = cohens_d(xa, xb)
            except DegenerateResultError:
                res["cohens_d"] = None
            res["mean_a"] = float(np.mean(xa))
            res["mean_b"] = float(np.mean(xb))
            entry[key] = res
            tally = counts.setdefault(key, {}).setdefault(
                cond, {"***": 0, "**": 0, "*": 0, "n.s.": 0, "degenerate": 0, "lower_loss": {a: 0, b: 0}}
            )
            tally[res["label"]] += 1
            if res["label"] in ("***", "**", "*"):
                tally["lower_loss"][a if res["mean_a"] < res["mean_b"] else b] += 1
        table.setdefault(config_label(n, d), {})[cond] = entry
    return SummaryTable(table, counts, curves)


def curves_to_csv(summary):
    """Mean and std loss per step, one row per (config, condition, model, step)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("config_n", "config_d", "condition", "model", "step", "mean", "std"))
    for (n, d, cond, model), (mean, std) in sorted(summary.curves.items()):
        for step, (m, s) in enumerate(zip(mean, std)):
            w.writerow((n, d, cond, model, step, repr(float(m)), repr(float(s))))
    return buf.getvalue()


# ----------------------------------------------------------------------------
# digits tasks


@dataclass
class MnistSpec:
    ns: list = field(default_factory=lambda: [4])
    d: int = 2
    n_splits: int = 10
    models: tuple = MODELS
    train: TrainConfig = field(default_factory=TrainConfig)
    n_train: int = 100
    n_test: int = 50
    split_seed: int = 0
    digits_path: str = None
    workers: int = 1


def _digits_subset(spec, classes):
    X, labels = load_digits(spec.digits_path)
    keep = np.isin(labels, classes)
    return X[keep].astype(float), labels[keep]


def run_mnist_binary(spec):
    """0-vs-1 classification with ±1 targets and sign predictions.

    Returns ``{"records": [...], "results": {n: {model: {...}}}}`` where
    each model entry lists per-split final losses and test accuracies.
    """
    X, labels = _digits_subset(spec, [0, 1])
    y_all = np.where(labels == 1, 1.0, -1.0)
    test_idx, trains = make_splits(labels, spec.n_splits, spec.n_train, spec.n_test, spec.split_seed)
    ideal = EvalCondition.ideal()
    records, results = [], {}
    for n in spec.ns:
        feats = [prepare_features(X[tr], X[test_idx], n) for tr in trains]

        def job(model, s, params0=None):
            Ztr = feats[s][0]
            return (n, spec.d, model, ideal, s, Ztr, y_all[trains[s]], spec.train, params0, TASK_BINARY, 0)

        want = [m for m in (ORIGINAL, RED_I) if m in spec.models or (m == ORIGINAL and RED_T in spec.models)]
        first = _map(_train_job, [job(m, s) for m in want for s in range(spec.n_splits)], spec.workers)
        runs = {(r.model, r.seed): r for r in first}
        if RED_T in spec.models:
            second = [job(RED_T, s, transfer_params(runs[(ORIGINAL, s)].final_params)) for s in range(spec.n_splits)]
            runs.update({(r.model, r.seed): r for r in _map(_train_job, second, spec.workers)})
        res_n = {}
        for model in MODELS:
            if model not in spec.models:
                continue
            cfg = NetworkConfig(n, spec.d, MODEL_MODE[model])
            accs, losses, preds = [], [], []
            for s in range(spec.n_splits):
                r = runs[(model, s)]
                out = forward_batch(r.final_params, feats[s][1], cfg)
                p = binary_predict(out)
                preds.append(p)
                accs.append(float(np.mean(p == y_all[test_idx])))
                losses.append(r.final_loss)
                records.append(r)
            res_n[model] = {
                "final_loss": losses,
                "test_accuracy": accs,
                "loss": _mean_std(losses),
                "accuracy": _mean_std(accs),
                "predictions": np.array(preds),
            }
        results[n] = res_n
    return {"records": records, "results": results, "test_idx": test_idx}


def run_mnist_ova(spec):
    """Ten one-vs-all classifiers per (model, split), argmax of raw outputs.

    Only the original and independently initialized merged models are
    trained. Returns per-``n`` accuracies, per-class accuracies, final
    losses and Wilcoxon comparisons across splits.
    """
    X, labels = _digits_subset(spec, list(range(10)))
    test_idx, trains = make_splits(
        labels, spec.n_splits, spec.n_train, spec.n_test, spec.split_seed, require_all_classes=True
    )
    ideal = EvalCondition.ideal()
    models = [m for m in (ORIGINAL, RED_I) if m in spec.models]
    y_test = labels[test_idx]
    records, results = [], {}
    for n in spec.ns:
        feats = [prepare_features(X[tr], X[test_idx], n) for tr in trains]
        jobs = [
            (n, spec.d, m, ideal, s, feats[s][0], ova_labels(labels[trains[s]], c), spec.train, None, TASK_OVA, c)
            for m in models
            for s in range(spec.n_splits)
            for c in range(10)
        ]
        done = _map(_train_job, jobs, spec.workers)
        res_n = {}
        for m in models:
            cfg = NetworkConfig(n, spec.d, MODEL_MODE[m])
            accs, train_accs, mean_losses, per_class = [], [], [], []
            for s in range(spec.n_splits):
                runs = [r for j, r in zip(jobs, done) if j[2] == m and j[4] == s]
                assert len(runs) == 10
                out_te = np.stack([forward_batch(r.final_params, feats[s][1], cfg) for r in runs], axis=1)
                out_tr = np.stack([forward_batch(r.final_params, feats[s][0], cfg) for r in runs], axis=1)
                pred = ova_predict(out_te)
                accs.append(float(np.mean(pred == y_test)))
                train_accs.append(float(np.mean(ova_predict(out_tr) == labels[trains[s]])))
                mean_losses.append(float(np.mean([r.final_loss for r in runs])))
                per_class.append([float(np.mean(pred[y_test == c] == c)) if np.any(y_test == c) else float("nan") for c in range(10)])
                for c, r in enumerate(runs):
                    r.cls = c
                    records.append(r)
            res_n[m] = {
                "test_accuracy": accs,
                "train_accuracy": train_accs,
                "final_loss": mean_losses,
                "accuracy": _mean_std(accs),
                "loss": _mean_std(mean_losses),
                "per_class_accuracy": np.nanmean(np.array(per_class), axis=0).tolist(),
                "n_classifiers": 10 * spec.n_splits,
            }
        if ORIGINAL in res_n and RED_I in res_n:
            res_n["wilcoxon"] = {}
            for metric in ("test_accuracy", "final_loss"):
                try:
                    res_n["wilcoxon"][metric] = wilcoxon(res_n[ORIGINAL][metric], res_n[RED_I][metric]).to_dict()
                except (DegenerateResultError, InvalidInputError) as exc:
                    res_n["wilcoxon"][metric] = {"label": "degenerate", "error": str(exc)}
        results[n] = res_n
    return {"records": records, "results": results, "test_idx": test_idx}


def per_class_matrix(ova):
    """Per-class test accuracy, rows = digits, columns = (n, model)."""
    cols, header = [], []
    for n, res in sorted(ova["results"].items()):
        for m in (ORIGINAL, RED_I):
            if m in res:
                cols.append(res[m]["per_class_accuracy"])
                header.append((n, m))
    return np.array(cols).T, header
