"""Datasets: synthetic regression targets, the 8x8 digits, PCA and scaling."""

import csv
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataParseError, DegenerateResultError, InvalidInputError
from .rng import stream

N_PIXELS = 64


@dataclass
class Dataset:
    inputs: np.ndarray
    targets: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return self.targets.shape[0]


def target_function(X):
    """Regression targets for 2, 3 or 4 inputs.

    ``sin(x1 + x2)``, plus ``cos(x3)`` for three inputs or
    ``cos(x3 * x4)`` for four.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[-1]
    f = np.sin(X[..., 0] + X[..., 1])
    if n == 3:
        f = f + np.cos(X[..., 2])
    elif n == 4:
        f = f + np.cos(X[..., 2] * X[..., 3])
    elif n != 2:
        raise InvalidInputError(f"target functions exist for n in (2, 3, 4), got {n}")
    return f


def synthetic_dataset(n, n_points=30, data_seed=0):
    """Inputs uniform on ``[-1, 1]^n``; targets min-max mapped onto ``[-2, 2]``."""
    if n not in (2, 3, 4):
        raise InvalidInputError(f"n must be 2, 3 or 4, got {n}")
    X = stream(data_seed, "data", n).uniform(-1.0, 1.0, size=(n_points, n))
    raw = target_function(X)
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        raise DegenerateResultError("constant targets cannot be scaled")
    y = 4.0 * (raw - lo) / (hi - lo) - 2.0
    return Dataset(X, y, {"generator": f"f{n}", "data_seed": data_seed, "raw_min": lo, "raw_max": hi})


def default_digits_path():
    return resources.files("ccqkan") / "resources" / "digits.csv"


def load_digits(path=None):
    """Read the digits CSV: 64 pixel values in 0..16 then the label, no header.

    Returns ``(features, labels)`` as integer arrays.
    """
    path = Path(path) if path is not None else default_digits_path()
    rows, labels = [], []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataParseError(f"cannot open {path}: {exc}") from exc
    with fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            if not rec:
                continue
            if len(rec) != N_PIXELS + 1:
                raise DataParseError(f"expected {N_PIXELS + 1} fields, got {len(rec)}", lineno)
            try:
                vals = [int(v) for v in rec]
            except ValueError as exc:
                raise DataParseError(f"non-integer field ({exc})", lineno) from None
            px, lab = vals[:N_PIXELS], vals[N_PIXELS]
            if min(px) < 0 or max(px) > 16:
                raise DataParseError("pixel value outside 0..16", lineno)
            if not 0 <= lab <= 9:
                raise DataParseError(f"label {lab} outside 0..9", lineno)
            rows.append(px)
            labels.append(lab)
    if not rows:
        raise DataParseError(f"{path} contains no rows")
    return np.array(rows, dtype=np.int64), np.array(labels, dtype=np.int64)


@dataclass
class PcaModel:
    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    explained_variance_ratio: np.ndarray


def pca_fit(train, n_components):
    """Principal axes of ``train`` by eigendecomposition of its covariance.

    Components are sorted by decreasing eigenvalue and oriented so that
    their largest-magnitude entry is positive.
    """
    A = np.asarray(train, dtype=float)
    if A.ndim != 2 or not 1 <= n_components <= A.shape[1] or A.shape[0] < n_components:
        raise InvalidInputError(f"cannot extract {n_components} components from data of shape {A.shape}")
    mean = A.mean(axis=0)
    cov = np.cov(A - mean, rowvar=False, ddof=1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order]
    total = evals.sum()
    kept = evals[:n_components]
    if total <= 0 or kept[-1] <= 1e-12 * total:
        raise DegenerateResultError(f"data has rank below {n_components}")
    comps = evecs[:, :n_components].T.copy()
    flip = np.sign(comps[np.arange(n_components), np.argmax(np.abs(comps), axis=1)])
    comps *= flip[:, None]
    return PcaModel(mean, comps, kept, kept / total)


def pca_transform(model, rows):
    rows = np.asarray(rows, dtype=float)
    if rows.shape[-1] != model.mean.size:
        raise InvalidInputError(f"expected {model.mean.size} columns, got {rows.shape[-1]}")
    return (rows - model.mean) @ model.components.T


@dataclass
class MinMaxScaler:
    lo: np.ndarray
    hi: np.ndarray

    def apply(self, X):
        X = np.asarray(X, dtype=float)
        return np.clip(2.0 * (X - self.lo) / (self.hi - self.lo) - 1.0, -1.0, 1.0)


def minmax_scale_fit(X):
    """Per-column affine map of the fit set onto ``[-1, 1]``."""
    X = np.asarray(X, dtype=float)
    lo, hi = X.min(axis=0), X.max(axis=0)
    if np.any(hi <= lo):
        raise DegenerateResultError(f"constant column(s) {np.flatnonzero(hi <= lo).tolist()}")
    return MinMaxScaler(lo, hi)


def minmax_scale_apply(scaler, X):
    return scaler.apply(X)


def ova_labels(labels, c):
    return np.where(np.asarray(labels) == c, 1.0, -1.0)


def ova_predict(outputs):
    """Class with the largest raw output; ties go to the smallest index."""
    outputs = np.asarray(outputs, dtype=float)
    return np.argmax(outputs, axis=-1)


def binary_predict(y):
    return np.where(np.asarray(y) >= 0.0, 1.0, -1.0)


def make_splits(labels, n_splits, n_train=100, n_test=50, split_seed=0, require_all_classes=False):
    """Fixed common test set, then one training draw per split from the rest.

    Returns ``(test_idx, [train_idx, ...])``. With
    ``require_all_classes`` a training draw is repeated (next attempt
    counter) until every label present in the pool appears in it.
    """
    labels = np.asarray(labels)
    idx = np.arange(labels.size)
    if n_test + n_train > labels.size:
        raise InvalidInputError("not enough samples for the requested split sizes")
    test_idx = np.sort(stream(split_seed, "split", 0).choice(idx, size=n_test, replace=False))
    pool = np.setdiff1d(idx, test_idx)
    classes = np.unique(labels[pool])
    trains = []
    for s in range(n_splits):
        for attempt in range(1000):
            tr = np.sort(stream(split_seed, "split", 1, s, attempt).choice(pool, size=n_train, replace=False))
            if not require_all_classes or np.array_equal(np.unique(labels[tr]), classes):
                break
        else:
            raise DegenerateResultError(f"split {s}: no draw covered every class")
        trains.append(tr)
    return test_idx, trains


def prepare_features(X_train, X_test, n_components):
    """PCA then min-max scaling, both fit on the training rows only."""
    pca = pca_fit(X_train, n_components)
    Z_tr = pca_transform(pca, X_train)
    Z_te = pca_transform(pca, X_test)
    scaler = minmax_scale_fit(Z_tr)
    return scaler.apply(Z_tr), scaler.apply(Z_te), pca
