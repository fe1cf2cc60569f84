"""Paired-sample statistics: exact Wilcoxon signed-rank test and effect sizes."""

from dataclasses import dataclass, asdict

import numpy as np
from scipy.stats import norm, rankdata

from .errors import DegenerateResultError, InvalidInputError

EXACT_MAX_N = 25


@dataclass(frozen=True)
class WilcoxonResult:
    t_stat: float
    n_eff: int
    p_two_sided: float
    r_rank_biserial: float
    label: str
    exact: bool = True

    def to_dict(self):
        d = asdict(self)
        return {"T": d["t_stat"], "n": d["n_eff"], "p": d["p_two_sided"], "r": d["r_rank_biserial"], "label": d["label"]}


def significance_label(p):
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"p must lie in [0, 1], got {p}")
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return "n.s."


def rank_biserial(t_stat, n_eff):
    """Matched-pairs rank-biserial correlation ``1 - 2T / (n(n+1)/2)``."""
    if n_eff < 1:
        raise InvalidInputError("n_eff must be >= 1")
    return 1.0 - 2.0 * t_stat / (n_eff * (n_eff + 1) / 2.0)


def _paired_diffs(xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
        raise InvalidInputError("need two equal-length 1-D samples with at least 2 pairs")
    return xs - ys


def signed_rank_null_cdf(ranks, t):
    """``P(W+ <= t)`` when each rank independently carries a random sign.

    ``ranks`` may contain average (half-integer) ranks; they are doubled
    to integers and the null distribution of the positive-rank sum is
    built by dynamic programming over the realized rank multiset.
    """
    r2 = np.rint(2.0 * np.asarray(ranks, dtype=float)).astype(np.int64)
    counts = np.zeros(int(r2.sum()) + 1)
    counts[0] = 1.0
    for r in r2:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: counts.size - r]
        counts = counts + shifted
    limit = int(np.floor(2.0 * t + 1e-9))
    return counts[: limit + 1].sum() / 2.0 ** len(r2)


def wilcoxon(xs, ys):
    """Two-sided Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped, ties get average ranks. The p-value is
    exact for up to 25 non-zero pairs and otherwise uses the normal
    approximation with continuity and tie corrections.
    """
    diffs = _paired_diffs(xs, ys)
    diffs = diffs[diffs != 0.0]
    n = diffs.size
    if n < 1:
        raise DegenerateResultError("all paired differences are zero")
    ranks = rankdata(np.abs(diffs))
    w_plus = float(ranks[diffs > 0].sum())
    w_minus = float(ranks[diffs < 0].sum())
    t = min(w_plus, w_minus)
    if n <= EXACT_MAX_N:
        p = min(1.0, 2.0 * float(signed_rank_null_cdf(ranks, t)))
        exact = True
    else:
        mean = n * (n + 1) / 4.0
        _, tie_counts = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24.0 - (tie_counts**3 - tie_counts).sum() / 48.0
        z = (t - mean + 0.5) / np.sqrt(var)
        p = min(1.0, 2.0 * float(norm.cdf(z)))
        exact = False
    r = rank_biserial(t, n)
    return WilcoxonResult(t, n, p, r, significance_label(p), exact)


def cohens_d(xs, ys):
    """Paired Cohen's d: mean difference over the sample std of differences."""
    diffs = _paired_diffs(xs, ys)
    sd = diffs.std(ddof=1)
    if sd == 0.0:
        raise DegenerateResultError("paired differences have zero variance")
    return float(diffs.mean() / sd)
