"""Binary detection error rates, DET operating-point sweeps, and EER.

Decision convention throughout the toolkit: a trial is ACCEPTED iff its
score >= threshold (ties accepted). The miss rate is the fraction of
positive-class scores below the threshold; the false-alarm rate is the
fraction of negative-class scores at or above it.

The threshold sweep places one operating point at -inf (accept all), one
strictly above the maximum score (reject all), and one midpoint between
every pair of adjacent distinct pooled scores. Because no swept threshold
ever coincides with an observed score, every empirically achievable
(p_miss, p_fa) pair appears exactly once, in ascending threshold order.

The reported EER is the threshold minimizing |p_fa - p_miss| over the
sweep, value (p_fa + p_miss) / 2, ties broken toward the smallest
threshold. This matches common anti-spoofing scoring tools; the
ROC-convex-hull EER is deliberately not used.

All functions are pure and operate on immutable inputs; the sweep is a
single O(n log n) sort, fine for million-trial score sets.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyClassError


@dataclass(frozen=True)
class OperatingPoint:
    threshold: float
    p_miss: float
    p_fa: float


@dataclass(frozen=True)
class EerResult:
    eer: float
    threshold: float


@dataclass(frozen=True)
class DetCurve:
    """Parallel arrays of swept thresholds and their error rates."""

    thresholds: np.ndarray
    p_miss: np.ndarray
    p_fa: np.ndarray

    def __len__(self):
        return self.thresholds.size

    def points(self):
        for t, pm, pf in zip(self.thresholds, self.p_miss, self.p_fa):
            yield OperatingPoint(float(t), float(pm), float(pf))


def _as_scores(name, scores):
    arr = np.asarray(scores, dtype=np.float64)
    if arr.size == 0:
        raise EmptyClassError(f"{name} score vector is empty")
    return arr


def error_rates(pos, neg, threshold):
    """(p_miss, p_fa) at one threshold under the accept-iff->= convention."""
    pos = _as_scores("positive", pos)
    neg = _as_scores("negative", neg)
    p_miss = np.count_nonzero(pos < threshold) / pos.size
    p_fa = np.count_nonzero(neg >= threshold) / neg.size
    return float(p_miss), float(p_fa)


def _sweep_counts(pos, neg):
    """Thresholds plus integer miss/false-alarm counts along the sweep."""
    distinct = np.unique(np.concatenate([pos, neg]))
    thresholds = np.concatenate(
        [[-np.inf], (distinct[:-1] + distinct[1:]) / 2.0, [distinct[-1] + 1.0]]
    )
    pos_sorted = np.sort(pos)
    neg_sorted = np.sort(neg)
    miss_counts = np.searchsorted(pos_sorted, thresholds, side="left")
    fa_counts = neg.size - np.searchsorted(neg_sorted, thresholds, side="left")
    return thresholds, miss_counts, fa_counts


def det_curve(pos, neg):
    """Full operating-point sweep; includes the accept-all and reject-all endpoints."""
    pos = _as_scores("positive", pos)
    neg = _as_scores("negative", neg)
    thresholds, miss_counts, fa_counts = _sweep_counts(pos, neg)
    return DetCurve(
        thresholds=thresholds,
        p_miss=miss_counts / pos.size,
        p_fa=fa_counts / neg.size,
    )


def eer(pos, neg):
    """Equal error rate and its threshold over the det_curve sweep.

    |p_fa - p_miss| is compared in exact integer arithmetic (cross-
    multiplied counts), so rationally tied operating points resolve to the
    smallest threshold rather than to float rounding noise.
    """
    pos = _as_scores("positive", pos)
    neg = _as_scores("negative", neg)
    thresholds, miss_counts, fa_counts = _sweep_counts(pos, neg)
    diffs = np.abs(
        fa_counts.astype(np.int64) * pos.size
        - miss_counts.astype(np.int64) * neg.size
    )
    idx = int(np.argmin(diffs))
    value = (miss_counts[idx] / pos.size + fa_counts[idx] / neg.size) / 2.0
    return EerResult(eer=float(value), threshold=float(thresholds[idx]))


def det_curve_csv(curve):
    """CSV export, header threshold,p_miss,p_fa."""
    lines = ["threshold,p_miss,p_fa"]
    for t, pm, pf in zip(curve.thresholds, curve.p_miss, curve.p_fa):
        lines.append(f"{t:.9g},{pm:.9g},{pf:.9g}")
    return "\n".join(lines) + "\n"
