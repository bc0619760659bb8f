"""Evaluation-measure plumbing: paired data containers and corpus statistics.

Two ingestion shapes drive everything downstream.  Decomposable measures
(anything that is a mean of per-example values) travel as PairedScores.
Non-decomposable measures (precision, recall, F, micro-accuracy) travel as
SufficientStats: per-example count vectors whose *sums* determine the
corpus value, so a resampled corpus statistic is combine(sum of resampled
counts) rather than a mean of per-example scores.  The Combiner names the
reduction from a summed count vector to the measure.

Zero denominators follow the common scorer convention: the measure is 0
and the event is flagged, so resampling never dies mid-stream; callers
escalate only when the full-data statistic itself is degenerate.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSample, EmptySample, InsufficientData, InvalidArgument

__all__ = [
    "PairedScores",
    "SufficientStats",
    "Combiner",
    "CorrelationSample",
    "mean_score",
    "combine",
    "combine_batch",
    "batch_statistic",
    "is_degenerate",
    "per_example_values",
    "corpus_statistic",
    "rankdata",
    "pearson_arrays",
    "spearman_arrays",
    "pearson_r",
    "spearman_rho",
]

_COMBINER_KINDS = ("mean", "accuracy", "precision", "recall", "f_beta", "ratio")


@dataclass(frozen=True)
class Combiner:
    """Reduction from a summed count vector to a corpus measure.

    kind:
      mean               arity 1: total / number of examples is *not* what
                         combine does — combine(totals) returns totals[0];
                         the mean lives in corpus_statistic, which divides
                         by the multiset size.  (Kept this way so combine
                         is a pure function of the summed vector.)
      accuracy           arity 2 as (correct, total): correct / total
      precision          arity 3 as (tp, fp, fn): tp / (tp + fp)
      recall             arity 3 as (tp, fp, fn): tp / (tp + fn)
      f_beta             arity 3 as (tp, fp, fn), parameter beta > 0
      ratio              arity k, totals[num_idx] / totals[den_idx]
    """

    kind: str
    beta: float = 1.0
    num_idx: int = 0
    den_idx: int = 1

    def __post_init__(self):
        if self.kind not in _COMBINER_KINDS:
            raise InvalidArgument(f"unknown combiner kind {self.kind!r}")
        if self.kind == "f_beta" and not self.beta > 0:
            raise InvalidArgument(f"f_beta requires beta > 0, got {self.beta}")

    @property
    def arity(self):
        """Required count-vector arity, or None when any arity works (ratio)."""
        return {"mean": 1, "accuracy": 2, "precision": 3, "recall": 3, "f_beta": 3}.get(
            self.kind
        )

    def check_arity(self, k):
        need = self.arity
        if need is not None and k != need:
            raise InvalidArgument(
                f"combiner {self.kind!r} requires arity {need}, got {k}"
            )
        if self.kind == "ratio" and not (0 <= self.num_idx < k and 0 <= self.den_idx < k):
            raise InvalidArgument(
                f"ratio indices ({self.num_idx}, {self.den_idx}) out of range for arity {k}"
            )


def _unique(ids):
    if len(set(ids)) != len(ids):
        raise InvalidArgument("example ids must be unique")


@dataclass(frozen=True)
class PairedScores:
    """Id-aligned per-example scores of systems A and B."""

    ids: tuple
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        a = np.asarray(self.a, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        if a.ndim != 1 or b.ndim != 1:
            raise InvalidArgument("scores must be one-dimensional")
        if not (len(self.ids) == a.shape[0] == b.shape[0]):
            raise InvalidArgument("ids, a, b must have equal length")
        if a.shape[0] < 1:
            raise EmptySample("need at least one example")
        if not (np.isfinite(a).all() and np.isfinite(b).all()):
            raise InvalidArgument("scores must be finite")
        _unique(self.ids)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self):
        return self.a.shape[0]

    def deltas(self):
        return self.a - self.b


@dataclass(frozen=True)
class SufficientStats:
    """Per-example count vectors for both systems plus their combiner."""

    ids: tuple
    a_counts: np.ndarray
    b_counts: np.ndarray
    combiner: Combiner

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        a = np.asarray(self.a_counts)
        b = np.asarray(self.b_counts)
        if a.ndim != 2 or b.ndim != 2:
            raise InvalidArgument("count arrays must be two-dimensional")
        if a.shape != b.shape:
            raise InvalidArgument(f"count shapes differ: {a.shape} vs {b.shape}")
        if a.shape[0] < 1:
            raise EmptySample("need at least one example")
        if len(self.ids) != a.shape[0]:
            raise InvalidArgument("ids and counts must have equal length")
        if np.issubdtype(a.dtype, np.floating) or np.issubdtype(b.dtype, np.floating):
            af, bf = a, b
            if not ((af == np.floor(af)).all() and (bf == np.floor(bf)).all()):
                raise InvalidArgument("counts must be integers")
        a = a.astype(np.int64)
        b = b.astype(np.int64)
        if (a < 0).any() or (b < 0).any():
            raise InvalidArgument("counts must be nonnegative")
        _unique(self.ids)
        self.combiner.check_arity(a.shape[1])
        object.__setattr__(self, "a_counts", a)
        object.__setattr__(self, "b_counts", b)

    @property
    def n(self):
        return self.a_counts.shape[0]

    @property
    def arity(self):
        return self.a_counts.shape[1]


@dataclass(frozen=True)
class CorrelationSample:
    """One system's predictions with the shared gold standard."""

    predictions: np.ndarray
    gold: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.predictions, dtype=np.float64)
        g = np.asarray(self.gold, dtype=np.float64)
        if p.ndim != 1 or g.ndim != 1 or p.shape != g.shape:
            raise InvalidArgument("predictions and gold must be equal-length vectors")
        if p.shape[0] < 4:
            raise InsufficientData(
                f"correlation needs n >= 4 (Fisher transform needs n > 3), got {p.shape[0]}"
            )
        if not (np.isfinite(p).all() and np.isfinite(g).all()):
            raise InvalidArgument("correlation inputs must be finite")
        object.__setattr__(self, "predictions", p)
        object.__setattr__(self, "gold", g)

    @property
    def n(self):
        return self.predictions.shape[0]


def mean_score(scores):
    """Arithmetic mean of a nonempty score vector."""
    arr = np.asarray(scores, dtype=np.float64)
    if arr.size == 0:
        raise EmptySample("mean of an empty score list")
    return float(arr.mean())


def combine(total_counts, combiner):
    """Corpus measure from a summed count vector; zero denominators give 0."""
    totals = np.asarray(total_counts, dtype=np.float64).reshape(-1)
    combiner.check_arity(totals.shape[0])
    values, _ = combine_batch(totals[None, :], combiner)
    return float(values[0])


def is_degenerate(total_counts, combiner):
    """True when the combiner's denominator is zero on these totals."""
    totals = np.asarray(total_counts, dtype=np.float64).reshape(-1)
    combiner.check_arity(totals.shape[0])
    _, degen = combine_batch(totals[None, :], combiner)
    return bool(degen[0])


def combine_batch(totals, combiner):
    """Vectorized combine over rows of a (B, k) totals array.

    Returns (values, degenerate_mask); degenerate rows carry value 0.0.
    """
    T = np.asarray(totals, dtype=np.float64)
    kind = combiner.kind
    if kind == "mean":
        return T[:, 0].copy(), np.zeros(T.shape[0], dtype=bool)
    if kind == "accuracy":
        num, den = T[:, 0], T[:, 1]
    elif kind == "precision":
        num, den = T[:, 0], T[:, 0] + T[:, 1]
    elif kind == "recall":
        num, den = T[:, 0], T[:, 0] + T[:, 2]
    elif kind == "ratio":
        num, den = T[:, combiner.num_idx], T[:, combiner.den_idx]
    elif kind == "f_beta":
        tp, fp, fn = T[:, 0], T[:, 1], T[:, 2]
        b2 = combiner.beta * combiner.beta
        p_den = tp + fp
        r_den = tp + fn
        degen = (p_den == 0) | (r_den == 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            p = np.where(p_den > 0, tp / p_den, 0.0)
            r = np.where(r_den > 0, tp / r_den, 0.0)
            f_den = b2 * p + r
            values = np.where(f_den > 0, (1.0 + b2) * (p * r) / f_den, 0.0)
        # zero denominator anywhere in the chain counts as degenerate,
        # P = R = 0 (tp = 0 with predictions and gold present) does not
        return values, degen
    else:  # pragma: no cover - guarded by Combiner validation
        raise InvalidArgument(f"unknown combiner kind {kind!r}")
    degen = den == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.where(degen, 0.0, num / np.where(degen, 1.0, den))
    return values, degen


def batch_statistic(totals, combiner, multiset_size):
    """Corpus statistics for rows of summed counts drawn as multisets.

    Identical to combine_batch except that the mean combiner divides by
    the multiset size (a sum alone cannot be a mean).  Every resampling
    path and corpus_statistic funnel through here, so the resampled and
    observed statistics are computed by literally the same code.
    """
    values, degen = combine_batch(totals, combiner)
    if combiner.kind == "mean":
        values = values / multiset_size
    return values, degen


def _side_counts(stats, side):
    if side == "A":
        return stats.a_counts
    if side == "B":
        return stats.b_counts
    raise InvalidArgument(f"side must be 'A' or 'B', got {side!r}")


def per_example_values(stats, side):
    """Per-example measure values combine(counts_i), as a float vector.

    This is the macro view used by the t-test branch and the normality
    gate; resampling tests use the micro view (summed counts) instead.
    """
    counts = _side_counts(stats, side)
    values, _ = batch_statistic(counts.astype(np.float64), stats.combiner, 1)
    return values


def corpus_statistic(stats, side, subset=None):
    """Corpus measure over a multiset of example indices.

    subset=None means every example once (the corpus measure).  Repeats
    are honoured: a duplicated index contributes its counts twice.
    """
    counts = _side_counts(stats, side)
    if subset is None:
        totals = counts.sum(axis=0)
        size = stats.n
    else:
        idx = np.asarray(subset, dtype=np.int64)
        if idx.size == 0:
            raise EmptySample("corpus statistic over an empty subset")
        if idx.min() < 0 or idx.max() >= stats.n:
            raise InvalidArgument("subset indices out of range")
        totals = counts[idx].sum(axis=0)
        size = idx.size
    values, _ = batch_statistic(totals[None, :].astype(np.float64), stats.combiner, size)
    return float(values[0])


# ---------------------------------------------------------------------------
# Correlation coefficients


def rankdata(x):
    """Average (fractional) ranks, 1-based; ties share the mean rank."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    order = np.argsort(x, kind="mergesort")
    sx = x[order]
    run_start = np.concatenate(([True], sx[1:] != sx[:-1]))
    run_id = np.cumsum(run_start) - 1
    run_len = np.bincount(run_id)
    run_end = np.cumsum(run_len)  # 1-based rank of each run's last member
    avg = run_end - 0.5 * (run_len - 1)  # mean of ranks (end-len+1)..end
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = avg[run_id]
    return ranks


def pearson_arrays(x, y):
    """Pearson r of two equal-length vectors; DegenerateSample on zero variance."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateSample("zero variance in a correlation input")
    r = float(xc @ yc) / np.sqrt(sxx * syy)
    # guard against rounding pushing |r| a hair past 1
    return float(np.clip(r, -1.0, 1.0))


def spearman_arrays(x, y):
    """Spearman rho: Pearson correlation of average ranks."""
    return pearson_arrays(rankdata(x), rankdata(y))


def pearson_r(sample):
    """Pearson correlation between a system's predictions and the gold."""
    return pearson_arrays(sample.predictions, sample.gold)


def spearman_rho(sample):
    """Spearman rank correlation between predictions and the gold."""
    return spearman_arrays(sample.predictions, sample.gold)
