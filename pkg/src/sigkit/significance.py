"""The paired significance tests: McNemar, t, Wilcoxon, bootstrap,
permutation, and the Fisher-transform correlation tests.

Conventions shared by every test
--------------------------------
* ``tail`` is one of ``two_sided`` (difference in either direction),
  ``greater`` (alternative: A beats B), ``less`` (alternative: B beats A).
* ``reject`` is ``p_value <= alpha``.
* Exact discrete p-values are computed by integer counting and divided by
  a power of two, so equal inputs give bit-equal p-values.
* Sampling tests draw from the counter streams in :mod:`sigkit.resample`;
  their results are a pure function of (inputs, seed, B or R) and carry
  the seed in the result.  The +1-smoothed estimate (count+1)/(B+1) keeps
  the p-value a valid level at any resample count.
* The bootstrap tests a shifted null: resampled deltas are recentred at
  the observed delta, so no assumption about the data generating a zero
  difference is needed.  The permutation null swaps each pair
  independently (approximate randomization), which is exactly level for
  exchangeable pairs.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import measures, resample
from .errors import DegenerateSample, InsufficientData, InvalidArgument
from .numerics import Probability, chi2_sf, std_normal_cdf, student_t_sf

__all__ = [
    "TAILS",
    "PairedOutcomeTable",
    "TestResult",
    "mcnemar",
    "paired_t",
    "wilcoxon_signed_rank",
    "paired_bootstrap",
    "permutation_test",
    "fisher_transform",
    "correlation_z_test",
    "correlation_z_independent",
    "correlation_bootstrap",
]

TAILS = ("two_sided", "greater", "less")

_MCNEMAR_EXACT_MAX = 25  # exact binomial below, corrected chi-square above
_WILCOXON_EXACT_MAX = 20  # 2^m enumeration bound
_PERMUTATION_EXACT_MAX = 20  # 2^n <= 2^20 masks
_REDRAW_LIMIT = 8  # bounded retries for degenerate correlation resamples


def _check_tail(tail):
    if tail not in TAILS:
        raise InvalidArgument(f"tail must be one of {TAILS}, got {tail!r}")


def _check_alpha(alpha):
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise InvalidArgument(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def _resolve_seed(seed):
    if seed is None:
        seed = np.random.SeedSequence().entropy
    return int(seed) & 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class PairedOutcomeTable:
    """2x2 cross-classification of the two systems' per-example correctness."""

    n11: int  # both correct
    n10: int  # A only
    n01: int  # B only
    n00: int  # both wrong

    def __post_init__(self):
        for name in ("n11", "n10", "n01", "n00"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise InvalidArgument(f"{name} must be a nonnegative integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.n < 1:
            raise InvalidArgument("the table must contain at least one example")

    @property
    def n(self):
        return self.n11 + self.n10 + self.n01 + self.n00

    @property
    def discordant(self):
        return self.n10 + self.n01

    @classmethod
    def from_correctness(cls, a, b):
        """Build the table from two 0/1 correctness vectors."""
        a = np.asarray(a)
        b = np.asarray(b)
        if a.shape != b.shape or a.ndim != 1:
            raise InvalidArgument("correctness vectors must be equal-length 1-D")
        if not (np.isin(a, (0, 1)).all() and np.isin(b, (0, 1)).all()):
            raise InvalidArgument("correctness values must be 0 or 1")
        a = a.astype(bool)
        b = b.astype(bool)
        return cls(
            n11=int((a & b).sum()),
            n10=int((a & ~b).sum()),
            n01=int((~a & b).sum()),
            n00=int((~a & ~b).sum()),
        )


@dataclass(frozen=True)
class TestResult:
    """Outcome of one significance test."""

    test_id: str
    statistic: float
    p_value: Probability
    tail: str
    n: int
    alpha: float
    reject: bool
    resamples: int | None = None
    seed: int | None = None
    notes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "p_value", Probability(self.p_value))
        object.__setattr__(self, "notes", tuple(self.notes))
        if self.reject != (self.p_value <= self.alpha):
            raise InvalidArgument("reject flag contradicts p_value <= alpha")


def _result(test_id, statistic, p, tail, n, alpha, resamples=None, seed=None, notes=()):
    p = Probability(p)
    return TestResult(
        test_id=test_id,
        statistic=float(statistic),
        p_value=p,
        tail=tail,
        n=int(n),
        alpha=alpha,
        reject=bool(p <= alpha),
        resamples=resamples,
        seed=seed,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# McNemar


def mcnemar(table, alpha=0.05):
    """McNemar's test on the discordant cells of a paired outcome table.

    Exact mode (discordant count d <= 25): two-sided binomial
    p = min(1, 2 P[Bin(d, 1/2) <= min(n10, n01)]), statistic = min(n10, n01).
    Above that, the continuity-corrected chi-square (|n10-n01|-1)^2 / d
    with 1 degree of freedom.  The test is inherently two-sided here.
    """
    alpha = _check_alpha(alpha)
    d = table.discordant
    if d == 0:
        raise DegenerateSample("systems never disagree; McNemar is undefined")
    if d <= _MCNEMAR_EXACT_MAX:
        k = min(table.n10, table.n01)
        # exact dyadic arithmetic: integer tail count over 2^d
        tail_count = sum(math.comb(d, i) for i in range(k + 1))
        p = min(1.0, 2.0 * (tail_count / 2**d))
        return _result("mcnemar", float(k), p, "two_sided", table.n, alpha, notes=("exact",))
    stat = (abs(table.n10 - table.n01) - 1.0) ** 2 / d
    p = chi2_sf(stat, 1)
    return _result(
        "mcnemar", stat, p, "two_sided", table.n, alpha,
        notes=("approximate", "continuity-corrected"),
    )


# ---------------------------------------------------------------------------
# Paired t


def paired_t(scores, tail="two_sided", alpha=0.05):
    """Matched-pair t-test on per-example deltas d_i = a_i - b_i.

    t = mean(d) / (sd(d) / sqrt(n)) with the n-1 sample deviation,
    referred to Student's t with n-1 degrees of freedom.
    """
    _check_tail(tail)
    alpha = _check_alpha(alpha)
    d = scores.deltas()
    n = d.shape[0]
    if n < 2:
        raise InsufficientData(f"paired t-test needs n >= 2, got {n}")
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        raise DegenerateSample("all per-example deltas are identical")
    t = float(d.mean()) / (sd / math.sqrt(n))
    df = n - 1
    if tail == "two_sided":
        p = min(1.0, 2.0 * student_t_sf(abs(t), df))
    elif tail == "greater":
        p = student_t_sf(t, df)
    else:
        p = student_t_sf(-t, df)
    return _result("paired_t", t, p, tail, n, alpha)


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank


def _signed_rank_setup(scores):
    d = scores.deltas()
    nz = d[d != 0.0]
    dropped = d.shape[0] - nz.shape[0]
    if nz.shape[0] == 0:
        raise DegenerateSample("all per-example deltas are zero")
    ranks = measures.rankdata(np.abs(nz))
    w_plus = float(ranks[nz > 0].sum())
    return nz, ranks, w_plus, dropped


def _wilcoxon_exact(ranks, w_plus, m):
    # Null distribution of W+ by subset-sum DP over doubled (integer)
    # ranks: identical to enumerating all 2^m sign assignments.
    r2 = np.rint(2.0 * ranks).astype(np.int64)
    total2 = int(r2.sum())
    counts = np.zeros(total2 + 1, dtype=np.int64)
    counts[0] = 1
    for r in r2:
        counts[r:] = counts[r:] + counts[:-r]
    w2 = int(round(2.0 * w_plus))
    denom = float(2**m)
    p_greater = float(counts[w2:].sum()) / denom
    p_less = float(counts[: w2 + 1].sum()) / denom
    return p_greater, p_less


def wilcoxon_signed_rank(scores, tail="two_sided", alpha=0.05, mode="auto"):
    """Wilcoxon signed-rank test on per-example deltas.

    Zero deltas are dropped; tied magnitudes share average ranks.  Exact
    mode enumerates the 2^m sign-assignment null of W+ (auto picks it for
    m <= 20 with no ties); approximate mode uses the normal approximation
    with the tie-corrected variance m(m+1)(2m+1)/24 - sum(t^3-t)/48 and a
    0.5 continuity correction.
    """
    _check_tail(tail)
    alpha = _check_alpha(alpha)
    if mode not in ("exact", "approx", "auto"):
        raise InvalidArgument(f"mode must be exact|approx|auto, got {mode!r}")
    nz, ranks, w_plus, dropped = _signed_rank_setup(scores)
    m = nz.shape[0]
    _, tie_counts = np.unique(np.abs(nz), return_counts=True)
    has_ties = bool((tie_counts > 1).any())
    if mode == "auto":
        mode = "exact" if (m <= _WILCOXON_EXACT_MAX and not has_ties) else "approx"
    elif mode == "exact" and m > _WILCOXON_EXACT_MAX:
        raise InvalidArgument(
            f"exact signed-rank enumeration is limited to {_WILCOXON_EXACT_MAX} "
            f"nonzero deltas, got {m}"
        )
    notes = []
    if dropped:
        notes.append(f"zeros_dropped={dropped}")

    if mode == "exact":
        p_greater, p_less = _wilcoxon_exact(ranks, w_plus, m)
        notes.insert(0, "exact")
    else:
        mu = m * (m + 1) / 4.0
        tie_term = float(((tie_counts**3 - tie_counts)).sum()) / 48.0
        sigma = math.sqrt(m * (m + 1) * (2 * m + 1) / 24.0 - tie_term)
        p_greater = std_normal_cdf(-(w_plus - mu - 0.5) / sigma)
        p_less = std_normal_cdf((w_plus - mu + 0.5) / sigma)
        notes.insert(0, "approximate")
        if tie_term > 0.0:
            notes.append("tie-corrected")

    if tail == "two_sided":
        p = min(1.0, 2.0 * min(p_greater, p_less))
    elif tail == "greater":
        p = p_greater
    else:
        p = p_less
    return _result(
        "wilcoxon", w_plus, p, tail, scores.n, alpha, notes=notes
    )


# ---------------------------------------------------------------------------
# Shared resampling plumbing


def _smoothed_count(hits, draws):
    return (int(hits) + 1) / (draws + 1)


def _tail_hits(deltas, delta_obs, tail, recentre):
    """Count resampled deltas at least as extreme as the observed one."""
    if recentre:
        deltas = deltas - delta_obs
    if tail == "two_sided":
        return int((np.abs(deltas) >= abs(delta_obs)).sum())
    if tail == "greater":
        return int((deltas >= delta_obs).sum())
    return int((deltas <= delta_obs).sum())


def _counts_setup(stats):
    """Observed totals/statistic and the degenerate check for count data."""
    comb = stats.combiner
    totals_a = stats.a_counts.sum(axis=0)
    totals_b = stats.b_counts.sum(axis=0)
    if measures.is_degenerate(totals_a, comb) or measures.is_degenerate(totals_b, comb):
        raise DegenerateSample(
            "the corpus-level combiner denominator is zero on the full data"
        )
    va, _ = measures.batch_statistic(totals_a[None, :].astype(float), comb, stats.n)
    vb, _ = measures.batch_statistic(totals_b[None, :].astype(float), comb, stats.n)
    return float(va[0]) - float(vb[0])


def paired_bootstrap(data, B=10_000, seed=None, tail="two_sided", alpha=0.05):
    """Paired bootstrap test of delta = statistic(A) - statistic(B).

    Draws B with-replacement resamples of the example index multiset,
    recomputes the corpus delta on each (through summed counts when the
    measure is non-decomposable), and refers the observed delta to the
    recentred resampling distribution:
    p = (#{|delta*_b - delta_obs| >= |delta_obs|} + 1) / (B + 1).
    """
    _check_tail(tail)
    alpha = _check_alpha(alpha)
    B = int(B)
    if B < 100:
        raise InvalidArgument(f"bootstrap needs B >= 100, got {B}")
    seed = _resolve_seed(seed)
    notes = []
    if isinstance(data, measures.PairedScores):
        n = data.n
        if n < 2:
            raise InsufficientData(f"bootstrap needs n >= 2, got {n}")
        d = data.deltas()
        delta_obs = float(np.sum(d)) / n
        deltas = resample.bootstrap_sums(d, seed, B) / n
    elif isinstance(data, measures.SufficientStats):
        n = data.n
        if n < 2:
            raise InsufficientData(f"bootstrap needs n >= 2, got {n}")
        delta_obs = _counts_setup(data)
        k = data.arity
        X = np.hstack([data.a_counts, data.b_counts]).astype(np.float64)
        sums = resample.bootstrap_col_sums(X, seed, B)
        va, da = measures.batch_statistic(sums[:, :k], data.combiner, n)
        vb, db = measures.batch_statistic(sums[:, k:], data.combiner, n)
        deltas = va - vb
        degen = int((da | db).sum())
        if degen:
            notes.append(f"degenerate_resamples={degen}")
    else:
        raise InvalidArgument(
            f"bootstrap expects PairedScores or SufficientStats, got {type(data).__name__}"
        )
    hits = _tail_hits(deltas, delta_obs, tail, recentre=True)
    p = _smoothed_count(hits, B)
    return _result(
        "bootstrap", delta_obs, p, tail, n, alpha, resamples=B, seed=seed, notes=notes
    )


def _permutation_deltas_exact(data):
    """All 2^n permuted deltas (chunked) plus the observed delta."""
    if isinstance(data, measures.PairedScores):
        d = data.deltas()
        n = data.n
        # Signed sums (+-1) @ d rather than total - 2*swapped: negating the
        # sign vector negates the dot product bit-exactly, so a mask and its
        # complement always land symmetrically around zero.  Taking the
        # threshold from the identity row (the first mask) then guarantees
        # the identity and full-swap masks both count as hits, whatever
        # rounding the BLAS reduction uses.
        delta_obs = None
        for masks in resample.enumerate_swap_masks(n):
            signs = 1.0 - 2.0 * masks.astype(np.float64)
            deltas = (signs @ d) / n
            if delta_obs is None:
                delta_obs = float(deltas[0])
            yield deltas, delta_obs
    else:
        comb = data.combiner
        n = data.n
        delta_obs = _counts_setup(data)
        ta = data.a_counts.sum(axis=0).astype(np.float64)
        tb = data.b_counts.sum(axis=0).astype(np.float64)
        diff = (data.b_counts - data.a_counts).astype(np.float64)
        for masks in resample.enumerate_swap_masks(n):
            moved = masks.astype(np.float64) @ diff  # (chunk, k)
            va, _ = measures.batch_statistic(ta[None, :] + moved, comb, n)
            vb, _ = measures.batch_statistic(tb[None, :] - moved, comb, n)
            yield va - vb, delta_obs


def permutation_test(data, R=10_000, seed=None, tail="two_sided", alpha=0.05, mode="auto"):
    """Paired permutation (approximate randomization) test.

    The null swaps A_i with B_i independently per pair.  Exact mode
    enumerates all 2^n swap masks (p = count / 2^n, identity included);
    sampled mode draws R masks from the counter stream and reports the
    smoothed p = (count + 1) / (R + 1).  auto enumerates when 2^n <= 2^20.
    """
    _check_tail(tail)
    alpha = _check_alpha(alpha)
    if mode not in ("exact", "sampled", "auto"):
        raise InvalidArgument(f"mode must be exact|sampled|auto, got {mode!r}")
    if not isinstance(data, (measures.PairedScores, measures.SufficientStats)):
        raise InvalidArgument(
            f"permutation expects PairedScores or SufficientStats, got {type(data).__name__}"
        )
    n = data.n
    if n < 2:
        raise InsufficientData(f"permutation needs n >= 2, got {n}")
    if mode == "auto":
        mode = "exact" if n <= _PERMUTATION_EXACT_MAX else "sampled"
    elif mode == "exact" and n > _PERMUTATION_EXACT_MAX:
        raise InvalidArgument(
            f"exact permutation is limited to n <= {_PERMUTATION_EXACT_MAX}, got {n}"
        )

    if mode == "exact":
        hits = 0
        delta_obs = None
        for deltas, delta_obs in _permutation_deltas_exact(data):
            hits += _tail_hits(deltas, delta_obs, tail, recentre=False)
        p = hits / 2**n
        return _result(
            "permutation", delta_obs, p, tail, n, alpha, notes=("exact",)
        )

    R = int(R)
    if R < 100:
        raise InvalidArgument(f"sampled permutation needs R >= 100, got {R}")
    seed = _resolve_seed(seed)
    notes = []
    if isinstance(data, measures.PairedScores):
        d = data.deltas()
        # An identity-mask draw reproduces the observed delta as an exact
        # tie, so the observed sum must use the kernel's own sequential
        # accumulation order (np.sum's pairwise order can differ by an
        # ulp and silently flip those ties out of the count).
        delta_obs = float(np.add.accumulate(d)[-1]) / n
        deltas = resample.swap_signed_sums(d, seed, R) / n
    else:
        comb = data.combiner
        delta_obs = _counts_setup(data)
        ta = data.a_counts.sum(axis=0).astype(np.float64)
        tb = data.b_counts.sum(axis=0).astype(np.float64)
        diff = (data.b_counts - data.a_counts).astype(np.float64)
        moved = resample.swap_col_sums(diff, seed, R)
        va, da = measures.batch_statistic(ta[None, :] + moved, comb, n)
        vb, db = measures.batch_statistic(tb[None, :] - moved, comb, n)
        deltas = va - vb
        degen = int((da | db).sum())
        if degen:
            notes.append(f"degenerate_resamples={degen}")
    hits = _tail_hits(deltas, delta_obs, tail, recentre=False)
    p = _smoothed_count(hits, R)
    return _result(
        "permutation", delta_obs, p, tail, n, alpha,
        resamples=R, seed=seed, notes=notes,
    )


# ---------------------------------------------------------------------------
# Correlations


def fisher_transform(r):
    """Fisher's F(r) = 1/2 ln((1+r)/(1-r)), the variance-stabilizing map."""
    r = float(r)
    if not abs(r) < 1.0:
        raise InvalidArgument(f"fisher transform requires |r| < 1, got {r}")
    return math.atanh(r)


def correlation_z_test(kind, r, n, tail="two_sided", alpha=0.05, r0=0.0):
    """z-test for a correlation coefficient through the Fisher transform.

    pearson: z = (F(r) - F(r0)) * sqrt(n - 3), from F(r) ~ Normal(F(rho),
    1/sqrt(n-3)).  spearman (r0 = 0 only): z = sqrt((n-3)/1.06) * F(r).
    """
    _check_tail(tail)
    alpha = _check_alpha(alpha)
    if kind not in ("pearson", "spearman"):
        raise InvalidArgument(f"kind must be pearson or spearman, got {kind!r}")
    n = int(n)
    if n <= 3:
        raise InsufficientData(f"correlation z-test needs n > 3, got {n}")
    if kind == "spearman":
        if r0 != 0.0:
            raise InvalidArgument("the spearman z-test only supports r0 = 0")
        z = math.sqrt((n - 3) / 1.06) * fisher_transform(r)
    else:
        z = (fisher_transform(r) - fisher_transform(r0)) * math.sqrt(n - 3)
    if tail == "two_sided":
        p = min(1.0, 2.0 * std_normal_cdf(-abs(z)))
    elif tail == "greater":
        p = std_normal_cdf(-z)
    else:
        p = std_normal_cdf(z)
    return _result(f"{kind}_z", z, p, tail, n, alpha)


def correlation_z_independent(kind, r_a, r_b, n, tail="two_sided", alpha=0.05):
    """z-test comparing two correlations measured on samples of size n.

    z = (F(r_a) - F(r_b)) / sqrt(2 c / (n - 3)) with c = 1.06 for
    spearman, 1 otherwise.  Valid when the two correlations are
    independent; two systems scored against the *same* gold violate
    that, so the result carries an ``independence-assumed`` note and the
    dependent case is better served by correlation_bootstrap.
    """
    _check_tail(tail)
    alpha = _check_alpha(alpha)
    if kind not in ("pearson", "spearman"):
        raise InvalidArgument(f"kind must be pearson or spearman, got {kind!r}")
    n = int(n)
    if n <= 3:
        raise InsufficientData(f"correlation z-test needs n > 3, got {n}")
    c = 1.06 if kind == "spearman" else 1.0
    z = (fisher_transform(r_a) - fisher_transform(r_b)) / math.sqrt(2.0 * c / (n - 3))
    if tail == "two_sided":
        p = min(1.0, 2.0 * std_normal_cdf(-abs(z)))
    elif tail == "greater":
        p = std_normal_cdf(-z)
    else:
        p = std_normal_cdf(z)
    return _result(
        f"{kind}_z_independent", z, p, tail, n, alpha,
        notes=("independence-assumed",),
    )


def correlation_bootstrap(
    sample_a, sample_b, kind="pearson", B=10_000, seed=None, tail="two_sided", alpha=0.05
):
    """Bootstrap test of corr(A, gold) - corr(B, gold) on a shared gold.

    Resamples example indices jointly for both systems and the gold, so
    the dependence between the two correlations is preserved.  Resamples
    that lose all variance in some vector are redrawn from a fresh
    substream (bounded retries); p-value as in paired_bootstrap.
    """
    _check_tail(tail)
    alpha = _check_alpha(alpha)
    if kind not in ("pearson", "spearman"):
        raise InvalidArgument(f"kind must be pearson or spearman, got {kind!r}")
    if B < 100:
        raise InvalidArgument(f"bootstrap needs B >= 100, got {B}")
    if sample_a.n != sample_b.n or not np.array_equal(sample_a.gold, sample_b.gold):
        raise InvalidArgument("both correlation samples must share one gold vector")
    seed = _resolve_seed(seed)
    corr = measures.pearson_arrays if kind == "pearson" else measures.spearman_arrays
    n = sample_a.n
    gold = sample_a.gold
    pa = sample_a.predictions
    pb = sample_b.predictions
    delta_obs = corr(pa, gold) - corr(pb, gold)  # DegenerateSample propagates

    deltas = np.empty(B)
    redrawn = 0
    for r in range(B):
        for attempt in range(_REDRAW_LIMIT + 1):
            idx = resample.resample_indices(seed, r, n, n, attempt=attempt)
            try:
                deltas[r] = corr(pa[idx], gold[idx]) - corr(pb[idx], gold[idx])
            except DegenerateSample:
                redrawn += 1
                continue
            break
        else:
            raise DegenerateSample(
                f"resample {r} stayed variance-free after {_REDRAW_LIMIT} redraws"
            )
    notes = [f"redrawn_resamples={redrawn}"] if redrawn else []
    hits = _tail_hits(deltas, delta_obs, tail, recentre=True)
    p = _smoothed_count(hits, B)
    return _result(
        f"{kind}_bootstrap", delta_obs, p, tail, n, alpha,
        resamples=B, seed=seed, notes=notes,
    )
