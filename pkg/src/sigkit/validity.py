"""Monte Carlo harness checking that each test's type-I error stays at
or below its nominal level, and estimating power under alternatives.

Every trial's dataset is a pure function of (generator.seed, trial), so
two different tests evaluated against the same generator see the same
per-trial samples -- power comparisons are paired, which removes most
of the Monte Carlo noise from their difference.  The test-side
randomness (bootstrap/permutation draws) comes from the harness seed
through a separate counter substream.

Resampling tests run with B = 1000 by default inside the harness: the
+1-smoothed p-value (count+1)/(B+1) is a valid level at any resample
count, so reducing B only costs power, never validity.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import measures, resample, significance
from .errors import DegenerateSample, InvalidArgument

__all__ = [
    "FAMILIES",
    "HARNESS_TESTS",
    "NullGenerator",
    "RateEstimate",
    "type1_error_rate",
    "power_rate",
    "default_grid",
    "write_csv",
]

FAMILIES = (
    "paired_normal",
    "paired_laplace",
    "paired_bernoulli_correctness",
    "exchangeable_counts",
    "independent_gaussians_for_correlation",
)

_FAMILY_FORM = {
    "paired_normal": "scores",
    "paired_laplace": "scores",
    "paired_bernoulli_correctness": "correctness",
    "exchangeable_counts": "counts",
    "independent_gaussians_for_correlation": "correlation",
}

_IDS_CACHE = {}


def _ids(n):
    if n not in _IDS_CACHE:
        _IDS_CACHE[n] = tuple(f"s{i}" for i in range(n))
    return _IDS_CACHE[n]


@dataclass(frozen=True)
class NullGenerator:
    """A data-generating process whose two systems perform equally.

    ``effect`` shifts system A away from the null: 0 keeps the two
    systems exchangeable (the null holds); positive values give A an
    advantage of that size, for power estimation.
    """

    family: str
    n: int
    scale: float = 1.0
    effect: float = 0.0
    base_rate: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgument(
                f"family must be one of {FAMILIES}, got {self.family!r}"
            )
        if self.n < 2:
            raise InvalidArgument(f"n must be >= 2, got {self.n}")
        if self.scale <= 0.0:
            raise InvalidArgument(f"scale must be positive, got {self.scale}")
        if not 0.0 < self.base_rate < 1.0:
            raise InvalidArgument(
                f"base_rate must lie in (0, 1), got {self.base_rate}"
            )

    @property
    def form(self):
        return _FAMILY_FORM[self.family]

    def sample(self, trial):
        """The dataset for one trial; depends only on (seed, trial)."""
        rng = np.random.default_rng((int(self.seed), int(trial)))
        n = self.n
        if self.family in ("paired_normal", "paired_laplace"):
            noise = rng.normal if self.family == "paired_normal" else rng.laplace
            common = rng.normal(0.0, 1.0, n)
            a = common + self.effect + self.scale * noise(0.0, 1.0, n)
            b = common + self.scale * noise(0.0, 1.0, n)
            return measures.PairedScores(ids=_ids(n), a=a, b=b)
        if self.family == "paired_bernoulli_correctness":
            p_a = min(1.0 - 1e-9, self.base_rate + self.effect)
            a = (rng.random(n) < p_a).astype(np.int64)
            b = (rng.random(n) < self.base_rate).astype(np.int64)
            return measures.PairedScores(ids=_ids(n), a=a, b=b)
        if self.family == "exchangeable_counts":
            # shared per-example workload, per-side retrieval noise
            relevant = 1 + rng.poisson(3.0 * self.scale, n)
            p_a = min(1.0 - 1e-9, self.base_rate + self.effect)
            tp_a = rng.binomial(relevant, p_a)
            tp_b = rng.binomial(relevant, self.base_rate)
            fp_a = rng.poisson(1.0, n)
            fp_b = rng.poisson(1.0, n)
            a_rows = np.stack([tp_a, fp_a, relevant - tp_a], axis=1)
            b_rows = np.stack([tp_b, fp_b, relevant - tp_b], axis=1)
            return measures.SufficientStats(
                ids=_ids(n),
                a_counts=a_rows,
                b_counts=b_rows,
                combiner=measures.Combiner("f_beta"),
            )
        # independent_gaussians_for_correlation
        gold = rng.normal(0.0, 1.0, n)
        pred_a = self.effect * gold + self.scale * rng.normal(0.0, 1.0, n)
        pred_b = self.scale * rng.normal(0.0, 1.0, n)
        return (
            measures.CorrelationSample(pred_a, gold),
            measures.CorrelationSample(pred_b, gold),
        )


# ---------------------------------------------------------------------------
# Per-test runners


def _run_paired_t(data, alpha, seed, B):
    return significance.paired_t(data, alpha=alpha)


def _run_wilcoxon_approx(data, alpha, seed, B):
    return significance.wilcoxon_signed_rank(data, alpha=alpha, mode="approx")


def _run_wilcoxon_exact(data, alpha, seed, B):
    return significance.wilcoxon_signed_rank(data, alpha=alpha, mode="exact")


def _run_mcnemar(data, alpha, seed, B):
    table = significance.PairedOutcomeTable.from_correctness(data.a, data.b)
    return significance.mcnemar(table, alpha=alpha)


def _run_bootstrap(data, alpha, seed, B):
    return significance.paired_bootstrap(data, B=B, seed=seed, alpha=alpha)


def _run_permutation(data, alpha, seed, B):
    return significance.permutation_test(
        data, R=B, seed=seed, alpha=alpha, mode="sampled"
    )


def _run_z_test(data, alpha, seed, B):
    sample_a, _ = data
    r = measures.pearson_r(sample_a)
    return significance.correlation_z_test(
        "pearson", r, sample_a.n, alpha=alpha
    )


def _run_correlation_bootstrap(data, alpha, seed, B):
    sample_a, sample_b = data
    return significance.correlation_bootstrap(
        sample_a, sample_b, B=B, seed=seed, alpha=alpha
    )


# test id -> (acceptable data forms, runner)
HARNESS_TESTS = {
    "paired_t": (("scores", "correctness"), _run_paired_t),
    "wilcoxon_approx": (("scores", "correctness"), _run_wilcoxon_approx),
    "wilcoxon_exact": (("scores", "correctness"), _run_wilcoxon_exact),
    "mcnemar": (("correctness",), _run_mcnemar),
    "bootstrap": (("scores", "correctness", "counts"), _run_bootstrap),
    "permutation": (("scores", "correctness", "counts"), _run_permutation),
    "z_test": (("correlation",), _run_z_test),
    "correlation_bootstrap": (("correlation",), _run_correlation_bootstrap),
}

_WILSON_Z99 = 2.5758293035489004  # Phi^{-1}(0.995)


def _wilson_99(successes, trials):
    z = _WILSON_Z99
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2.0 * trials)) / denom
    half = (
        z
        * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials))
        / denom
    )
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class RateEstimate:
    """Empirical rejection rate with a 99% Wilson interval."""

    test_id: str
    family: str
    n: int
    alpha: float
    trials: int
    rejections: int
    degenerate_trials: int

    @property
    def rate(self):
        return self.rejections / self.trials

    @property
    def ci99(self):
        return _wilson_99(self.rejections, self.trials)


def _rejection_rate(test_id, generator, trials, alpha, seed, resamples):
    if test_id not in HARNESS_TESTS:
        raise InvalidArgument(
            f"unknown harness test {test_id!r}; expected one of "
            f"{', '.join(sorted(HARNESS_TESTS))}"
        )
    forms, runner = HARNESS_TESTS[test_id]
    if generator.form not in forms:
        raise InvalidArgument(
            f"{test_id} cannot consume {generator.family} data "
            f"(form {generator.form}; needs one of {forms})"
        )
    trials = int(trials)
    if trials < 1000:
        raise InvalidArgument(f"need at least 1000 trials, got {trials}")
    rejections = 0
    degenerate = 0
    for trial in range(trials):
        data = generator.sample(trial)
        test_seed = int(resample.subseed(seed, resample.ROLE_TRIAL, trial))
        try:
            result = runner(data, alpha, test_seed, resamples)
        except DegenerateSample:
            # a test that refuses to answer cannot commit a type-I error
            degenerate += 1
            continue
        if result.reject:
            rejections += 1
    return RateEstimate(
        test_id=test_id,
        family=generator.family,
        n=generator.n,
        alpha=alpha,
        trials=trials,
        rejections=rejections,
        degenerate_trials=degenerate,
    )


def type1_error_rate(test_id, generator, trials=10_000, alpha=0.05, seed=0, resamples=1000):
    """Empirical probability of rejecting a true null at level alpha."""
    if generator.effect != 0.0:
        raise InvalidArgument(
            "type-I error requires a null generator (effect = 0); "
            "use power_rate for alternatives"
        )
    return _rejection_rate(test_id, generator, trials, alpha, seed, resamples)


def power_rate(test_id, generator, trials=10_000, alpha=0.05, seed=0, resamples=1000):
    """Empirical rejection rate under the generator's alternative.

    With effect = 0 this is exactly the type-I error rate.
    """
    return _rejection_rate(test_id, generator, trials, alpha, seed, resamples)


def default_grid(trials=10_000, alpha=0.05, seed=0, resamples=1000):
    """The standard validity sweep: every test on a matching null.

    Returns the list of RateEstimates.  Sampling tests run at the
    reduced in-harness resample count; exact discrete tests are expected
    to land at or below alpha (often well below, by discreteness).
    """
    cells = [
        ("paired_t", NullGenerator("paired_normal", n=100)),
        ("wilcoxon_approx", NullGenerator("paired_normal", n=100)),
        ("wilcoxon_exact", NullGenerator("paired_normal", n=15)),
        ("mcnemar", NullGenerator("paired_bernoulli_correctness", n=100)),
        ("bootstrap", NullGenerator("paired_normal", n=100)),
        ("permutation", NullGenerator("paired_normal", n=100)),
        ("bootstrap", NullGenerator("exchangeable_counts", n=50)),
        ("permutation", NullGenerator("exchangeable_counts", n=50)),
        ("z_test", NullGenerator("independent_gaussians_for_correlation", n=100)),
    ]
    return [
        type1_error_rate(test_id, gen, trials=trials, alpha=alpha, seed=seed,
                         resamples=resamples)
        for test_id, gen in cells
    ]


def write_csv(estimates, stream):
    """Emit (test, generator, n, alpha, rate, ci_low, ci_high) rows."""
    writer = csv.writer(stream)
    writer.writerow(["test", "generator", "n", "alpha", "rate", "ci_low", "ci_high"])
    for est in estimates:
        low, high = est.ci99
        writer.writerow([
            est.test_id,
            est.family,
            est.n,
            f"{est.alpha:g}",
            f"{est.rate:.6f}",
            f"{low:.6f}",
            f"{high:.6f}",
        ])
