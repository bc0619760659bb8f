"""The measure -> significance-test registry and the recommendation rule.

Each of the 19 evaluation-measure rows maps to an optional parametric
test and a set of nonparametric fallbacks.  ``recommend`` turns that
static table into a decision: offer the parametric test only when the
per-example deltas pass the normality check; otherwise (or when the row
has no parametric entry at all) fall back to a nonparametric test.

The parametric column is deliberately sparse.  The t-test applies where
the averaged per-example quantity can plausibly be normal (match rates,
accuracies, attachment scores, recall); it is *not* offered for
precision or F-score, whose denominators vary with the prediction side,
nor for any measure built from precision such as the coreference
family.  Correlations get the Fisher-transform z-test instead.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, InvalidArgument
from .normality import NormalityReport, dagostino_k2

__all__ = [
    "BASES",
    "MEASURES",
    "MeasureSpec",
    "Recommendation",
    "registry",
    "lookup",
    "recommend",
]

BASES = (
    "table_parametric_ok",
    "normality_failed",
    "no_parametric_exists",
    "insufficient_data_for_normality",
)

# numbered assumptions attached to table rows; keys used in reports
COMMENTS = {
    1: "t-test: assumes the average count of correct classifications is normally distributed",
    2: "bootstrap: assumes the dataset is representative of the whole population",
    3: "Fisher transformation: F(r) = 1/2 ln((1+r)/(1-r)) approximately normalizes r",
    4: "UAS and LAS are actually accuracy measures",
    5: "with a very large prediction space, non-sampling non-parametric tests are preferable",
    6: "the t-test can only be used for the recall metric, not precision or F-score",
    7: "coreference measures are functions of precision and recall, so parametric tests are not valid",
}


@dataclass(frozen=True)
class MeasureSpec:
    """One registry row: how a measure is ingested and which tests fit it."""

    measure_id: str
    parametric: str | None
    nonparametric: frozenset
    ingestion_form: str  # scores | counts | correctness | correlation
    comment_keys: frozenset
    example_task: str

    def __post_init__(self):
        object.__setattr__(self, "nonparametric", frozenset(self.nonparametric))
        object.__setattr__(self, "comment_keys", frozenset(self.comment_keys))
        if not self.nonparametric:
            raise InvalidArgument(
                f"{self.measure_id}: every measure needs a nonparametric fallback"
            )
        if not self.comment_keys <= set(COMMENTS):
            raise InvalidArgument(f"{self.measure_id}: unknown comment key")

    @property
    def default_nonparametric(self):
        """The nonparametric test chosen when the registry lists several.

        Permutation is preferred over bootstrap (its null is exact under
        pairing, no representativeness assumption needed) -- except for
        correlation measures, where resampling the (prediction, gold)
        pairs jointly is the only implemented scheme, hence bootstrap.
        """
        if len(self.nonparametric) == 1:
            return next(iter(self.nonparametric))
        if self.ingestion_form == "correlation":
            return "bootstrap"
        return "permutation"


def _row(measure_id, parametric, nonparametric, form, comments, task):
    return MeasureSpec(
        measure_id=measure_id,
        parametric=parametric,
        nonparametric=frozenset(nonparametric),
        ingestion_form=form,
        comment_keys=frozenset(comments),
        example_task=task,
    )


_BOTH = ("bootstrap", "permutation")

_REGISTRY = (
    _row("contingency_table", None, ("mcnemar",), "correctness", (), "binary sentiment classification"),
    _row("exact_match", "paired_t", _BOTH, "scores", (1, 2), "question answering"),
    _row("accuracy", "paired_t", _BOTH, "counts", (1, 2), "sequence labeling"),
    _row("recall", "paired_t", _BOTH, "counts", (1, 2, 6), "phrase-based (constituent) parsing"),
    _row("precision", None, _BOTH, "counts", (2, 6), "phrase-based (constituent) parsing"),
    _row("f_score", None, _BOTH, "counts", (2, 6), "semantic parsing"),
    _row("perplexity", None, ("wilcoxon",), "scores", (5,), "language modeling"),
    _row("spearman", "z_test", _BOTH, "correlation", (2, 3), "word similarity"),
    _row("pearson", "z_test", _BOTH, "correlation", (2, 3), "word similarity"),
    _row("uas", "paired_t", _BOTH, "scores", (1, 2, 4), "dependency parsing"),
    _row("las", "paired_t", _BOTH, "scores", (1, 2, 4), "dependency parsing"),
    _row("rouge", None, _BOTH, "scores", (2,), "summarization"),
    _row("bleu", None, _BOTH, "scores", (2,), "machine translation"),
    _row("meteor", None, _BOTH, "scores", (2,), "machine translation"),
    _row("pinc", None, _BOTH, "scores", (2,), "paraphrasing"),
    _row("cider", None, _BOTH, "scores", (2,), "image description generation"),
    _row("coref_family", None, _BOTH, "scores", (2, 7), "coreference resolution"),
    _row("agreement_family", None, _BOTH, "scores", (2,), "annotation reliability"),
    _row("mrr", None, _BOTH, "scores", (2,), "question answering, information retrieval"),
)

_BY_ID = {spec.measure_id: spec for spec in _REGISTRY}

MEASURES = tuple(spec.measure_id for spec in _REGISTRY)


def registry():
    """All measure specs, in table order."""
    return _REGISTRY


def lookup(measure_id):
    try:
        return _BY_ID[measure_id]
    except KeyError:
        raise InvalidArgument(
            f"unknown measure {measure_id!r}; expected one of {', '.join(MEASURES)}"
        ) from None


@dataclass(frozen=True)
class Recommendation:
    """Which test to run for a measure, and why."""

    measure_id: str
    test_id: str
    basis: str
    normality: NormalityReport | None = None

    def __post_init__(self):
        if self.basis not in BASES:
            raise InvalidArgument(f"unknown basis {self.basis!r}")
        if self.basis == "table_parametric_ok":
            if self.normality is None or not self.normality.passed:
                raise InvalidArgument(
                    "a parametric recommendation requires a passing normality report"
                )
        if self.basis == "normality_failed":
            if self.normality is None or self.normality.passed:
                raise InvalidArgument(
                    "basis normality_failed requires a failing normality report"
                )


def recommend(measure_id, deltas=None, alpha_norm=0.05):
    """Pick a test for the measure, gating parametric choices on normality.

    ``deltas`` (per-example A-minus-B differences) are required whenever
    the measure has a parametric option; they feed the normality check.
    Fewer than 20 deltas cannot support that check, so the recommendation
    falls back to the nonparametric default.
    """
    spec = lookup(measure_id)
    if spec.parametric is None:
        return Recommendation(
            measure_id=measure_id,
            test_id=spec.default_nonparametric,
            basis="no_parametric_exists",
        )
    if deltas is None:
        raise InvalidArgument(
            f"{measure_id} has a parametric option; per-example deltas are "
            "required to check normality"
        )
    deltas = np.asarray(deltas, dtype=np.float64)
    try:
        report = dagostino_k2(deltas, alpha_norm=alpha_norm)
    except InsufficientData:
        return Recommendation(
            measure_id=measure_id,
            test_id=spec.default_nonparametric,
            basis="insufficient_data_for_normality",
        )
    if report.passed:
        return Recommendation(
            measure_id=measure_id,
            test_id=spec.parametric,
            basis="table_parametric_ok",
            normality=report,
        )
    return Recommendation(
        measure_id=measure_id,
        test_id=spec.default_nonparametric,
        basis="normality_failed",
        normality=report,
    )
