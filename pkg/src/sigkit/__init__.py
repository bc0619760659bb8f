"""sigkit: valid paired significance tests for NLP evaluation measures.

The package answers three questions about a pair of systems evaluated on
the same test set:

* which significance test fits this evaluation measure (``recommend``),
* what is the p-value (``significance``), and
* does the chosen test actually hold its nominal level (``validity``).

Flat imports cover the common surface::

    from sigkit import recommend, paired_bootstrap, PairedScores
"""

__version__ = "0.1.0"

from .errors import (
    DataError,
    DegenerateSample,
    EmptySample,
    InsufficientData,
    InvalidArgument,
    SigkitError,
)
from .measures import Combiner, CorrelationSample, PairedScores, SufficientStats
from .normality import NormalityReport, dagostino_k2
from .recommend import MeasureSpec, Recommendation, lookup, recommend, registry
from .significance import (
    PairedOutcomeTable,
    TestResult,
    correlation_bootstrap,
    correlation_z_independent,
    correlation_z_test,
    fisher_transform,
    mcnemar,
    paired_bootstrap,
    paired_t,
    permutation_test,
    wilcoxon_signed_rank,
)
from .validity import NullGenerator, RateEstimate, default_grid, power_rate, type1_error_rate
from .data_io import Report, load_input, parse_report, render_report

__all__ = [
    "__version__",
    # errors
    "SigkitError",
    "InvalidArgument",
    "DataError",
    "EmptySample",
    "InsufficientData",
    "DegenerateSample",
    # data containers
    "PairedScores",
    "SufficientStats",
    "Combiner",
    "CorrelationSample",
    "PairedOutcomeTable",
    # tests
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
    # normality gate
    "NormalityReport",
    "dagostino_k2",
    # recommendation registry
    "MeasureSpec",
    "Recommendation",
    "registry",
    "lookup",
    "recommend",
    # validity harness
    "NullGenerator",
    "RateEstimate",
    "type1_error_rate",
    "power_rate",
    "default_grid",
    # ingestion and reports
    "Report",
    "load_input",
    "render_report",
    "parse_report",
]
