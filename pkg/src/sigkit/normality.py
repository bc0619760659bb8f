"""D'Agostino-Pearson K-squared normality check.

Gates the parametric branch: a measure's parametric test is only offered
when the per-example deltas look plausibly normal.  K^2 combines the
sample skewness and kurtosis after normalizing each with its classic
small-sample transform (D'Agostino 1970 for skewness; Anscombe & Glynn
1983 for kurtosis) and refers Z1^2 + Z2^2 to chi-square with 2 degrees
of freedom.  Chosen over Shapiro-Wilk because the transforms are closed
form (no coefficient tables) and power is adequate at the n >= 20 sizes
where the parametric branch matters at all.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSample, InsufficientData, InvalidArgument
from .numerics import Probability, chi2_sf

__all__ = ["MIN_SAMPLES", "NormalityReport", "dagostino_k2"]

MIN_SAMPLES = 20


@dataclass(frozen=True)
class NormalityReport:
    """Outcome of the normality check at a configured level alpha_norm."""

    statistic: float
    p_value: Probability
    n: int
    alpha_norm: float
    method: str = "dagostino_k2"

    def __post_init__(self):
        object.__setattr__(self, "p_value", Probability(self.p_value))

    @property
    def passed(self):
        """True when the sample is consistent with normality (p > alpha)."""
        return self.p_value > self.alpha_norm


def _skewness_z(b1_sqrt, n):
    # D'Agostino (1970): transform sqrt(b1) to an approximate standard normal
    y = b1_sqrt * math.sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)))
    beta2 = (
        3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0)
        / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0))
    )
    w_sq = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w_sq))
    alpha = math.sqrt(2.0 / (w_sq - 1.0))
    return delta * math.asinh(y / alpha)


def _kurtosis_z(b2, n):
    # Anscombe & Glynn (1983): transform b2 through a Wilson-Hilferty cube root
    mean_b2 = 3.0 * (n - 1.0) / (n + 1.0)
    var_b2 = (
        24.0 * n * (n - 2.0) * (n - 3.0)
        / ((n + 1.0) ** 2 * (n + 3.0) * (n + 5.0))
    )
    x = (b2 - mean_b2) / math.sqrt(var_b2)
    skew_b2 = (
        6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0))
        * math.sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)))
    )
    a = 6.0 + 8.0 / skew_b2 * (2.0 / skew_b2 + math.sqrt(1.0 + 4.0 / skew_b2**2))
    term = (1.0 - 2.0 / a) / (1.0 + x * math.sqrt(2.0 / (a - 4.0)))
    return ((1.0 - 2.0 / (9.0 * a)) - math.copysign(abs(term) ** (1.0 / 3.0), term)) / math.sqrt(
        2.0 / (9.0 * a)
    )


def dagostino_k2(sample, alpha_norm=0.05):
    """Test a sample against normality; K^2 = Z1^2 + Z2^2 ~ chi^2(2).

    Needs n >= 20 (the kurtosis transform is unreliable below that, and a
    caller without enough data must fall back to nonparametric tests
    anyway) and nonzero variance.
    """
    alpha_norm = float(alpha_norm)
    if not 0.0 < alpha_norm < 1.0:
        raise InvalidArgument(f"alpha_norm must lie in (0, 1), got {alpha_norm}")
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidArgument("the sample must be one-dimensional")
    if not np.isfinite(x).all():
        raise InvalidArgument("the sample must be finite")
    n = x.shape[0]
    if n < MIN_SAMPLES:
        raise InsufficientData(
            f"normality check needs n >= {MIN_SAMPLES}, got {n}"
        )
    centered = x - x.mean()
    m2 = float((centered**2).mean())
    if m2 == 0.0:
        raise DegenerateSample("the sample has zero variance")
    m3 = float((centered**3).mean())
    m4 = float((centered**4).mean())
    b1_sqrt = m3 / m2**1.5
    b2 = m4 / m2**2
    z1 = _skewness_z(b1_sqrt, n)
    z2 = _kurtosis_z(b2, n)
    k2 = z1 * z1 + z2 * z2
    return NormalityReport(
        statistic=k2, p_value=chi2_sf(k2, 2), n=n, alpha_norm=alpha_norm
    )
