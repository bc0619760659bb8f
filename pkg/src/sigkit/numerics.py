"""Special functions for parametric p-values, on top of math alone.

Everything here is pure double-precision stdlib arithmetic: the normal CDF
rides on ``math.erfc``, Student's t on the regularized incomplete beta
(continued fraction), and the chi-square survival function on the
regularized incomplete gamma (series / continued fraction pair).  The
continued fractions are evaluated with the modified Lentz algorithm and
converge to ~1e-15 relative for every parameter range used by the tests,
which is comfortably inside the 1e-8 accuracy the callers need.

References
----------
.. [1] Press et al., "Numerical Recipes", 3rd ed., sections 6.2 (gamma)
   and 6.4 (beta).
.. [2] Lentz, W. J. (1976). Generating Bessel functions in Mie scattering
   calculations using continued fractions. Applied Optics 15(3).
"""

import math
import operator

from .errors import InvalidArgument

__all__ = [
    "Probability",
    "std_normal_cdf",
    "reg_inc_beta",
    "student_t_sf",
    "chi2_sf",
]

_EPS = 1e-15
_FPMIN = 1e-300
_MAXIT = 400


class Probability(float):
    """A float constrained to [0, 1]; construction outside the range raises."""

    def __new__(cls, value):
        v = float(value)
        if not 0.0 <= v <= 1.0:  # also rejects NaN
            raise InvalidArgument(f"probability must lie in [0, 1], got {value!r}")
        return super().__new__(cls, v)

    def __repr__(self):
        return f"Probability({float(self)!r})"


def _as_positive_int(value, name):
    try:
        n = operator.index(value)
    except TypeError:
        raise InvalidArgument(f"{name} must be a positive integer, got {value!r}") from None
    if n < 1:
        raise InvalidArgument(f"{name} must be >= 1, got {n}")
    return n


def std_normal_cdf(z):
    """Standard normal CDF Phi(z).

    Uses ``0.5 * erfc(-z / sqrt 2)``, which keeps full relative accuracy in
    the lower tail (no cancellation against 1).
    """
    z = float(z)
    if not math.isfinite(z):
        raise InvalidArgument(f"z must be finite, got {z!r}")
    return Probability(0.5 * math.erfc(-z / math.sqrt(2.0)))


def _betacf(a, b, x):
    # Continued fraction for the incomplete beta, modified Lentz.
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise InvalidArgument(
        f"incomplete beta continued fraction failed to converge (a={a}, b={b}, x={x})"
    )


def reg_inc_beta(a, b, x):
    """Regularized incomplete beta I_x(a, b).

    Direct continued fraction for x below the crossover (a+1)/(a+b+2),
    the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) above it, so the fraction is
    always evaluated where it converges fastest.
    """
    a = float(a)
    b = float(b)
    x = float(x)
    if not (a > 0.0 and b > 0.0):
        raise InvalidArgument(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise InvalidArgument(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf(t, df):
    """Survival function P[T_df > t] of Student's t.

    sf(t) = I_{df/(df+t^2)}(df/2, 1/2) / 2 for t >= 0, reflected for t < 0.
    """
    df = _as_positive_int(df, "df")
    t = float(t)
    if not math.isfinite(t):
        raise InvalidArgument(f"t must be finite, got {t!r}")
    if t == 0.0:
        return Probability(0.5)
    tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, df / (df + t * t))
    return Probability(tail if t > 0.0 else 1.0 - tail)


def _gamma_p_series(s, x):
    # Lower regularized gamma P(s, x) by power series; valid for x < s + 1.
    term = 1.0 / s
    total = term
    for n in range(1, _MAXIT + 1):
        term *= x / (s + n)
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + s * math.log(x) - math.lgamma(s))
    raise InvalidArgument(f"incomplete gamma series failed to converge (s={s}, x={x})")


def _gamma_q_cf(s, x):
    # Upper regularized gamma Q(s, x) by continued fraction; valid for x >= s + 1.
    b = x + 1.0 - s
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAXIT + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * math.exp(-x + s * math.log(x) - math.lgamma(s))
    raise InvalidArgument(f"incomplete gamma fraction failed to converge (s={s}, x={x})")


def chi2_sf(x, k):
    """Survival function P[X > x] of chi-square with k degrees of freedom."""
    k = _as_positive_int(k, "k")
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise InvalidArgument(f"x must be finite and >= 0, got {x!r}")
    if x == 0.0:
        return Probability(1.0)
    s = 0.5 * k
    half = 0.5 * x
    if half < s + 1.0:
        return Probability(1.0 - _gamma_p_series(s, half))
    return Probability(_gamma_q_cf(s, half))
