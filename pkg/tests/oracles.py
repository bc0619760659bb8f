"""Independent oracles the test suite checks sigkit against.

Every oracle here recomputes a quantity by a route deliberately different
from the implementation's: exact rational arithmetic where the answer is
rational (binomial tails), literal enumeration where the implementation
uses dynamic programming or sampling (Wilcoxon sign assignments,
permutation masks), adaptive quadrature where the implementation uses
continued fractions (Student t), and plain Python loops where the
implementation vectorizes (multiset count aggregation).  Values asserted
against these oracles are therefore corroborated by two unrelated
computations.
"""

import math
from fractions import Fraction
from itertools import product

import numpy as np
from scipy.integrate import quad

# ---------------------------------------------------------------------------
# Binomial tail (McNemar exact)


def binom_le_half(d, m):
    """P[Bin(d, 1/2) <= m] as an exact Fraction."""
    if m < 0:
        return Fraction(0)
    num = sum(math.comb(d, i) for i in range(min(m, d) + 1))
    return Fraction(num, 2**d)


def mcnemar_exact_two_sided(n10, n01):
    """Two-sided exact McNemar p as a float: min(1, 2 P[Bin(d,1/2) <= min])."""
    d = n10 + n01
    p = 2 * binom_le_half(d, min(n10, n01))
    return float(min(Fraction(1), p))


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank via literal 2^m sign enumeration


def _avg_ranks(values):
    """Average (fractional) ranks of `values`, 1-based, ties share the mean rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2.0  # positions are 0-based, ranks 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def wilcoxon_enum(deltas):
    """Exact signed-rank p-values by enumerating all 2^m sign assignments.

    Zeros are dropped first.  Returns (w_plus, {"two_sided": p, "greater": p,
    "less": p}).  All counting happens over doubled ranks, which are exact
    integers even with average-rank ties, so the returned floats are exact
    dyadic rationals.
    """
    d = [float(x) for x in deltas if x != 0.0]
    m = len(d)
    if m == 0:
        raise ValueError("all deltas are zero")
    ranks = _avg_ranks([abs(x) for x in d])
    r2 = [int(round(2 * r)) for r in ranks]
    w2_obs = sum(r2[i] for i in range(m) if d[i] > 0)
    total = 1 << m
    n_ge = 0
    n_le = 0
    for mask in range(total):
        w2 = 0
        for i in range(m):
            if mask >> i & 1:
                w2 += r2[i]
        if w2 >= w2_obs:
            n_ge += 1
        if w2 <= w2_obs:
            n_le += 1
    p_greater = n_ge / total
    p_less = n_le / total
    return 0.5 * w2_obs, {
        "two_sided": min(1.0, 2.0 * min(p_greater, p_less)),
        "greater": p_greater,
        "less": p_less,
    }


# ---------------------------------------------------------------------------
# Permutation (per-pair swap) via literal 2^n mask enumeration


def permutation_enum_mean(a, b, tail="two_sided"):
    """Exact swap-permutation p for the mean statistic, all 2^n masks.

    delta per mask is computed with math.fsum over signed per-pair deltas,
    an accumulation route independent of any vectorized implementation.
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    n = len(a)
    d = [a[i] - b[i] for i in range(n)]
    delta_obs = math.fsum(d) / n
    count = 0
    total = 1 << n
    for mask in range(total):
        signed = [-d[i] if mask >> i & 1 else d[i] for i in range(n)]
        delta = math.fsum(signed) / n
        if tail == "two_sided":
            hit = abs(delta) >= abs(delta_obs)
        elif tail == "greater":
            hit = delta >= delta_obs
        else:
            hit = delta <= delta_obs
        if hit:
            count += 1
    return count / total


def permutation_enum_counts(a_counts, b_counts, combiner_fn, tail="two_sided"):
    """Exact swap-permutation p for a sufficient-statistics corpus measure.

    combiner_fn maps a summed count vector (tuple of ints) to a float.
    Sums run over plain Python integers.
    """
    n = len(a_counts)
    k = len(a_counts[0])

    def stat(rows):
        totals = tuple(sum(r[j] for r in rows) for j in range(k))
        return combiner_fn(totals)

    delta_obs = stat(a_counts) - stat(b_counts)
    count = 0
    total = 1 << n
    for mask in range(total):
        side_a = [b_counts[i] if mask >> i & 1 else a_counts[i] for i in range(n)]
        side_b = [a_counts[i] if mask >> i & 1 else b_counts[i] for i in range(n)]
        delta = stat(side_a) - stat(side_b)
        if tail == "two_sided":
            hit = abs(delta) >= abs(delta_obs) - 1e-12
        elif tail == "greater":
            hit = delta >= delta_obs - 1e-12
        else:
            hit = delta <= delta_obs + 1e-12
        if hit:
            count += 1
    return count / total


# ---------------------------------------------------------------------------
# Student t survival function by adaptive quadrature


def t_sf_quad(t, df):
    """P[T_df > t] by adaptive quadrature of the t density.

    Splits at 0 so neither panel mixes the peak with a far tail; epsabs is
    two orders below the 1e-8 comparison tolerance.
    """
    c = math.exp(math.lgamma((df + 1) / 2.0) - math.lgamma(df / 2.0)) / math.sqrt(
        df * math.pi
    )

    def density(x):
        return c * (1.0 + x * x / df) ** (-(df + 1) / 2.0)

    if t >= 0:
        val, _ = quad(density, t, np.inf, epsabs=1e-11, epsrel=1e-11, limit=300)
        return val
    left, _ = quad(density, t, 0.0, epsabs=1e-11, epsrel=1e-11, limit=300)
    right, _ = quad(density, 0.0, np.inf, epsabs=1e-11, epsrel=1e-11, limit=300)
    return left + right


def beta_cdf_quad(a, b, x):
    """I_x(a, b) by adaptive quadrature of the beta density."""
    c = math.exp(math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b))

    def density(u):
        return c * u ** (a - 1.0) * (1.0 - u) ** (b - 1.0)

    val, _ = quad(density, 0.0, x, epsabs=1e-12, epsrel=1e-12, limit=300)
    return val


# ---------------------------------------------------------------------------
# Brute-force multiset aggregation (resampled F/precision correctness)


def multiset_statistic(count_rows, indices, combiner_fn):
    """Corpus statistic over a resample multiset, by explicit Python summation.

    count_rows: sequence of per-example count tuples; indices: the multiset
    (repeats allowed); combiner_fn: summed tuple -> float.  The integer sums
    here are exact, and combiner_fn is the definitional formula, so any
    implementation that aggregates correctly must match bit-for-bit.
    """
    k = len(count_rows[0])
    totals = [0] * k
    for i in indices:
        row = count_rows[i]
        for j in range(k):
            totals[j] += row[j]
    return combiner_fn(tuple(totals))


def f_beta_formula(tp, fp, fn, beta=1.0):
    """F_beta from (tp, fp, fn) exactly as defined: (1+b^2) PR / (b^2 P + R)."""
    p = tp / (tp + fp) if tp + fp > 0 else 0.0
    r = tp / (tp + fn) if tp + fn > 0 else 0.0
    if p == 0.0 and r == 0.0:
        return 0.0
    denom = beta * beta * p + r
    if denom == 0.0:
        return 0.0
    return (1.0 + beta * beta) * (p * r) / denom


# ---------------------------------------------------------------------------
# Pure-integer splitmix64 (reference for the resampling counter stream)

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64_stream(state, count):
    """First `count` outputs of splitmix64 from `state`, pure Python ints."""
    out = []
    s = state & _M64
    for _ in range(count):
        s = (s + _GOLDEN) & _M64
        x = s
        x = ((x ^ (x >> 30)) * _MIX1) & _M64
        x = ((x ^ (x >> 27)) * _MIX2) & _M64
        x ^= x >> 31
        out.append(x)
    return out


def splitmix64_mix(value):
    """The splitmix64 finalizer of `value` (no counter advance)."""
    x = value & _M64
    x = ((x ^ (x >> 30)) * _MIX1) & _M64
    x = ((x ^ (x >> 27)) * _MIX2) & _M64
    return x ^ (x >> 31)


def lemire_index(word32, n):
    """Bounded index (word32 * n) >> 32 as the kernel computes it."""
    return (word32 * n) >> 32


def bounded_indices(state, n_draw, n_items):
    """Index stream for one resample: two indices per splitmix64 word."""
    words = splitmix64_stream(state, (n_draw + 1) // 2)
    idx = []
    for w in words:
        idx.append(lemire_index(w & 0xFFFFFFFF, n_items))
        idx.append(lemire_index(w >> 32, n_items))
    return idx[:n_draw]


# ---------------------------------------------------------------------------
# Direct-formula correlation coefficients (definitional, small-n)


def pearson_direct(x, y):
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxy = math.fsum((x[i] - mx) * (y[i] - my) for i in range(n))
    sxx = math.fsum((x[i] - mx) ** 2 for i in range(n))
    syy = math.fsum((y[i] - my) ** 2 for i in range(n))
    return sxy / math.sqrt(sxx * syy)


def spearman_direct(x, y):
    return pearson_direct(_avg_ranks(list(x)), _avg_ranks(list(y)))


# ---------------------------------------------------------------------------
# Wilson score interval (binomial CI used by the validity harness)


def wilson_interval(successes, trials, z):
    """Wilson score interval for a binomial proportion."""
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    return centre - half, centre + half


if __name__ == "__main__":
    # spot checks from first principles
    assert mcnemar_exact_two_sided(2, 8) == 112 / 1024
    assert mcnemar_exact_two_sided(5, 0) == 2 / 32
    w, p = wilcoxon_enum([1.0, 2.0, 3.0])
    assert w == 6.0 and p["greater"] == 1 / 8
    assert abs(t_sf_quad(1.0, 1) - 0.25) < 1e-10
    assert f_beta_formula(5, 5, 0) == 2 / 3
    assert permutation_enum_mean([1, 2], [1, 2]) == 1.0
    print("oracle self-checks ok")
