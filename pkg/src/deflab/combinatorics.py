"""Exact integer combinatorics and the closed-form probability layer.

Everything in here is arbitrary-precision: counts like 2646**k and (3k)!
overflow machine words by k=4, so all counting stays in Python ints and
``fractions.Fraction``. Floating point enters only at the final
probability / series-evaluation step.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "binomial",
    "stirling2",
    "falling",
    "multifactorial",
    "perfect_matching_count",
    "disjoint_pair_class_count",
    "nondisjoint_class_bound",
    "disjoint_triple_class_count",
    "rate_dary",
    "rate_exceedance",
    "rate_is_conjectural",
    "limit_rate",
    "limit_probability",
    "partial_ie_sum",
    "partial_ie_sum_exact",
    "float_or_inf",
    "expected_count",
    "triple_low_exceedance_bound",
]


def binomial(n: int, m: int) -> int:
    """C(n, m), exactly. m > n yields 0."""
    if n < 0 or m < 0:
        raise ValueError(f"binomial requires nonnegative arguments, got ({n}, {m})")
    if m > n:
        return 0
    return math.comb(n, m)


@lru_cache(maxsize=None)
def stirling2(n: int, m: int) -> int:
    """Stirling number of the second kind {n brace m}.

    Recurrence S(n,m) = m*S(n-1,m) + S(n-1,m-1) with S(0,0) = 1.
    """
    if n < 0 or m < 0:
        raise ValueError(f"stirling2 requires nonnegative arguments, got ({n}, {m})")
    if n == 0:
        return 1 if m == 0 else 0
    if m == 0 or m > n:
        return 0
    return m * stirling2(n - 1, m) + stirling2(n - 1, m - 1)


def falling(n: int, m: int) -> int:
    """Falling factorial [n]_m = n(n-1)...(n-m+1). Requires n >= m >= 0."""
    if m < 0:
        raise ValueError(f"falling factorial requires m >= 0, got m={m}")
    if n < m:
        raise ValueError(f"falling factorial requires n >= m, got n={n}, m={m}")
    out = 1
    for i in range(m):
        out *= n - i
    return out


def multifactorial(n: int, step: int) -> int:
    """n * (n-step) * (n-2*step) * ... down to the last positive factor.

    step=1 is the factorial, step=2 the double factorial, step=3 the
    triple factorial. n <= 0 gives the empty product 1.
    """
    if step not in (1, 2, 3):
        raise ValueError(f"step must be 1, 2 or 3, got {step}")
    out = 1
    while n > 0:
        out *= n
        n -= step
    return out


def perfect_matching_count(k: int) -> int:
    """Number of perfect matchings on 2k totally ordered vertices: (2k-1)!!."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    return multifactorial(2 * k - 1, 2)


def disjoint_pair_class_count(k: int) -> int:
    """Equivalence classes of disjoint k-configurations (n >= 2k): 7^k * (2k-1)!!."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return 7**k * perfect_matching_count(k)


def nondisjoint_class_bound(k: int) -> int:
    """Upper bound 7^k * 2^(2k^2-k) on classes of arbitrary k-configurations."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return 7**k * 2 ** (2 * k * k - k)


def disjoint_triple_class_count(k: int) -> int:
    """Classes of disjoint k-configurations of exceedance-3 triples (n >= 3k).

    Defined by the recurrence D(0) = 1, D(k) = 2646*(3k-1)(3k-2)/2 * D(k-1).
    Equivalently 2646^k * (3k)! / ((3k)!!! * 2^k); the series coefficient
    D(k)/(3k)! collapses to (2646/6)^k / k!.
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    out = 1
    for i in range(1, k + 1):
        step = 2646 * (3 * i - 1) * (3 * i - 2)
        assert step % 2 == 0
        out *= step // 2
    return out


def rate_dary(d: int) -> Fraction:
    """Poisson rate for 2-element deficiency under a d-ary operation.

    {2^d brace 2} / 2 = (2^(2^d - 1) - 1) / 2. d=2 gives 7/2.
    """
    if d < 2:
        raise ValueError(f"arity must be >= 2, got d={d}")
    return Fraction(stirling2(2**d, 2), 2)


def rate_exceedance(s: int) -> Fraction:
    """Poisson rate for s-element subsets at the critical exceedance s^2 - 2s.

    {s^2 brace s^2-s} / s!. Anchored at s=2 (7/2) and s=3 (441); values for
    s >= 4 extrapolate the pattern and are flagged by rate_is_conjectural.
    """
    if s < 2:
        raise ValueError(f"subset size must be >= 2, got s={s}")
    return Fraction(stirling2(s * s, s * s - s), math.factorial(s))


def rate_is_conjectural(d: int = 2, s: int = 2, eps: int = 0) -> bool:
    """Whether the limit rate for (d, s, eps) is backed by a proved statement.

    Proved: binary/d-ary 2-element deficiency (s=2, eps=0) and the binary
    3-element exceedance-3 case. Everything else is the natural
    extrapolation of the first-moment computation.
    """
    if s == 2 and eps == 0:
        return False
    if d == 2 and s == 3 and eps == 3:
        return False
    return True


def limit_rate(d: int, s: int, eps: int) -> Fraction | None:
    """Limit n->oo of the expected number of s-subsets with exceedance <= eps.

    Returns None when the expectation diverges (limit probability 1).
    The generic first-moment term for exactly b distinct values scales as
    n^(s + b - s^d); the largest admissible b is min(s + eps, s^d).
    """
    if d < 2 or s < 2:
        raise ValueError(f"need d >= 2 and s >= 2, got d={d}, s={s}")
    if eps < 1 - s:
        return Fraction(0)
    b = min(s + eps, s**d)
    exponent = s + b - s**d
    if exponent < 0:
        return Fraction(0)
    if exponent > 0:
        return None
    return Fraction(stirling2(s**d, b), math.factorial(s))


def limit_probability(rate: Fraction | float) -> float:
    """1 - e^(-rate) in double precision."""
    lam = float(rate)
    if lam < 0:
        raise ValueError(f"rate must be nonnegative, got {lam}")
    return -math.expm1(-lam)


def partial_ie_sum_exact(rate: Fraction, K: int) -> Fraction:
    """Exact partial inclusion-exclusion sum sum_{k=1..K} (-1)^(k+1) rate^k / k!."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    lam = Fraction(rate)
    total = Fraction(0)
    term = Fraction(1)
    for k in range(1, K + 1):
        term *= lam / k
        total += term if k % 2 == 1 else -term
    return total


def float_or_inf(x: Fraction) -> float:
    """Double-precision value, saturating instead of raising on overflow."""
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf


def partial_ie_sum(rate: Fraction, K: int) -> float:
    """partial_ie_sum_exact converted to float once at the end.

    Successive partial sums bracket 1 - e^(-rate) once K >= rate. For very
    large rates the pre-convergence partial sums exceed float range and
    saturate to +-inf; the exact variant stays available.
    """
    return float_or_inf(partial_ie_sum_exact(rate, K))


def expected_count(n: int, d: int = 2, s: int = 2, eps: int = 0) -> Fraction:
    """Exact expected number of s-subsets with exceedance <= eps at order n.

    A fixed s-subset's s^d cells take exactly b distinct values in
    {s^d brace b} * [n]_b ways, so the per-subset probability is
    sum_{b=1..min(s+eps, s^d, n)} {s^d brace b} [n]_b / n^(s^d),
    and linearity gives the C(n,s) multiplier. For d=2, s=2, eps=0 this
    reduces to C(n,2) * (7n-6) / n^3.
    """
    if d < 2 or s < 2:
        raise ValueError(f"need d >= 2 and s >= 2, got d={d}, s={s}")
    if s > n:
        raise ValueError(f"subset size s={s} exceeds order n={n}")
    cells = s**d
    b_max = min(s + eps, cells, n)
    total = 0
    for b in range(1, b_max + 1):
        total += stirling2(cells, b) * falling(n, b)
    return binomial(n, s) * Fraction(total, n**cells)


def triple_low_exceedance_bound(n: int) -> Fraction:
    """Upper bound 18002 * [n]_5 * C(n,3) / n^9 on P(some 3-subset has exceedance <= 2).

    The 18002 counts cell partitions into at most five blocks
    (sum_{i=1..5} {9 brace i}); the bound tends to 0 like 3000/n.
    """
    if n < 5:
        raise ValueError(f"bound needs n >= 5, got n={n}")
    return Fraction(18002 * falling(n, 5) * binomial(n, 3), n**9)
