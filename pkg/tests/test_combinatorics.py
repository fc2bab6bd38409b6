import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from deflab import combinatorics as comb
from deflab.estimation import exact_probability
from deflab.core import SubsetQuery

from oracles import enumerate_matchings


def test_binomial_anchors():
    assert comb.binomial(7, 0) == 1
    assert comb.binomial(9, 3) == 84
    assert comb.binomial(4, 2) == 6
    assert comb.binomial(3, 5) == 0
    with pytest.raises(ValueError):
        comb.binomial(-1, 2)


@given(st.integers(0, 40), st.integers(0, 40))
def test_binomial_pascal(n, m):
    if n >= 1 and m >= 1:
        assert comb.binomial(n, m) == comb.binomial(n - 1, m) + comb.binomial(n - 1, m - 1)


def test_stirling_anchors():
    assert comb.stirling2(9, 6) == 2646
    assert comb.stirling2(4, 2) == 7
    assert comb.stirling2(8, 2) == 127
    assert sum(comb.stirling2(9, i) for i in range(1, 6)) == 18002
    assert comb.stirling2(0, 0) == 1
    assert comb.stirling2(5, 0) == 0
    assert comb.stirling2(3, 5) == 0


def test_stirling_two_block_closed_form():
    for m in range(1, 65):
        assert comb.stirling2(m, 2) == 2 ** (m - 1) - 1


def test_stirling_partition_identity():
    # sum over b of {n brace b} [n]_b recovers all functions
    for n in (2, 3, 4):
        cells = n * n
        assert sum(
            comb.stirling2(cells, b) * comb.falling(n, b) for b in range(1, n + 1)
        ) == n**cells


def test_falling():
    assert comb.falling(9, 0) == 1
    assert comb.falling(5, 5) == 120
    assert comb.falling(9, 5) == 15120
    with pytest.raises(ValueError):
        comb.falling(3, 4)
    with pytest.raises(ValueError):
        comb.falling(3, -1)


def test_multifactorial():
    assert comb.multifactorial(5, 2) == 15
    assert comb.multifactorial(6, 3) == 18
    assert comb.multifactorial(0, 3) == 1
    assert comb.multifactorial(6, 1) == 720
    with pytest.raises(ValueError):
        comb.multifactorial(5, 4)


def test_triple_factorial_identity():
    for k in range(0, 21):
        assert comb.multifactorial(3 * k, 3) == 3**k * math.factorial(k)


def test_perfect_matching_count_vs_enumeration():
    assert comb.perfect_matching_count(0) == 1
    assert comb.perfect_matching_count(1) == 1
    assert comb.perfect_matching_count(2) == 3
    assert comb.perfect_matching_count(3) == 15
    for k in range(1, 5):
        assert comb.perfect_matching_count(k) == len(
            enumerate_matchings(list(range(2 * k)))
        )


def test_disjoint_pair_class_count():
    assert comb.disjoint_pair_class_count(1) == 7
    assert comb.disjoint_pair_class_count(2) == 147
    assert comb.disjoint_pair_class_count(3) == 5145


def test_nondisjoint_class_bound():
    assert comb.nondisjoint_class_bound(1) == 14
    assert comb.nondisjoint_class_bound(2) == 3136
    assert comb.nondisjoint_class_bound(2) >= 294
    assert comb.nondisjoint_class_bound(3) == 343 * 2**15


def test_disjoint_triple_class_count():
    assert comb.disjoint_triple_class_count(0) == 1
    assert comb.disjoint_triple_class_count(1) == 2646
    # recurrence at k=2: 2646 * (5*4)/2 * 2646
    assert comb.disjoint_triple_class_count(2) == 2646 * 10 * 2646 == 70013160


def test_disjoint_triple_closed_forms():
    for k in range(0, 7):
        d = comb.disjoint_triple_class_count(k)
        # series coefficient
        assert Fraction(d, math.factorial(3 * k)) == Fraction(441**k, math.factorial(k))
        # recurrence-consistent closed form
        assert d * comb.multifactorial(3 * k, 3) * 2**k == 2646**k * math.factorial(3 * k)


def test_rate_dary():
    assert comb.rate_dary(2) == Fraction(7, 2)
    assert comb.rate_dary(3) == Fraction(127, 2)
    with pytest.raises(ValueError):
        comb.rate_dary(1)
    for d in (2, 3, 4):
        assert comb.rate_dary(d) == Fraction(2 ** (2**d - 1) - 1, 2)
        # 1 - exp(-rate) equals 1 - exp((1 - 2^(2^d - 1)) / 2)
        assert comb.limit_probability(comb.rate_dary(d)) == pytest.approx(
            -math.expm1((1 - 2 ** (2**d - 1)) / 2), abs=1e-15
        )


def test_rate_exceedance():
    assert comb.rate_exceedance(2) == Fraction(7, 2)
    assert comb.rate_exceedance(3) == Fraction(2646, 6) == 441
    assert comb.rate_exceedance(4) == Fraction(comb.stirling2(16, 12), 24)
    with pytest.raises(ValueError):
        comb.rate_exceedance(1)


def test_conjectural_flags():
    assert not comb.rate_is_conjectural(2, 2, 0)
    assert not comb.rate_is_conjectural(5, 2, 0)
    assert not comb.rate_is_conjectural(2, 3, 3)
    assert comb.rate_is_conjectural(2, 4, 8)
    assert comb.rate_is_conjectural(2, 3, 2)


def test_limit_rate():
    assert comb.limit_rate(2, 2, 0) == Fraction(7, 2)
    assert comb.limit_rate(2, 3, 3) == Fraction(441)
    # first moment genuinely vanishes for d >= 3 at eps = 0: the count
    # scales as n^(4 - 2^d), so the sweep limit column is 0 there even
    # though rate_dary still reports the closed-form rate
    assert comb.limit_rate(3, 2, 0) == 0
    assert comb.limit_rate(2, 3, 2) == 0
    assert comb.limit_rate(2, 3, 0) == 0
    assert comb.limit_rate(2, 2, -1) == 0
    assert comb.limit_rate(2, 2, 1) is None
    assert comb.limit_rate(2, 3, 4) is None
    # the critical-exceedance family stays exponent-balanced at d=2
    for s in (2, 3, 4):
        assert comb.limit_rate(2, s, s * s - 2 * s) == comb.rate_exceedance(s)


def test_limit_probability():
    assert comb.limit_probability(Fraction(7, 2)) == pytest.approx(
        0.9698026165776815, abs=1e-12
    )
    assert comb.limit_probability(Fraction(1, 2)) == pytest.approx(
        0.3934693402873666, abs=1e-12
    )
    assert comb.limit_probability(Fraction(0)) == 0.0
    with pytest.raises(ValueError):
        comb.limit_probability(-1.0)


def test_partial_ie_sum():
    lam = Fraction(7, 2)
    assert comb.partial_ie_sum(lam, 1) == 3.5
    assert comb.partial_ie_sum(lam, 40) == pytest.approx(
        comb.limit_probability(lam), abs=1e-12
    )
    with pytest.raises(ValueError):
        comb.partial_ie_sum(lam, 0)


def test_partial_ie_sum_bracketing():
    lam = Fraction(7, 2)
    limit = comb.limit_probability(lam)
    for K in range(4, 30):
        lo, hi = sorted((comb.partial_ie_sum(lam, K), comb.partial_ie_sum(lam, K + 1)))
        assert lo - 1e-15 <= limit <= hi + 1e-15


def test_partial_ie_sum_exact_and_saturation():
    assert comb.partial_ie_sum_exact(Fraction(7, 2), 2) == Fraction(7, 2) - Fraction(49, 8)
    # pre-convergence partial sums of a huge rate exceed float range
    assert math.isinf(comb.partial_ie_sum(Fraction(10**300), 2))
    assert math.isinf(comb.partial_ie_sum(comb.rate_exceedance(4), 90))
    assert comb.float_or_inf(Fraction(1, 2)) == 0.5


def test_partial_ie_sum_error_bound():
    lam = Fraction(7, 2)
    limit = comb.limit_probability(lam)
    for K in range(4, 25):
        bound = float(lam) ** (K + 1) / math.factorial(K + 1)
        assert abs(comb.partial_ie_sum(lam, K) - limit) <= bound + 1e-15


def test_expected_count_anchors():
    assert comb.expected_count(2, 2, 2, 0) == 1
    assert comb.expected_count(3, 2, 2, 0) == Fraction(5, 3)
    for n in (2, 3, 5, 17, 100):
        assert comb.expected_count(n, 2, 2, 0) == Fraction(
            comb.binomial(n, 2) * (7 * n - 6), n**3
        )


def test_expected_count_limit():
    n = 10**6
    assert abs(comb.expected_count(n, 2, 2, 0) - Fraction(7, 2)) < Fraction(1, 10**5)


def test_expected_count_dary_closed_form():
    n = 30
    assert comb.expected_count(n, 3, 2, 0) == Fraction(
        comb.binomial(n, 2) * (127 * n * (n - 1) + n), n**8
    )


def test_expected_count_matches_exhaustive_mean():
    for n in (2, 3):
        res = exact_probability(n, SubsetQuery(2, 0))
        assert res.mean_count == comb.expected_count(n, 2, 2, 0)


def test_expected_count_validation():
    with pytest.raises(ValueError):
        comb.expected_count(1, 2, 2, 0)
    with pytest.raises(ValueError):
        comb.expected_count(5, 1, 2, 0)


def test_triple_low_exceedance_bound():
    assert comb.triple_low_exceedance_bound(9) == Fraction(
        18002 * 15120 * 84, 9**9
    )
    # vanishes like 3000/n
    assert comb.triple_low_exceedance_bound(10**6) < Fraction(1, 100)
    # upper-bounds the exact expected count with eps <= 2
    for n in (6, 9, 20):
        assert comb.triple_low_exceedance_bound(n) >= comb.expected_count(n, 2, 3, 2)
