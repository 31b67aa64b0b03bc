"""Tests for nearest-integer distance, continued fractions and Omega scans."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from kamtorus import diophantine as dio
from kamtorus.errors import RationalTruncation, ResonanceDetected
from kamtorus.precision import working_precision


def test_nearest_int_distance_basics():
    assert dio.nearest_int_distance(Fraction(3, 10)) == Fraction(3, 10)
    assert dio.nearest_int_distance(Fraction(-1, 5)) == Fraction(1, 5)
    assert dio.nearest_int_distance(5) == 0
    assert abs(dio.nearest_int_distance(mpmath.mpf("0.3")) - mpmath.mpf("0.3")) < 1e-70


def test_nearest_int_distance_range_and_half():
    assert dio.nearest_int_distance(Fraction(1, 2)) == Fraction(1, 2)
    assert dio.nearest_int_distance(Fraction(7, 2)) == Fraction(1, 2)
    assert dio.nearest_int_distance(Fraction(99, 100)) == Fraction(1, 100)


@given(st.fractions(min_value=-50, max_value=50))
def test_nearest_int_distance_symmetries_exact(x):
    d = dio.nearest_int_distance(x)
    assert 0 <= d <= Fraction(1, 2)
    assert dio.nearest_int_distance(x + 1) == d
    assert dio.nearest_int_distance(-x) == d


def test_nearest_int_symmetries_mpf_bulk():
    # 10^4 pseudo-random binary rationals: exact at working precision, so
    # periodicity and evenness must hold with zero error.
    rng_state = 0x2545F4914F6CDD1D
    for _ in range(10_000):
        rng_state = (rng_state * 6364136223846793005 + 1442695040888963407) % (1 << 64)
        x = mpmath.ldexp(rng_state >> 16, -40)  # 48-bit mantissa, representable
        d = dio.nearest_int_distance(x)
        assert dio.nearest_int_distance(x + 1) == d
        assert dio.nearest_int_distance(-x) == d


def test_continued_fraction_golden(golden):
    cf = dio.continued_fraction(golden, 5)
    assert cf.quotients == (1, 1, 1, 1, 1)
    assert cf.denominators == (1, 2, 3, 5, 8)
    assert cf.numerators == (1, 1, 2, 3, 5)


def test_continued_fraction_sqrt2():
    cf = dio.continued_fraction(mpmath.sqrt(2) - 1, 4)
    assert cf.quotients == (2, 2, 2, 2)


def test_continued_fraction_rational_input():
    with pytest.raises(RationalTruncation):
        dio.continued_fraction(Fraction(1, 2), 2)
    with pytest.raises(RationalTruncation):
        dio.continued_fraction(mpmath.mpf("0.5"), 2)


def test_convergent_recurrence_exact(golden):
    cf = dio.continued_fraction(golden, 25)
    q = (0, 1) + cf.denominators  # q_{-1}, q_0, q_1, ...
    p = (1, cf.integer_part) + cf.numerators
    for k in range(2, len(q)):
        a = cf.quotients[k - 2]
        assert q[k] == a * q[k - 1] + q[k - 2]
        assert p[k] == a * p[k - 1] + p[k - 2]
    assert all(q2 > q1 for q1, q2 in zip(cf.denominators, cf.denominators[1:]))


def test_convergents_alternate_around_input(golden):
    cf = dio.continued_fraction(golden, 10)
    signs = [mpmath.sign(cf.numerators[k] - golden * cf.denominators[k])
             for k in range(10)]
    assert all(s1 * s2 < 0 for s1, s2 in zip(signs, signs[1:]))


def test_bryuno_1d_golden_closed_form(golden):
    # All remainders equal (sqrt(5)-1)/2 =: a, so the series is geometric:
    # sum_n a^n log(1/a) = log(1/a)/(1-a).
    b, qsum = dio.bryuno_1d(golden, 30)
    closed = mpmath.log(1 / golden) / (1 - golden)
    assert abs(b - closed) < 1e-6
    assert qsum > 0


def test_bryuno_1d_monotone_in_depth(golden):
    b1, q1 = dio.bryuno_1d(golden, 1)
    b2, q2 = dio.bryuno_1d(golden, 2)
    assert b2 >= b1 > 0
    assert q2 >= q1 >= 0  # first q-term is log(q_1)/q_0 = 0 for the golden number


def test_bryuno_1d_rational():
    with pytest.raises(RationalTruncation):
        dio.bryuno_1d(mpmath.mpf("0.5"), 3)


def test_omega_min_golden_1d(golden):
    rec = dio.omega_min([golden], 2)
    assert rec.argmin == (2,)
    assert abs(rec.value_mpf() - mpmath.mpf("0.2360679774997896")) < 1e-12


def test_omega_min_pair():
    alpha = [mpmath.sqrt(2) - 1, mpmath.sqrt(3) - 1]
    rec = dio.omega_min(alpha, 1)
    assert rec.argmin == (1, 1)
    assert abs(rec.value_mpf() - mpmath.mpf("0.1462643699419723")) < 1e-12


def test_omega_min_upper_bounded_by_first_component(golden):
    alpha = [golden, mpmath.sqrt(2) - 1]
    rec = dio.omega_min(alpha, 1)
    assert rec.value_mpf() <= dio.nearest_int_distance(golden)


def test_omega_min_nonincreasing_and_recomputable(golden):
    alpha = [golden, mpmath.sqrt(2) - 1]
    values = []
    for N in (1, 2, 4, 8, 16):
        rec = dio.omega_min(alpha, N)
        values.append(rec.value_mpf())
        direct = dio.nearest_int_distance(
            mpmath.fsum(c * a for c, a in zip(rec.argmin, alpha)))
        assert direct == rec.value
        assert dio.sup_norm(rec.argmin) <= N
    assert all(v2 <= v1 for v1, v2 in zip(values, values[1:]))


def test_omega_min_exact_rational_vector():
    alpha = [Fraction(1, 100), Fraction(1, 101)]
    rec = dio.omega_min(alpha, 3)
    assert isinstance(rec.value, Fraction)
    # check against a direct rescan
    best = min(
        dio.nearest_int_distance(l1 * alpha[0] + l2 * alpha[1])
        for l1 in range(-3, 4) for l2 in range(-3, 4) if (l1, l2) != (0, 0))
    assert rec.value == best


def test_omega_min_resonance():
    with pytest.raises(ResonanceDetected):
        dio.omega_min([Fraction(1, 3), Fraction(2, 3)], 3)


def test_omega_min_1d_fast_path_agrees_with_scan(golden):
    for N in (1, 2, 3, 5, 8, 13, 21, 55):
        fast = dio.omega_min_1d([golden], N)
        scan = dio.omega_min([golden], N)
        assert fast.argmin == scan.argmin
        assert fast.value == scan.value


def test_omega_equals_convergent_identity(golden):
    # ||q_k alpha|| agrees with |q_k alpha - p_k| to within 2 ulp at scale q_k.
    cf = dio.continued_fraction(golden, 12)
    for k in range(1, 13):
        q, p = cf.denominators[k - 1], cf.numerators[k - 1]
        lhs = dio.nearest_int_distance(golden * q)
        rhs = abs(golden * q - p)
        assert abs(lhs - rhs) <= 2 * mpmath.ldexp(abs(rhs), -mpmath.mp.prec + 1)
        rec = dio.omega_min([golden], q)
        assert rec.argmin == (q,)


def test_bryuno_partial_sum_matches_per_term(golden):
    alpha = [golden, mpmath.sqrt(2) - 1]
    records = []
    total = dio.bryuno_partial_sum(alpha, 6, records=records)
    assert total > 0 and mpmath.isfinite(total)
    recomputed = mpmath.fsum(
        mpmath.log(1 / dio.omega_min(alpha, 1 << k).value_mpf()) / (1 << k)
        for k in range(1, 7))
    assert abs(total - recomputed) < 1e-60
    for k, rec in zip(range(1, 7), records):
        fresh = dio.omega_min(alpha, 1 << k)
        assert fresh.value == rec.value and fresh.argmin == rec.argmin


def test_bryuno_partial_sum_telescopes(golden):
    alpha = [golden]
    s4 = dio.bryuno_partial_sum(alpha, 4)
    s5 = dio.bryuno_partial_sum(alpha, 5)
    term5 = mpmath.log(1 / dio.omega_min(alpha, 32).value_mpf()) / 32
    assert abs((s5 - s4) - term5) < 1e-70


def test_single_term_partial_sum(golden):
    alpha = [golden]
    s1 = dio.bryuno_partial_sum(alpha, 1)
    assert abs(s1 - mpmath.log(1 / dio.omega_min(alpha, 2).value_mpf()) / 2) < 1e-70


def test_precision_is_recorded(golden):
    with working_precision(128):
        rec = dio.omega_min([golden], 2)
        assert rec.precision_bits == 128
        cf = dio.continued_fraction(golden, 3)
        assert cf.precision_bits == 128
