"""Tests for the exact iterative vector construction."""

from fractions import Fraction

import mpmath
import pytest

from kamtorus import construction as con
from kamtorus.errors import ExponentOverflow, ScanTooLarge
from kamtorus.precision import working_precision
from kamtorus.serialize import canonical_dumps


def toy_schedule(scale="1/8"):
    return con.GrowthSchedule(mode="toy", base=2, exponent_scale=scale)


# -- twist sequence ----------------------------------------------------------

def test_t_sequence_example():
    assert con.t_sequence("0.4", 5).values == (2, 3, 4, 5, 6, 8)


def test_t_sequence_small_exponent_unit_steps():
    ts = con.t_sequence("0.1", 1100)
    for t, t_next in zip(ts.values, ts.values[1:]):
        if t < 1024:
            assert t_next == t + 1
        else:
            assert t_next >= t + 2
    assert ts.values[-1] > 1024


def test_t_sequence_strictly_increasing():
    for theta in ("0.05", "0.25", "0.4", "0.49"):
        ts = con.t_sequence(theta, 30)
        assert all(b > a for a, b in zip(ts.values, ts.values[1:]))


def test_t_sequence_exact_power_boundary():
    # 32**0.4 == 4 exactly; the floor must not wobble with precision
    ts = con.t_sequence("0.4", 60)
    for t, t_next in zip(ts.values, ts.values[1:]):
        if t == 32:
            assert t_next == 36


def test_t_sequence_validation():
    with pytest.raises(ValueError):
        con.t_sequence("0.5", 3)
    with pytest.raises(ValueError):
        con.t_sequence("0", 3)


# -- twist factor ------------------------------------------------------------

def test_twist_phi_start_extension_and_example():
    ts = con.t_sequence("0.4", 8)
    # l = 3 sits in (t_0, t_1]: value 2*2^0.2 - 1
    expected = 2 * mpmath.power(2, mpmath.mpf("0.2")) - 1
    assert abs(con.twist_phi(3, ts) - expected) < 1e-70
    assert abs(float(con.twist_phi(3, ts)) - 1.29740) < 1e-5
    # extension below t_0 equals the unit-gap value
    assert con.twist_phi(0, ts) == con.twist_phi(1, ts) == con.twist_phi(2, ts)


def test_twist_phi_unit_gap_events():
    ts = con.t_sequence("0.4", 10)
    for n in range(2, 5):
        t_n = ts.values[n]
        expected = 2 * mpmath.power(t_n, mpmath.mpf("0.2")) - 1
        assert abs(con.twist_phi(t_n + 1, ts) - expected) < 1e-70


def test_twist_phi_decreasing_within_bracket():
    ts = con.t_sequence("0.45", 40)
    # pick a bracket with a wide gap
    n = len(ts.values) - 2
    t_n, t_next = ts.values[n], ts.values[n + 1]
    vals = [con.twist_phi(l, ts) for l in range(t_n + 1, t_next + 1)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    floor_val = 2 * mpmath.power(t_n, mpmath.mpf("0.225")) / (t_next - t_n) - 1
    assert vals[-1] >= floor_val - mpmath.mpf("1e-60")


# -- seed and level data -----------------------------------------------------

def test_seed_level_zero_direction():
    st = con.ConstructionState.seed()
    assert (st.p[0], st.q[0], st.p_bar[0], st.q_bar[0]) == (1, 100, 1, 101)
    assert st.alpha_pair_at(0) == (Fraction(1, 100), Fraction(1, 101))
    d = con.level_direction_data(st)
    assert d.c == 1
    assert d.nu_tilde == (100, -101)
    assert d.nu == (100, -101)
    assert d.q_tilde == 101


def test_paper_growth_factors_level_zero():
    st = con.build(levels=1, mode="paper")
    a1, a2 = st.a
    assert a1 == 92456120875                      # floor(e**25.25), 11 digits
    assert len(str(a2)) == 32                     # floor(e**(101/(2 log 2)))
    # independent enclosure at doubled precision
    with working_precision(512):
        e1 = mpmath.exp(mpmath.mpf(101) / 4)
        e2 = mpmath.exp(101 / (2 * mpmath.log(2)))
        assert mpmath.floor(e1) == a1
        assert mpmath.floor(e2) == a2


def test_construct_step_update_identities():
    st = con.build(levels=1, mode="paper")
    a1, a2 = st.a
    c0 = st.c[0]
    assert st.q[1] == a1 * 100 * 100 * c0
    assert st.q_bar[1] == a1 * 101 * 101
    assert st.q[2] == a2 * st.q[1]
    assert st.q_bar[2] == (a2 * st.q[1] * st.q_bar[1] + 1) * st.q_bar[1]


def _straight_line_alphas(state):
    """Second, straight-line re-derivation of the alpha sequence from the
    stored c/a factors, using only Fraction arithmetic."""
    a1 = [Fraction(state.p[0], state.q[0])]
    a2 = [Fraction(state.p_bar[0], state.q_bar[0])]
    q = [state.q[0]]
    qb = [state.q_bar[0]]
    for l in range(state.level):
        a_odd, a_even = state.a[2 * l], state.a[2 * l + 1]
        c = state.c[l]
        a1.append(a1[-1] + Fraction(1, a_odd * q[2 * l] * c))
        a2.append(a2[-1] + Fraction(1, a_odd * qb[2 * l]))
        q.append(a_odd * q[2 * l] ** 2 * c)
        qb.append(a_odd * qb[2 * l] ** 2)
        a1.append(a1[-1] + Fraction(1, a_even))
        a2.append(a2[-1] + Fraction(1, a_even * q[2 * l + 1] * qb[2 * l + 1] + 1))
        q.append(a_even * q[2 * l + 1])
        qb.append((a_even * q[2 * l + 1] * qb[2 * l + 1] + 1) * qb[2 * l + 1])
    return a1, a2, q, qb


@pytest.mark.parametrize("mode,levels", [("paper", 1), ("toy", 3)])
def test_dual_implementation_oracle(mode, levels):
    sched = con.GrowthSchedule(mode=mode) if mode == "paper" else toy_schedule()
    st = con.build(levels=levels, mode=mode, schedule=sched)
    a1, a2, q, qb = _straight_line_alphas(st)
    assert q == list(st.q) and qb == list(st.q_bar)
    for k in range(2 * levels + 1):
        x1, x2 = st.alpha_pair_at(k)
        assert x1 == a1[k] and x2 == a2[k]


def test_direction_floor_is_exact():
    # c(l) must satisfy c <= (qbar/q) * phi(l) < c + 1 with clear margin
    st = con.build(levels=3, mode="toy", schedule=toy_schedule())
    for l in range(3):
        d = st.direction(l)
        with working_precision(4 * max(64, st.c[l].bit_length() + 64)):
            phi = con.twist_phi(l, st.twist)
            val = mpmath.mpf(st.q_bar[2 * l]) / st.q[2 * l] * phi
            assert mpmath.floor(val) == st.c[l]


def test_alpha_strictly_increasing_exact():
    st = con.build(levels=3, mode="toy", schedule=toy_schedule())
    for k in range(2 * st.level):
        lo1, lo2 = st.alpha_pair_at(k)
        hi1, hi2 = st.alpha_pair_at(k + 1)
        assert hi1 > lo1 and hi2 > lo2


def test_paper_mode_overflow_frontier():
    st = con.build(levels=1, mode="paper")
    with pytest.raises(ExponentOverflow) as exc:
        con.construct_step(st, con.GrowthSchedule(mode="paper"))
    assert exc.value.exponent is not None


def test_precision_independence_of_integers():
    with working_precision(256):
        lo = con.build(levels=1, mode="paper")
        lo_dir = con.level_direction_data(lo)
    with working_precision(512):
        hi = con.build(levels=1, mode="paper")
        hi_dir = con.level_direction_data(hi)
    assert lo.q == hi.q and lo.q_bar == hi.q_bar
    assert lo.p == hi.p and lo.p_bar == hi.p_bar
    assert lo.a == hi.a and lo.c == hi.c
    assert lo_dir == hi_dir


# -- verification reports ----------------------------------------------------

def test_verify_construction_paper_green():
    st = con.build(levels=1, mode="paper")
    rep = con.verify_construction(st)
    assert rep.all_passed(), [e.line() for e in rep.failures()]
    names = {e.name for e in rep.entries}
    assert {"growth_sandwich_lower", "growth_sandwich_upper", "even_gcd_bound",
            "convergent_gcd_divides", "direction_size_bound",
            "direction_coprime", "tail_bound", "cofactor_coprime"} <= names


def test_verify_construction_toy_six_levels_coprime():
    st = con.build(levels=6, mode="toy", schedule=toy_schedule())
    rep = con.verify_construction(st)
    coprime = [e for e in rep.entries if e.name == "direction_coprime"]
    assert len(coprime) == 7  # levels 0..6 (current level included)
    assert all(e.passed for e in coprime)
    assert rep.all_passed(), [e.line() for e in rep.failures()]


def test_verify_construction_degenerate_seed_flagged():
    st = con.ConstructionState.seed(q0=100, q0_bar=100)
    rep = con.verify_construction(st)
    assert not rep.all_passed()
    assert any(e.name == "seed_ordering" and e.passed is False for e in rep.entries)


def test_divisor_bounds_paper_level_zero():
    st = con.build(levels=1, mode="paper")
    rep = con.verify_divisor_bounds(st, 0)
    assert rep.all_passed(), [e.line() for e in rep.failures()]
    argmin = next(e for e in rep.entries if e.name == "argmin_is_direction")
    assert argmin.passed


def test_divisor_bounds_guard_and_preconditions():
    st = con.build(levels=2, mode="toy", schedule=toy_schedule())
    with pytest.raises(ScanTooLarge):
        con.verify_divisor_bounds(st, 1)   # q_tilde(1) ~ 1e12
    with pytest.raises(ValueError):
        con.verify_divisor_bounds(st, 2)   # needs growth factors of level 2


def test_divisor_bounds_toy_level_zero_and_rays():
    # divisor ordering is a paper-rate property, so toy entries are
    # measurements; the exact lower bound and the band entries still assert
    st = con.build(levels=3, mode="toy", schedule=toy_schedule("1"))
    rep = con.verify_divisor_bounds(st, 0)
    assert rep.all_passed(), [e.line() for e in rep.failures()]
    lower = next(e for e in rep.entries if e.name == "omega_lower_bound")
    assert lower.passed is True
    measured = [e for e in rep.entries
                if e.name in ("argmin_is_direction", "parallel_strictly_smallest")]
    assert measured and all(e.passed is None for e in measured)
    # ray entries exist at deeper levels without any area scan
    rep2 = con.VerificationReport("rays", {})
    con._ray_entries(rep2, st, 1, ray_cap=16)
    assert rep2.entries


def test_argmin_stable_between_consecutive_even_approximants():
    # the divisor landscape at scale q_tilde(0) settles once the level-0
    # factors are in: consecutive even approximants share the minimizer
    st = con.build(levels=2, mode="toy", schedule=toy_schedule("1"))
    omega2, arg2 = con._exact_scan(st.alpha_pair_at(2), 101)
    omega4, arg4 = con._exact_scan(st.alpha_pair_at(4), 101)
    assert arg2 == arg4
    diff = abs(omega2 - omega4)
    assert diff <= Fraction(4 * 101, st.a[2])


def test_odd_approximant_resonant_by_construction():
    # the odd approximant is built to annihilate the direction vector exactly
    st = con.build(levels=1, mode="paper")
    a1, a2 = st.alpha_pair_at(1)
    value = a1 * 100 - a2 * 101
    assert value == value.__floor__()  # alpha_{.,1} . nu(0) is an exact integer


def test_verify_criteria_toy():
    st = con.build(levels=4, mode="toy", schedule=toy_schedule("1"))
    rep = con.verify_criteria(st, max_scale=128)
    assert rep.all_passed(), [e.line() for e in rep.failures()]
    growth = [e for e in rep.entries if e.name == "scale_growth"]
    assert len(growth) == 3 and all(e.passed for e in growth)
    bands = [e for e in rep.entries if e.name == "loss_rate_band"]
    assert len(bands) == 4 and all(e.passed for e in bands)


def test_verify_criteria_insufficient_levels():
    st = con.build(levels=1, mode="paper")
    rep = con.verify_criteria(st, max_scale=16)
    assert any(e.name == "levels" and "insufficient" in e.note for e in rep.entries)


def test_verify_criteria_guard():
    st = con.build(levels=2, mode="toy", schedule=toy_schedule())
    with pytest.raises(ScanTooLarge):
        con.verify_criteria(st, max_scale=10 ** 6)


# -- serialization -----------------------------------------------------------

def test_state_round_trip_exact():
    st = con.build(levels=3, mode="toy", schedule=toy_schedule())
    data = con.state_to_jsonable(st)
    clone = con.state_from_jsonable(data)
    assert clone == st
    assert canonical_dumps(con.state_to_jsonable(clone)) == canonical_dumps(data)


def test_state_round_trip_paper():
    st = con.build(levels=1, mode="paper")
    clone = con.state_from_jsonable(con.state_to_jsonable(st))
    assert clone == st


def test_state_format_rejected():
    from kamtorus.errors import SchemaMismatch
    with pytest.raises(SchemaMismatch):
        con.state_from_jsonable({"format": "bogus"})
