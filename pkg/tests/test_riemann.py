import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from phasefront.model import State, apply_wave, curve_phi2, h
from phasefront.riemann import (
    rarefaction_edge_speeds,
    solve,
    split_rarefaction,
    wave_speed,
)


def random_state(rng, v_lo=0.2, v_hi=5.0, u_cap=3.0):
    return State(rng.uniform(v_lo, v_hi), rng.uniform(-u_cap, u_cap), rng.random())


def reconstruct_right(fan, pm):
    """Rebuild the right state by composing the three wave curves."""
    s = fan.strengths
    cur = apply_wave(1, fan.left, s.eps1, pm)
    cur = curve_phi2(fan.right.lam, cur, pm)
    return apply_wave(3, cur, s.eps3, pm)


def fan_residuals(fan, pm):
    s = fan.strengths
    a_l = pm.a(fan.left.lam)
    a_r = pm.a(fan.right.lam)
    p_l = pm.pressure(fan.left.v, fan.left.lam)
    p_r = pm.pressure(fan.right.v, fan.right.lam)
    r1 = (s.eps3 - s.eps1) - 0.5 * math.log(p_r / p_l)
    r2 = 2.0 * (a_l * h(s.eps1) + a_r * h(s.eps3)) - (fan.right.u - fan.left.u)
    return abs(r1), abs(r2)


def test_equal_states_no_waves(pm):
    s = State(1.3, -0.2, 0.6)
    fan = solve(s, s, pm)
    assert fan.strengths.eps1 == fan.strengths.eps2 == fan.strengths.eps3 == 0.0
    assert all(sp.kind == "none" for sp in fan.speeds)


def test_pure_contact(pm):
    left = State(1.0, 0.0, 0.2)
    right = curve_phi2(0.8, left, pm)
    fan = solve(left, right, pm)
    assert fan.strengths.eps1 == 0.0 and fan.strengths.eps3 == 0.0
    expected = 2.0 * (pm.a(0.8) - pm.a(0.2)) / (pm.a(0.8) + pm.a(0.2))
    assert fan.strengths.eps2 == expected
    assert fan.speeds[1].kind == "contact" and fan.speeds[1].head == 0.0


def test_single_shock_recovered(pm):
    # right state built on the 3-shock branch with eps3 = -0.5
    left = State(1.0, 0.0, 0.3)
    right = apply_wave(3, left, -0.5, pm)
    assert right.v == pytest.approx(math.e, abs=1e-15)
    fan = solve(left, right, pm)
    assert fan.strengths.eps1 == 0.0
    assert fan.strengths.eps2 == 0.0
    assert fan.strengths.eps3 == pytest.approx(-0.5, abs=1e-13)


def test_round_trip_and_residuals(pm):
    rng = random.Random(23)
    for _ in range(2000):
        left = random_state(rng)
        right = random_state(rng)
        fan = solve(left, right, pm, tol=1e-12)
        r1, r2 = fan_residuals(fan, pm)
        assert r1 <= 1e-12 and r2 <= 1e-12
        rec = reconstruct_right(fan, pm)
        assert abs(rec.v - right.v) <= 1e-11 * max(1.0, right.v)
        assert abs(rec.u - right.u) <= 1e-11
        assert rec.lam == right.lam


def test_middle_state_invariants(pm):
    rng = random.Random(29)
    for _ in range(500):
        left = random_state(rng)
        right = random_state(rng)
        fan = solve(left, right, pm)
        assert fan.mid1.lam == left.lam
        assert fan.mid2.lam == right.lam
        assert fan.mid1.u == fan.mid2.u
        # 1-speeds negative, 3-speeds positive
        if fan.speeds[0].kind != "none":
            assert fan.speeds[0].head < 0.0 and fan.speeds[0].tail < 0.0
        if fan.speeds[2].kind != "none":
            assert fan.speeds[2].head > 0.0 and fan.speeds[2].tail > 0.0


def test_strength_estimate_bound(pm):
    # |eps1| + |eps3| <= |log p_r/p_l|/2 + |u_r - u_l| / (2 min(a_l, a_r))
    rng = random.Random(31)
    for _ in range(10_000):
        left = random_state(rng)
        right = random_state(rng)
        fan = solve(left, right, pm)
        s = fan.strengths
        p_l = pm.pressure(left.v, left.lam)
        p_r = pm.pressure(right.v, right.lam)
        a_min = min(pm.a(left.lam), pm.a(right.lam))
        bound = 0.5 * abs(math.log(p_r) - math.log(p_l)) + abs(
            right.u - left.u
        ) / (2.0 * a_min)
        assert abs(s.eps1) + abs(s.eps3) <= bound + 1e-9


def test_partial_fan_consistency(pm):
    rng = random.Random(37)
    for _ in range(200):
        left = random_state(rng)
        right = random_state(rng)
        fan = solve(left, right, pm)
        partial = solve(left, fan.mid2, pm)
        assert partial.strengths.eps1 == pytest.approx(fan.strengths.eps1, abs=1e-10)
        assert partial.strengths.eps2 == pytest.approx(fan.strengths.eps2, abs=1e-12)
        assert abs(partial.strengths.eps3) <= 1e-10


def test_lax_inequalities_at_shocks(pm):
    rng = random.Random(41)
    checked = 0
    while checked < 300:
        left = random_state(rng)
        right = random_state(rng)
        fan = solve(left, right, pm)
        if fan.speeds[0].kind == "shock":
            s = fan.speeds[0].head
            e_left = pm.eigenvalues(fan.left)[0]
            e_right = pm.eigenvalues(fan.mid1)[0]
            assert e_right < s < e_left
            checked += 1
        if fan.speeds[2].kind == "shock":
            s = fan.speeds[2].head
            e_left = pm.eigenvalues(fan.mid2)[2]
            e_right = pm.eigenvalues(fan.right)[2]
            assert e_right < s < e_left
            checked += 1


def test_rankine_hugoniot_speeds(pm):
    # jump conditions: s [v] = -[u] and s [u] = [p]
    rng = random.Random(43)
    for _ in range(500):
        left = random_state(rng)
        eps = -rng.uniform(0.01, 1.5)
        family = rng.choice((1, 3))
        right = apply_wave(family, left, eps, pm)
        s = wave_speed(family, left, right, pm)
        p_l = pm.pressure(left.v, left.lam)
        p_r = pm.pressure(right.v, right.lam)
        assert abs(s * (right.v - left.v) + (right.u - left.u)) <= 1e-9
        assert abs(s * (right.u - left.u) - (p_r - p_l)) <= 1e-9


def test_wave_speed_examples(pm):
    # 1-shock with v_l = 1, v_r = 1/e at a = 1: s = -e^{1/2}
    left = State(1.0, 0.0, 0.0)
    right = apply_wave(1, left, -0.5, pm)
    assert right.v == pytest.approx(math.exp(-1.0), abs=1e-15)
    assert wave_speed(1, left, right, pm) == pytest.approx(
        -1.6487212707001282, abs=1e-12
    )
    mid = curve_phi2(0.7, left, pm)
    assert wave_speed(2, left, mid, pm) == 0.0
    # 3-rarefaction front moves at e_3 of its right state
    tail = State(1.35, 0.1, 0.0)
    head = apply_wave(3, tail, 0.3, pm)
    assert wave_speed(3, tail, head, pm) == pm.a(0.0) / head.v
    lo, hi = rarefaction_edge_speeds(3, tail, head, pm)
    assert lo == pm.a(0.0) / tail.v < hi == pm.a(0.0) / head.v


def test_wave_speed_right_state_unit(pm):
    left = State(math.exp(0.4), 0.0, 0.0)
    right = apply_wave(3, left, 0.2, pm)
    assert right.v == pytest.approx(1.0, abs=1e-12)
    assert wave_speed(3, left, right, pm) == pytest.approx(1.0, abs=1e-12)


def test_split_rarefaction_examples():
    assert split_rarefaction(0.05, 0.1) == [0.05]
    parts = split_rarefaction(0.25, 0.1)
    assert len(parts) == 3
    assert all(p < 0.1 for p in parts)
    assert parts == [0.25 / 3] * 3


@given(st.floats(1e-6, 10.0), st.floats(1e-4, 1.0))
@settings(max_examples=1000)
def test_split_rarefaction_sums_exactly(eps, eta):
    parts = split_rarefaction(eps, eta)
    assert all(p < eta for p in parts)
    assert abs(math.fsum(parts) - eps) <= 1e-15 * max(1.0, eps)


def test_split_rarefaction_domain():
    with pytest.raises(ValueError):
        split_rarefaction(-0.1, 0.1)
    with pytest.raises(ValueError):
        split_rarefaction(0.1, 0.0)


# ----------------------------------------------------------------------
# outcome table for interactions with a contact: signs of the outgoing fan
# for an incoming 1- or 3-wave on either side of the phase jump

def _contact_pair(pm, lam_l, lam_r):
    left = State(1.0, 0.0, lam_l)
    mid = curve_phi2(lam_r, left, pm)
    return left, mid


def _table_case(pm, incoming, lam_l, lam_r, delta):
    """States (outer_left, outer_right) after attaching the incoming wave."""
    left, mid = _contact_pair(pm, lam_l, lam_r)
    if incoming == "1":
        # a 1-wave approaches the contact from the right
        right = apply_wave(1, mid, delta, pm)
        return left, right
    # a 3-wave approaches the contact from the left
    base = State(1.0, 0.0, lam_l)
    after = apply_wave(3, base, delta, pm)
    contact_right = curve_phi2(lam_r, after, pm)
    return base, contact_right


OUTCOME_TABLE = [
    # (incoming family, sign of delta, lam ordering, expected signs (e1, e3))
    ("1", +1, "up", (+1, +1)),    # 2 x 1R, lam_l < lam_r -> 1R + 2 + 3R
    ("1", +1, "down", (+1, -1)),  # 2 x 1R, lam_l > lam_r -> 1R + 2 + 3S
    ("1", -1, "up", (-1, -1)),    # 2 x 1S, lam_l < lam_r -> 1S + 2 + 3S
    ("1", -1, "down", (-1, +1)),  # 2 x 1S, lam_l > lam_r -> 1S + 2 + 3R
    ("3", +1, "up", (-1, +1)),    # 3R x 2, lam_l < lam_r -> 1S + 2 + 3R
    ("3", +1, "down", (+1, +1)),  # 3R x 2, lam_l > lam_r -> 1R + 2 + 3R
    ("3", -1, "up", (+1, -1)),    # 3S x 2, lam_l < lam_r -> 1R + 2 + 3S
    ("3", -1, "down", (-1, -1)),  # 3S x 2, lam_l > lam_r -> 1S + 2 + 3S
]


@pytest.mark.parametrize("incoming,sign,ordering,expected", OUTCOME_TABLE)
def test_contact_interaction_outcome_table(pm, incoming, sign, ordering, expected):
    lam_l, lam_r = (0.2, 0.7) if ordering == "up" else (0.7, 0.2)
    delta = sign * 0.3
    outer_left, outer_right = _table_case(pm, incoming, lam_l, lam_r, delta)
    fan = solve(outer_left, outer_right, pm)
    e1, e3 = fan.strengths.eps1, fan.strengths.eps3
    want1, want3 = expected
    assert e1 * want1 > 0.0, f"eps1 = {e1}, expected sign {want1}"
    assert e3 * want3 > 0.0, f"eps3 = {e3}, expected sign {want3}"
    # the transmitted wave keeps its sign and the contact its strength
    trans = e1 if incoming == "1" else e3
    assert trans * delta > 0.0
    assert fan.strengths.eps2 == pytest.approx(
        2.0 * (pm.a(lam_r) - pm.a(lam_l)) / (pm.a(lam_r) + pm.a(lam_l)), abs=1e-15
    )


def test_solver_iteration_cap(pm):
    from phasefront.riemann import RiemannConvergenceError

    left = State(1.0, 0.0, 0.1)
    right = State(3.0, 2.5, 0.9)
    with pytest.raises(RiemannConvergenceError):
        solve(left, right, pm, tol=1e-12, max_iter=1)
