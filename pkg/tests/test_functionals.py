import itertools
import math
import random
from types import SimpleNamespace

import pytest
from hypothesis import given, strategies as st

from phasefront.analysis import damping_coefficient
from phasefront.functionals import (
    InitialDataSummary,
    ParameterSelectionError,
    audit_interaction,
    check_hypotheses,
    choose_np_budget,
    compute_snapshot,
    make_parameter_set,
    select_parameters,
    tv,
    wtv,
)


def front(family, strength, order=1):
    return SimpleNamespace(family=family, strength=strength, order=order)


def event(kind, incoming, outgoing, order=1, t=0.0, x=0.0):
    return SimpleNamespace(
        kind=kind, incoming=incoming, outgoing=outgoing, order=order, t=t, x=x
    )


# ----------------------------------------------------------------------
# variation measures

def test_tv_examples():
    assert tv([3.0]) == 0.0
    assert tv([1.0, 1.0, 1.0]) == 0.0
    assert tv([0.0, 1.0, 0.0]) == 2.0
    with pytest.raises(ValueError):
        tv([])


def test_tv_matches_partition_supremum():
    # for <= 6 points, enumerate every sub-partition: none exceeds the
    # consecutive-difference sum
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(2, 6)
        xs = [rng.uniform(-3, 3) for _ in range(n)]
        full = tv(xs)
        best = 0.0
        for r in range(2, n + 1):
            for idx in itertools.combinations(range(n), r):
                sub = [xs[i] for i in idx]
                best = max(best, tv(sub))
        assert best <= full + 1e-12
        assert best == pytest.approx(full, abs=1e-12)


def test_wtv_examples():
    assert wtv([2.0, 2.0]) == 0.0
    # single jump from 1 to 3: 2 * 2/4 = 1, strictly below log 3
    assert wtv([1.0, 3.0]) == 1.0
    assert wtv([1.0, 3.0]) < math.log(3.0)
    with pytest.raises(ValueError):
        wtv([1.0, -2.0])


def test_wtv_matches_partition_supremum():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(2, 6)
        xs = [rng.uniform(0.1, 5.0) for _ in range(n)]
        full = wtv(xs)
        best = 0.0
        for r in range(2, n + 1):
            for idx in itertools.combinations(range(n), r):
                best = max(best, wtv([xs[i] for i in idx]))
        assert best == pytest.approx(full, abs=1e-12)


def test_wtv_refines_to_log_variation():
    # sampling exp on [0, 1]: WTV -> TV(log f) = 1 as the mesh refines
    vals = []
    for k in (5, 6, 7, 8, 9):
        n = 2**k
        vals.append(wtv([math.exp(i / n) for i in range(n + 1)]))
    errs = [abs(v - 1.0) for v in vals]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    extrapolated = vals[-1] + (vals[-1] - vals[-2]) / 3.0
    assert abs(extrapolated - 1.0) <= 1e-6


@given(st.lists(st.floats(0.01, 100.0), min_size=2, max_size=30))
def test_wtv_log_sandwich(xs):
    w = wtv(xs)
    tl = tv([math.log(x) for x in xs])
    assert (min(xs) / max(xs)) * tl <= w + 1e-12
    assert w <= tl + 1e-12


def test_wtv_strict_gap_at_jump():
    c, d = 1.7, 0.4
    gap = abs(math.log(c / d)) - 2.0 * abs(c - d) / (c + d)
    assert gap > 0.0
    assert wtv([c, d]) == pytest.approx(abs(math.log(c / d)) - gap, abs=1e-15)


# ----------------------------------------------------------------------
# hypotheses and parameter selection

def test_check_hypotheses_constant_data():
    summary = InitialDataSummary(0.0, 0.0, 1.0, 0.0)
    for m in (0.1, 1.0, 5.0):
        rep = check_hypotheses(summary, m)
        assert rep.feasible
        assert rep.slack_hyp1 == 2.0 * m
        assert rep.slack_hyp2 > 0.0


def test_check_hypotheses_large_phase_variation_never_feasible():
    summary = InitialDataSummary(0.1, 0.1, 1.0, 0.5)
    for m in (0.25, 1.0, 3.0):
        rep = check_hypotheses(summary, m)
        assert not rep.feasible
        assert rep.hyp2_rhs < 0.5


def test_check_hypotheses_boundary_is_strict():
    m, w = 1.0, 0.1
    lhs = 2.0 * (1.0 - 2.0 * w) * m
    rep = check_hypotheses(InitialDataSummary(lhs, 0.0, 1.0, w), m)
    assert not rep.feasible


def test_select_parameters_nishida_case():
    # A_o = 0: xi ranges in (1, 1/sqrt d), K unconstrained above xi
    m = 1.5
    d = damping_coefficient(m)
    params = select_parameters(m, 0.0, 0.5, a_max=2.0, d=d)
    assert 1.0 < params.xi < 1.0 / math.sqrt(d)
    assert params.K > params.xi
    assert 0.0 < params.mu < 1.0
    assert params.A_o == 0.0


def test_select_parameters_thin_window():
    m = 1.5
    d = damping_coefficient(m)
    cap = (1.0 - math.sqrt(d)) / (2.0 - math.sqrt(d))
    params = select_parameters(m, 0.98 * cap, 0.1, a_max=2.0, d=d)
    # every constraint holds on the returned tuple
    assert (1.0 - params.A_o) / (1.0 - 2.0 * params.A_o) < params.xi
    assert params.xi < 1.0 / math.sqrt(d)
    assert params.xi / (1.0 - params.A_o) < params.K < (params.xi - 1.0) / params.A_o
    assert 0.0 < params.K_np < params.K / params.C_o
    assert 0.0 < params.mu < 1.0


def test_select_parameters_infeasible_names_constraint():
    m = 1.5
    d = damping_coefficient(m)
    cap = (1.0 - math.sqrt(d)) / (2.0 - math.sqrt(d))
    with pytest.raises(ParameterSelectionError) as err:
        select_parameters(m, 1.5 * cap, 0.1, a_max=2.0, d=d)
    assert "A_o" in str(err.value)


def test_select_parameters_small_budget_limit():
    # m -> 0: d -> 0, k(m) -> 1/2, wide xi window
    m = 1e-3
    d = damping_coefficient(m, grid=101)
    assert d < 1e-5
    params = select_parameters(m, 0.0, 0.0, a_max=2.0, d=d)
    assert params.k_of_m == pytest.approx(0.5, abs=1e-3)
    assert params.xi < 1.0 / math.sqrt(d)


def test_select_parameters_respects_budget_condition():
    m = 1.5
    L0 = 0.3 * m
    params = select_parameters(m, 0.05, L0, a_max=2.0)
    assert L0 < m / (2.0 * params.xi - 1.0)


def test_selected_parameters_reject_tampering():
    params = select_parameters(1.5, 0.05, 0.1, a_max=2.0)
    with pytest.raises(ParameterSelectionError):
        make_parameter_set(1.5, 0.05, params.xi, params.K, params.K / params.C_o * 2,
                           a_max=2.0, d=params.d)


# ----------------------------------------------------------------------
# snapshots

@pytest.fixture
def params():
    return select_parameters(1.5, 0.1, 0.3, a_max=2.0)


def test_snapshot_empty(params):
    snap = compute_snapshot([], params)
    assert snap.L == snap.Q == snap.L_xi == snap.F == 0.0
    assert snap.max_live_order == 0
    assert snap.tilde_F(1) == 0.0


def test_snapshot_shock_contact_pair(params):
    s, q = 0.4, 0.12
    fronts = [front(3, -s), front(2, q)]
    snap = compute_snapshot(fronts, params)
    assert snap.L == pytest.approx(s)
    assert snap.L_cd == pytest.approx(q)
    assert snap.Q == pytest.approx(s * q)
    assert snap.L_xi == pytest.approx(params.xi * s)
    assert snap.F == pytest.approx(params.xi * s + params.K * s * q)


def test_snapshot_q_pairs_approaching_only(params):
    # 3-waves count only left of a contact, 1-waves only right of it
    fronts = [front(1, -0.2), front(2, 0.1), front(3, -0.3)]
    snap = compute_snapshot(fronts, params)
    assert snap.Q == 0.0
    fronts = [front(3, -0.3), front(2, 0.1), front(1, -0.2)]
    snap = compute_snapshot(fronts, params)
    assert snap.Q == pytest.approx(0.1 * 0.5)


def test_snapshot_ladder_identities(params):
    rng = random.Random(9)
    for _ in range(100):
        fronts = []
        for _ in range(rng.randint(0, 25)):
            fam = rng.choice((1, 2, 3, 4))
            if fam == 2:
                strength = rng.uniform(-0.3, 0.3)
            elif fam == 4:
                strength = rng.uniform(0.0, 0.1)
            else:
                strength = rng.uniform(-0.5, 0.5)
            fronts.append(front(fam, strength, order=rng.randint(1, 6)))
        snap = compute_snapshot(fronts, params)
        # the per-order totals rebuild the weighted length and potential
        assert math.fsum(snap.V.values()) == pytest.approx(snap.L_xi, abs=1e-12)
        assert math.fsum(snap.Qk.values()) == pytest.approx(snap.Q, abs=1e-12)
        assert snap.tilde_F(1) == pytest.approx(snap.F, abs=1e-12)
        for k in range(1, snap.max_live_order + 1):
            assert snap.tilde_F(k) - snap.tilde_F(k + 1) == pytest.approx(
                snap.Fk.get(k, 0.0), abs=1e-12
            )
        assert snap.Fk == {
            k: snap.V[k] + params.K * snap.Qk[k]
            for k in range(1, snap.max_live_order + 1)
        }


def test_l_cd_within_phase_budget(params):
    fronts = [front(2, 0.04), front(2, -0.03), front(2, 0.02)]
    snap = compute_snapshot(fronts, params)
    assert snap.L_cd == pytest.approx(0.09)
    assert snap.L_cd <= params.A_o


# ----------------------------------------------------------------------
# audits

def test_audit_crossing_clean(params):
    fronts_before = [front(3, -0.2, 1), front(1, 0.1, 2)]
    fronts_after = [front(1, 0.1, 2), front(3, -0.2, 1)]
    before = compute_snapshot(fronts_before, params)
    after = compute_snapshot(fronts_after, params)
    ev = event(
        "crossing13",
        ((3, -0.2, 1), (1, 0.1, 2)),
        ((1, 0.1, 2), (3, -0.2, 1)),
        order=2,
    )
    res = audit_interaction(before, after, ev, params)
    assert res.ok
    assert res.delta_F == pytest.approx(0.0, abs=1e-15)


def test_audit_rejects_strength_change(params):
    before = compute_snapshot([front(3, -0.2, 1), front(1, 0.1, 1)], params)
    after = compute_snapshot([front(1, 0.15, 1), front(3, -0.2, 1)], params)
    ev = event(
        "crossing13",
        ((3, -0.2, 1), (1, 0.1, 1)),
        ((1, 0.15, 1), (3, -0.2, 1)),
    )
    res = audit_interaction(before, after, ev, params)
    assert not res.ok
    assert any("strength changed" in f for f in res.failures)


def test_audit_rejects_functional_growth(params):
    before = compute_snapshot([front(3, -0.2, 1), front(3, -0.1, 1)], params)
    after = compute_snapshot([front(1, 0.3, 2), front(3, -0.3, 1)], params)
    ev = event(
        "same_family",
        ((3, -0.2, 1), (3, -0.1, 1)),
        ((1, 0.3, 2), (3, -0.3, 1)),
        order=1,
    )
    res = audit_interaction(before, after, ev, params)
    assert not res.ok
    assert any("reflected wave" in f for f in res.failures)


# ----------------------------------------------------------------------
# the non-physical budget

def budget_params():
    # mu = max(1/2, 2/18, C_o/10) = 1/2 with K_np = 1
    return make_parameter_set(0.7, 0.0, xi=2.0, K=10.0, K_np=1.0, a_max=2.0)


def test_np_budget_cut_order_arithmetic():
    params = budget_params()
    assert params.mu == 0.5
    k_cut, rho = choose_np_budget(params, 1.0, 0.0, 8, 10, 2, eta=0.05)
    assert k_cut == 5  # 0.5^4 = 1/16 <= 1/16
    assert rho > 0.0


def test_np_budget_tiny_initial_data():
    params = budget_params()
    k_cut, rho = choose_np_budget(params, 1e-3, 0.0, 1, 4, 1, eta=0.05)
    assert k_cut in (1, 2)


def test_np_budget_rho_scales_down_with_nu():
    params = budget_params()
    _, rho1 = choose_np_budget(params, 1.0, 0.0, 1, 10, 2, eta=0.05)
    _, rho16 = choose_np_budget(params, 1.0, 0.0, 16, 10, 2, eta=0.05)
    assert rho16 < rho1


def test_measured_potential_switch_allows_larger_xi():
    # with a measured potential far below L0 * A_o the cap on xi relaxes
    m, A_o, L0 = 1.5, 0.1, 0.6
    bound_route = select_parameters(m, A_o, L0, a_max=2.0)
    measured = select_parameters(m, A_o, L0, a_max=2.0, q0=0.25 * L0 * A_o)
    assert measured.xi >= bound_route.xi
    assert measured.xi * L0 + measured.K * 0.25 * L0 * A_o < m
