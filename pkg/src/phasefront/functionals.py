"""Variation measures, the Glimm-type functionals and their per-order
ladders, parameter feasibility and selection, and the per-interaction
monotonicity audits.

The linear functional L sums the strengths of all 1- and 3-waves plus a
weighted total of the non-physical fronts; the interaction potential Q
pairs every contact with the 3-waves on its left and the 1-waves on its
right.  With a shock weight xi > 1,

    L_xi = L_rarefactions + xi * L_shocks + K_np * L_np
    F    = L_xi + K * Q

is non-increasing across interactions once xi, K, K_np satisfy the
constraint window tied to the damping coefficient d(m).  Sums are
evaluated with math.fsum, so audits of O(10^3)-term differences resolve
well below the 1e-9 audit tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .analysis import c_of_m, damping_coefficient, k_of_m

TOL_AUDIT = 1e-9

NP_FAMILY = 4


class ParameterSelectionError(ValueError):
    """The constraint window for (xi, K, K_np) is empty."""


def tv(samples):
    """Total variation of a finite sample sequence."""
    xs = list(samples)
    if not xs:
        raise ValueError("total variation needs at least one sample")
    return math.fsum(abs(b - a) for a, b in zip(xs, xs[1:]))


def wtv(samples):
    """Weighted total variation 2*sum |df|/(f+f') over consecutive pairs.

    Defined for positive samples; |a-b|/(a+b) is a distance, so for
    piecewise-constant data the supremum over partitions is attained on
    consecutive pairs.
    """
    xs = list(samples)
    if not xs:
        raise ValueError("weighted total variation needs at least one sample")
    if any(x <= 0.0 for x in xs):
        raise ValueError("weighted total variation needs positive samples")
    return 2.0 * math.fsum(abs(b - a) / (b + a) for a, b in zip(xs, xs[1:]))


@dataclass(frozen=True)
class InitialDataSummary:
    """The quantities of the initial data entering the feasibility check."""

    tv_log_p: float
    tv_u: float
    inf_a: float
    wtv_a: float


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    hyp1_lhs: float
    hyp1_rhs: float
    hyp2_lhs: float
    hyp2_rhs: float
    d: float

    @property
    def slack_hyp1(self):
        return self.hyp1_rhs - self.hyp1_lhs

    @property
    def slack_hyp2(self):
        return self.hyp2_rhs - self.hyp2_lhs


def check_hypotheses(summary, m, d=None):
    """Feasibility of the large-data existence hypotheses for budget m.

    Requires TV(log p_o) + TV(u_o)/inf a_o < 2(1 - 2 WTV(a_o)) m and
    WTV(a_o) < k(m), both strict.
    """
    if not m > 0.0:
        raise ValueError(f"strength budget must be positive, got {m}")
    if d is None:
        d = damping_coefficient(m)
    lhs1 = summary.tv_log_p + summary.tv_u / summary.inf_a
    rhs1 = 2.0 * (1.0 - 2.0 * summary.wtv_a) * m
    km = k_of_m(m, d=d)
    feasible = lhs1 < rhs1 and summary.wtv_a < km
    return FeasibilityReport(feasible, lhs1, rhs1, summary.wtv_a, km, d)


@dataclass(frozen=True)
class ParameterSet:
    """Scheme constants; validate() checks the full constraint window."""

    m: float
    A_o: float
    d: float
    c: float
    k_of_m: float
    xi: float
    K: float
    K_np: float
    C_o: float
    mu: float
    contraction_interaction: float
    contraction_twowave: float

    def validate(self):
        errors = []
        if self.A_o > 0.0:
            if not self.A_o < (1.0 - math.sqrt(self.d)) / (2.0 - math.sqrt(self.d)):
                errors.append("A_o >= (1 - sqrt(d))/(2 - sqrt(d))")
            xi_lo = (1.0 - self.A_o) / (1.0 - 2.0 * self.A_o)
        else:
            xi_lo = 1.0
        if not xi_lo < self.xi < 1.0 / math.sqrt(self.d):
            errors.append(f"xi={self.xi} outside ({xi_lo}, {1.0 / math.sqrt(self.d)})")
        if not self.K > self.xi / (1.0 - self.A_o):
            errors.append(f"K={self.K} below xi/(1 - A_o)")
        if self.A_o > 0.0 and not self.K < (self.xi - 1.0) / self.A_o:
            errors.append(f"K={self.K} above (xi - 1)/A_o")
        if not 0.0 < self.K_np < self.K / self.C_o:
            errors.append(f"K_np={self.K_np} outside (0, K/C_o)")
        if not 0.0 < self.mu < 1.0:
            errors.append(f"mu={self.mu} outside (0, 1)")
        if errors:
            raise ParameterSelectionError("; ".join(errors))
        return self


def _contractions(xi, K, K_np, A_o, C_o):
    lam = (1.0 + K * A_o) / xi
    lam2 = (xi + K * A_o) / (K * (2.0 - A_o) - xi)
    mu = max(lam, lam2, K_np * C_o / K)
    return lam, lam2, mu


def select_parameters(m, A_o, L0, a_max, d=None, q0=None):
    """Pick (xi, K, K_np) inside the constraint window for budget m.

    xi and K sit at the geometric midpoint of their feasible intervals;
    xi is additionally capped so that L0 < m/(2 xi - 1) whenever that
    leaves the interval nonempty.  Passing the measured initial
    potential as `q0` relaxes that cap to xi L0 + K(xi) q0 < m instead
    of the worst case Q(0+) <= L(0+) A_o.  K_np takes half its upper
    bound.  Raises ParameterSelectionError naming the first empty
    constraint.
    """
    if not m > 0.0:
        raise ValueError(f"strength budget must be positive, got {m}")
    if not 0.0 <= A_o:
        raise ValueError(f"WTV(a_o) must be nonnegative, got {A_o}")
    if d is None:
        d = damping_coefficient(m)

    sqrt_d = math.sqrt(d)
    xi_hi = 1.0 / sqrt_d
    if A_o > 0.0:
        if not A_o < (1.0 - sqrt_d) / (2.0 - sqrt_d):
            raise ParameterSelectionError(
                f"A_o={A_o} violates the bound (1 - sqrt d)/(2 - sqrt d) = "
                f"{(1.0 - sqrt_d) / (2.0 - sqrt_d)}"
            )
        xi_lo = (1.0 - A_o) / (1.0 - 2.0 * A_o)
    else:
        xi_lo = 1.0
    if not xi_lo < xi_hi:
        raise ParameterSelectionError(f"empty xi window ({xi_lo}, {xi_hi})")

    def midpoint_K(xi):
        K_lo = xi / (1.0 - A_o)
        if A_o > 0.0:
            K_hi = (xi - 1.0) / A_o
            if not K_lo < K_hi:
                raise ParameterSelectionError(f"empty K window ({K_lo}, {K_hi})")
            return math.sqrt(K_lo * K_hi)
        return 2.0 * xi

    # The smaller xi is, the larger L(0+) may be; cap xi so the run-time
    # length bound stays under the budget while the window is nonempty.
    xi_cap = xi_hi
    if L0 > 0.0:
        if q0 is None:
            cap = 0.5 * (m / L0 + 1.0)
        else:
            # measured route: largest xi with xi L0 + K(xi) q0 <= 0.98 m
            lo, hi = xi_lo, xi_hi
            if lo * L0 + midpoint_K(lo * (1.0 + 1e-12)) * q0 >= 0.98 * m:
                cap = xi_lo
            else:
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    if mid * L0 + midpoint_K(mid) * q0 <= 0.98 * m:
                        lo = mid
                    else:
                        hi = mid
                cap = lo
        if cap > xi_lo:
            xi_cap = min(xi_hi, cap)
    xi = math.sqrt(xi_lo * xi_cap)
    K = midpoint_K(xi)

    C_o = 2.0 * a_max * math.sinh(m) / m
    K_np = 0.5 * K / C_o
    lam, lam2, mu = _contractions(xi, K, K_np, A_o, C_o)
    params = ParameterSet(
        m=m, A_o=A_o, d=d, c=c_of_m(m), k_of_m=k_of_m(m, d=d),
        xi=xi, K=K, K_np=K_np, C_o=C_o, mu=mu,
        contraction_interaction=lam, contraction_twowave=lam2,
    )
    return params.validate()


def make_parameter_set(m, A_o, xi, K, K_np, a_max, d=None, validate=True):
    """Assemble a ParameterSet from explicitly chosen weights."""
    if d is None:
        d = damping_coefficient(m)
    C_o = 2.0 * a_max * math.sinh(m) / m
    lam, lam2, mu = _contractions(xi, K, K_np, A_o, C_o)
    params = ParameterSet(
        m=m, A_o=A_o, d=d, c=c_of_m(m), k_of_m=k_of_m(m, d=d),
        xi=xi, K=K, K_np=K_np, C_o=C_o, mu=mu,
        contraction_interaction=lam, contraction_twowave=lam2,
    )
    return params.validate() if validate else params


@dataclass(frozen=True)
class FunctionalSnapshot:
    """Values of the functionals and their generation-order ladders."""

    L: float
    L_cd: float
    L_np: float
    L_shocks: float
    L_rarefactions: float
    Q: float
    L_xi: float
    F: float
    V: dict
    Qk: dict
    Fk: dict
    max_live_order: int

    def tilde_V(self, k):
        return math.fsum(v for order, v in self.V.items() if order >= k)

    def tilde_Q(self, k):
        return math.fsum(v for order, v in self.Qk.items() if order >= k)

    def tilde_F(self, k):
        return math.fsum(v for order, v in self.Fk.items() if order >= k)


def compute_snapshot(fronts, params):
    """Evaluate every functional on a position-ordered front list.

    Fronts are any objects with `family` (1, 2, 3 or 4 for non-physical),
    signed `strength`, and integer `order` attributes.
    """
    rare, shocks, np_sizes, cd = [], [], [], []
    for f in fronts:
        if f.family == 2:
            cd.append(abs(f.strength))
        elif f.family == NP_FAMILY:
            np_sizes.append(abs(f.strength))
        elif f.strength > 0.0:
            rare.append(f.strength)
        else:
            shocks.append(-f.strength)
    L_rar = math.fsum(rare)
    L_sh = math.fsum(shocks)
    L_np = math.fsum(np_sizes)
    L_cd = math.fsum(cd)
    L = L_rar + L_sh + params.K_np * L_np
    L_xi = L_rar + params.xi * L_sh + params.K_np * L_np

    fronts = list(fronts)
    orders = sorted({f.order for f in fronts})
    max_order = orders[-1] if orders else 0

    # Q pairs each contact with approaching 1/3-waves; per-order tables
    # attribute each product to the order of the physical wave.
    q_terms = []
    qk_terms = {}
    for i, two in enumerate(fronts):
        if two.family != 2:
            continue
        d2 = abs(two.strength)
        for j, g in enumerate(fronts):
            if g.family == 3 and j < i or g.family == 1 and j > i:
                term = d2 * abs(g.strength)
                q_terms.append(term)
                qk_terms.setdefault(g.order, []).append(term)
    Q = math.fsum(q_terms)

    V = {}
    Qk = {}
    Fk = {}
    for k in range(1, max_order + 1):
        vk_terms = []
        for f in fronts:
            if f.order != k or f.family == 2:
                continue
            if f.family == NP_FAMILY:
                vk_terms.append(params.K_np * abs(f.strength))
            elif f.strength > 0.0:
                vk_terms.append(f.strength)
            else:
                vk_terms.append(params.xi * (-f.strength))
        V[k] = math.fsum(vk_terms)
        Qk[k] = math.fsum(qk_terms.get(k, []))
        Fk[k] = V[k] + params.K * Qk[k]

    F = L_xi + params.K * Q
    return FunctionalSnapshot(L, L_cd, L_np, L_sh, L_rar, Q, L_xi, F, V, Qk, Fk, max_order)


@dataclass
class AuditResult:
    ok: bool
    failures: list = field(default_factory=list)
    delta_L_xi: float = 0.0
    delta_Q: float = 0.0
    delta_F: float = 0.0


def _pos(x):
    return x if x > 0.0 else 0.0

def _neg(x):
    return -x if x < 0.0 else 0.0


def audit_interaction(before, after, event, params, tol=TOL_AUDIT):
    """Check the local decrease estimates across one interaction.

    `event` carries the kind, the incoming/outgoing (family, strength,
    order) triples, and the interaction order; `before`/`after` bracket
    it.  Every failure is recorded with enough context for debugging.
    """
    res = AuditResult(True)
    res.delta_L_xi = after.L_xi - before.L_xi
    res.delta_Q = after.Q - before.Q
    res.delta_F = after.F - before.F
    fails = res.failures

    def err(msg):
        fails.append(f"{event.kind} @ t={event.t:.6g}, x={event.x:.6g}: {msg}")

    inc = {f: (s, o) for f, s, o in event.incoming}
    out = {f: (s, o) for f, s, o in event.outgoing}

    if event.kind in ("crossing13", "np_crossing"):
        for name, delta in (("L_xi", res.delta_L_xi), ("Q", res.delta_Q), ("F", res.delta_F)):
            if abs(delta) > tol:
                err(f"delta {name} = {delta:.3e} should vanish")
        for fam, (s, _) in inc.items():
            if fam in out and out[fam][0] != s:
                err(f"family {fam} strength changed: {s} -> {out[fam][0]}")
        if NP_FAMILY in inc and NP_FAMILY in out and inc[NP_FAMILY][0] != out[NP_FAMILY][0]:
            err("non-physical size changed across a crossing")

    elif event.kind == "same_family":
        if res.delta_F > tol:
            err(f"delta F = {res.delta_F:.3e} > 0")
        if res.delta_L_xi > tol:
            err(f"delta L_xi = {res.delta_L_xi:.3e} > 0")
        fam = event.incoming[0][0]
        other = 1 if fam == 3 else 3
        alpha, beta = event.incoming[0][1], event.incoming[1][1]
        eps_same = out.get(fam, (0.0, 0))[0]
        eps_refl = out.get(other, (0.0, 0))[0]
        if abs(eps_refl) > params.d * min(abs(alpha), abs(beta)) + tol:
            err(
                f"reflected wave {eps_refl:.3e} exceeds d*min incoming "
                f"= {params.d * min(abs(alpha), abs(beta)):.3e}"
            )
        if abs(eps_same) > abs(alpha) + abs(beta) + tol:
            err(f"outgoing same-family wave exceeds incoming total")
        if alpha < 0.0 and beta < 0.0:
            if not eps_refl > -tol:
                err("two shocks must reflect a rarefaction")
            if not eps_same < tol:
                err("two shocks must produce an outgoing shock")
            if abs(eps_same) < max(abs(alpha), abs(beta)) - tol:
                err("outgoing shock from SS should exceed both incoming")
        elif alpha * beta < 0.0 and eps_refl > tol:
            err("mixed-sign incoming must reflect a shock")

    elif event.kind in ("two_wave_accurate", "two_wave_simplified"):
        if res.delta_F > tol:
            err(f"delta F = {res.delta_F:.3e} > 0")
        d2, _ = inc[2]
        fam = 1 if 1 in inc else 3
        delta, _ = inc[fam]
        # delta Q is negative by at least |d2 d|(2 - A_o)/2; demand a strict
        # sign only when that is resolvable above the fp floor of Q itself.
        q_floor = 64.0 * 2.2e-16 * max(1.0, before.Q, after.Q)
        if abs(d2 * delta) > 8.0 * q_floor:
            if not res.delta_Q < 0.0:
                err(f"delta Q = {res.delta_Q:.3e} not negative")
        elif res.delta_Q > q_floor:
            err(f"delta Q = {res.delta_Q:.3e} above the fp floor {q_floor:.3e}")
        if out[2][0] != d2:
            err("contact strength changed")
        if event.kind == "two_wave_accurate":
            other = 1 if fam == 3 else 3
            eps_i = out.get(fam, (0.0, 0))[0]
            eps_j = out.get(other, (0.0, 0))[0]
            if eps_i * delta < 0.0:
                err("transmitted wave changed sign")
            if abs(abs(eps_i - delta) - abs(eps_j)) > tol:
                err(
                    f"|eps_i - delta_i| = {abs(eps_i - delta):.3e} != |eps_j| "
                    f"= {abs(eps_j):.3e}"
                )
            if abs(eps_j) > 0.5 * abs(d2) * abs(delta) + tol:
                err(f"reflected wave exceeds |d2||d|/2")
            if params.xi * abs(eps_j) >= 0.5 * params.K * abs(res.delta_Q) + tol:
                err(
                    f"xi|eps_j| = {params.xi * abs(eps_j):.3e} not below "
                    f"(K/2)|delta Q| = {0.5 * params.K * abs(res.delta_Q):.3e}"
                )
        else:
            eps_i = out.get(fam, (0.0, 0))[0]
            if eps_i != delta:
                err("simplified solver must transmit the strength unchanged")
            np_size = out.get(NP_FAMILY, (0.0, 0))[0]
            if np_size > params.C_o * abs(d2 * delta) + tol:
                err(f"non-physical size {np_size:.3e} exceeds C_o|d2 d|")
            bound = abs(d2 * delta) * (params.K_np * params.C_o - params.K)
            if res.delta_F > bound + tol:
                err(f"delta F = {res.delta_F:.3e} above NP-generation bound {bound:.3e}")

    # Per-order ladder estimates for the interactions that move them.
    if event.kind in ("same_family", "two_wave_accurate", "two_wave_simplified"):
        h_ord = event.order
        kmax = max(before.max_live_order, after.max_live_order) + 1
        dFk = {
            k: after.Fk.get(k, 0.0) - before.Fk.get(k, 0.0) for k in range(1, kmax + 1)
        }
        for k in range(2, kmax + 1):
            d_tilde = after.tilde_F(k) - before.tilde_F(k)
            if h_ord <= k - 2:
                if abs(d_tilde) > tol or abs(dFk[k]) > tol:
                    err(f"order-{h_ord} event moved tilde F_{k}")
            elif h_ord == k - 1:
                if dFk[k - 1] > tol:
                    err(f"delta F_{k-1} = {dFk[k-1]:.3e} > 0 at an order-{h_ord} event")
                budget = _neg(dFk[k - 1]) - math.fsum(_pos(dFk[l]) for l in range(1, k - 1))
                if _pos(d_tilde) > params.mu * budget + tol:
                    err(
                        f"[delta tilde F_{k}]_+ = {_pos(d_tilde):.3e} above mu * "
                        f"{budget:.3e}"
                    )
            else:
                if d_tilde > tol:
                    err(f"delta tilde F_{k} = {d_tilde:.3e} > 0 at an order-{h_ord} event")
                if h_ord == k and dFk[k] > tol:
                    err(f"delta F_{k} = {dFk[k]:.3e} > 0 at an order-{k} event")
                gain = math.fsum(_pos(dFk[l]) for l in range(1, k))
                if gain > _neg(d_tilde) + tol:
                    err(f"low-order gain {gain:.3e} above [delta tilde F_{k}]_-")

    res.ok = not fails
    return res


def choose_np_budget(params, L_xi0, Q0, nu, n_initial_fronts, n_two_waves, eta,
                     max_events=10 ** 6):
    """Cut order and simplified-solver threshold bounding total NP size by 1/nu.

    k_cut is the smallest k with mu^(k-1) (L_xi(0) + K Q(0)) below
    min(1, K_np)/(2 nu); dividing by K_np then bounds the unweighted size
    of non-physical fronts of order >= k_cut by 1/(2 nu).  rho is sized
    so that C_o * rho times a bound on the number of fronts of order
    below k_cut stays below 1/(2 nu).  Two constructive bounds apply and
    the smaller is used: a per-order recurrence (new orders arise from
    same-family merges, amortized one per existing front, or from
    contact hits, once per front and contact, each birth split into at
    most ceil(m e^{A_o/2}/eta) fan members), and the run-wide cap
    n_initial + (fan + 2) * max_events enforced by the event budget.
    """
    if not 0.0 < params.mu < 1.0:
        raise ValueError(f"need a contractive mu, got {params.mu}")
    if nu < 1:
        raise ValueError(f"approximation index must be >= 1, got {nu}")
    X = L_xi0 + params.K * Q0
    target = min(1.0, params.K_np) / (2.0 * nu)
    k_cut = 1
    while X * params.mu ** (k_cut - 1) > target:
        k_cut += 1
        if k_cut > 10000:
            raise RuntimeError("cut order runaway; mu too close to 1")

    fan = max(1, math.ceil(params.m * math.exp(0.5 * params.A_o) / eta))
    cap = n_initial_fronts + (fan + 2) * max_events
    counts = [max(1, n_initial_fronts)]
    for _ in range(2, k_cut):
        births = sum(counts) + n_two_waves * counts[-1]
        counts.append(min(fan * births, cap))
        if counts[-1] >= cap:
            break
    n_low = min(sum(counts), cap) if k_cut > 1 else 0
    rho = 1.0 / (2.0 * nu * params.C_o * max(n_low, 1))
    return k_cut, rho
