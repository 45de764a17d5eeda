"""CSV and JSON emission.  The column layouts are a contract with the
plotting component and must not change:

  snapshots.csv    t,x_cell_left,v,u,lambda
  events.csv       t,x,kind,incoming,outgoing,delta_L_xi,delta_Q,delta_F,solver_used
  functionals.csv  event_index,t,L,L_cd,L_np,Q,L_xi,F,max_live_order,V_k...,Q_k...,F_k...
  damping.csv      m,d,c,k
  threshold.csv    z,x0
  pressure_curves.csv  lambda,v,p

`incoming`/`outgoing` hold ';'-joined family:strength:order:uid entries;
front trajectories can be reassembled by matching uids across the
`initial`, interaction and `final` rows.  Floats are printed with 17
significant digits so parsing them back is exact.
"""

from __future__ import annotations

import csv
import json

SNAPSHOT_HEADER = ["t", "x_cell_left", "v", "u", "lambda"]
EVENT_HEADER = [
    "t", "x", "kind", "incoming", "outgoing",
    "delta_L_xi", "delta_Q", "delta_F", "solver_used",
]
DAMPING_HEADER = ["m", "d", "c", "k"]
THRESHOLD_HEADER = ["z", "x0"]
PRESSURE_HEADER = ["lambda", "v", "p"]


def fmt(x):
    return format(float(x), ".17g")


def functional_header(k_max):
    head = ["event_index", "t", "L", "L_cd", "L_np", "Q", "L_xi", "F", "max_live_order"]
    head += [f"V_{k}" for k in range(1, k_max + 1)]
    head += [f"Q_{k}" for k in range(1, k_max + 1)]
    head += [f"F_{k}" for k in range(1, k_max + 1)]
    return head


def _pack_waves(triples, uids):
    return ";".join(
        f"{fam}:{fmt(s)}:{order}:{uid}"
        for (fam, s, order), uid in zip(triples, uids)
    )


def write_snapshots_csv(path, snapshots):
    """snapshots: iterable of (t, cells) with cells = [(x_left, state), ...]."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SNAPSHOT_HEADER)
        for t, cells in snapshots:
            for x_left, state in cells:
                w.writerow([fmt(t), fmt(x_left), fmt(state.v), fmt(state.u), fmt(state.lam)])


def write_events_csv(path, records, initial_fronts=None):
    """Interaction log; optionally prefixed with `initial` rows at t = 0."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(EVENT_HEADER)
        if initial_fronts:
            for x, fronts in initial_fronts:
                triples = tuple((f.family, f.strength, f.order) for f in fronts)
                uids = tuple(f.uid for f in fronts)
                w.writerow([
                    fmt(0.0), fmt(x), "initial", "",
                    _pack_waves(triples, uids),
                    fmt(0.0), fmt(0.0), fmt(0.0), "accurate",
                ])
        for r in records:
            w.writerow([
                fmt(r.t), fmt(r.x), r.kind,
                _pack_waves(r.incoming, r.incoming_uids),
                _pack_waves(r.outgoing, r.outgoing_uids),
                fmt(r.delta_L_xi), fmt(r.delta_Q), fmt(r.delta_F),
                r.solver_used,
            ])


def write_functionals_csv(path, rows, k_max=8):
    """rows: iterable of (event_index, t, FunctionalSnapshot)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(functional_header(k_max))
        for index, t, snap in rows:
            row = [
                str(index), fmt(t), fmt(snap.L), fmt(snap.L_cd), fmt(snap.L_np),
                fmt(snap.Q), fmt(snap.L_xi), fmt(snap.F), str(snap.max_live_order),
            ]
            row += [fmt(snap.V.get(k, 0.0)) for k in range(1, k_max + 1)]
            row += [fmt(snap.Qk.get(k, 0.0)) for k in range(1, k_max + 1)]
            row += [fmt(snap.Fk.get(k, 0.0)) for k in range(1, k_max + 1)]
            w.writerow(row)


def write_damping_csv(path, curve):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DAMPING_HEADER)
        for m, d, c, k in curve.rows():
            w.writerow([fmt(m), fmt(d), fmt(c), fmt(k)])


def write_threshold_csv(path, zs, x0s):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(THRESHOLD_HEADER)
        for z, x0 in zip(zs, x0s):
            w.writerow([fmt(z), fmt(x0)])


def write_pressure_curves_csv(path, pm, lams, v_lo=0.2, v_hi=5.0, n=121):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PRESSURE_HEADER)
        for lam in lams:
            for i in range(n):
                v = v_lo + (v_hi - v_lo) * i / (n - 1)
                w.writerow([fmt(lam), fmt(v), fmt(pm.pressure(v, lam))])


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
