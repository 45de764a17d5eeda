"""Render figures from the simulator's CSV outputs.

Reads only the documented CSV contracts and never recomputes any model
quantity.  Five figure kinds:

  pressure     pressure_curves.csv   one p(v) curve per phase fraction
  damping      damping.csv           the damping coefficient over m
  threshold    threshold.csv         the shock/rarefaction cancellation curve
  spacetime    events.csv            one polyline per front, colored by
                                     family, dashed for non-physical
                                     fronts, vertical for contacts
  functionals  functionals.csv       F, L_xi, Q against the event index

Usage: python render_figures.py KIND INPUT_CSV OUTPUT_IMAGE

Rendering is a pure function of the CSV bytes: repeated runs produce the
same figure size and identical plotted series.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


class SchemaError(ValueError):
    """The input CSV does not match the documented column contract."""


FIXED_HEADERS = {
    "pressure": ["lambda", "v", "p"],
    "damping": ["m", "d", "c", "k"],
    "threshold": ["z", "x0"],
    "spacetime": [
        "t", "x", "kind", "incoming", "outgoing",
        "delta_L_xi", "delta_Q", "delta_F", "solver_used",
    ],
}

FUNCTIONAL_PREFIX = [
    "event_index", "t", "L", "L_cd", "L_np", "Q", "L_xi", "F", "max_live_order",
]

FAMILY_STYLE = {
    1: {"color": "#1f6fb2", "linestyle": "-"},
    2: {"color": "#111111", "linestyle": "-"},
    3: {"color": "#c23b22", "linestyle": "-"},
    4: {"color": "#888888", "linestyle": "--"},
}

FAMILY_LABEL = {1: "1-waves", 2: "contacts", 3: "3-waves", 4: "non-physical"}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_path: str
    output_path: str
    dpi: int = 120
    width: float = 7.2
    height: float = 4.8


def read_rows(path, kind):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file")
        if kind == "functionals":
            if header[: len(FUNCTIONAL_PREFIX)] != FUNCTIONAL_PREFIX:
                raise SchemaError(
                    f"{path}: expected columns starting with {FUNCTIONAL_PREFIX}, "
                    f"got {header[:9]}"
                )
            if any(not c.split("_")[0] in ("V", "Q", "F") for c in header[9:]):
                raise SchemaError(f"{path}: unexpected trailing columns {header[9:]}")
        else:
            if header != FIXED_HEADERS[kind]:
                raise SchemaError(
                    f"{path}: expected columns {FIXED_HEADERS[kind]}, got {header}"
                )
        return header, [dict(zip(header, row)) for row in reader]


def _parse_waves(cell):
    """family:strength:order:uid entries joined by ';'."""
    out = []
    if cell:
        for chunk in cell.split(";"):
            fam, strength, order, uid = chunk.split(":")
            out.append((int(fam), float(strength), int(order), int(uid)))
    return out


def build_series(kind, rows):
    """Data series to plot: mapping label -> dict with xs, ys, style."""
    if kind == "pressure":
        series = {}
        for row in rows:
            lam = row["lambda"]
            entry = series.setdefault(
                f"lambda={float(lam):g}", {"x": [], "y": [], "style": {}}
            )
            entry["x"].append(float(row["v"]))
            entry["y"].append(float(row["p"]))
        return series

    if kind == "damping":
        xs = [float(r["m"]) for r in rows]
        return {
            "d(m)": {"x": xs, "y": [float(r["d"]) for r in rows],
                     "style": {"color": "#1f6fb2"}},
            "c(m)": {"x": xs, "y": [float(r["c"]) for r in rows],
                     "style": {"color": "#888888", "linestyle": "--"}},
        }

    if kind == "threshold":
        xs = [float(r["z"]) for r in rows]
        return {
            "x0(z)": {"x": xs, "y": [float(r["x0"]) for r in rows],
                      "style": {"color": "#1f6fb2"}},
            "x=z": {"x": xs, "y": xs, "style": {"color": "#bbbbbb", "linestyle": ":"}},
            "x=2z": {"x": xs, "y": [2.0 * z for z in xs],
                     "style": {"color": "#bbbbbb", "linestyle": "--"}},
        }

    if kind == "functionals":
        xs = [int(r["event_index"]) for r in rows]
        series = {}
        for name, color in (("F", "#c23b22"), ("L_xi", "#1f6fb2"), ("Q", "#3a7d44")):
            series[name] = {
                "x": xs, "y": [float(r[name]) for r in rows], "style": {"color": color}
            }
        return series

    if kind == "spacetime":
        birth = {}
        death = {}
        family = {}
        for row in rows:
            t, x = float(row["t"]), float(row["x"])
            for fam, _, _, uid in _parse_waves(row["outgoing"]):
                birth[uid] = (t, x)
                family[uid] = fam
            for fam, _, _, uid in _parse_waves(row["incoming"]):
                death[uid] = (t, x)
                family.setdefault(uid, fam)
        series = {}
        for uid, (t0, x0) in sorted(birth.items()):
            if uid not in death:
                continue
            t1, x1 = death[uid]
            fam = family[uid]
            series[f"front{uid}"] = {
                "x": [x0, x1], "y": [t0, t1],
                "style": dict(FAMILY_STYLE[fam]),
                "family": fam,
            }
        return series

    raise SchemaError(f"unknown figure kind: {kind}")


AXIS_LABELS = {
    "pressure": ("specific volume v", "pressure p"),
    "damping": ("strength budget m", "coefficient"),
    "threshold": ("shock size z", "rarefaction size x"),
    "functionals": ("event index", "functional value"),
    "spacetime": ("position x", "time t"),
}


def render(spec):
    """Draw the figure and save it; returns (figure, plotted series)."""
    _, rows = read_rows(spec.input_path, spec.kind)
    series = build_series(spec.kind, rows)
    fig, ax = plt.subplots(figsize=(spec.width, spec.height), dpi=spec.dpi)
    seen_families = set()
    for label, entry in series.items():
        style = dict(entry["style"])
        if spec.kind == "spacetime":
            fam = entry["family"]
            if fam not in seen_families:
                style["label"] = FAMILY_LABEL[fam]
                seen_families.add(fam)
            style.setdefault("linewidth", 1.2)
        else:
            style["label"] = label
        ax.plot(entry["x"], entry["y"], **style)
    xlabel, ylabel = AXIS_LABELS[spec.kind]
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if series:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output_path)
    plt.close(fig)
    return series


def main(argv=None):
    ap = argparse.ArgumentParser(prog="render_figures")
    ap.add_argument("kind", choices=sorted(AXIS_LABELS))
    ap.add_argument("input_csv")
    ap.add_argument("output_image")
    ap.add_argument("--dpi", type=int, default=120)
    args = ap.parse_args(argv)
    render(FigureSpec(args.kind, args.input_csv, args.output_image, dpi=args.dpi))
    return 0


if __name__ == "__main__":
    sys.exit(main())
