import subprocess
import sys
from pathlib import Path

import pytest

from render_figures import FigureSpec, SchemaError, build_series, main, read_rows, render

DATA = Path(__file__).parent / "data"


def spec(kind, name, tmp_path, out_name="fig.png"):
    return FigureSpec(kind, str(DATA / name), str(tmp_path / out_name))


ALL_FIXTURES = [
    ("pressure", "pressure_curves.csv"),
    ("damping", "damping.csv"),
    ("threshold", "threshold.csv"),
    ("spacetime", "phase_jump_events.csv"),
    ("spacetime", "two_shock_events.csv"),
    ("functionals", "phase_jump_functionals.csv"),
    ("functionals", "nishida_functionals.csv"),
]


@pytest.mark.parametrize("kind,name", ALL_FIXTURES)
def test_render_each_fixture_twice_identical(kind, name, tmp_path):
    s1 = render(spec(kind, name, tmp_path, "a.png"))
    s2 = render(spec(kind, name, tmp_path, "b.png"))
    assert s1 == s2
    assert (tmp_path / "a.png").stat().st_size > 0


def test_damping_series_monotone(tmp_path):
    series = render(spec("damping", "damping.csv", tmp_path))
    d = series["d(m)"]["y"]
    assert all(b >= a for a, b in zip(d, d[1:]))
    c = series["c(m)"]["y"]
    assert all(cv <= dv < 1.0 for cv, dv in zip(c, d))


def test_damping_two_point_curve(tmp_path):
    src = tmp_path / "two.csv"
    src.write_text("m,d,c,k\n0.5,0.1,0.05,0.4\n1.0,0.3,0.2,0.3\n")
    series = render(FigureSpec("damping", str(src), str(tmp_path / "two.png")))
    assert series["d(m)"]["y"] == [0.1, 0.3]


def test_threshold_series_bracketed(tmp_path):
    series = render(spec("threshold", "threshold.csv", tmp_path))
    zs = series["x0(z)"]["x"]
    xs = series["x0(z)"]["y"]
    assert all(z <= x <= 2 * z for z, x in zip(zs, xs))


def test_nishida_functionals_zero_potential(tmp_path):
    series = render(spec("functionals", "nishida_functionals.csv", tmp_path))
    assert all(q == 0.0 for q in series["Q"]["y"])
    f = series["F"]["y"]
    assert all(b <= a + 1e-9 for a, b in zip(f, f[1:]))


def test_two_shock_spacetime_reflection(tmp_path):
    series = render(spec("spacetime", "two_shock_events.csv", tmp_path))
    fams = [entry["family"] for entry in series.values()]
    # two incoming 3-shocks merge; a reflected 1-wave leaves the vertex
    assert fams.count(3) == 3
    assert fams.count(1) == 1
    one = next(e for e in series.values() if e["family"] == 1)
    threes = [e for e in series.values() if e["family"] == 3]
    vertex_t = one["y"][0]
    assert sum(1 for e in threes if abs(e["y"][1] - vertex_t) < 1e-12) == 2
    # the reflected wave moves left from the vertex
    assert one["x"][1] < one["x"][0]


def test_phase_jump_spacetime_styles(tmp_path):
    series = render(spec("spacetime", "phase_jump_events.csv", tmp_path))
    fams = {entry["family"] for entry in series.values()}
    assert {1, 2, 3} <= fams
    for entry in series.values():
        if entry["family"] == 2:
            assert entry["x"][0] == entry["x"][1]  # contacts are vertical
        if entry["family"] == 4:
            assert entry["style"]["linestyle"] == "--"


def test_pressure_family_monotone(tmp_path):
    series = render(spec("pressure", "pressure_curves.csv", tmp_path))
    assert len(series) >= 3
    for entry in series.values():
        ys = entry["y"]
        assert all(b < a for a, b in zip(ys, ys[1:]))  # p decreasing in v


def test_schema_error_on_header_mismatch(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("m,dd,c,k\n1,2,3,4\n")
    with pytest.raises(SchemaError):
        read_rows(str(bad), "damping")
    with pytest.raises(SchemaError):
        render(FigureSpec("damping", str(bad), str(tmp_path / "x.png")))


def test_schema_error_on_missing_functional_columns(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("event_index,t,L\n0,0,0\n")
    with pytest.raises(SchemaError):
        read_rows(str(bad), "functionals")


def test_cli_entry_point(tmp_path):
    out = tmp_path / "fig.png"
    assert main(["damping", str(DATA / "damping.csv"), str(out)]) == 0
    assert out.exists()


def test_script_invocation(tmp_path):
    script = Path(__file__).parents[1] / "render_figures.py"
    out = tmp_path / "fig.png"
    proc = subprocess.run(
        [sys.executable, str(script), "threshold", str(DATA / "threshold.csv"), str(out)],
        capture_output=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()


def test_headers_match_live_primary_output(tmp_path):
    """Regenerate a fixture through the simulator CLI and render it: the
    CSV contract between the two packages stays in force."""
    pytest.importorskip("phasefront")
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[initial]\nkind = two_shock\n\n[scheme]\nm = 1.5\nnu = 2\nt_end = 3.0\n"
    )
    out = tmp_path / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "phasefront.cli", "simulate",
         "--config", str(cfg), "--out", str(out)],
        capture_output=True,
    )
    assert proc.returncode == 0, proc.stderr
    series = render(
        FigureSpec("spacetime", str(out / "events.csv"), str(tmp_path / "st.png"))
    )
    assert series
    render(
        FigureSpec("functionals", str(out / "functionals.csv"), str(tmp_path / "fn.png"))
    )
