import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stablepide.errors import InvalidParameters
from stablepide.experiments import cli
from stablepide.experiments.config import ExperimentConfig, load_config, parse_config
from stablepide.experiments.report import CONSTANT_COLUMNS, RATE_COLUMNS, ExperimentReport, fit_slope, tail_slope
from stablepide.experiments.runners import (
    report_constants,
    run_clt_experiment,
    run_consistency_audit,
    run_rate_experiment,
    run_solve,
)

# ---- config ------------------------------------------------------------------------


def test_parse_config_basics():
    text = """
    # comment line
    alpha = 1.8
    r1 = 0.3   # trailing comment
    r2 = 0.4
    profile = power
    profile.beta = 2^1
    delta_list = pow2:-4:-6
    n_list = 4, 8, 16
    grid.N = 2, 4
    report.timing = yes
    """
    v = parse_config(text)
    assert v["alpha"] == 1.8 and v["beta"] == 2.0
    assert v["delta_list"] == (2.0**-4, 2.0**-5, 2.0**-6)
    assert v["n_list"] == (4, 8, 16)
    assert v["grid_N"] == (2.0, 4.0)
    assert v["timing"] is True


@pytest.mark.parametrize(
    "text",
    ["alpha 1.5", "speed = 3", "alpha = fast", "n_list = 2.5, 4", "report.timing = maybe"],
)
def test_parse_config_errors(text):
    with pytest.raises(InvalidParameters):
        parse_config(text)


@pytest.mark.parametrize(
    "kw",
    [
        {"delta_list": (0.1, 0.2, 0.05)},
        {"delta_list": (1.0, 0.5)},
        {"n_list": (4, 4, 8)},
        {"phi": "sinc"},
        {"phi": "abs_clip", "extension": "periodic"},
        {"r1": 0.5, "r2": 0.8},
        {"profile_kind": "power"},
        {"alpha": 2.0},
    ],
)
def test_config_validation(kw):
    with pytest.raises(InvalidParameters):
        ExperimentConfig(**kw)


@settings(max_examples=50, deadline=None)
@given(x=st.floats(1e-6, 1e6, allow_nan=False), j=st.integers(-30, 30))
def test_numbers_round_trip(x, j):
    assert parse_config(f"alpha = {x!r}")["alpha"] == x
    assert parse_config(f"T = 2^{j}")["T"] == 2.0**j


def test_load_config_with_overrides(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("alpha = 1.5\nseed = 3\n")
    cfg = load_config(p, seed=9, timing=None)
    assert cfg.seed == 9 and cfg.timing is False
    assert cfg.grid_extension == "periodic"
    assert cfg.with_overrides(phi="bump").grid_extension == "constant"


# ---- report ------------------------------------------------------------------------


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(rows=st.lists(st.tuples(finite, finite, finite | st.just(math.nan)), min_size=1, max_size=6))
def test_report_round_trip(rows):
    cols = ["delta", "value", "error"]
    rep = ExperimentReport(
        "rate",
        cols,
        [dict(zip(cols, r)) for r in rows],
        fitted_slope=0.25,
        passes={"slope": True},
        provenance={"reference": "x"},
        notes=["n"],
    )
    csv1 = rep.to_csv()
    header, parsed = ExperimentReport.rows_from_csv(csv1)
    assert header == cols
    assert ExperimentReport("rate", header, parsed).to_csv() == csv1
    js = rep.to_json()
    assert ExperimentReport.from_json(js).to_json() == js


def test_fit_slope():
    xs = [2.0**-j for j in range(4, 10)]
    assert fit_slope(xs, [3.0 * x**0.4 for x in xs]) == pytest.approx(0.4)
    assert math.isnan(fit_slope(xs[:3], [1.0, 0.5, 0.25]))
    assert math.isnan(fit_slope(xs, [0.0] * len(xs)))
    assert tail_slope(xs, [x**0.7 for x in xs]) == pytest.approx(0.7)


# ---- runners ------------------------------------------------------------------------


def test_constants_report():
    cfg = ExperimentConfig(alpha=1.5, r1=0.5, r2=0.5, delta_list=(2.0**-4, 2.0**-6, 2.0**-8, 2.0**-10))
    rep = report_constants(cfg)
    assert rep.columns == list(CONSTANT_COLUMNS)
    assert all(r["Gamma"] == pytest.approx(1 / 6) for r in rep.rows)
    assert rep.constants["M_xi_1"] == pytest.approx(9 / 4)
    low = report_constants(cfg.with_overrides(alpha=1.2, r1=0.4, r2=0.4))
    assert low.predicted_gamma == pytest.approx(0.25)
    power = report_constants(
        cfg.with_overrides(r1=0.25, r2=0.3, profile_kind="power", beta=1.8, a1=0.03, a2=0.03)
    )
    assert power.constants["q"] == pytest.approx(0.2) and power.predicted_gamma == pytest.approx(0.1)


def test_constant_phi_rate_is_trivial():
    cfg = ExperimentConfig(phi="const", phi_level=2.0, delta_list=tuple(2.0**-j for j in range(3, 8)))
    rep = run_rate_experiment(cfg)
    assert rep.columns == list(RATE_COLUMNS)
    assert all(r["error"] == 0.0 for r in rep.rows)
    assert math.isnan(rep.fitted_slope) and rep.passed


def test_rate_needs_four_points():
    with pytest.raises(InvalidParameters):
        run_rate_experiment(ExperimentConfig(delta_list=(0.5, 0.25, 0.125)))


def test_solve_report():
    rep = run_solve(ExperimentConfig(phi="bump", delta_list=(2.0**-4,), T=0.5))
    assert [r["x"] for r in rep.rows] == list(ExperimentConfig().probes)
    assert all(0.0 < r["value"] <= 1.0 for r in rep.rows)


def test_clt_first_step_and_determinism():
    cfg = ExperimentConfig(phi="abs_clip", r1=0.2, r2=0.3, n_list=(1, 2, 4, 8, 16))
    one = run_clt_experiment(cfg, threads=1)
    many = run_clt_experiment(cfg, threads=3)
    assert one.to_csv() == many.to_csv()
    assert one.to_json() == many.to_json()
    assert one.to_csv() == run_clt_experiment(cfg, threads=1).to_csv()


def test_consistency_audit_constant_is_trivial():
    cfg = ExperimentConfig(phi="const", delta_list=(2.0**-4, 2.0**-5), audit_points=4)
    rep = run_consistency_audit(cfg)
    assert all(r["residual_max"] == 0.0 for r in rep.rows) and rep.passed


# ---- cli ------------------------------------------------------------------------------


def test_cli_constants(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("alpha = 1.5\nr1 = 0.5\nr2 = 0.5\ndelta_list = pow2:-4:-7\n")
    out = tmp_path / "out.json"
    assert cli.main(["constants", "--config", str(cfg), "--format", "json", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["kind"] == "constants" and len(d["rows"]) == 4
    assert cli.main(["constants", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out.splitlines()[0] == ",".join(CONSTANT_COLUMNS)


def test_cli_errors(tmp_path, monkeypatch, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("alpha = 3\n")
    assert cli.main(["constants", "--config", str(bad)]) == 2
    failing = ExperimentReport("x", ["a"], [{"a": 1.0}], passes={"slope": False})
    monkeypatch.setitem(cli.COMMANDS, "rate", (lambda cfg, threads=1: failing, "stub"))
    assert cli.main(["rate"]) == 1
    assert "slope" in capsys.readouterr().err
