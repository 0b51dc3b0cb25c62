import json
import random
import subprocess
import sys
from fractions import Fraction as F
from importlib import resources

import jsonschema
import pytest

from ordalg import families
from ordalg.cli import main
from ordalg.dsl import DSLSyntaxError, parse_function, to_dsl
from ordalg.symfunc import INF, PartitionError, PiecewiseFn, symbolically_equal

SCHEMA = json.loads(resources.files("ordalg").joinpath("schemas/report.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--json")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    return code, report


# -- DSL ---------------------------------------------------------------------


def test_parse_decaying_multiplier():
    assert parse_function("0..1: 1; 1..inf: x^(-2/3)") == families.decaying_multiplier(3, F(3, 2), F(1, 3))


def test_parse_zero():
    assert parse_function("0..inf: 0").is_zero


@pytest.mark.parametrize("text", ["0..1: 1; 2..inf: 1", "0..2: 1; 1..inf: 1", "1..inf: 1", "0..1: 1"])
def test_partition_errors(text):
    with pytest.raises(PartitionError):
        parse_function(text)


def test_syntax_error_position():
    with pytest.raises(DSLSyntaxError) as err:
        parse_function("0..1: 1;\n1..inf: 3/4 x")
    assert (err.value.line, err.value.column) == (2, 13)


@pytest.mark.parametrize(
    "text, x, value",
    [
        ("0..inf: 2*x^2 - x + 1/4", 2, 6.25),
        ("0..inf: x*ln(x)^2", 1, 0.0),
        ("0..inf: 0.5*x^-1", 4, 0.125),
        ("0..inf: 1e-3*x", 1000, 1.0),
        ("0..1/2: x^(1/2); 1/2..inf: -x", 1, -1.0),
        ("0..inf: -ln(x)", 1, -0.0),
    ],
)
def test_parse_values(text, x, value):
    assert parse_function(text)(x) == pytest.approx(value, abs=1e-15)


def test_decimals_are_exact():
    f = parse_function("0..0.25: 0.1*x; 0.25..inf: 0")
    assert f.pieces[0].hi == F(1, 4)
    assert f.pieces[0].terms[0].coeff == F(1, 10)


def test_round_trip_500_random_functions():
    rng = random.Random(500)
    for i in range(500):
        if i % 5 == 4:
            f = families.random_unit_ball_candidate(rng, F(3, 2))
        else:
            f = families.random_family_fn(rng, ("unit", "grid", "sqrt")[i % 3])
        text = to_dsl(f)
        g = parse_function(text)
        assert symbolically_equal(g, f, rel_tol=0, abs_tol=0), text
        # float coefficients come back as exact decimals, so compare the second trip exactly
        assert parse_function(to_dsl(g)) == g


# -- CLI ---------------------------------------------------------------------


def test_eval(capsys):
    code, report = run_json(capsys, "eval", "--fn", "0..1: x; 1..inf: x^(-1/2)", "--at", "4")
    assert code == 0 and report["value"] == 0.5


def test_convolve_and_transform(capsys):
    code, report = run_json(capsys, "convolve", "--f", "0..1: 1; 1..inf: 0", "--g", "0..1: x; 1..inf: 0")
    assert code == 0 and report["dsl"] == "0..1: 3/2*x^(2); 1..inf: 0"
    code, report = run_json(capsys, "transform", "--fn", "0..1: 1; 1..inf: -1/2*x^(-3/2)")
    assert code == 0 and report["dsl"] == "0..1: x; 1..inf: x^(-1/2)"


def test_norm_divergent(capsys):
    code, report = run_json(capsys, "norm", "--fn", "0..1:x; 1..inf:x^(-1/2)", "--p", "3/2")
    assert code == 0
    assert report["value"] == "inf"
    assert report["divergence"]["endpoint"] == "inf"
    assert report["divergence"]["exponent"] == "-3/4"


def test_ap_norm(capsys):
    code, report = run_json(capsys, "norm", "--fn", "0..1: 1; 2..3: -1", "--p", "2", "--ap")
    assert code == 1 and report["kind"] == "error"
    code, report = run_json(capsys, "norm", "--fn", "0..1: 1; 1..2: 0; 2..3: -1; 3..inf: 0", "--p", "2", "--ap")
    assert code == 0 and report["value"] == pytest.approx(2 + (5 / 3) ** 0.5, rel=1e-12)


def test_classify_multiplier(capsys):
    code, report = run_json(capsys, "classify", "--phi", "0..1:1; 1..inf:x^(-2/3)", "--r", "3", "--p", "3/2")
    assert code == 0 and report["verdict"] == "Multiplier"
    assert report["bounds"]["lower"] <= report["bounds"]["upper"]


def test_classify_not_multiplier(capsys):
    code, report = run_json(capsys, "classify", "--phi", "0..inf:1", "--r", "3", "--p", "3/2")
    assert code == 0 and report["verdict"] == "NotMultiplier"
    assert report["witness"]["alpha"] == "1/2"
    assert report["witness"]["failure"]["exponent"] == "-3/4"


def test_classify_undetermined_exit_code(capsys):
    code, report = run_json(capsys, "classify", "--phi", "0..1: 0; 1..inf: x^(2/3)*ln(x)", "--r", "3/2", "--p", "inf")
    assert code == 2 and report["verdict"] == "Undetermined"


def test_witness(capsys):
    code, report = run_json(capsys, "witness", "--phi", "0..1: 1; 1..inf: x^(1/2)", "--r", "3/2", "--p", "3")
    assert code == 0 and report["witness"]["alpha"] == "5/6"
    code, report = run_json(capsys, "witness", "--phi", "0..1:1; 1..inf:x^(-2/3)", "--r", "3", "--p", "3/2")
    assert code == 0 and report["witness"] is None


def test_text_output(capsys):
    code, out = run(capsys, "classify", "--phi", "0..inf:1", "--r", "3", "--p", "3/2")
    assert code == 0 and out.startswith("verdict: NotMultiplier")
    code, out = run(capsys, "norm", "--fn", "0..1: x; 1..inf: 0", "--p", "2")
    assert code == 0 and "exact" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--fn", "0..1: 3/4 x", "--at", "1"],
        ["eval", "--fn", "0..1: 1; 2..inf: 1", "--at", "1"],
        ["norm", "--fn", "0..inf: 1", "--p", "1/2"],
        ["transform", "--fn", "0..inf: 1"],
        ["scenario", "--id", "thm7-tent", "--params", "alpha=3", "beta=2"],
    ],
)
def test_errors_exit_one(capsys, argv):
    code, report = run_json(capsys, *argv)
    assert code == 1 and report["kind"] == "error"


def test_syntax_error_message_has_position(capsys):
    code = main(["eval", "--fn", "0..1: 3/4 x", "--at", "1"])
    assert code == 1
    assert "line 1, column 11" in capsys.readouterr().err


def test_bad_flags_rejected():
    with pytest.raises(SystemExit) as err:
        main(["classify", "--phi", "0..inf:1", "--r", "3"])
    assert err.value.code == 2
    with pytest.raises(SystemExit):
        main(["scenario", "--id", "nope"])
    with pytest.raises(SystemExit):
        main(["norm", "--fn", "0..inf:0", "--p", "2", "--tol", "-1"])


# -- scenarios ---------------------------------------------------------------


def test_tent_scenario(capsys):
    code, report = run_json(capsys, "scenario", "--id", "thm7-tent", "--params", "alpha=1", "beta=2", "gamma=3", "r=2")
    assert code == 0 and report["passed"]
    assert report["values"]["computed"] == pytest.approx(2 + (5 / 3) ** 0.5, rel=1e-12)


def test_growing_multiplier_scenario_reports_the_failed_growth_condition(capsys):
    code, report = run_json(capsys, "scenario", "--id", "ex8")
    results = {a["name"]: a["passed"] for a in report["assertions"]}
    assert results["not-multiplier"] and results["witness-tail"] and results["variation-growth-exponent"]
    assert not results["necessary-all-hold"]
    assert code == 1


def test_prop2_scenario(capsys):
    code, report = run_json(capsys, "scenario", "--id", "prop2")
    assert code == 0 and report["passed"] and report["values"]["cases"] == 150


@pytest.mark.parametrize("scenario", ["ex5i", "ex5ii", "thm3-bound", "approx-identity"])
def test_other_scenarios_pass(capsys, scenario):
    code, report = run_json(capsys, "scenario", "--id", scenario)
    assert code == 0 and report["passed"], report["assertions"]


def test_scenario_json_is_byte_identical():
    cmd = [sys.executable, "-m", "ordalg", "scenario", "--id", "homomorphism", "--params", "n=30", "--seed", "9", "--json"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second
    jsonschema.validate(json.loads(first), SCHEMA)
