import json
import xml.etree.ElementTree as ET
from decimal import Decimal
from importlib import resources

import jsonschema
import pytest

from latexp import cli
from latexp.cli import ConfigError, RunConfig, config_from_args, main, make_parser
from latexp.construct import Mode
from latexp.exactreal import PRECISION_ENV, BetaSpec

SVG = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def schema(name):
    text = resources.files("latexp").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def test_construct_golden(capsys):
    code, doc = run_json(capsys, "construct", "--beta", "2", "--depth", "3")
    assert code == 0
    assert doc["a"] == ["1", "2", "13", "19792"]
    assert doc["q"] == ["1", "2", "27", "534386"]
    jsonschema.validate(doc, schema("construction"))


def test_construct_bounded_is_periodic(capsys):
    code, doc = run_json(capsys, "construct", "--mode", "bounded", "--a", "1", "--b", "2", "--depth", "10")
    assert code == 0
    assert doc["a"] == ["1"] * 11 and doc["b"] == ["1"] + ["2"] * 10


def test_construct_table(capsys):
    code, out, _ = run(capsys, "construct", "--depth", "3")
    assert code == 0
    assert out.splitlines()[0].split() == ["k", "a_k", "b_k", "digits(q_k)", "digits(s_k)"]
    assert "19792" in out


@pytest.mark.parametrize("argv,message", [
    (["construct", "--beta", "1/1", "--depth", "3"], "beta must exceed 1"),
    (["construct", "--depth", "1"], "depth must be at least 2"),
    (["construct", "--precision-cap", "64"], "precision cap"),
    (["oracle", "--depth", "3"], "needs --bound"),
    (["oracle", "--depth", "3", "--bound", "0"], "bound must be at least 1"),
    (["construct", "--mode", "bounded", "--a", "1"], "patterns"),
    (["construct", "--mode", "bounded", "--a", "1", "--b", "1"], ""),
    (["audit", "--mode", "bounded", "--a", "1", "--b", "2"], "beta mode"),
    (["plot", "--depth", "4"], "--output"),
    (["construct", "--mode", "bounded", "--a", "1,x", "--b", "2"], "bad pattern"),
])
def test_config_errors_exit_2(capsys, argv, message):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert message in err


def test_precision_error_exit_3(capsys):
    code, _, err = run(capsys, "minima", "--mode", "superexp", "--depth", "8")
    assert code == 3
    assert err.startswith("precision error")


def test_precision_cap_env(monkeypatch):
    monkeypatch.setenv(PRECISION_ENV, "4096")
    ns = make_parser().parse_args(["construct"])
    assert config_from_args(ns).precision_cap == 4096


def test_minima_json(capsys):
    code, doc = run_json(capsys, "minima", "--beta", "2", "--depth", "4")
    assert code == 0
    jsonschema.validate(doc, schema("minima"))
    assert [(p["family"], p["k"]) for p in doc["points"]][:3] == [("E2", "-1"), ("V", "0"), ("W", "0")]


def test_minima_csv(capsys):
    code, out, _ = run(capsys, "minima", "--depth", "3", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "label,supnorm_lo,supnorm_hi,pi2_lo,pi2_hi,certified"


def test_exponents_report(capsys):
    code, doc = run_json(capsys, "exponents", "--beta", "2", "--depth", "8")
    assert code == 0
    jsonschema.validate(doc, schema("exponents"))
    wu = next(e for e in doc["estimates"] if e["kind"] == "weak_uniform")
    assert wu["target"] == "7.50000000000e-1"
    assert abs(Decimal(wu["running_stat"]) - Decimal("0.75")) <= Decimal("0.02")


def test_exponents_unavailable_in_bounded_mode(capsys):
    code, doc = run_json(capsys, "exponents", "--mode", "bounded", "--a", "1", "--b", "2", "--depth", "8")
    assert code == 0
    jsonschema.validate(doc, schema("exponents"))
    wu = next(e for e in doc["estimates"] if e["kind"] == "weak_uniform")
    assert "unavailable" in wu


def test_exponents_table_line(capsys):
    code, out, _ = run(capsys, "exponents", "--depth", "5")
    assert code == 0
    assert "(finite-depth estimate), target" in out


def test_audit_command(capsys, tmp_path):
    path = tmp_path / "audit.json"
    code, out, _ = run(capsys, "audit", "--beta", "2", "--depth", "8", "--output", str(path))
    assert code == 0
    assert out.rstrip().endswith("overall: PASS")
    doc = json.loads(path.read_text())
    jsonschema.validate(doc, schema("audit"))
    assert doc["overall"] == "PASS"


def test_audit_failure_exit_1(capsys, monkeypatch):
    from latexp.construct import generate_beta, perturb_quotient

    real = generate_beta
    monkeypatch.setattr(cli, "generate_beta", lambda beta, depth, cap: perturb_quotient(real(beta, depth, cap=cap), 5))
    code, _, _ = run(capsys, "audit", "--depth", "6")
    assert code == 1


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", "--beta", "2", "--depth", "4", "--bound", "2500")
    assert code == 0
    assert out.splitlines()[0] == "filter == oracle: true"
    code, doc = run_json(capsys, "oracle", "--beta", "2", "--depth", "3", "--bound", "300")
    jsonschema.validate(doc, schema("oracle"))
    assert doc["equal"] and doc["hyperbolic_implies_relative"] and doc["relative_minima_are_candidates"]


def test_oracle_mismatch_exit_4(capsys, monkeypatch):
    monkeypatch.setattr(cli, "oracle_hyperbolic", lambda *args: False)
    code, out, _ = run(capsys, "oracle", "--depth", "3", "--bound", "300")
    assert code == 4
    assert "filter == oracle: false" in out


@pytest.mark.parametrize("command", ["construct", "minima", "exponents", "audit"])
def test_byte_identical_reruns(capsys, command):
    argv = [command, "--beta", "3/2", "--depth", "5", "--format", "json"]
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv)[1] == first


def plot(tmp_path, *extra):
    path = tmp_path / "fig.svg"
    assert main(["plot", "--beta", "2", "--output", str(path), *extra]) == 0
    return path.read_text(), ET.parse(path).getroot()


def test_plot_structure(tmp_path, capsys):
    text, root = plot(tmp_path, "--depth", "4", "--samples", "50")
    markers = root.findall(f"{SVG}circle[@class='marker']")
    arcs = root.findall(f"{SVG}polyline[@class='hyperbola']")
    assert len(markers) >= 4
    capsys.readouterr()
    _, doc = run_json(capsys, "minima", "--beta", "2", "--depth", "4")
    certified = doc["points"][int(doc["certified_from"]):]
    assert len(markers) == 2 * len(certified)
    assert len(arcs) == 8 and all(len(a.get("points").split()) == 50 for a in arcs)
    assert root.find(f"{SVG}g[@class='axes']") is not None


def test_plot_markers_outside_hyperbolic_regions(tmp_path):
    _, root = plot(tmp_path, "--depth", "6")
    markers = [(Decimal(m.get("data-c1")), Decimal(m.get("data-c2")))
               for m in root.iter(f"{SVG}circle")]
    regions = {(Decimal(a.get("data-pi2")), Decimal(a.get("data-clip"))) for a in root.iter(f"{SVG}polyline")}
    assert len(regions) == 2
    fuzz = Decimal("1e-9")
    for pi2, clip in regions:
        for c1, c2 in markers:
            inside = max(abs(c1), abs(c2)) < clip * (1 - fuzz) and abs(c1 * c2) < pi2 * (1 - fuzz)
            assert not inside


def test_plot_log_scale_and_rerun(tmp_path):
    first, _ = plot(tmp_path, "--depth", "8", "--log-scale")
    again, _ = plot(tmp_path, "--depth", "8", "--log-scale")
    assert first == again


def test_plot_too_few_minima(tmp_path, capsys):
    code, _, err = run(capsys, "plot", "--mode", "bounded", "--a", "1", "--b", "2", "--depth", "6",
                       "--output", str(tmp_path / "x.svg"))
    assert code == 2 and "two certified minima" in err


@pytest.mark.parametrize("config", [
    RunConfig(),
    RunConfig(beta=BetaSpec(7, 4), depth=6, bound=300, fmt="csv"),
    RunConfig(mode=Mode.BOUNDED, beta=None, a_pattern=(1, 3), b_pattern=(2,), depth=9, precision_cap=4096),
    RunConfig(mode=Mode.SUPEREXP, beta=None, depth=3, output="out.json"),
])
def test_config_round_trip(config):
    back = config_from_args(make_parser().parse_args(["construct", *config.as_args()]))
    assert back == config


def test_config_validation_direct():
    with pytest.raises(ConfigError):
        RunConfig(depth=1)
    with pytest.raises(ConfigError):
        RunConfig(precision_cap=127)
