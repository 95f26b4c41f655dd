"""End-to-end command-line behavior: output shape, determinism, exit codes."""

import io
import json
import os

import pytest

from faircause.cli import _coerce, _color_enabled, _paint, main
from faircause.graph import CausalGraph
from faircause.report import validate_report
from faircause.scenarios import get_scenario
from faircause.specfile import export_graph_spec, parse_graph_spec

VISA_GT = get_scenario("visa").ground_truth


@pytest.fixture(scope="module")
def visa_spec_text() -> str:
    sc = get_scenario("visa")
    return export_graph_spec(
        sc.graph, scm=sc.scm, roles=sc.roles, meta={"scenario": sc.id}
    )


@pytest.fixture(scope="module")
def visa_graph_only_text() -> str:
    sc = get_scenario("visa")
    domains = {n: (0, 1) for n in sc.graph.nodes}
    return export_graph_spec(sc.graph, roles=sc.roles, domains=domains)


def write(path, text):
    path.write_text(text, encoding="utf-8")


AUDIT_ARGS = ["--sensitive", "Nationality=0,1", "--outcome", "Visa=1"]


# --- generate ---

def test_generate_writes_deterministic_csv(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(["generate", "--scenario", "visa", "--n", "300", "--seed", "4",
                 "--out", "a.csv"]) == 0
    assert main(["generate", "--scenario", "visa", "--n", "300", "--seed", "4",
                 "--out", "b.csv"]) == 0
    out = capsys.readouterr().out
    assert "wrote 300 rows of scenario 'visa' to a.csv" in out
    a, b = (tmp_path / "a.csv").read_bytes(), (tmp_path / "b.csv").read_bytes()
    assert a == b
    assert len(a.splitlines()) == 301


def test_generate_emit_spec_round_trips(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["generate", "--scenario", "hiring", "--n", "50", "--seed", "0",
                 "--out", "h.csv", "--emit-spec", "h.spec"]) == 0
    text = (tmp_path / "h.spec").read_text()
    parsed = parse_graph_spec(text)
    sc = get_scenario("hiring")
    assert parsed.graph == sc.graph
    assert parsed.roles == sc.roles
    assert parsed.meta["scenario"] == "hiring"
    again = export_graph_spec(
        parsed.graph, scm=parsed.scm, roles=parsed.roles, meta=parsed.meta
    )
    assert again == text


def test_generate_rejects_bad_inputs(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(["generate", "--scenario", "nope", "--n", "10", "--out", "x.csv"]) == 1
    assert "known scenarios" in capsys.readouterr().err
    assert main(["generate", "--scenario", "visa", "--n", "0", "--out", "x.csv"]) == 1
    assert "--n must be" in capsys.readouterr().err


# --- audit ---

def test_audit_scm_only_matches_ground_truth(tmp_path, monkeypatch, capsys, visa_spec_text):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "visa.spec", visa_spec_text)
    assert main(["audit", "--spec", "visa.spec", *AUDIT_ARGS]) == 0
    tree = json.loads(capsys.readouterr().out)
    validate_report(tree)
    by_metric = {e["metric"]: e for e in tree["metrics"]}
    assert [e["tag"] for e in tree["metrics"]] == ["eq1", "eq2", "eq3", "eq4", "eq5", "eq6"]
    for key, metric in (("tv", "TV"), ("te", "TE"), ("ate", "ATE"),
                        ("nde", "NDE"), ("nie", "NIE")):
        assert by_metric[metric]["backend"] == "exact"
        assert abs(by_metric[metric]["value"] - VISA_GT[key]) < 1e-12
    assert abs(by_metric["PSE"]["value"] - VISA_GT["te"]) < 1e-12
    labels = [p["label"] for p in tree["graph"]["paths"]]
    assert labels.count("backdoor") == 1
    assert len([l for l in labels if l.startswith("direct") or l.startswith("indirect")]) == 3
    assert [c["assumption"] for c in tree["checks"]] == [
        "sutva", "ignorability", "causal sufficiency",
    ]
    business = tree["legal"]["business_necessity"]["paths"]
    expected = VISA_GT["pse"]
    assert len(business) == len(expected)
    for item in business:
        key = item["path"].replace(" ", "")
        assert abs(item["value"] - expected[key]) < 1e-12


def test_audit_byte_identical_across_runs(tmp_path, monkeypatch, capsys, visa_spec_text):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "visa.spec", visa_spec_text)
    args = ["audit", "--spec", "visa.spec", *AUDIT_ARGS, "--seed", "9"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first


def test_audit_metrics_subset_in_canonical_order(tmp_path, monkeypatch, capsys, visa_spec_text):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "visa.spec", visa_spec_text)
    assert main(["audit", "--spec", "visa.spec", *AUDIT_ARGS,
                 "--metrics", "nde,tv"]) == 0
    tree = json.loads(capsys.readouterr().out)
    assert [e["metric"] for e in tree["metrics"]] == ["TV", "NDE"]
    assert tree["config"]["metrics"] == ["tv", "nde"]
    impact = tree["legal"]["disparate_impact"]["metrics"]
    assert [r["metric"] for r in impact] == ["TV"]
    assert tree["legal"]["business_necessity"]["paths"] == []


def test_audit_pi_selects_single_path(tmp_path, monkeypatch, capsys, visa_spec_text):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "visa.spec", visa_spec_text)
    assert main(["audit", "--spec", "visa.spec", *AUDIT_ARGS, "--metrics", "pse",
                 "--pi", "Nationality>Skill,Skill>Visa"]) == 0
    tree = json.loads(capsys.readouterr().out)
    (entry,) = tree["metrics"]
    assert abs(entry["value"] - VISA_GT["pse"]["Nationality->Skill->Visa"]) < 1e-12
    assert tree["config"]["pi"] == ["Nationality>Skill", "Skill>Visa"]


def test_audit_unidentifiable_exits_2(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    sc = get_scenario("visa")
    hidden = CausalGraph(sc.graph.nodes, sc.graph.edges, frozenset({"Age"}))
    write(tmp_path / "hidden.spec", export_graph_spec(
        hidden, roles=sc.roles, domains={n: (0, 1) for n in sc.graph.nodes}
    ))
    assert main(["generate", "--scenario", "visa", "--n", "4000", "--seed", "2",
                 "--out", "full.csv"]) == 0
    rows = (tmp_path / "full.csv").read_text().splitlines()
    header = rows[0].split(",")
    drop = header.index("Age")
    trimmed = "\n".join(
        ",".join(c for i, c in enumerate(line.split(",")) if i != drop)
        for line in rows
    ) + "\n"
    write(tmp_path / "noage.csv", trimmed)
    capsys.readouterr()
    rc = main(["audit", "--spec", "hidden.spec", "--data", "noage.csv", *AUDIT_ARGS])
    tree = json.loads(capsys.readouterr().out)
    assert rc == 2
    by_metric = {e["metric"]: e for e in tree["metrics"]}
    assert by_metric["TV"]["status"] == "ok"
    assert by_metric["TE"]["status"] == "unidentifiable"
    assert by_metric["TE"]["value"] is None
    assert any("TE (eq2) is not identifiable" in w for w in tree["warnings"])
    ignorability = [c for c in tree["checks"] if c["assumption"] == "ignorability"]
    assert ignorability[0]["status"] == "fail"
    assert "Age" in ignorability[0]["violations"][0]
    impact = [r["metric"] for r in tree["legal"]["disparate_impact"]["metrics"]]
    assert impact == ["TV"]


def test_audit_out_writes_report_and_figures(tmp_path, monkeypatch, visa_spec_text):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "visa.spec", visa_spec_text)
    args = ["audit", "--spec", "visa.spec", *AUDIT_ARGS, "--out", "report.json"]
    assert main(args) == 0
    tree = json.loads((tmp_path / "report.json").read_text())
    validate_report(tree)
    graph_png = (tmp_path / "report-graph.png").read_bytes()
    metrics_png = (tmp_path / "report-metrics.png").read_bytes()
    assert graph_png[:8] == b"\x89PNG\r\n\x1a\n"
    assert metrics_png[:8] == b"\x89PNG\r\n\x1a\n"
    assert main(args) == 0
    assert (tmp_path / "report-graph.png").read_bytes() == graph_png
    assert (tmp_path / "report-metrics.png").read_bytes() == metrics_png


def test_audit_markdown_contains_every_metric(tmp_path, monkeypatch, capsys, visa_spec_text):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "visa.spec", visa_spec_text)
    assert main(["audit", "--spec", "visa.spec", *AUDIT_ARGS,
                 "--format", "markdown"]) == 0
    text = capsys.readouterr().out
    for metric in ("TV", "TE", "ATE", "NDE", "NIE", "PSE"):
        assert f"| {metric} |" in text
    assert "Disparate Impact" in text
    assert "Disparate Treatment / but-for" in text
    assert "Business Necessity Analysis" in text
    assert "would exaggerate the effect by including non-causal paths" in text


def test_audit_plugin_backend_near_exact(tmp_path, monkeypatch, capsys, visa_graph_only_text):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "graph.spec", visa_graph_only_text)
    assert main(["generate", "--scenario", "visa", "--n", "20000", "--seed", "1",
                 "--out", "visa.csv"]) == 0
    capsys.readouterr()
    assert main(["audit", "--spec", "graph.spec", "--data", "visa.csv",
                 *AUDIT_ARGS]) == 0
    tree = json.loads(capsys.readouterr().out)
    for entry in tree["metrics"]:
        assert entry["backend"] == "plugin"
    by_metric = {e["metric"]: e for e in tree["metrics"]}
    assert abs(by_metric["TE"]["value"] - VISA_GT["te"]) < 0.05
    checked = [c["assumption"] for c in tree["checks"]]
    assert checked[:4] == ["positivity", "markov", "faithfulness", "linearity"]


def test_audit_positivity_failure_degrades_plugin_metrics(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "tri.spec", "\n".join([
        "node C {domain: [0, 1]}",
        "node A {domain: [0, 1]}",
        "node Y {domain: [0, 1]}",
        "edge C -> A",
        "edge C -> Y",
        "edge A -> Y",
    ]) + "\n")
    # C=1 rows never see A=0: positivity fails on the adjustment stratum.
    rows = ["C,A,Y"]
    rows += ["0,0,0", "0,0,1", "0,1,1", "0,1,0"] * 10
    rows += ["1,1,1", "1,1,0"] * 10
    write(tmp_path / "tri.csv", "\n".join(rows) + "\n")
    rc = main(["audit", "--spec", "tri.spec", "--data", "tri.csv",
               "--sensitive", "A=0,1", "--outcome", "Y=1", "--metrics", "tv,te"])
    tree = json.loads(capsys.readouterr().out)
    assert rc == 0
    positivity = [c for c in tree["checks"] if c["assumption"] == "positivity"][0]
    assert positivity["status"] == "fail"
    by_metric = {e["metric"]: e for e in tree["metrics"]}
    assert by_metric["TV"]["status"] == "ok"
    assert by_metric["TV"]["degraded"] is True
    assert by_metric["TE"]["status"] == "failed"
    assert any("degraded" in w for w in tree["warnings"])
    assert any("TE (eq2) could not be estimated" in w for w in tree["warnings"])


# --- effects / check ---

def test_effects_reports_metrics_only(tmp_path, monkeypatch, capsys, visa_spec_text):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "visa.spec", visa_spec_text)
    assert main(["effects", "--spec", "visa.spec", *AUDIT_ARGS,
                 "--metrics", "te"]) == 0
    tree = json.loads(capsys.readouterr().out)
    assert [e["metric"] for e in tree["metrics"]] == ["TE"]
    assert tree["checks"] == []
    assert tree["legal"] == {}
    assert tree["warnings"] == []


def test_effects_bootstrap_interval_is_deterministic(tmp_path, monkeypatch, capsys, visa_graph_only_text):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "graph.spec", visa_graph_only_text)
    assert main(["generate", "--scenario", "visa", "--n", "3000", "--seed", "3",
                 "--out", "visa.csv"]) == 0
    capsys.readouterr()
    args = ["effects", "--spec", "graph.spec", "--data", "visa.csv", *AUDIT_ARGS,
            "--metrics", "te", "--bootstrap", "200", "--seed", "5"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first
    ci = json.loads(first)["metrics"][0]["ci"]
    assert ci["replicates"] == 200 and ci["seed"] == 5
    assert ci["lower"] <= json.loads(first)["metrics"][0]["value"] <= ci["upper"]


def test_check_runs_assumption_checks_only(tmp_path, monkeypatch, capsys, visa_graph_only_text):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "graph.spec", visa_graph_only_text)
    assert main(["generate", "--scenario", "visa", "--n", "2000", "--seed", "6",
                 "--out", "visa.csv"]) == 0
    capsys.readouterr()
    assert main(["check", "--spec", "graph.spec", "--data", "visa.csv",
                 *AUDIT_ARGS]) == 0
    tree = json.loads(capsys.readouterr().out)
    assert tree["metrics"] == []
    assert [c["assumption"] for c in tree["checks"]] == [
        "positivity", "markov", "faithfulness", "linearity",
        "sutva", "ignorability", "causal sufficiency",
    ]


# --- paths ---

def test_paths_prints_classified_rows(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    sc = get_scenario("hiring")
    write(tmp_path / "hiring.spec", export_graph_spec(
        sc.graph, scm=sc.scm, roles=sc.roles
    ))
    assert main(["paths", "--spec", "hiring.spec", "--sensitive", sc.query.a,
                 "--outcome", sc.query.y]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 4
    assert lines[0].startswith("PATH")
    body = "\n".join(lines[1:])
    assert "direct" in body and "proxy" in body and "explaining" in body


def test_paths_rejects_value_syntax(tmp_path, monkeypatch, capsys, visa_spec_text):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "visa.spec", visa_spec_text)
    assert main(["paths", "--spec", "visa.spec", "--sensitive", "Nationality=0,1",
                 "--outcome", "Visa"]) == 1
    assert "bare node name" in capsys.readouterr().err


# --- usage errors and helpers ---

def test_usage_errors_exit_1(tmp_path, monkeypatch, capsys, visa_spec_text):
    monkeypatch.chdir(tmp_path)
    write(tmp_path / "visa.spec", visa_spec_text)
    cases = [
        ["audit", "--spec", "visa.spec", "--sensitive", "Nationality=0,1"],
        ["nonsense"],
        [],
        ["audit", "--spec", "visa.spec", *AUDIT_ARGS, "--metrics", "tv,bogus"],
        ["audit", "--spec", "visa.spec", *AUDIT_ARGS, "--pi", "NationalitySkill"],
        ["audit", "--spec", "visa.spec", "--sensitive", "Nationality=0",
         "--outcome", "Visa=1"],
        ["audit", "--spec", "missing.spec", *AUDIT_ARGS],
        ["audit", "--spec", "visa.spec", *AUDIT_ARGS, "--format", "pdf"],
    ]
    for argv in cases:
        assert main(argv) == 1, argv
        capsys.readouterr()


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    assert "COMMAND" in capsys.readouterr().out
    assert main(["audit", "--help"]) == 0
    capsys.readouterr()


def test_coerce_precedence():
    assert _coerce("0") == 0 and isinstance(_coerce("0"), int)
    assert _coerce("0.5") == 0.5
    assert _coerce("north") == "north"


def test_no_color_is_respected(monkeypatch):
    class Tty(io.StringIO):
        def isatty(self):
            return True

    monkeypatch.delenv("NO_COLOR", raising=False)
    assert _color_enabled(Tty()) is True
    assert _paint("x", "31", True) == "\x1b[31mx\x1b[0m"
    monkeypatch.setenv("NO_COLOR", "1")
    assert _color_enabled(Tty()) is False
    assert _paint("x", "31", False) == "x"
    monkeypatch.delenv("NO_COLOR", raising=False)
    assert _color_enabled(io.StringIO()) is False
