"""Acceptance suite: one test function per criterion.

Every numeric claim is checked against a brute-force construction built
inside this file or in oracle.py (factorized joints, a local toposort, raw
numpy simulation), never against the code paths under test.  The conftest
hook turns these tests into a one-line verdict per criterion.
"""

import itertools
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

import oracle
from models import make
from faircause.checks import (
    STATUS_FAIL,
    STATUS_PASS,
    check_faithfulness,
    check_linearity,
    check_markov,
    check_positivity,
    ci_test,
)
from faircause.cli import main as cli_main
from faircause.dataio import ColumnType, Dataset, NUMERIC, categorical
from faircause.estimators import (
    EffectQuery,
    natural_direct_effect,
    natural_indirect_effect,
    path_specific_effect,
    total_effect,
    total_variation,
)
from faircause.graph import build_graph, d_separated
from faircause.scenarios import get_scenario, scenario_ids
from faircause.scm import (
    LinearGaussianScm,
    PathSelection,
    bernoulli_mechanism,
    interventional_mean,
    joint_distribution,
    linear_path_effects,
    sample,
)

BIN = (0, 1)
GOLDEN = Path(__file__).parent / "golden" / "visa_report.json"


def linear_binary(nodes, edges, rates):
    graph = build_graph(nodes, edges)
    exo, mech = {}, {}
    for node in graph.nodes:
        rate = rates[node]
        fn = rate if callable(rate) else (lambda p=rate: p)
        k = len(graph.parents(node))
        support, probs, table = bernoulli_mechanism([BIN] * k, fn)
        exo[node] = (support, probs)
        mech[node] = table
    domains = {n: BIN for n in graph.nodes}
    return make(nodes, edges, domains, exo, mech)[0]


# --- criterion 1: decomposition identity ---


def test_criterion_1_decomposition_identity():
    start = time.monotonic()
    for sid in scenario_ids():
        sc = get_scenario(sid)
        q = sc.query
        te = total_effect(sc.scm, q).value
        nde = natural_direct_effect(sc.scm, q).value
        nie_swapped = natural_indirect_effect(sc.scm, q.swapped()).value
        assert te == pytest.approx(nde - nie_swapped, abs=1e-12), sid
    assert time.monotonic() - start < 1.0


# --- criterion 2: path-selection boundary identities ---


def test_criterion_2_pse_boundary_identities():
    for sid in scenario_ids():
        sc = get_scenario(sid)
        q = sc.query
        te = total_effect(sc.scm, q).value
        nde = natural_direct_effect(sc.scm, q).value

        every = PathSelection.all_causal(sc.graph, q.a, q.y)
        pse_all = path_specific_effect(sc.scm, q, every).value
        assert pse_all == pytest.approx(te, abs=1e-12), sid

        if q.y in sc.graph.children(q.a):
            direct = PathSelection(q.a, q.y, frozenset({(q.a, q.y)}))
        else:
            # no direct edge: the direct-edge selection is empty and NDE is 0
            direct = PathSelection.none(q.a, q.y)
        pse_direct = path_specific_effect(sc.scm, q, direct).value
        assert pse_direct == pytest.approx(nde, abs=1e-12), sid

        assert path_specific_effect(sc.scm, q, PathSelection.none(q.a, q.y)).value == 0.0, sid


# --- criterion 3: d-separation vs exact-joint independence ---


def _topological(nodes, edges):
    pending = {n: {c for c, e in edges if e == n} for n in nodes}
    order = []
    while pending:
        free = sorted(n for n, pa in pending.items() if not pa)
        if not free:
            return None
        for node in free:
            order.append(node)
            del pending[node]
        for pa in pending.values():
            pa.difference_update(free)
    return tuple(order)


def _four_node_dags():
    nodes = ("P", "Q", "R", "S")
    pairs = [(c, e) for c in nodes for e in nodes if c != e]
    dags = []
    for mask in range(1 << len(pairs)):
        edges = tuple(p for i, p in enumerate(pairs) if mask >> i & 1)
        if _topological(nodes, edges) is not None:
            dags.append(edges)
    return nodes, dags


def _factorized_joint(nodes, parents, tables):
    joint = {}
    for assign in itertools.product(BIN, repeat=len(nodes)):
        value = dict(zip(nodes, assign))
        prob = 1.0
        for node in nodes:
            combo = tuple(value[p] for p in parents[node])
            q = tables[node][combo]
            prob *= q if value[node] == 1 else 1.0 - q
        joint[assign] = prob
    return joint


def _tv_dependence(joint, nodes, x, y, z):
    ix, iy = nodes.index(x), nodes.index(y)
    iz = [nodes.index(n) for n in z]
    worst = 0.0
    for zval in itertools.product(BIN, repeat=len(iz)):
        cells = {}
        for assign, prob in joint.items():
            if tuple(assign[i] for i in iz) != zval:
                continue
            cell = cells.setdefault(assign[ix], [0.0, 0.0])
            cell[assign[iy]] += prob
        if len(cells) < 2:
            continue
        dists = []
        for cell in cells.values():
            mass = cell[0] + cell[1]
            if mass <= 0.0:
                break
            dists.append((cell[0] / mass, cell[1] / mass))
        else:
            worst = max(worst, 0.5 * sum(abs(u - v) for u, v in zip(*dists)))
    return worst


def test_criterion_3_d_separation_matches_independence():
    nodes, dags = _four_node_dags()
    assert len(dags) == 543  # the number of labeled DAGs on four nodes
    rng = np.random.default_rng(20250311)
    node_pairs = list(itertools.combinations(nodes, 2))
    for edges in dags:
        g = build_graph(nodes, edges)
        parents = {n: tuple(sorted(c for c, e in edges if e == n)) for n in nodes}

        statements = []
        for x, y in node_pairs:
            rest = [n for n in nodes if n not in (x, y)]
            for size in range(len(rest) + 1):
                for z in itertools.combinations(rest, size):
                    separated = d_separated(g, x, y, z)
                    assert separated == oracle.oracle_d_separated(
                        nodes, edges, x, y, z
                    ), (edges, x, y, z)
                    statements.append((x, y, z, separated))

        # separated triples must be independent for any parameters; connected
        # triples may need a redraw when a draw lands near a cancellation
        for attempt in range(4):
            tables = {
                n: {
                    combo: rng.uniform(0.15, 0.85)
                    for combo in itertools.product(BIN, repeat=len(parents[n]))
                }
                for n in nodes
            }
            joint = _factorized_joint(nodes, parents, tables)
            all_dependent = True
            for x, y, z, separated in statements:
                dep = _tv_dependence(joint, nodes, x, y, z)
                if separated:
                    assert dep <= 1e-9, (edges, x, y, z, dep)
                elif dep <= 1e-6:
                    all_dependent = False
                    break
            if all_dependent:
                break
        else:
            pytest.fail(f"dependence below threshold after three redraws: {edges}")


# --- criterion 4: plug-in convergence to exact values ---


def test_criterion_4_plugin_convergence():
    start = time.monotonic()
    for sid in scenario_ids():
        sc = get_scenario(sid)
        q = sc.query
        sel = PathSelection.all_causal(sc.graph, q.a, q.y)
        exact = {
            "tv": total_variation(sc.scm, q).value,
            "te": total_effect(sc.scm, q).value,
            "nde": natural_direct_effect(sc.scm, q).value,
            "nie": natural_indirect_effect(sc.scm, q).value,
            "pse": path_specific_effect(sc.scm, q, sel).value,
        }
        hits = {name: 0 for name in exact}
        for seed in range(1, 11):
            data = sample(sc.scm, 100_000, seed)
            src = (data, sc.graph)
            plugin = {
                "tv": total_variation(src, q).value,
                "te": total_effect(src, q).value,
                "nde": natural_direct_effect(src, q).value,
                "nie": natural_indirect_effect(src, q).value,
                "pse": path_specific_effect(src, q, sel).value,
            }
            for name in exact:
                if abs(plugin[name] - exact[name]) <= 0.02:
                    hits[name] += 1
        for name, count in hits.items():
            assert count >= 9, (sid, name, count)
    assert time.monotonic() - start < 60.0


# --- criterion 5: confounding and selection-bias claims ---


def test_criterion_5_confounding_and_selection_claims():
    district = get_scenario("district")
    assert abs(total_effect(district.scm, district.query).value) <= 1e-12
    data = sample(district.scm, 10_000, seed=3)
    tv = total_variation((data, district.graph), district.query).value
    assert abs(tv) > 0.1

    banknote = get_scenario("banknote-collider")
    joint = joint_distribution(banknote.scm)
    assert joint.dependence("Gender", "Talent") == 0.0
    assert d_separated(banknote.graph, "Gender", "Talent", ())
    column, famous = banknote.selection
    data = sample(banknote.scm, 10_000, seed=3)
    code = banknote.scm.domains[column].index(famous)
    famous_only = data.take(np.flatnonzero(data.codes(column) == code))
    result = ci_test(famous_only, "Gender", "Talent")
    assert result.p_value < 1e-4


# --- criterion 6: linear path tracing ---


def _random_linear_scm(rng, size):
    names = tuple(f"X{i}" for i in range(size))
    edges = []
    for i in range(size):
        for j in range(i + 1, size):
            if rng.random() < 0.6:
                edges.append((names[i], names[j]))
    graph = build_graph(names, edges)
    intercepts, coefficients, noise = {}, {}, {}
    for node in names[1:]:
        intercepts[node] = float(rng.normal(0.0, 0.5))
        coefficients[node] = {
            p: float(rng.uniform(0.3, 1.2) * rng.choice((-1.0, 1.0)))
            for p in graph.parents(node)
        }
        noise[node] = float(rng.uniform(0.25, 1.0))
    scm = LinearGaussianScm(
        graph, intercepts, coefficients, noise, bernoulli={names[0]: 0.5}
    )
    return scm, names[0], names[-1]


def _simulate_columns(scm, rng, n, a, a_value):
    cols = {}
    for node in scm.graph.topological_order:
        if node == a:
            cols[node] = np.full(n, float(a_value))
        elif node in scm.bernoulli:
            cols[node] = (rng.random(n) < scm.bernoulli[node]).astype(float)
        else:
            col = rng.standard_normal(n) * math.sqrt(scm.noise_var[node])
            col += scm.intercepts[node]
            for parent, c in scm.coefficients[node].items():
                col += c * cols[parent]
            cols[node] = col
    return cols


def _mean_se(column):
    n = column.shape[0]
    return float(column.mean()), float(column.std(ddof=1) / math.sqrt(n))


def test_criterion_6_linear_path_tracing():
    rng = np.random.default_rng(20250601)
    n = 1_000_000
    for index in range(20):
        scm, a, y = _random_linear_scm(rng, size=3 + index % 4)
        effects = linear_path_effects(scm, a, y)
        indirect = effects.total - effects.direct
        analytic_total = interventional_mean(scm, {a: 1}, y) - interventional_mean(
            scm, {a: 0}, y
        )
        assert effects.total == pytest.approx(analytic_total, abs=1e-12)

        base = _simulate_columns(scm, rng, n, a, 0.0)
        treated = _simulate_columns(scm, rng, n, a, 1.0)
        # fresh world held at a=0 with only y's own a-coefficient switched:
        # in a linear model this is y under a=1 with mediators at their a=0 values
        nested = _simulate_columns(scm, rng, n, a, 0.0)
        nested_y = nested[y] + scm.coefficients.get(y, {}).get(a, 0.0)

        m0, se0 = _mean_se(base[y])
        m1, se1 = _mean_se(treated[y])
        m2, se2 = _mean_se(nested_y)
        assert abs((m1 - m0) - effects.total) <= 3 * math.hypot(se0, se1)
        assert abs((m2 - m0) - effects.direct) <= 3 * math.hypot(se0, se2)
        assert abs((m1 - m2) - indirect) <= 3 * math.hypot(se1, se2)


def test_criterion_6_discrete_linear_analog():
    cases = [
        (0.20, 0.50, 0.10, 0.30, 0.40),
        (0.60, -0.30, 0.50, -0.20, 0.25),
        (0.40, 0.25, 0.30, 0.15, 0.50),
    ]
    q = EffectQuery(a="A", a0=0, a1=1, y="Y", y_pos=1)
    for m0, beta, y0, gamma, delta in cases:
        scm = linear_binary(
            ("A", "M", "Y"),
            (("A", "M"), ("A", "Y"), ("M", "Y")),
            {
                "A": 0.5,
                "M": lambda a, m0=m0, beta=beta: m0 + beta * a,
                "Y": lambda a, m, y0=y0, gamma=gamma, delta=delta: (
                    y0 + gamma * a + delta * m
                ),
            },
        )
        assert natural_direct_effect(scm, q).value == pytest.approx(gamma, abs=1e-9)
        assert natural_indirect_effect(scm, q).value == pytest.approx(
            beta * delta, abs=1e-9
        )


# --- criterion 7: assumption-check calibration ---


def test_criterion_7_ci_test_calibration():
    rng = np.random.default_rng(20250702)
    alpha = 0.05
    trials = 500
    rejections = 0
    for _ in range(trials):
        data = Dataset(
            ("X", "Y"),
            {"X": categorical(0, 1), "Y": categorical(0, 1)},
            {"X": rng.integers(0, 2, size=400), "Y": rng.integers(0, 2, size=400)},
        )
        if ci_test(data, "X", "Y").p_value < alpha:
            rejections += 1
    assert abs(rejections / trials - alpha) <= 0.02


def test_criterion_7_engineered_violations():
    # direct path +0.2 against indirect (-0.8)(0.25): exact cancellation
    cancelling = linear_binary(
        ("A", "M", "Y"),
        (("A", "M"), ("A", "Y"), ("M", "Y")),
        {
            "A": 0.5,
            "M": lambda a: 0.9 - 0.8 * a,
            "Y": lambda a, m: 0.1 + 0.2 * a + 0.25 * m,
        },
    )
    data = sample(cancelling, 10_000, seed=0)
    assert check_faithfulness(data, cancelling.graph).status == STATUS_FAIL

    rng = np.random.default_rng(4)
    g = build_graph(("X", "Y"), (("X", "Y"),))
    x = rng.uniform(-3, 3, size=10_000)
    quadratic = Dataset(
        ("X", "Y"),
        {"X": ColumnType(NUMERIC), "Y": ColumnType(NUMERIC)},
        {"X": x, "Y": x**2 + rng.normal(size=10_000)},
    )
    assert check_linearity(quadratic, g).status == STATUS_FAIL

    # covariate C = 1 forces A = 1, so that stratum has one attribute value
    c = np.array([0, 0, 1] * 200)
    a = np.array([0, 1, 1] * 200)
    deterministic = Dataset(
        ("A", "C"),
        {"A": categorical(0, 1), "C": categorical(0, 1)},
        {"A": a, "C": c},
    )
    assert check_positivity(deterministic, "A", ("C",)).status == STATUS_FAIL


def test_criterion_7_markov_holds_on_scenario_data():
    for sid in scenario_ids():
        sc = get_scenario(sid)
        passes = sum(
            check_markov(sample(sc.scm, 2_000, seed), sc.graph).status == STATUS_PASS
            for seed in range(100)
        )
        assert passes >= 95, (sid, passes)


# --- criterion 8: reproducibility and the golden report ---


def test_criterion_8_reproducibility_and_golden(tmp_path, monkeypatch, capsys):
    query_flags = ("--sensitive", "Nationality=0,1", "--outcome", "Visa=1")
    snapshots = []
    for label in ("first", "second"):
        workdir = tmp_path / label
        workdir.mkdir()
        monkeypatch.chdir(workdir)
        assert cli_main([
            "generate", "--scenario", "visa", "--n", "4000", "--seed", "7",
            "--out", "visa.csv", "--emit-spec", "visa.spec",
        ]) == 0
        assert cli_main([
            "audit", "--spec", "visa.spec", "--data", "visa.csv",
            *query_flags, "--out", "report.json",
        ]) == 0
        capsys.readouterr()
        snapshots.append({p.name: p.read_bytes() for p in workdir.iterdir()})
    expected = [
        "report-graph.png", "report-metrics.png", "report.json",
        "visa.csv", "visa.spec",
    ]
    assert sorted(snapshots[0]) == sorted(snapshots[1]) == expected
    for name, blob in snapshots[0].items():
        assert snapshots[1][name] == blob, name

    workdir = tmp_path / "golden"
    workdir.mkdir()
    monkeypatch.chdir(workdir)
    assert cli_main([
        "generate", "--scenario", "visa", "--n", "100", "--seed", "1",
        "--out", "seed.csv", "--emit-spec", "visa.spec",
    ]) == 0
    capsys.readouterr()
    assert cli_main(["audit", "--spec", "visa.spec", *query_flags]) == 0
    out = capsys.readouterr().out
    assert out == GOLDEN.read_text()

    tree = json.loads(out)
    truth = get_scenario("visa").ground_truth
    values = {row["metric"]: row["value"] for row in tree["metrics"]}
    assert values["TV"] == pytest.approx(truth["tv"], abs=1e-12)
    assert values["TE"] == pytest.approx(truth["te"], abs=1e-12)
    assert values["ATE"] == pytest.approx(truth["ate"], abs=1e-12)
    assert values["NDE"] == pytest.approx(truth["nde"], abs=1e-12)
    assert values["NIE"] == pytest.approx(truth["nie"], abs=1e-12)
    assert values["PSE"] == pytest.approx(truth["te"], abs=1e-12)
    per_path = {
        row["path"].replace(" ", ""): row["value"]
        for row in tree["legal"]["business_necessity"]["paths"]
    }
    assert per_path.keys() == truth["pse"].keys()
    for path, value in truth["pse"].items():
        assert per_path[path] == pytest.approx(value, abs=1e-12)
