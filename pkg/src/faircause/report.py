"""Audit report assembly and rendering.

An audit bundles effect estimates, assumption checks, the path
classification of the graph, and a legal-framework placement of each
metric into one schema-stable tree of plain dicts, lists, strings,
numbers, and nulls.  JSON output is a single sorted-keys dump of that
tree and markdown is generated from the same tree, so the two formats
cannot disagree on content.

The legal section places computed metrics under the doctrine they
inform; the tool never renders a legal conclusion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .checks import (
    STATUS_FAIL,
    STATUS_UNTESTABLE,
    CheckReport,
    check_faithfulness,
    check_linearity,
    check_markov,
    check_positivity,
    untestable_disclosures,
)
from .dataio import NUMERIC_TYPE, categorical, load_csv
from .errors import (
    DomainError,
    EmptyStratumError,
    FaircauseError,
    ImpossibleObservationError,
    ModelError,
    NotIdentifiableError,
    ParameterRangeError,
    PositivityError,
    SchemaMismatchError,
    TooManyDegenerateReplicatesError,
)
from .estimators import (
    BACKEND_EXACT,
    BACKEND_PLUGIN,
    METRIC_ATE,
    METRIC_NDE,
    METRIC_NIE,
    METRIC_PSE,
    METRIC_TE,
    METRIC_TV,
    EffectQuery,
    average_treatment_effect,
    bootstrap_ci,
    natural_direct_effect,
    natural_indirect_effect,
    path_specific_effect,
    total_effect,
    total_variation,
)
from .graph import (
    LABEL_BACKDOOR,
    LABEL_OTHER,
    causal_paths,
    classify_paths,
    minimal_adjustment_set,
)
from .scm import DiscreteScm, PathSelection
from .specfile import ParsedSpec, parse_graph_spec

TOOL_NAME = "faircause"
TOOL_VERSION = "0.1.0"
SCHEMA_VERSION = 1
CI_LEVEL = 0.95

METRIC_ORDER = (METRIC_TV, METRIC_TE, METRIC_ATE, METRIC_NDE, METRIC_NIE, METRIC_PSE)

# Equation tags are stable identifiers for the six effect definitions; they
# never change meaning across report schema versions.
EQUATION_TAGS = {
    METRIC_TV: "eq1",
    METRIC_TE: "eq2",
    METRIC_ATE: "eq3",
    METRIC_NDE: "eq4",
    METRIC_NIE: "eq5",
    METRIC_PSE: "eq6",
}

METRIC_STATUS_OK = "ok"
METRIC_STATUS_UNIDENTIFIABLE = "unidentifiable"
METRIC_STATUS_FAILED = "failed"

FRAMEWORK_IMPACT = "Disparate Impact"
FRAMEWORK_TREATMENT = "Disparate Treatment / but-for"
FRAMEWORK_NECESSITY = "Business Necessity Analysis"

LEGAL_IMPACT_NOTE = (
    "Disparate impact concerns a seemingly neutral policy that harms a "
    "protected group disproportionately.  The raw outcome gap (TV) would "
    "exaggerate the effect by including non-causal paths; TE and ATE "
    "quantify only the disparity the attribute actually causes."
)
LEGAL_TREATMENT_NOTE = (
    "Disparate treatment follows a but-for causation standard: would the "
    "outcome change if only the attribute itself were switched, with every "
    "mediator left at its natural value?  The NDE quantifies exactly that "
    "direct contrast."
)
LEGAL_NECESSITY_NOTE = (
    "A prima facie disparity may be rebutted by business necessity: effects "
    "carried by justified (explaining) mediators can be defended, effects "
    "carried by proxy mediators cannot.  Per-path effects give the "
    "possibility to rebut the claim path by path; no numeric threshold "
    "turns an explaining variable into a proxy, so the judgment stays with "
    "the reader."
)

# Estimation can fail on a given dataset without the query being
# unidentifiable; these are reported per metric instead of aborting.
_ESTIMATION_ERRORS = (PositivityError, EmptyStratumError, ImpossibleObservationError)


@dataclass(frozen=True)
class AuditConfig:
    """Echo of one audit invocation; paths are kept exactly as given."""

    spec_path: str
    attribute: str
    baseline: object
    comparison: object
    outcome: str
    positive: object
    data_path: str | None = None
    metrics: tuple = METRIC_ORDER
    pi: tuple | None = None
    alpha: float = 0.01
    bootstrap: int = 0
    seed: int = 0
    fmt: str = "json"
    out: str | None = None

    def query(self) -> EffectQuery:
        return EffectQuery(
            a=self.attribute,
            a0=self.baseline,
            a1=self.comparison,
            y=self.outcome,
            y_pos=self.positive,
        )


@dataclass(frozen=True)
class AuditReport:
    """Schema-stable audit result; as_dict() is the canonical JSON tree."""

    version: str
    schema_version: int
    config: dict
    graph: dict
    metrics: tuple
    checks: tuple
    legal: dict
    warnings: tuple
    graph_object: object = field(default=None, compare=False, repr=False)
    role_tags: dict = field(default_factory=dict, compare=False, repr=False)

    def as_dict(self) -> dict:
        return _plain(
            {
                "version": self.version,
                "schema_version": self.schema_version,
                "config": self.config,
                "graph": self.graph,
                "metrics": self.metrics,
                "checks": self.checks,
                "legal": self.legal,
                "warnings": self.warnings,
            }
        )

    def exit_code(self) -> int:
        statuses = [entry["status"] for entry in self.metrics]
        statuses += [
            item["status"]
            for item in self.legal.get("business_necessity", {}).get("paths", ())
        ]
        return 2 if METRIC_STATUS_UNIDENTIFIABLE in statuses else 0


def _plain(value):
    if isinstance(value, dict):
        return {key: _plain(inner) for key, inner in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(inner) for inner in value]
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def dataset_schema(parsed: ParsedSpec) -> dict:
    """Column types for the observed nodes, from the declared domains."""
    schema = {}
    for node in parsed.graph.observed:
        domain = tuple(parsed.domains.get(node, ()))
        schema[node] = categorical(*domain) if domain else NUMERIC_TYPE
    return schema


def _config_echo(config: AuditConfig) -> dict:
    return {
        "spec": config.spec_path,
        "data": config.data_path,
        "attribute": config.attribute,
        "baseline": config.baseline,
        "comparison": config.comparison,
        "outcome": config.outcome,
        "positive": config.positive,
        "metrics": [m.lower() for m in config.metrics],
        "pi": None if config.pi is None else [f"{s}>{t}" for s, t in config.pi],
        "alpha": config.alpha,
        "bootstrap": config.bootstrap,
        "seed": config.seed,
        "format": config.fmt,
        "out": config.out,
    }


def _graph_summary(graph, q: EffectQuery, roles: dict) -> dict:
    classified = classify_paths(graph, q.a, q.y, roles)
    observed = set(graph.observed)
    return {
        "nodes": list(graph.nodes),
        "observed": list(graph.observed),
        "unobserved": sorted(set(graph.nodes) - observed),
        "edges": [[cause, effect] for cause, effect in graph.edges],
        "attribute": q.a,
        "outcome": q.y,
        "paths": [
            {
                "path": cp.path.render(),
                "label": cp.label,
                "roles": {node: role for node, role in cp.mediator_roles},
            }
            for cp in classified
        ],
    }


def _pse_selection(graph, q: EffectQuery, pi) -> PathSelection:
    if pi is not None:
        return PathSelection(q.a, q.y, frozenset(tuple(edge) for edge in pi))
    edges = set()
    for path in causal_paths(graph, q.a, q.y):
        edges.update(path.edges)
    return PathSelection(q.a, q.y, frozenset(edges))


def _estimate(metric, source, q, selection):
    if metric == METRIC_TV:
        return total_variation(source, q)
    if metric == METRIC_TE:
        return total_effect(source, q)
    if metric == METRIC_ATE:
        return average_treatment_effect(source, q)
    if metric == METRIC_NDE:
        return natural_direct_effect(source, q)
    if metric == METRIC_NIE:
        return natural_indirect_effect(source, q)
    if metric == METRIC_PSE:
        return path_specific_effect(source, q, selection)
    raise ParameterRangeError(f"unknown metric {metric!r}")


def _metric_entries(config, source, graph, data, q, selection, warnings) -> list:
    entries = []
    for metric in METRIC_ORDER:
        if metric not in config.metrics:
            continue
        tag = EQUATION_TAGS[metric]
        entry = {
            "metric": metric,
            "tag": tag,
            "backend": None,
            "value": None,
            "assumptions": [],
            "ci": None,
            "status": METRIC_STATUS_OK,
            "detail": None,
            "degraded": False,
        }
        try:
            est = _estimate(metric, source, q, selection)
        except NotIdentifiableError as err:
            entry["status"] = METRIC_STATUS_UNIDENTIFIABLE
            entry["detail"] = str(err)
            warnings.append(f"{metric} ({tag}) is not identifiable: {err}")
            entries.append(entry)
            continue
        except _ESTIMATION_ERRORS as err:
            entry["status"] = METRIC_STATUS_FAILED
            entry["detail"] = str(err)
            warnings.append(f"{metric} ({tag}) could not be estimated: {err}")
            entries.append(entry)
            continue
        if config.bootstrap and est.backend == BACKEND_PLUGIN and data is not None:
            def resample(ds, metric=metric):
                return _estimate(metric, (ds, graph), q, selection)

            try:
                ci = bootstrap_ci(
                    resample,
                    data,
                    replicates=config.bootstrap,
                    level=CI_LEVEL,
                    seed=config.seed,
                )
                est = est.with_ci(ci)
            except TooManyDegenerateReplicatesError as err:
                warnings.append(f"{metric} ({tag}): bootstrap interval unavailable: {err}")
        entry["backend"] = est.backend
        entry["value"] = float(est.value)
        entry["assumptions"] = list(est.assumptions)
        if est.ci is not None:
            entry["ci"] = {
                "lower": est.ci.lower,
                "upper": est.ci.upper,
                "level": est.ci.level,
                "replicates": est.ci.replicates,
                "seed": est.ci.seed,
                "degenerate": est.ci.degenerate,
            }
        entries.append(entry)
    return entries


def _positivity_covariates(graph, q: EffectQuery) -> tuple:
    adj = minimal_adjustment_set(graph, q.a, q.y)
    if adj is not None:
        return tuple(adj.nodes)
    observed = set(graph.observed)
    return tuple(n for n in graph.parents(q.a) if n in observed)


def _data_checks(data, graph, q: EffectQuery, alpha: float) -> list:
    named = (
        ("positivity", lambda: check_positivity(data, q.a, _positivity_covariates(graph, q))),
        ("markov", lambda: check_markov(data, graph, alpha=alpha)),
        ("faithfulness", lambda: check_faithfulness(data, graph, alpha=alpha)),
        ("linearity", lambda: check_linearity(data, graph, alpha=alpha)),
    )
    reports = []
    for name, run in named:
        try:
            reports.append(run())
        except FaircauseError as err:
            # A check that cannot run on this dataset is reported, not fatal.
            reports.append(
                CheckReport(name, STATUS_UNTESTABLE, (), {"reason": str(err)})
            )
    return reports


def _business_paths(source, graph, q: EffectQuery, roles, warnings) -> list:
    items = []
    for cp in classify_paths(graph, q.a, q.y, roles):
        if cp.label in (LABEL_BACKDOOR, LABEL_OTHER):
            continue
        selection = PathSelection(q.a, q.y, frozenset(cp.path.edges))
        item = {
            "path": cp.path.render(),
            "label": cp.label,
            "roles": {node: role for node, role in cp.mediator_roles},
            "value": None,
            "status": METRIC_STATUS_OK,
            "detail": None,
        }
        try:
            est = path_specific_effect(source, q, selection)
            item["value"] = float(est.value)
        except NotIdentifiableError as err:
            item["status"] = METRIC_STATUS_UNIDENTIFIABLE
            item["detail"] = str(err)
            warnings.append(
                f"path-specific effect along {cp.path.render()} is not identifiable: {err}"
            )
        except _ESTIMATION_ERRORS as err:
            item["status"] = METRIC_STATUS_FAILED
            item["detail"] = str(err)
            warnings.append(
                f"path-specific effect along {cp.path.render()} could not be estimated: {err}"
            )
        items.append(item)
    return items


def _metric_ref(entry) -> dict:
    return {"metric": entry["metric"], "tag": entry["tag"], "value": entry["value"]}


def _legal_mapping(entries, business_paths) -> dict:
    computed = {e["metric"]: e for e in entries if e["status"] == METRIC_STATUS_OK}
    impact = [
        _metric_ref(computed[m])
        for m in (METRIC_TV, METRIC_TE, METRIC_ATE)
        if m in computed
    ]
    treatment = [_metric_ref(computed[m]) for m in (METRIC_NDE,) if m in computed]
    return {
        "disparate_impact": {
            "framework": FRAMEWORK_IMPACT,
            "note": LEGAL_IMPACT_NOTE,
            "metrics": impact,
        },
        "disparate_treatment": {
            "framework": FRAMEWORK_TREATMENT,
            "note": LEGAL_TREATMENT_NOTE,
            "metrics": treatment,
        },
        "business_necessity": {
            "framework": FRAMEWORK_NECESSITY,
            "note": LEGAL_NECESSITY_NOTE,
            "paths": business_paths,
        },
    }


def _validate_config(config: AuditConfig):
    if not 0.0 < config.alpha < 1.0:
        raise ParameterRangeError(f"alpha must lie inside (0, 1), got {config.alpha!r}")
    if config.bootstrap < 0:
        raise ParameterRangeError("bootstrap replicate count cannot be negative")
    if config.bootstrap and config.bootstrap < 100:
        raise ParameterRangeError("bootstrap needs at least 100 replicates")
    if config.seed < 0:
        raise ParameterRangeError("seed cannot be negative")
    if config.fmt not in ("json", "markdown"):
        raise ParameterRangeError(f"unknown output format {config.fmt!r}")
    unknown = [m for m in config.metrics if m not in METRIC_ORDER]
    if unknown:
        raise ParameterRangeError(f"unknown metrics requested: {unknown}")
    if config.attribute == config.outcome:
        raise ParameterRangeError("attribute and outcome must differ")
    if config.baseline == config.comparison:
        raise ParameterRangeError("baseline and comparison values must differ")


def run_audit(config: AuditConfig, with_checks=True, with_legal=True) -> AuditReport:
    """Run one audit: parse the spec, load data if given, estimate, check.

    Identification and estimation failures become warnings and per-entry
    statuses; anything wrong with the inputs themselves raises.
    """
    _validate_config(config)
    with open(config.spec_path, "r", encoding="utf-8") as fh:
        parsed = parse_graph_spec(fh.read())
    graph = parsed.graph
    q = config.query()
    for node in (q.a, q.y):
        if node not in graph.nodes:
            raise DomainError(f"query node {node!r} is not declared in the spec")
    for node, value in ((q.a, q.a0), (q.a, q.a1), (q.y, q.y_pos)):
        domain = tuple(parsed.domains.get(node, ()))
        if domain and value not in domain:
            raise DomainError(
                f"{node}={value!r} is outside the declared domain {list(domain)}"
            )

    data = None
    if config.data_path is not None:
        data = load_csv(config.data_path, dataset_schema(parsed))
    if isinstance(parsed.scm, DiscreteScm):
        source = parsed.scm
    elif data is not None:
        source = (data, graph)
    else:
        raise ModelError(
            "spec declares no discrete model: supply a dataset for plug-in estimation"
        )

    warnings = []
    checks = []
    positivity_failed = False
    if with_checks:
        if data is not None:
            data_reports = _data_checks(data, graph, q, config.alpha)
            positivity_failed = any(
                r.assumption == "positivity" and r.status == STATUS_FAIL
                for r in data_reports
            )
            checks.extend(data_reports)
        else:
            warnings.append(
                "no dataset supplied: data-driven assumption checks were skipped"
            )
        checks.extend(untestable_disclosures(graph, q.a, q.y))

    selection = None
    if METRIC_PSE in config.metrics:
        selection = _pse_selection(graph, q, config.pi)
    entries = _metric_entries(config, source, graph, data, q, selection, warnings)
    if positivity_failed:
        degraded = [e for e in entries if e["backend"] == BACKEND_PLUGIN]
        for entry in degraded:
            entry["degraded"] = True
        if degraded:
            warnings.append(
                "positivity check failed: plug-in estimates are marked degraded"
            )

    legal = {}
    if with_legal:
        business = []
        if METRIC_PSE in config.metrics:
            business = _business_paths(source, graph, q, parsed.roles, warnings)
        legal = _legal_mapping(entries, business)

    return AuditReport(
        version=TOOL_VERSION,
        schema_version=SCHEMA_VERSION,
        config=_config_echo(config),
        graph=_graph_summary(graph, q, parsed.roles),
        metrics=tuple(entries),
        checks=tuple(r.as_dict() for r in checks),
        legal=legal,
        warnings=tuple(warnings),
        graph_object=graph,
        role_tags=dict(parsed.roles),
    )


# --- schema validation ---

_TOP_KEYS = {
    "version",
    "schema_version",
    "config",
    "graph",
    "metrics",
    "checks",
    "legal",
    "warnings",
}
_GRAPH_KEYS = {"nodes", "observed", "unobserved", "edges", "attribute", "outcome", "paths"}
_METRIC_KEYS = {
    "metric",
    "tag",
    "backend",
    "value",
    "assumptions",
    "ci",
    "status",
    "detail",
    "degraded",
}
_CI_KEYS = {"lower", "upper", "level", "replicates", "seed", "degenerate"}
_CHECK_KEYS = {"assumption", "status", "violations", "parameters"}
_LEGAL_KEYS = {"disparate_impact", "disparate_treatment", "business_necessity"}
_PATH_KEYS = {"path", "label", "roles"}
_BUSINESS_KEYS = {"path", "label", "roles", "value", "status", "detail"}
_STATUSES = (METRIC_STATUS_OK, METRIC_STATUS_UNIDENTIFIABLE, METRIC_STATUS_FAILED)


def _expect_keys(tree, where, keys):
    if not isinstance(tree, dict) or set(tree) != keys:
        raise SchemaMismatchError(f"report {where}: expected keys {sorted(keys)}")


def _expect(cond, where):
    if not cond:
        raise SchemaMismatchError(f"report {where}: schema violation")


def _number_or_null(value):
    return value is None or (isinstance(value, (int, float)) and not isinstance(value, bool))


def validate_report(tree: dict):
    """Structural validation of the report tree against schema version 1."""
    _expect_keys(tree, "top level", _TOP_KEYS)
    _expect(tree["version"] == TOOL_VERSION, "version")
    _expect(tree["schema_version"] == SCHEMA_VERSION, "schema_version")
    _expect(isinstance(tree["config"], dict), "config")
    _expect_keys(tree["graph"], "graph", _GRAPH_KEYS)
    for cp in tree["graph"]["paths"]:
        _expect_keys(cp, "graph path", _PATH_KEYS)
        _expect(isinstance(cp["roles"], dict), "graph path roles")
    for entry in tree["metrics"]:
        _expect_keys(entry, "metric entry", _METRIC_KEYS)
        _expect(entry["metric"] in METRIC_ORDER, "metric name")
        _expect(entry["tag"] == EQUATION_TAGS[entry["metric"]], "metric tag")
        _expect(entry["backend"] in (None, BACKEND_EXACT, BACKEND_PLUGIN), "backend")
        _expect(_number_or_null(entry["value"]), "metric value")
        _expect(entry["status"] in _STATUSES, "metric status")
        _expect(isinstance(entry["degraded"], bool), "degraded flag")
        _expect(
            all(isinstance(a, str) for a in entry["assumptions"]), "assumptions"
        )
        if entry["ci"] is not None:
            _expect_keys(entry["ci"], "ci", _CI_KEYS)
    for report in tree["checks"]:
        _expect_keys(report, "check entry", _CHECK_KEYS)
        _expect(isinstance(report["violations"], list), "check violations")
        _expect(isinstance(report["parameters"], dict), "check parameters")
    if tree["legal"]:
        _expect_keys(tree["legal"], "legal", _LEGAL_KEYS)
        for key in ("disparate_impact", "disparate_treatment"):
            section = tree["legal"][key]
            _expect_keys(section, key, {"framework", "note", "metrics"})
            for ref in section["metrics"]:
                _expect_keys(ref, f"{key} metric ref", {"metric", "tag", "value"})
                _expect(_number_or_null(ref["value"]), f"{key} value")
        necessity = tree["legal"]["business_necessity"]
        _expect_keys(necessity, "business_necessity", {"framework", "note", "paths"})
        for item in necessity["paths"]:
            _expect_keys(item, "business path", _BUSINESS_KEYS)
            _expect(item["status"] in _STATUSES, "business path status")
            _expect(_number_or_null(item["value"]), "business path value")
    _expect(all(isinstance(w, str) for w in tree["warnings"]), "warnings")


# --- rendering ---

def render_json(report: AuditReport) -> str:
    tree = report.as_dict()
    validate_report(tree)
    return json.dumps(tree, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _fmt(value) -> str:
    if value is None:
        return "-"
    return f"{value:+.6f}"


def _fmt_ci(ci) -> str:
    if ci is None:
        return "-"
    level = int(round(100 * ci["level"]))
    return f"[{ci['lower']:+.6f}, {ci['upper']:+.6f}] @{level}%"


def _roles_text(roles: dict) -> str:
    if not roles:
        return "-"
    return ", ".join(f"{node}={role}" for node, role in sorted(roles.items()))


def _table(lines, header, rows):
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "|".join(" --- " for _ in header) + "|")
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")


def render_markdown(report: AuditReport) -> str:
    tree = report.as_dict()
    validate_report(tree)
    lines = [
        "# Causal fairness audit",
        "",
        f"{TOOL_NAME} {tree['version']}, report schema {tree['schema_version']}",
        "",
        "## Configuration",
        "",
    ]
    _table(
        lines,
        ("setting", "value"),
        [(key, str(value)) for key, value in sorted(tree["config"].items())],
    )

    g = tree["graph"]
    lines += [
        "",
        "## Graph",
        "",
        f"{len(g['nodes'])} nodes, {len(g['edges'])} edges; "
        f"attribute `{g['attribute']}`, outcome `{g['outcome']}`.",
        "",
        "Unobserved nodes: " + (", ".join(g["unobserved"]) or "none") + ".",
        "",
        "### Paths",
        "",
    ]
    _table(
        lines,
        ("path", "classification", "mediator roles"),
        [(cp["path"], cp["label"], _roles_text(cp["roles"])) for cp in g["paths"]],
    )

    lines += ["", "## Metrics", ""]
    _table(
        lines,
        ("metric", "tag", "backend", "value", "confidence interval", "status"),
        [
            (
                entry["metric"],
                entry["tag"],
                entry["backend"] or "-",
                _fmt(entry["value"]),
                _fmt_ci(entry["ci"]),
                entry["status"] + (" (degraded)" if entry["degraded"] else ""),
            )
            for entry in tree["metrics"]
        ],
    )
    assumption_rows = [e for e in tree["metrics"] if e["assumptions"]]
    if assumption_rows:
        lines += ["", "### Estimation assumptions", ""]
        for entry in assumption_rows:
            lines.append(f"- {entry['metric']}: " + "; ".join(entry["assumptions"]))

    if tree["checks"]:
        lines += ["", "## Assumption checks", ""]
        _table(
            lines,
            ("assumption", "status", "violations"),
            [
                (r["assumption"], r["status"], str(len(r["violations"])))
                for r in tree["checks"]
            ],
        )
        detailed = [r for r in tree["checks"] if r["violations"]]
        if detailed:
            lines += ["", "### Violations", ""]
            for r in detailed:
                for violation in r["violations"]:
                    lines.append(f"- {r['assumption']}: {violation}")

    if tree["legal"]:
        lines += ["", "## Legal mapping", ""]
        for key in ("disparate_impact", "disparate_treatment"):
            section = tree["legal"][key]
            lines += [f"### {section['framework']}", "", section["note"], ""]
            if section["metrics"]:
                _table(
                    lines,
                    ("metric", "tag", "value"),
                    [
                        (ref["metric"], ref["tag"], _fmt(ref["value"]))
                        for ref in section["metrics"]
                    ],
                )
            else:
                lines.append("No metric in this section was computed.")
            lines.append("")
        necessity = tree["legal"]["business_necessity"]
        lines += [f"### {necessity['framework']}", "", necessity["note"], ""]
        if necessity["paths"]:
            _table(
                lines,
                ("path", "classification", "mediator roles", "effect", "status"),
                [
                    (
                        item["path"],
                        item["label"],
                        _roles_text(item["roles"]),
                        _fmt(item["value"]),
                        item["status"],
                    )
                    for item in necessity["paths"]
                ],
            )
        else:
            lines.append("No path-specific effects were requested.")

    lines += ["", "## Warnings", ""]
    if tree["warnings"]:
        lines += [f"- {w}" for w in tree["warnings"]]
    else:
        lines.append("None.")
    return "\n".join(lines) + "\n"
