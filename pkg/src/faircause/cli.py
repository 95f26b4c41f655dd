"""Command-line interface.

Subcommands: ``audit`` (metrics, checks, legal mapping, figures),
``effects`` (metrics only), ``check`` (assumption checks only),
``paths`` (path classification table), ``generate`` (sample a built-in
scenario to CSV).  All randomness flows from ``--seed`` and identical
invocations produce identical bytes.  Exit codes: 0 success, 1 usage or
input errors, 2 when a requested metric is unidentifiable.
"""

from __future__ import annotations

import argparse
import os
import sys

from .dataio import save_csv
from .errors import FaircauseError
from .estimators import (
    METRIC_ATE,
    METRIC_NDE,
    METRIC_NIE,
    METRIC_PSE,
    METRIC_TE,
    METRIC_TV,
)
from .figures import save_graph_figure, save_metrics_figure
from .graph import classify_paths
from .report import (
    METRIC_ORDER,
    TOOL_NAME,
    TOOL_VERSION,
    AuditConfig,
    render_json,
    render_markdown,
    run_audit,
)
from .scenarios import get_scenario
from .scm import sample
from .specfile import export_graph_spec, parse_graph_spec

_METRIC_TOKENS = {
    "tv": METRIC_TV,
    "te": METRIC_TE,
    "ate": METRIC_ATE,
    "nde": METRIC_NDE,
    "nie": METRIC_NIE,
    "pse": METRIC_PSE,
}

_LABEL_COLORS = {
    "direct": "36",
    "indirect-explaining": "32",
    "indirect-proxy": "33",
    "indirect-neutral": "34",
    "backdoor": "31",
    "other": "35",
}


class _CliError(Exception):
    """Bad command-line input; the active subcommand synopsis is printed."""


def _coerce(text: str):
    """Cell text to a domain value: int, then float, then raw string."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_sensitive(text: str):
    name, eq, values = text.partition("=")
    parts = values.split(",") if eq else []
    if not name or len(parts) != 2 or not all(parts):
        raise _CliError(f"--sensitive expects NAME=baseline,comparison, got {text!r}")
    return name, _coerce(parts[0]), _coerce(parts[1])


def _parse_outcome(text: str):
    name, eq, value = text.partition("=")
    if not name or not eq or not value:
        raise _CliError(f"--outcome expects NAME=value, got {text!r}")
    return name, _coerce(value)


def _parse_metrics(text: str) -> tuple:
    chosen = set()
    for token in text.split(","):
        token = token.strip().lower()
        if not token:
            continue
        metric = _METRIC_TOKENS.get(token)
        if metric is None:
            known = ",".join(_METRIC_TOKENS)
            raise _CliError(f"unknown metric {token!r}; choose from {known}")
        chosen.add(metric)
    if not chosen:
        raise _CliError("--metrics selected nothing")
    return tuple(m for m in METRIC_ORDER if m in chosen)


def _parse_pi(text: str) -> tuple:
    edges = []
    for part in text.split(","):
        src, sep, dst = part.partition(">")
        if not sep or not src or not dst:
            raise _CliError(f"--pi expects edges like A>B,B>C, got {part!r}")
        edges.append((src, dst))
    return tuple(edges)


def _color_enabled(stream) -> bool:
    return bool(getattr(stream, "isatty", lambda: False)()) and (
        os.environ.get("NO_COLOR") is None
    )


def _paint(text: str, code: str, enabled: bool) -> str:
    if not enabled or not code:
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _write_output(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _write_figures(report, out_path):
    base, _ = os.path.splitext(out_path)
    save_graph_figure(
        report.graph_object,
        base + "-graph.png",
        roles=report.role_tags,
        attribute=report.graph["attribute"],
        outcome=report.graph["outcome"],
    )
    save_metrics_figure(list(report.metrics), base + "-metrics.png")


def _config_from(ns, metrics=None) -> AuditConfig:
    attribute, baseline, comparison = _parse_sensitive(ns.sensitive)
    outcome, positive = _parse_outcome(ns.outcome)
    if metrics is None:
        metrics = _parse_metrics(ns.metrics)
    pi = getattr(ns, "pi", None)
    return AuditConfig(
        spec_path=ns.spec,
        data_path=getattr(ns, "data", None),
        attribute=attribute,
        baseline=baseline,
        comparison=comparison,
        outcome=outcome,
        positive=positive,
        metrics=metrics,
        pi=None if pi is None else _parse_pi(pi),
        alpha=getattr(ns, "alpha", 0.01),
        bootstrap=getattr(ns, "bootstrap", 0),
        seed=getattr(ns, "seed", 0),
        fmt=ns.fmt,
        out=ns.out,
    )


def _render(report, fmt: str) -> str:
    return render_json(report) if fmt == "json" else render_markdown(report)


def _cmd_audit(ns) -> int:
    config = _config_from(ns)
    report = run_audit(config)
    _write_output(_render(report, config.fmt), config.out)
    if config.out is not None:
        _write_figures(report, config.out)
    return report.exit_code()


def _cmd_effects(ns) -> int:
    config = _config_from(ns)
    report = run_audit(config, with_checks=False, with_legal=False)
    _write_output(_render(report, config.fmt), config.out)
    return report.exit_code()


def _cmd_check(ns) -> int:
    config = _config_from(ns, metrics=())
    report = run_audit(config, with_legal=False)
    _write_output(_render(report, config.fmt), config.out)
    return report.exit_code()


def _cmd_paths(ns) -> int:
    for flag, value in (("--sensitive", ns.sensitive), ("--outcome", ns.outcome)):
        if "=" in value:
            raise _CliError(f"{flag} takes a bare node name for this command")
    with open(ns.spec, "r", encoding="utf-8") as fh:
        parsed = parse_graph_spec(fh.read())
    classified = classify_paths(parsed.graph, ns.sensitive, ns.outcome, parsed.roles)
    rows = []
    for cp in classified:
        roles = ", ".join(f"{n}={r}" for n, r in cp.mediator_roles) or "-"
        rows.append((cp.path.render(), cp.label, roles))
    header = ("path", "classification", "mediator roles")
    widths = [
        max(len(header[i]), *(len(row[i]) for row in rows)) if rows else len(header[i])
        for i in range(3)
    ]
    enabled = _color_enabled(sys.stdout)
    print("  ".join(h.upper().ljust(w) for h, w in zip(header, widths)).rstrip())
    for path_text, label, roles in rows:
        cells = [
            path_text.ljust(widths[0]),
            _paint(label.ljust(widths[1]), _LABEL_COLORS.get(label, ""), enabled),
            roles.ljust(widths[2]),
        ]
        print("  ".join(cells).rstrip())
    return 0


def _cmd_generate(ns) -> int:
    if ns.n < 1:
        raise _CliError("--n must be a positive row count")
    scenario = get_scenario(ns.scenario)
    data = sample(scenario.scm, ns.n, ns.seed)
    save_csv(data, ns.out)
    print(f"wrote {data.n} rows of scenario {scenario.id!r} to {ns.out}")
    if ns.emit_spec:
        text = export_graph_spec(
            scenario.graph,
            scm=scenario.scm,
            roles=scenario.roles,
            meta={"scenario": scenario.id, "title": scenario.title},
        )
        with open(ns.emit_spec, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"wrote spec to {ns.emit_spec}")
    return 0


def _add_query_flags(p, with_data=True, data_required=False):
    p.add_argument("--spec", required=True, metavar="FILE", help="graph/model spec file")
    if with_data:
        p.add_argument(
            "--data",
            required=data_required,
            metavar="FILE",
            help="CSV dataset; optional when the spec defines a full model",
        )
    p.add_argument(
        "--sensitive",
        required=True,
        metavar="A=a0,a1",
        help="sensitive attribute with baseline and comparison values",
    )
    p.add_argument(
        "--outcome",
        required=True,
        metavar="Y=y+",
        help="outcome node and its favourable value",
    )


def _add_output_flags(p):
    p.add_argument(
        "--format",
        dest="fmt",
        choices=("json", "markdown"),
        default="json",
        help="output format (default json)",
    )
    p.add_argument("--out", metavar="FILE", help="write here instead of stdout")


def _add_metric_flags(p):
    p.add_argument(
        "--metrics",
        default="tv,te,ate,nde,nie,pse",
        metavar="LIST",
        help="comma-separated subset of tv,te,ate,nde,nie,pse (default all)",
    )
    p.add_argument(
        "--pi",
        metavar="A>B,B>C",
        help="edge list selecting the paths for the PSE (default: every causal path)",
    )
    p.add_argument(
        "--bootstrap",
        type=int,
        default=0,
        metavar="B",
        help="bootstrap replicates for plug-in confidence intervals (0 = off)",
    )
    p.add_argument("--seed", type=int, default=0, help="seed for all resampling")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Causal fairness auditing on structural causal models and data.",
    )
    parser.add_argument(
        "--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}"
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    pa = sub.add_parser("audit", help="full report: metrics, checks, legal mapping")
    _add_query_flags(pa)
    _add_metric_flags(pa)
    pa.add_argument(
        "--alpha", type=float, default=0.01, help="significance level for checks"
    )
    _add_output_flags(pa)
    pa.set_defaults(handler=_cmd_audit, active_parser=pa)

    pe = sub.add_parser("effects", help="compute the fairness metrics only")
    _add_query_flags(pe)
    _add_metric_flags(pe)
    _add_output_flags(pe)
    pe.set_defaults(handler=_cmd_effects, active_parser=pe)

    pc = sub.add_parser("check", help="run the assumption checks only")
    _add_query_flags(pc, data_required=True)
    pc.add_argument(
        "--alpha", type=float, default=0.01, help="significance level for checks"
    )
    _add_output_flags(pc)
    pc.set_defaults(handler=_cmd_check, active_parser=pc)

    pp = sub.add_parser(
        "paths", help="classify every path between attribute and outcome"
    )
    pp.add_argument("--spec", required=True, metavar="FILE")
    pp.add_argument("--sensitive", required=True, metavar="A")
    pp.add_argument("--outcome", required=True, metavar="Y")
    pp.set_defaults(handler=_cmd_paths, active_parser=pp)

    pg = sub.add_parser("generate", help="sample a built-in scenario to CSV")
    pg.add_argument("--scenario", required=True, metavar="NAME")
    pg.add_argument("--n", type=int, required=True, metavar="N")
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--out", required=True, metavar="FILE.csv")
    pg.add_argument("--emit-spec", dest="emit_spec", metavar="FILE")
    pg.set_defaults(handler=_cmd_generate, active_parser=pg)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return ns.handler(ns)
    except _CliError as err:
        sys.stderr.write(ns.active_parser.format_usage())
        sys.stderr.write(f"{TOOL_NAME}: error: {err}\n")
        return 1
    except FaircauseError as err:
        sys.stderr.write(f"{TOOL_NAME}: error: {err}\n")
        return 1
    except OSError as err:
        sys.stderr.write(f"{TOOL_NAME}: error: {err}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
