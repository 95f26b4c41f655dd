"""Data-driven checks for the testable assumptions behind a causal audit
(positivity, local Markov structure, faithfulness, linearity) and explicit
disclosures for the untestable ones (SUTVA, ignorability, sufficiency).

All decisions are recorded in CheckReport objects with the parameters used,
so a report can be reproduced bit-for-bit from (data, graph, parameters).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .dataio import CATEGORICAL, NUMERIC, Dataset
from .errors import (
    ColumnGraphMismatchError,
    InsufficientDataError,
    MixedTypeError,
    OverlapError,
    UnknownColumnError,
)
from .graph import CausalGraph, IndependenceStatement, backdoor_paths, implied_independencies

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_UNTESTABLE = "untestable"
STATUS_UNDERPOWERED = "underpowered"

FAMILY_G = "G-test"
FAMILY_FISHER_Z = "Fisher-z"

# conditioning strata with fewer rows than this are dropped from a CI test
# and the result is flagged underpowered
MIN_STRATUM_ROWS = 5

DEFAULT_ALPHA = 0.01
DEFAULT_MIN_EFFECT = 0.02


@dataclass(frozen=True)
class CITestResult:
    """One conditional-independence test on data.

    ``underpowered`` means some conditioning stratum fell below
    MIN_STRATUM_ROWS and was excluded; callers must not count the result
    toward a pass/fail decision.
    """

    statement: IndependenceStatement
    statistic: float
    p_value: float
    family: str
    effective_n: int
    underpowered: bool = False

    def rejects(self, alpha: float) -> bool:
        return not self.underpowered and self.p_value < alpha


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one assumption check.

    For testable assumptions status is fail exactly when violations is
    non-empty.  parameters records every threshold the decision used.
    """

    assumption: str
    status: str
    violations: tuple = ()
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))
        if self.status == STATUS_FAIL and not self.violations:
            raise ValueError("fail status requires at least one violation")
        if self.status == STATUS_PASS and self.violations:
            raise ValueError("pass status forbids violations")

    def as_dict(self) -> dict:
        return {
            "assumption": self.assumption,
            "status": self.status,
            "violations": list(self.violations),
            "parameters": dict(self.parameters),
        }


def _require_columns(data: Dataset, names, error_cls):
    missing = sorted(n for n in names if n not in data.coltypes)
    if missing:
        raise error_cls(f"columns missing from data: {', '.join(missing)}")


def _kinds(data: Dataset, names) -> set:
    return {data.coltypes[n].kind for n in names}


def _strata(data: Dataset, given) -> tuple:
    """Row-index arrays per observed stratum of the given columns, sorted."""
    if not given:
        return ((), (np.arange(data.n),))
    codes = [data.codes(c) for c in given]
    sizes = [len(data.coltypes[c].domain) for c in given]
    flat = np.ravel_multi_index(codes, sizes)
    order = np.argsort(flat, kind="stable")
    keys, starts = np.unique(flat[order], return_index=True)
    groups = np.split(order, starts[1:])
    return tuple(keys), tuple(groups)


def ci_test(data: Dataset, x: str, y: str, given=()) -> CITestResult:
    """Conditional-independence test: G-test for categorical columns,
    Fisher-z partial correlation for numeric ones.  Mixed kinds raise
    MixedTypeError rather than approximating.
    """
    given = tuple(given)
    if x == y or x in given or y in given:
        raise OverlapError("x, y, given must be disjoint")
    names = (x, y) + given
    _require_columns(data, names, UnknownColumnError)
    kinds = _kinds(data, names)
    statement = IndependenceStatement(x, y, given)
    if kinds == {CATEGORICAL}:
        return _g_test(data, statement)
    if kinds == {NUMERIC}:
        return _fisher_z(data, statement)
    raise MixedTypeError(
        f"cannot test {statement.render()}: mixes categorical and numeric columns"
    )


def _g_test(data: Dataset, statement: IndependenceStatement) -> CITestResult:
    x, y, given = statement.x, statement.y, statement.given
    xa, ya = data.codes(x), data.codes(y)
    kx = len(data.coltypes[x].domain)
    ky = len(data.coltypes[y].domain)
    _, groups = _strata(data, given)
    g_stat = 0.0
    used = 0
    effective = 0
    dropped = 0
    for rows in groups:
        if len(rows) < MIN_STRATUM_ROWS:
            dropped += 1
            continue
        cont = np.bincount(xa[rows] * ky + ya[rows], minlength=kx * ky)
        cont = cont.reshape(kx, ky).astype(np.float64)
        total = cont.sum()
        expected = np.outer(cont.sum(axis=1), cont.sum(axis=0)) / total
        mask = cont > 0
        g_stat += 2.0 * float(np.sum(cont[mask] * np.log(cont[mask] / expected[mask])))
        used += 1
        effective += int(total)
    if used == 0:
        raise InsufficientDataError(
            f"no conditioning stratum of {statement.render()} has "
            f">= {MIN_STRATUM_ROWS} rows"
        )
    df = (kx - 1) * (ky - 1) * used
    p = float(stats.chi2.sf(g_stat, df)) if df > 0 else 1.0
    return CITestResult(
        statement=statement,
        statistic=g_stat,
        p_value=p,
        family=FAMILY_G,
        effective_n=effective,
        underpowered=dropped > 0,
    )


def _partial_correlation(data: Dataset, x, y, given) -> float:
    xv = data.numeric(x)
    yv = data.numeric(y)
    if given:
        design = np.column_stack(
            [np.ones(data.n)] + [data.numeric(c) for c in given]
        )
        rx = xv - design @ np.linalg.lstsq(design, xv, rcond=None)[0]
        ry = yv - design @ np.linalg.lstsq(design, yv, rcond=None)[0]
    else:
        rx = xv - xv.mean()
        ry = yv - yv.mean()
    denom = float(np.sqrt((rx @ rx) * (ry @ ry)))
    if denom == 0.0:
        return 0.0
    return float(np.clip((rx @ ry) / denom, -1.0, 1.0))


def _fisher_z(data: Dataset, statement: IndependenceStatement) -> CITestResult:
    given = statement.given
    dof = data.n - len(given) - 3
    if dof < 1:
        raise InsufficientDataError(
            f"{statement.render()} needs more than {len(given) + 3} rows"
        )
    r = _partial_correlation(data, statement.x, statement.y, given)
    r = float(np.clip(r, -1.0 + 1e-12, 1.0 - 1e-12))
    z = float(np.arctanh(r) * np.sqrt(dof))
    p = float(2.0 * stats.norm.sf(abs(z)))
    return CITestResult(
        statement=statement,
        statistic=z,
        p_value=p,
        family=FAMILY_FISHER_Z,
        effective_n=data.n,
        underpowered=dof < MIN_STRATUM_ROWS,
    )


def _categorical_effect(data: Dataset, x, y, given) -> float:
    """Empirical analog of the joint-distribution dependence measure: max
    total-variation distance between P(x | y, stratum) slices."""
    xa, ya = data.codes(x), data.codes(y)
    kx = len(data.coltypes[x].domain)
    ky = len(data.coltypes[y].domain)
    _, groups = _strata(data, given)
    worst = 0.0
    for rows in groups:
        if len(rows) < MIN_STRATUM_ROWS:
            continue
        cont = np.bincount(xa[rows] * ky + ya[rows], minlength=kx * ky)
        cont = cont.reshape(kx, ky).astype(np.float64)
        col = cont.sum(axis=0)
        conds = [cont[:, j] / col[j] for j in range(ky) if col[j] > 0]
        for d1, d2 in itertools.combinations(conds, 2):
            worst = max(worst, 0.5 * float(np.abs(d1 - d2).sum()))
    return worst


def check_positivity(data: Dataset, a: str, covariates, min_count: int = 5) -> CheckReport:
    """Every observed covariate stratum must hold at least min_count rows for
    every value of the attribute; a zero count is determinism."""
    covariates = tuple(covariates)
    _require_columns(data, (a,) + covariates, UnknownColumnError)
    params = {
        "attribute": a,
        "covariates": list(covariates),
        "min_count": int(min_count),
    }
    a_codes = data.codes(a)
    domain = data.coltypes[a].domain
    violations = []
    keys, groups = _strata(data, covariates)
    if covariates:
        sizes = [len(data.coltypes[c].domain) for c in covariates]
        labels = [
            ", ".join(
                f"{c}={data.coltypes[c].domain[v]}"
                for c, v in zip(covariates, np.unravel_index(key, sizes))
            )
            for key in keys
        ]
    else:
        labels = ["(all rows)"]
    for label, rows in zip(labels, groups):
        counts = np.bincount(a_codes[rows], minlength=len(domain))
        for value, count in zip(domain, counts):
            if count < min_count:
                violations.append(
                    f"stratum {label}: {a}={value} has {int(count)} rows "
                    f"(< {min_count})"
                )
    status = STATUS_FAIL if violations else STATUS_PASS
    return CheckReport("positivity", status, tuple(violations), params)


def _statement_result(data, statement):
    """Run the right CI test for a statement; None when kinds are mixed."""
    names = (statement.x, statement.y) + statement.given
    kinds = _kinds(data, names)
    if kinds == {CATEGORICAL}:
        return _g_test(data, statement)
    if kinds == {NUMERIC}:
        return _fisher_z(data, statement)
    return None


def _observed_columns_or_raise(data: Dataset, g: CausalGraph):
    missing = sorted(n for n in g.observed if n not in data.coltypes)
    if missing:
        raise ColumnGraphMismatchError(
            f"graph nodes missing from data: {', '.join(missing)}"
        )


def check_markov(data: Dataset, g: CausalGraph, alpha: float = DEFAULT_ALPHA) -> CheckReport:
    """Test every local-Markov independence implied by the graph, with a
    Bonferroni correction over the number of statements run."""
    _observed_columns_or_raise(data, g)
    observed = set(g.observed)
    statements = [
        s
        for s in implied_independencies(g)
        if s.x in observed and s.y in observed and set(s.given) <= observed
    ]
    violations = []
    underpowered = []
    results = []
    for statement in statements:
        result = _statement_result(data, statement)
        results.append((statement, result))
        if result is None:
            underpowered.append(f"{statement.render()}: mixed column kinds")
        elif result.underpowered:
            underpowered.append(f"{statement.render()}: thin strata")
    ran = sum(1 for _, r in results if r is not None)
    threshold = alpha / ran if ran else alpha
    for statement, result in results:
        if result is None or result.underpowered:
            continue
        if result.p_value < threshold:
            violations.append(
                f"{statement.render()} rejected: {result.family} "
                f"statistic={result.statistic:.6g}, p={result.p_value:.3g}"
            )
    params = {
        "alpha": alpha,
        "statements": len(statements),
        "tests_run": ran,
        "bonferroni_threshold": threshold,
    }
    if violations:
        status = STATUS_FAIL
    elif underpowered:
        status = STATUS_UNDERPOWERED
        params["underpowered"] = underpowered
    else:
        status = STATUS_PASS
    return CheckReport("markov", status, tuple(violations), params)


def _faithfulness_statements(g: CausalGraph):
    """Parents-based canonical conditioning sets for every observed pair."""
    observed = sorted(g.observed)
    out = []
    seen = set()
    for x, y in itertools.combinations(observed, 2):
        for base in (x, y):
            given = tuple(sorted(set(g.parents(base)) - {x, y}))
            key = (x, y, given)
            if key in seen:
                continue
            seen.add(key)
            out.append(IndependenceStatement(x, y, given))
    return out


def check_faithfulness(
    data: Dataset,
    g: CausalGraph,
    alpha: float = DEFAULT_ALPHA,
    min_effect: float = DEFAULT_MIN_EFFECT,
) -> CheckReport:
    """Every d-connected pair must show dependence.  A violation is a pair
    that is d-connected in the graph yet tests independent with a small
    empirical effect, the signature of cancelling paths."""
    from .graph import d_separated

    _observed_columns_or_raise(data, g)
    observed = set(g.observed)
    candidates = [
        s
        for s in _faithfulness_statements(g)
        if set(s.given) <= observed and not d_separated(g, {s.x}, {s.y}, s.given)
    ]
    violations = []
    underpowered = []
    ran = 0
    for statement in candidates:
        result = _statement_result(data, statement)
        if result is None:
            underpowered.append(f"{statement.render()}: mixed column kinds")
            continue
        if result.underpowered:
            underpowered.append(f"{statement.render()}: thin strata")
            continue
        ran += 1
        if result.p_value <= alpha:
            continue
        if result.family == FAMILY_G:
            effect = _categorical_effect(data, statement.x, statement.y, statement.given)
        else:
            effect = abs(
                _partial_correlation(data, statement.x, statement.y, statement.given)
            )
        if effect < min_effect:
            violations.append(
                f"{statement.x} and {statement.y} are d-connected given "
                f"{{{', '.join(statement.given)}}} but test independent: "
                f"p={result.p_value:.3g}, effect={effect:.4g}"
            )
    params = {
        "alpha": alpha,
        "min_effect": min_effect,
        "pairs_tested": ran,
    }
    if violations:
        status = STATUS_FAIL
    elif underpowered:
        status = STATUS_UNDERPOWERED
        params["underpowered"] = underpowered
    else:
        status = STATUS_PASS
    return CheckReport("faithfulness", status, tuple(violations), params)


def _stratum_labels(data: Dataset, parents) -> np.ndarray:
    """Integer stratum id per row: categorical parents by code, numeric
    parents by quintile bin."""
    label = np.zeros(data.n, dtype=np.int64)
    for parent in parents:
        ct = data.coltypes[parent]
        if ct.kind == CATEGORICAL:
            codes = data.codes(parent)
            width = len(ct.domain)
        else:
            values = data.numeric(parent)
            edges = np.quantile(values, [0.2, 0.4, 0.6, 0.8])
            codes = np.searchsorted(edges, values, side="right")
            width = 5
        label = label * width + codes
    return label


def _design_matrix(data: Dataset, parents) -> np.ndarray:
    cols = [np.ones(data.n)]
    for parent in parents:
        ct = data.coltypes[parent]
        if ct.kind == CATEGORICAL:
            cols.append(data.codes(parent).astype(np.float64))
        else:
            cols.append(data.numeric(parent))
    return np.column_stack(cols)


def check_linearity(data: Dataset, g: CausalGraph, alpha: float = DEFAULT_ALPHA) -> CheckReport:
    """Lack-of-fit test per numeric child: linear regression on its parents
    against the saturated per-stratum means model (numeric parents binned
    into quintiles).  All-categorical data is untestable."""
    _observed_columns_or_raise(data, g)
    observed = set(g.observed)
    children = [
        node
        for node in g.nodes
        if node in observed
        and data.coltypes[node].kind == NUMERIC
        and g.parents(node)
        and set(g.parents(node)) <= observed
    ]
    params = {"alpha": alpha, "children": list(children)}
    if not children:
        params["reason"] = "no numeric child with observed parents"
        return CheckReport("linearity", STATUS_UNTESTABLE, (), params)
    threshold = alpha / len(children)
    params["bonferroni_threshold"] = threshold
    violations = []
    underpowered = []
    for child in children:
        parents = g.parents(child)
        yv = data.numeric(child)
        design = _design_matrix(data, parents)
        beta = np.linalg.lstsq(design, yv, rcond=None)[0]
        sse_linear = float(np.sum((yv - design @ beta) ** 2))
        labels = _stratum_labels(data, parents)
        order = np.argsort(labels, kind="stable")
        starts = np.unique(labels[order], return_index=True)[1]
        groups = np.split(order, starts[1:])
        sse_saturated = 0.0
        for rows in groups:
            block = yv[rows]
            sse_saturated += float(np.sum((block - block.mean()) ** 2))
        n_strata = len(groups)
        df_lack = n_strata - design.shape[1]
        df_pure = data.n - n_strata
        if df_lack < 1 or df_pure < 1:
            underpowered.append(f"{child}: too few strata for a lack-of-fit test")
            continue
        if sse_saturated <= 1e-12:
            # deterministic child: any residual from the linear fit is lack of fit
            if sse_linear > 1e-8 * data.n:
                violations.append(f"{child}: deterministic nonlinear response")
            continue
        f_stat = ((sse_linear - sse_saturated) / df_lack) / (sse_saturated / df_pure)
        f_stat = max(f_stat, 0.0)
        p = float(stats.f.sf(f_stat, df_lack, df_pure))
        if p < threshold:
            violations.append(
                f"{child}: lack-of-fit F={f_stat:.6g}, p={p:.3g} "
                f"(df {df_lack}, {df_pure})"
            )
    if violations:
        status = STATUS_FAIL
    elif underpowered:
        status = STATUS_UNDERPOWERED
        params["underpowered"] = underpowered
    else:
        status = STATUS_PASS
    return CheckReport("linearity", status, tuple(violations), params)


SUTVA_TEXT = (
    "one individual's attribute must not interfere with another individual's "
    "outcome; interference leaves no signature in a single cross-sectional "
    "sample, so this is disclosed rather than tested"
)
IGNORABILITY_TEXT = (
    "counterfactual outcomes must be independent of the protected attribute "
    "given the observed covariates; observational data cannot distinguish "
    "this from hidden selection"
)
SUFFICIENCY_TEXT = (
    "every common cause of two model variables must itself appear in the "
    "model; latent confounders are undetectable without further assumptions"
)


def untestable_disclosures(g: CausalGraph, a=None, y=None) -> list:
    """Disclosure entries for SUTVA, ignorability, and causal sufficiency.

    Ignorability is upgraded to an outright fail when an unobserved node
    sits on a backdoor path between a and y (or, without a query, when an
    unobserved node has two or more children it could confound).
    """
    unobserved = sorted(set(g.nodes) - set(g.observed))
    offenders = []
    if a is not None and y is not None:
        for path in backdoor_paths(g, a, y):
            offenders.extend(n for n in path.nodes[1:-1] if n in unobserved)
        offenders = sorted(set(offenders))
    else:
        offenders = [n for n in unobserved if len(g.children(n)) >= 2]
    reports = [
        CheckReport("sutva", STATUS_UNTESTABLE, (), {"explanation": SUTVA_TEXT})
    ]
    if offenders:
        reports.append(
            CheckReport(
                "ignorability",
                STATUS_FAIL,
                tuple(
                    f"unobserved {node} confounds the attribute and the outcome"
                    for node in offenders
                ),
                {"explanation": IGNORABILITY_TEXT},
            )
        )
    else:
        reports.append(
            CheckReport(
                "ignorability", STATUS_UNTESTABLE, (), {"explanation": IGNORABILITY_TEXT}
            )
        )
    reports.append(
        CheckReport(
            "causal sufficiency",
            STATUS_UNTESTABLE,
            (),
            {"explanation": SUFFICIENCY_TEXT},
        )
    )
    return reports
