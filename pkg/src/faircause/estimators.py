"""The six fairness metrics, each with an exact and a plug-in backend.

Exact backends evaluate structural models by enumeration.  Plug-in backends
consume (Dataset, CausalGraph), pick adjustment sets graphically, and use raw
empirical frequencies (optional add-alpha smoothing, recorded when enabled).
Identification failures raise NotIdentifiableError rather than returning a
best-effort number.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .dataio import CATEGORICAL, Dataset
from .errors import (
    DomainError,
    EmptyStratumError,
    InvalidPathSelectionError,
    NotIdentifiableError,
    ParameterRangeError,
    PositivityError,
    TooManyDegenerateReplicatesError,
    UnknownNodeError,
)
from .graph import CausalGraph, causal_paths, d_separated, minimal_adjustment_set
from .scm import (
    DiscreteScm,
    PathSelection,
    counterfactual_prob,
    interventional_prob,
    joint_distribution,
    unit_counterfactual,
)

METRIC_TV = "TV"
METRIC_TE = "TE"
METRIC_ATE = "ATE"
METRIC_NDE = "NDE"
METRIC_NIE = "NIE"
METRIC_PSE = "PSE"

BACKEND_EXACT = "exact"
BACKEND_PLUGIN = "plugin"

_MASS_TOL = 1e-9


@dataclass(frozen=True)
class EffectQuery:
    """Sensitive attribute A with baseline a0 and comparison a1; outcome Y=y_pos."""

    a: str
    a0: object
    a1: object
    y: str
    y_pos: object

    def __post_init__(self):
        if self.a0 == self.a1:
            raise ParameterRangeError("a0 and a1 must differ")
        if self.a == self.y:
            raise ParameterRangeError("sensitive attribute and outcome must differ")

    def swapped(self) -> "EffectQuery":
        return replace(self, a0=self.a1, a1=self.a0)


@dataclass(frozen=True)
class MediationSpec:
    """Ordered mediator set Z for the natural direct and indirect effects."""

    mediators: tuple

    def __post_init__(self):
        object.__setattr__(self, "mediators", tuple(self.mediators))
        if len(set(self.mediators)) != len(self.mediators):
            raise InvalidPathSelectionError("duplicate mediator")

    @classmethod
    def all_mediators(cls, graph: CausalGraph, a, y) -> "MediationSpec":
        found = set()
        for path in causal_paths(graph, a, y):
            found.update(path.nodes[1:-1])
        return cls(tuple(sorted(found)))

    def validate_on(self, graph: CausalGraph, q: EffectQuery):
        on_path = set()
        for path in causal_paths(graph, q.a, q.y):
            on_path.update(path.nodes[1:-1])
        for node in self.mediators:
            if node in (q.a, q.y):
                raise InvalidPathSelectionError(f"mediator set must exclude {node}")
            if node not in on_path:
                raise InvalidPathSelectionError(
                    f"{node} lies on no directed path {q.a} to {q.y}"
                )


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    replicates: int
    seed: int
    degenerate: int = 0


@dataclass(frozen=True)
class EffectEstimate:
    metric: str
    backend: str
    value: float
    assumptions: tuple
    ci: ConfidenceInterval | None = None

    def with_ci(self, ci: ConfidenceInterval) -> "EffectEstimate":
        # The declared invariant is lower <= value <= upper; widen minimally
        # when the percentile interval misses the point estimate.
        ci = replace(
            ci,
            lower=min(ci.lower, self.value),
            upper=max(ci.upper, self.value),
        )
        return replace(self, ci=ci)


def _split_source(source):
    if isinstance(source, DiscreteScm):
        return BACKEND_EXACT, source
    if isinstance(source, (tuple, list)) and len(source) == 2:
        data, graph = source
        if isinstance(data, Dataset) and isinstance(graph, CausalGraph):
            return BACKEND_PLUGIN, (data, graph)
    raise TypeError("source must be a DiscreteScm or a (Dataset, CausalGraph) pair")


def _require_query_nodes(graph: CausalGraph, q: EffectQuery):
    for node in (q.a, q.y):
        if node not in graph.nodes:
            raise UnknownNodeError(f"unknown node {node!r}")


def _set_text(names) -> str:
    # Sorted render so assumption strings do not vary with hash order.
    if not names:
        return "{}"
    return "{" + ", ".join(repr(n) for n in sorted(names)) + "}"


# --- counting machinery ---

def _domain_of(data: Dataset, node):
    ct = data.coltypes.get(node)
    if ct is None:
        raise UnknownNodeError(f"dataset has no column {node!r}")
    if ct.kind != CATEGORICAL:
        raise NotIdentifiableError(
            f"plug-in estimation needs categorical columns; {node} is numeric"
        )
    return ct.domain


def _count_tensor(data: Dataset, nodes) -> np.ndarray:
    shape = tuple(len(_domain_of(data, n)) for n in nodes)
    codes = [data.codes(n) for n in nodes]
    flat = np.ravel_multi_index(codes, shape)
    return (
        np.bincount(flat, minlength=math.prod(shape))
        .reshape(shape)
        .astype(np.float64)
    )


def _code_in(data: Dataset, node, value):
    domain = _domain_of(data, node)
    for i, v in enumerate(domain):
        if v == value:
            return i
    raise DomainError(f"{node}: value {value!r} outside domain {domain}")


def _stratum_text(nodes, domains, index) -> str:
    if not nodes:
        return "(marginal)"
    parts = [f"{n}={domains[i][j]}" for i, (n, j) in enumerate(zip(nodes, index))]
    return "{" + ", ".join(parts) + "}"


# --- total variation ---

def total_variation(source, q: EffectQuery) -> EffectEstimate:
    """P(Y=y+ | A=a1) - P(Y=y+ | A=a0): association, not causation."""
    if isinstance(source, Dataset):
        return _tv_plugin(source, q)
    backend, payload = _split_source(source)
    if backend == BACKEND_EXACT:
        joint = joint_distribution(payload)
        try:
            value = joint.conditional_prob(
                {q.y: q.y_pos}, {q.a: q.a1}
            ) - joint.conditional_prob({q.y: q.y_pos}, {q.a: q.a0})
        except ZeroDivisionError:
            raise EmptyStratumError(
                f"one of the {q.a} strata has probability zero"
            ) from None
        return EffectEstimate(
            METRIC_TV, BACKEND_EXACT, value,
            ("conditional probabilities on the exact joint",),
        )
    data, _ = payload
    return _tv_plugin(data, q)


def _tv_plugin(data: Dataset, q: EffectQuery) -> EffectEstimate:
    counts = _count_tensor(data, (q.a, q.y))
    a0 = _code_in(data, q.a, q.a0)
    a1 = _code_in(data, q.a, q.a1)
    y = _code_in(data, q.y, q.y_pos)
    n0, n1 = counts[a0].sum(), counts[a1].sum()
    if n0 == 0 or n1 == 0:
        missing = q.a0 if n0 == 0 else q.a1
        raise EmptyStratumError(f"no rows with {q.a}={missing!r}")
    value = counts[a1, y] / n1 - counts[a0, y] / n0
    return EffectEstimate(
        METRIC_TV, BACKEND_PLUGIN, float(value), ("raw empirical frequencies",)
    )


# --- total effect / ATE ---

def _check_smoothing(smoothing) -> float:
    smoothing = float(smoothing)
    if smoothing < 0.0:
        raise ParameterRangeError("smoothing must be non-negative")
    return smoothing


def total_effect(source, q: EffectQuery, smoothing=0.0) -> EffectEstimate:
    """P(y+ | do(A=a1)) - P(y+ | do(A=a0))."""
    return _total_effect_tagged(source, q, METRIC_TE, _check_smoothing(smoothing))


def _total_effect_tagged(source, q, metric, smoothing=0.0) -> EffectEstimate:
    backend, payload = _split_source(source)
    if backend == BACKEND_EXACT:
        scm = payload
        _require_query_nodes(scm.graph, q)
        value = interventional_prob(scm, {q.a: q.a1}, {q.y: q.y_pos}) - (
            interventional_prob(scm, {q.a: q.a0}, {q.y: q.y_pos})
        )
        return EffectEstimate(
            metric, BACKEND_EXACT, value,
            ("exact enumeration under the do-operator",),
        )
    data, graph = payload
    _require_query_nodes(graph, q)
    adj = minimal_adjustment_set(graph, q.a, q.y)
    if adj is None:
        raise NotIdentifiableError(
            f"no observed adjustment set blocks the backdoor paths {q.a} to {q.y}"
        )
    value = _backdoor_difference(data, q, adj.nodes, smoothing)
    assumptions = [
        f"backdoor adjustment on {_set_text(adj.nodes)}",
        "ignorability: adjustment set is fully observed",
        "positivity across adjustment strata",
    ]
    if metric == METRIC_ATE:
        assumptions.append("ATE computed as TE (no mediator conditioning)")
    if smoothing:
        assumptions.append(f"laplace smoothing alpha={smoothing}")
    return EffectEstimate(metric, BACKEND_PLUGIN, float(value), tuple(assumptions))


def _backdoor_difference(data, q, w_nodes, smoothing=0.0) -> float:
    w_nodes = tuple(w_nodes)
    counts = _count_tensor(data, w_nodes + (q.a, q.y))
    a0 = _code_in(data, q.a, q.a0)
    a1 = _code_in(data, q.a, q.a1)
    y = _code_in(data, q.y, q.y_pos)
    n_aw = counts.sum(axis=-1)
    n_w = n_aw.sum(axis=-1)
    present = n_w > 0
    if smoothing <= 0.0:
        for a_code, a_val in ((a0, q.a0), (a1, q.a1)):
            gap = present & (n_aw[..., a_code] == 0)
            if gap.any():
                idx = tuple(int(i) for i in np.argwhere(gap)[0])
                domains = [_domain_of(data, n) for n in w_nodes]
                raise PositivityError(
                    f"stratum {_stratum_text(w_nodes, domains, idx)} has no rows "
                    f"with {q.a}={a_val!r}"
                )
        num, den = counts, n_aw
    else:
        num = counts + smoothing
        den = n_aw + smoothing * counts.shape[-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        p1 = np.where(n_aw[..., a1] > 0, num[..., a1, y] / den[..., a1], 0.0)
        p0 = np.where(n_aw[..., a0] > 0, num[..., a0, y] / den[..., a0], 0.0)
    weights = n_w / n_w.sum()
    return float((weights * (p1 - p0))[present].sum())


def average_treatment_effect(source, q: EffectQuery, smoothing=0.0) -> EffectEstimate:
    """E[Y^{a1} - Y^{a0}] with Y=y+ as indicator.

    Exact backend averages unit-level counterfactuals over the observational
    joint; the plug-in backend shares total_effect's backdoor arithmetic
    (equal under identification).
    """
    backend, payload = _split_source(source)
    if backend == BACKEND_PLUGIN:
        return _total_effect_tagged(source, q, METRIC_ATE, _check_smoothing(smoothing))
    scm = payload
    _require_query_nodes(scm.graph, q)
    joint = joint_distribution(scm)
    order = scm.graph.nodes
    total = 0.0
    for values in itertools.product(*(scm.domains[n] for n in order)):
        row = dict(zip(order, values))
        p_row = joint.prob(row)
        if p_row <= 0.0:
            continue
        up1 = unit_counterfactual(scm, row, {q.a: q.a1}, q.y)[q.y_pos]
        up0 = unit_counterfactual(scm, row, {q.a: q.a0}, q.y)[q.y_pos]
        total += p_row * (up1 - up0)
    return EffectEstimate(
        METRIC_ATE, BACKEND_EXACT, total,
        ("unit counterfactuals averaged over the observational joint",),
    )


# --- mediation: NDE / NIE ---

def natural_direct_effect(source, q: EffectQuery, m: MediationSpec | None = None,
                          smoothing=0.0) -> EffectEstimate:
    """P(y+_{a1, Z_{a0}}) - P(y+_{a0})."""
    return _mediation(source, q, m, direct=True, smoothing=_check_smoothing(smoothing))


def natural_indirect_effect(source, q: EffectQuery, m: MediationSpec | None = None,
                            smoothing=0.0) -> EffectEstimate:
    """P(y_{a0, Z_{a1}}) - P(y_{a0}).

    The decomposition TE_{a1,a0} = NDE_{a1,a0} - NIE_{a0,a1} consumes this op
    with the query's (a0, a1) swapped.
    """
    return _mediation(source, q, m, direct=False, smoothing=_check_smoothing(smoothing))


def _mediation(source, q, m, direct, smoothing=0.0) -> EffectEstimate:
    backend, payload = _split_source(source)
    graph = payload.graph if backend == BACKEND_EXACT else payload[1]
    _require_query_nodes(graph, q)
    if m is None:
        m = MediationSpec.all_mediators(graph, q.a, q.y)
    m.validate_on(graph, q)
    metric = METRIC_NDE if direct else METRIC_NIE

    if backend == BACKEND_EXACT:
        scm = payload
        baseline = interventional_prob(scm, {q.a: q.a0}, {q.y: q.y_pos})
        if direct:
            nested = counterfactual_prob(
                scm, {q.y: q.y_pos}, {q.a: q.a1},
                references=[(m.mediators, {q.a: q.a0})],
            )
        else:
            nested = counterfactual_prob(
                scm, {q.y: q.y_pos}, {q.a: q.a0},
                references=[(m.mediators, {q.a: q.a1})],
            )
        return EffectEstimate(
            metric, BACKEND_EXACT, nested - baseline,
            (f"two-world counterfactual with mediators {_set_text(m.mediators)}",),
        )

    data, graph = payload
    return _mediation_plugin(data, graph, q, m, direct, smoothing)


def _mediation_adjustment_set(graph: CausalGraph, q, m) -> tuple:
    """Smallest observed W meeting the sequential-ignorability conditions.

    W must be non-descendant of A, block all A-Y and A-Z backdoor paths, and
    block all Z-Y backdoor paths given A; additionally no descendant of A
    outside Z may confound Z and Y (checked separately).
    """
    z = set(m.mediators)
    witness = _affected_confounder(graph, q, z)
    if witness is not None:
        raise NotIdentifiableError(
            f"{witness} is affected by {q.a} and confounds the mediators with {q.y}"
        )
    forbidden = graph.descendants(q.a) | {q.a, q.y} | z
    candidates = sorted(n for n in graph.observed if n not in forbidden)
    no_a_out = graph.without_outgoing(q.a)
    no_z_out = graph.without_outgoing_all(z)
    z_tuple = tuple(sorted(z))
    for size in range(len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            if not d_separated(no_a_out, q.a, q.y, combo):
                continue
            if z_tuple and not d_separated(no_a_out, q.a, z_tuple, combo):
                continue
            if z_tuple and not d_separated(no_z_out, z_tuple, q.y, combo + (q.a,)):
                continue
            return combo
    raise NotIdentifiableError(
        f"no observed set blocks the confounding needed to identify "
        f"mediation of {q.a} on {q.y}"
    )


def _affected_confounder(graph: CausalGraph, q, z: set):
    """A descendant of A outside Z with directed routes to both Z and Y
    (the Y route avoiding Z) breaks the mediation formula."""
    for node in sorted(graph.descendants(q.a)):
        if node in z or node in (q.a, q.y):
            continue
        reaches_z = bool(graph.descendants(node) & z)
        if not reaches_z:
            continue
        if _reaches_avoiding(graph, node, q.y, z):
            return node
    return None


def _reaches_avoiding(graph: CausalGraph, start, goal, banned: set) -> bool:
    seen, frontier = set(), [start]
    while frontier:
        node = frontier.pop()
        for child in graph.children(node):
            if child == goal:
                return True
            if child in banned or child in seen:
                continue
            seen.add(child)
            frontier.append(child)
    return False


def _mediation_plugin(data, graph, q, m, direct, smoothing=0.0) -> EffectEstimate:
    w_nodes = _mediation_adjustment_set(graph, q, m)
    z_nodes = m.mediators
    order = tuple(w_nodes) + (q.a,) + tuple(z_nodes) + (q.y,)
    counts = _count_tensor(data, order)
    a_axis = len(w_nodes)
    a0 = _code_in(data, q.a, q.a0)
    a1 = _code_in(data, q.a, q.a1)
    y = _code_in(data, q.y, q.y_pos)

    c_a1 = np.take(counts, a1, axis=a_axis)
    c_a0 = np.take(counts, a0, axis=a_axis)
    z_axes = tuple(range(len(w_nodes), len(w_nodes) + len(z_nodes)))

    n_z_a1 = c_a1.sum(axis=-1)
    n_z_a0 = c_a0.sum(axis=-1)
    n_a1_w = n_z_a1.sum(axis=z_axes) if z_axes else n_z_a1
    n_a0_w = n_z_a0.sum(axis=z_axes) if z_axes else n_z_a0
    n_w = counts.sum(axis=tuple(range(a_axis, counts.ndim)))
    present = n_w > 0

    w_domains = [_domain_of(data, n) for n in w_nodes]
    if smoothing <= 0.0:
        for n_aw, a_val in ((n_a0_w, q.a0), (n_a1_w, q.a1)):
            gap = present & (n_aw == 0)
            if gap.any():
                idx = tuple(int(i) for i in np.argwhere(gap)[0])
                raise PositivityError(
                    f"stratum {_stratum_text(w_nodes, w_domains, idx)} has no rows "
                    f"with {q.a}={a_val!r}"
                )
        needed_src, needed_dst = (n_z_a0, n_z_a1) if direct else (n_z_a1, n_z_a0)
        gap = (needed_src > 0) & (needed_dst == 0)
        if gap.any():
            raise PositivityError(
                "a mediator stratum observed under one sensitive value has no "
                "rows under the other"
            )
        y_num_a1, y_den_a1 = c_a1[..., y], n_z_a1
        y_num_a0, y_den_a0 = c_a0[..., y], n_z_a0
        z_num_a1, z_den_a1 = n_z_a1, _expand(n_a1_w, n_z_a1.shape)
        z_num_a0, z_den_a0 = n_z_a0, _expand(n_a0_w, n_z_a0.shape)
    else:
        k_y = counts.shape[-1]
        k_z = math.prod(counts.shape[len(w_nodes) + 1:-1]) or 1
        y_num_a1, y_den_a1 = c_a1[..., y] + smoothing, n_z_a1 + smoothing * k_y
        y_num_a0, y_den_a0 = c_a0[..., y] + smoothing, n_z_a0 + smoothing * k_y
        z_num_a1 = n_z_a1 + smoothing
        z_den_a1 = _expand(n_a1_w + smoothing * k_z, n_z_a1.shape)
        z_num_a0 = n_z_a0 + smoothing
        z_den_a0 = _expand(n_a0_w + smoothing * k_z, n_z_a0.shape)

    with np.errstate(invalid="ignore", divide="ignore"):
        p_y_a1 = np.where(y_den_a1 > 0, y_num_a1 / np.where(y_den_a1 > 0, y_den_a1, 1.0), 0.0)
        p_y_a0 = np.where(y_den_a0 > 0, y_num_a0 / np.where(y_den_a0 > 0, y_den_a0, 1.0), 0.0)
        p_z_a1 = np.where(z_den_a1 > 0, z_num_a1 / np.where(z_den_a1 > 0, z_den_a1, 1.0), 0.0)
        p_z_a0 = np.where(z_den_a0 > 0, z_num_a0 / np.where(z_den_a0 > 0, z_den_a0, 1.0), 0.0)

    if direct:
        cell = (p_y_a1 - p_y_a0) * p_z_a0
    else:
        cell = p_y_a0 * (p_z_a1 - p_z_a0)
    per_w = cell.sum(axis=z_axes) if z_axes else cell
    weights = np.where(present, n_w / n_w.sum(), 0.0)
    value = float((weights * per_w).sum())

    metric = METRIC_NDE if direct else METRIC_NIE
    assumptions = [
        f"mediation formula with mediators {_set_text(z_nodes)}",
        f"sequential ignorability given {_set_text(w_nodes)}",
        "no mediator-outcome confounder affected by the sensitive attribute",
        "positivity across mediator and adjustment strata",
    ]
    if smoothing:
        assumptions.append(f"laplace smoothing alpha={smoothing}")
    return EffectEstimate(metric, BACKEND_PLUGIN, value, tuple(assumptions))


def _expand(arr, shape):
    extra = len(shape) - arr.ndim
    return arr.reshape(arr.shape + (1,) * extra)


# --- path-specific effect ---

def path_specific_effect(source, q: EffectQuery, sel: PathSelection,
                         smoothing=0.0) -> EffectEstimate:
    """P(y+_{a1|pi, a0|pi-bar}) - P(y+_{a0})."""
    smoothing = _check_smoothing(smoothing)
    backend, payload = _split_source(source)
    graph = payload.graph if backend == BACKEND_EXACT else payload[1]
    _require_query_nodes(graph, q)
    if sel.a != q.a or sel.y != q.y:
        raise InvalidPathSelectionError(
            "path selection endpoints must match the query's (A, Y)"
        )
    sel.validate_on(graph)

    if backend == BACKEND_EXACT:
        from .scm import path_specific_prob

        scm = payload
        value = path_specific_prob(scm, sel, q.a1, q.a0, {q.y: q.y_pos}) - (
            interventional_prob(scm, {q.a: q.a0}, {q.y: q.y_pos})
        )
        return EffectEstimate(
            METRIC_PSE, BACKEND_EXACT, value,
            ("edge-labeled two-world enumeration",),
        )

    data, graph = payload
    return _pse_plugin(data, graph, q, sel, smoothing)


def _world_labels(graph: CausalGraph, q, pi: frozenset):
    """Which world(s) each ancestor of Y must be evaluated in.

    Returns (needed nodes, label map).  A node needing both worlds while
    being a descendant of A is a recanting witness.
    """
    needed = (graph.ancestors(q.y) | {q.y}) - {q.a}
    req = {n: set() for n in needed}
    req[q.y].add("pi")
    for node in reversed(graph.topological_order):
        if node not in needed:
            continue
        for label in req[node]:
            for parent in graph.parents(node):
                if parent == q.a:
                    continue
                if label == "pi" and (parent, node) in pi:
                    req[parent].add("pi")
                else:
                    req[parent].add("ref")
    a_down = graph.descendants(q.a)
    labels = {}
    for node in sorted(needed):
        wants = req[node]
        if node in a_down:
            if len(wants) == 2:
                raise NotIdentifiableError(
                    f"recanting witness {node}: it transmits both selected and "
                    f"unselected path segments to {q.y}"
                )
            labels[node] = next(iter(wants))
        else:
            # World-independent value; a single observational factor serves.
            labels[node] = "ref"
    return tuple(sorted(needed)), labels


def _labeled_g_prob(data, graph, q, pi: frozenset, smoothing=0.0) -> float:
    """P(Y=y+ in the labeled world) by the truncated factorization."""
    needed, labels = _world_labels(graph, q, pi)
    hidden = sorted(n for n in needed + (q.a,) if not graph.is_observed(n))
    if hidden:
        raise NotIdentifiableError(
            f"nodes {', '.join(hidden)} are unobserved but appear in the "
            f"factorization for {q.y}"
        )
    a0 = _code_in(data, q.a, q.a0)
    a1 = _code_in(data, q.a, q.a1)
    shape = tuple(len(_domain_of(data, n)) for n in needed)
    coords = dict(zip(needed, np.indices(shape)))
    product = np.ones(shape)
    for node in needed:
        parents = graph.parents(node)
        counts = _count_tensor(data, parents + (node,))
        if smoothing > 0.0:
            counts = counts + smoothing
        if q.a in parents:
            a_axis = parents.index(q.a)
            in_pi = (q.a, node) in pi
            a_code = a1 if (labels[node] == "pi" and in_pi) else a0
            counts = np.take(counts, a_code, axis=a_axis)
            parents = tuple(p for p in parents if p != q.a)
        denom = counts.sum(axis=-1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            cond = np.where(denom > 0, counts / np.where(denom > 0, denom, 1.0), 0.0)
        product = product * cond[tuple(coords[p] for p in parents) + (coords[node],)]
    mass = float(product.sum())
    if smoothing <= 0.0 and mass < 1.0 - _MASS_TOL:
        raise PositivityError(
            f"empirical factorization loses {1.0 - mass:.3g} probability mass: "
            "some needed strata have no data"
        )
    y_code = _code_in(data, q.y, q.y_pos)
    return float(product[coords[q.y] == y_code].sum())


def _pse_plugin(data, graph, q, sel, smoothing=0.0) -> EffectEstimate:
    term = _labeled_g_prob(data, graph, q, sel.edges, smoothing)
    baseline = _labeled_g_prob(data, graph, q, frozenset(), smoothing)
    assumptions = [
        "markovian observability of the outcome's ancestry",
        "no recanting witness for the selected paths",
        "g-formula over edge-labeled worlds",
    ]
    if smoothing:
        assumptions.append(f"laplace smoothing alpha={smoothing}")
    return EffectEstimate(
        METRIC_PSE, BACKEND_PLUGIN, term - baseline, tuple(assumptions)
    )


# --- bootstrap ---

def _replicate_rng(seed, index) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}|bootstrap|{index}".encode()).digest()
    key = np.frombuffer(digest[:16], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def bootstrap_ci(metric_fn, data: Dataset, replicates=1000, level=0.95, seed=0) -> ConfidenceInterval:
    """Percentile bootstrap over row resamples.

    metric_fn: Dataset -> float (or EffectEstimate).  Replicates whose
    resample violates a precondition (empty stratum, positivity) are
    discarded and tallied; more than 20% discarded is an error.
    """
    if replicates < 100:
        raise ParameterRangeError("bootstrap needs at least 100 replicates")
    if not 0.0 < level < 1.0:
        raise ParameterRangeError("level must be inside (0, 1)")
    if data.n < 1:
        raise EmptyStratumError("cannot resample an empty dataset")
    values = []
    degenerate = 0
    for r in range(replicates):
        idx = _replicate_rng(seed, r).integers(0, data.n, size=data.n)
        try:
            out = metric_fn(data.take(idx))
        except (EmptyStratumError, PositivityError, NotIdentifiableError):
            degenerate += 1
            continue
        values.append(out.value if isinstance(out, EffectEstimate) else float(out))
    if degenerate > 0.2 * replicates:
        raise TooManyDegenerateReplicatesError(
            f"{degenerate} of {replicates} bootstrap replicates were degenerate"
        )
    tail = (1.0 - level) / 2.0
    lower, upper = np.quantile(np.asarray(values), [tail, 1.0 - tail])
    return ConfidenceInterval(
        lower=float(lower), upper=float(upper), level=level,
        replicates=replicates, seed=seed, degenerate=degenerate,
    )
