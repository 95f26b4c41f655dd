"""Structural causal models with exact query semantics.

Discrete models pair every node with a finite-support exogenous variable and a
total deterministic mechanism table; exogenous variables are mutually
independent, so every model is Markovian (causally sufficient) by
construction.  Exact queries enumerate the full exogenous product grid
(budget-capped) in vectorized chunks.  Linear-Gaussian models support analytic
mean propagation and path-tracing only.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .dataio import CATEGORICAL, NUMERIC, ColumnType, Dataset
from .errors import (
    BudgetExceededError,
    DomainError,
    ImpossibleObservationError,
    InvalidPathSelectionError,
    ModelError,
    OverlapError,
    ParameterRangeError,
    UnknownNodeError,
    UnsupportedModelError,
)
from .graph import CausalGraph, causal_paths

ENUMERATION_BUDGET = 10_000_000
_CHUNK = 1 << 18
_PROB_TOL = 1e-9


@dataclass(frozen=True)
class Exogenous:
    """Finite-support noise term attached to one endogenous node."""

    name: str
    support: tuple
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.support) != len(self.probs) or not self.support:
            raise ParameterRangeError(f"{self.name}: support and probs must align")
        if len(set(self.support)) != len(self.support):
            raise ParameterRangeError(f"{self.name}: support values must be distinct")
        if any(p < 0 for p in self.probs):
            raise ParameterRangeError(f"{self.name}: negative probability")
        if abs(sum(self.probs) - 1.0) > _PROB_TOL:
            raise ParameterRangeError(
                f"{self.name}: probabilities sum to {sum(self.probs)!r}, not 1"
            )


@dataclass(frozen=True)
class Intervention:
    """do() assignment: node -> fixed value, canonically ordered."""

    assignments: tuple

    def __post_init__(self):
        pairs = tuple(sorted(dict(self.assignments).items()))
        if len(dict(self.assignments)) != len(tuple(self.assignments)):
            raise OverlapError("intervention assigns a node twice")
        object.__setattr__(self, "assignments", pairs)

    @classmethod
    def of(cls, mapping=(), **values) -> "Intervention":
        return cls(tuple(dict(mapping, **values).items()))

    def as_dict(self) -> dict:
        return dict(self.assignments)

    @property
    def nodes(self):
        return tuple(n for n, _ in self.assignments)


def _as_do(do) -> dict:
    if do is None:
        return {}
    if isinstance(do, Intervention):
        return do.as_dict()
    return Intervention.of(do).as_dict()


@dataclass(frozen=True)
class PathSelection:
    """Edge set pi marking the causal paths of interest from a to y."""

    a: str
    y: str
    edges: frozenset

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))

    @classmethod
    def all_causal(cls, graph: CausalGraph, a, y) -> "PathSelection":
        edges = set()
        for path in causal_paths(graph, a, y):
            edges.update(path.edges)
        return cls(a, y, frozenset(edges))

    @classmethod
    def none(cls, a, y) -> "PathSelection":
        return cls(a, y, frozenset())

    def validate_on(self, graph: CausalGraph):
        allowed = set()
        for path in causal_paths(graph, self.a, self.y):
            allowed.update(path.edges)
        stray = sorted(self.edges - allowed)
        if stray:
            shown = ", ".join(f"{c}->{e}" for c, e in stray)
            raise InvalidPathSelectionError(
                f"edges not on any causal path {self.a} to {self.y}: {shown}"
            )


class DiscreteScm:
    """Finite structural causal model with explicit mechanism tables.

    domains: node -> ordered value tuple.
    exogenous: node -> Exogenous.
    mechanisms: node -> {(parent values..., exo value): node value}, parents
    in the graph's sorted parent order; every combination must be present.
    """

    def __init__(self, graph: CausalGraph, domains, exogenous, mechanisms):
        self.graph = graph
        self.domains = {n: tuple(v) for n, v in domains.items()}
        self.exogenous = dict(exogenous)
        missing = [n for n in graph.nodes if n not in self.domains]
        if missing or set(self.domains) - set(graph.nodes):
            raise ModelError("domains must cover exactly the graph nodes")
        if set(self.exogenous) != set(graph.nodes) or set(mechanisms) != set(graph.nodes):
            raise ModelError("exogenous terms and mechanisms must cover exactly the graph nodes")
        for node, dom in self.domains.items():
            if not dom or len(set(dom)) != len(dom):
                raise ModelError(f"{node}: domain must be non-empty and distinct")

        budget = math.prod(len(self.exogenous[n].support) for n in graph.nodes)
        if budget > ENUMERATION_BUDGET:
            raise BudgetExceededError(
                f"exogenous grid has {budget} cells, budget is {ENUMERATION_BUDGET}"
            )
        self.grid_size = budget

        self._code = {n: {v: i for i, v in enumerate(self.domains[n])} for n in graph.nodes}
        self._tables = {}
        for node in graph.nodes:
            self._tables[node] = self._compile(node, dict(mechanisms[node]))

        order = graph.nodes
        sizes = [len(self.exogenous[n].support) for n in order]
        strides, acc = {}, 1
        for name, size in zip(reversed(order), reversed(sizes)):
            strides[name] = acc
            acc *= size
        self._exo_sizes = dict(zip(order, sizes))
        self._exo_strides = strides
        self._exo_probs = {n: np.asarray(self.exogenous[n].probs) for n in order}

    def _compile(self, node, table) -> np.ndarray:
        parents = self.graph.parents(node)
        exo = self.exogenous[node]
        shape = tuple(len(self.domains[p]) for p in parents) + (len(exo.support),)
        compiled = np.full(shape, -1, dtype=np.int64)
        expected = math.prod(shape)
        if len(table) != expected:
            raise ModelError(
                f"{node}: mechanism has {len(table)} entries, totality needs {expected}"
            )
        ucode = {u: i for i, u in enumerate(exo.support)}
        for key, value in table.items():
            key = tuple(key) if isinstance(key, tuple) else (key,)
            if len(key) != len(parents) + 1:
                raise ModelError(f"{node}: mechanism key {key!r} has wrong arity")
            *pvals, uval = key
            try:
                idx = tuple(self._code[p][v] for p, v in zip(parents, pvals))
                uidx = ucode[uval]
            except KeyError as err:
                raise ModelError(f"{node}: mechanism key {key!r} uses unknown value {err}") from None
            if value not in self._code[node]:
                raise ModelError(f"{node}: mechanism output {value!r} outside domain")
            compiled[idx + (uidx,)] = self._code[node][value]
        if (compiled < 0).any():
            raise ModelError(f"{node}: mechanism table is not total")
        return compiled

    # --- encoding helpers ---

    def code_of(self, node, value) -> int:
        if node not in self._code:
            raise UnknownNodeError(f"unknown node {node!r}")
        try:
            return self._code[node][value]
        except KeyError:
            raise DomainError(f"{node}: value {value!r} outside domain") from None

    def encode_event(self, event) -> dict:
        return {n: self.code_of(n, v) for n, v in dict(event).items()}

    # --- exogenous grid ---

    def _chunks(self, chunk=_CHUNK):
        for start in range(0, self.grid_size, chunk):
            idx = np.arange(start, min(start + chunk, self.grid_size), dtype=np.int64)
            exo = {
                n: (idx // self._exo_strides[n]) % self._exo_sizes[n]
                for n in self.graph.nodes
            }
            weights = np.ones(len(idx))
            for n in self.graph.nodes:
                weights *= self._exo_probs[n][exo[n]]
            yield exo, weights

    def _propagate(self, exo, fixed=None):
        """Codes for every node given per-point exogenous codes.

        fixed: node -> scalar code or per-point code array, bypassing the
        node's mechanism (the do-operator).
        """
        fixed = fixed or {}
        values = {}
        for node in self.graph.topological_order:
            if node in fixed:
                given = fixed[node]
                if np.isscalar(given):
                    given = np.full(len(exo[node]), given, dtype=np.int64)
                values[node] = given
            else:
                parents = self.graph.parents(node)
                key = tuple(values[p] for p in parents) + (exo[node],)
                values[node] = self._tables[node][key]
        return values


def _event_mask(values, event_codes):
    mask = None
    for node, code in event_codes.items():
        hit = values[node] == code
        mask = hit if mask is None else (mask & hit)
    return mask


class JointDistribution:
    """Dense exact distribution over the endogenous variables."""

    def __init__(self, nodes, domains, table):
        self.nodes = tuple(nodes)
        self.domains = {n: tuple(domains[n]) for n in self.nodes}
        self.table = table
        total = float(table.sum())
        if abs(total - 1.0) > _PROB_TOL:
            raise ModelError(f"joint probabilities sum to {total!r}, not 1")
        self._axis = {n: i for i, n in enumerate(self.nodes)}
        self._code = {n: {v: i for i, v in enumerate(self.domains[n])} for n in self.nodes}

    def prob(self, event) -> float:
        """P(event) for a node->value dict (marginalizing the rest)."""
        view = self.table
        index = [slice(None)] * view.ndim
        for node, value in dict(event).items():
            if node not in self._axis:
                raise UnknownNodeError(f"unknown node {node!r}")
            try:
                index[self._axis[node]] = self._code[node][value]
            except KeyError:
                raise DomainError(f"{node}: value {value!r} outside domain") from None
        return float(view[tuple(index)].sum())

    def conditional_prob(self, event, given) -> float:
        given = dict(given)
        den = self.prob(given)
        if den <= 0.0:
            raise ZeroDivisionError("conditioning event has probability zero")
        return self.prob({**given, **dict(event)}) / den

    def marginal(self, names) -> "JointDistribution":
        names = tuple(names)
        drop = tuple(self._axis[n] for n in self.nodes if n not in names)
        table = self.table.sum(axis=drop) if drop else self.table
        kept = tuple(n for n in self.nodes if n in names)
        # Reorder axes to the requested order.
        perm = tuple(kept.index(n) for n in names)
        return JointDistribution(names, self.domains, np.transpose(table, perm))

    def dependence(self, x, y, given=()) -> float:
        """Max total-variation distance between P(x | y, given) slices.

        Zero iff x is independent of y conditional on ``given``; strata of
        zero probability are skipped.
        """
        given = tuple(given)
        if x == y or x in given or y in given:
            raise OverlapError("x, y, given must be disjoint")
        sub = self.marginal((x, y) + given)
        table = sub.table
        worst = 0.0
        z_shapes = table.shape[2:]
        for z_idx in itertools.product(*(range(s) for s in z_shapes)):
            block = table[(slice(None), slice(None)) + z_idx]
            col_mass = block.sum(axis=0)
            conds = [block[:, j] / col_mass[j] for j in range(block.shape[1]) if col_mass[j] > 0]
            for d1, d2 in itertools.combinations(conds, 2):
                worst = max(worst, 0.5 * float(np.abs(d1 - d2).sum()))
        return worst


def joint_distribution(scm: DiscreteScm, do=None) -> JointDistribution:
    """Exact joint over the endogenous nodes, optionally under do()."""
    _require_discrete(scm)
    fixed = scm.encode_event(_as_do(do))
    shape = tuple(len(scm.domains[n]) for n in scm.graph.nodes)
    flat = np.zeros(math.prod(shape))
    for exo, weights in scm._chunks():
        values = scm._propagate(exo, fixed)
        cells = np.ravel_multi_index(tuple(values[n] for n in scm.graph.nodes), shape)
        flat += np.bincount(cells, weights=weights, minlength=flat.size)
    return JointDistribution(scm.graph.nodes, scm.domains, flat.reshape(shape))


def interventional_prob(scm: DiscreteScm, do, event) -> float:
    """P(event | do(...)) by exact enumeration."""
    _require_discrete(scm)
    do = _as_do(do)
    event = dict(event)
    clash = set(do) & set(event)
    if clash:
        raise OverlapError(f"event nodes also intervened: {sorted(clash)}")
    fixed = scm.encode_event(do)
    event_codes = scm.encode_event(event)
    total = 0.0
    for exo, weights in scm._chunks():
        values = scm._propagate(exo, fixed)
        total += float(weights[_event_mask(values, event_codes)].sum())
    return total


def counterfactual_prob(scm, outcome, primary, references=()) -> float:
    """P(outcome in the primary world) for a nested counterfactual.

    primary: the main intervention (e.g. A=a1).  references: ordered
    (target nodes, intervention) pairs; each target set is read off its own
    world per exogenous configuration and frozen into the primary world,
    later pairs overriding earlier ones.  P(y_{a1, Z_{a0}}) is expressed as
    primary={A: a1}, references=[(Z, {A: a0})].
    """
    _require_discrete(scm)
    primary = scm.encode_event(_as_do(primary))
    outcome_codes = scm.encode_event(dict(outcome))
    ref_plans = []
    for targets, world_do in references:
        targets = tuple(targets)
        for t in targets:
            if t not in scm.domains:
                raise UnknownNodeError(f"unknown node {t!r}")
        ref_plans.append((targets, scm.encode_event(_as_do(world_do))))
    total = 0.0
    for exo, weights in scm._chunks():
        fixed = dict(primary)
        for targets, world_fixed in ref_plans:
            world = scm._propagate(exo, world_fixed)
            for t in targets:
                fixed[t] = world[t]
        values = scm._propagate(exo, fixed)
        total += float(weights[_event_mask(values, outcome_codes)].sum())
    return total


def path_specific_prob(scm, sel: PathSelection, a_primary, a_reference, outcome) -> float:
    """P(outcome in the world where a_primary is transmitted only along pi).

    Every node takes two values per exogenous configuration: the reference
    value under do(A=a_reference) and the pi value, whose parents contribute
    their pi value across edges in sel.edges and their reference value
    elsewhere; the outcome is read in the pi world.
    """
    _require_discrete(scm)
    sel.validate_on(scm.graph)
    a_node = sel.a
    a1 = scm.code_of(a_node, a_primary)
    a0 = scm.code_of(a_node, a_reference)
    outcome_codes = scm.encode_event(dict(outcome))
    pi = sel.edges
    total = 0.0
    for exo, weights in scm._chunks():
        npts = len(weights)
        ref, piv = {}, {}
        for node in scm.graph.topological_order:
            if node == a_node:
                ref[node] = np.full(npts, a0, dtype=np.int64)
                piv[node] = np.full(npts, a1, dtype=np.int64)
                continue
            parents = scm.graph.parents(node)
            u = exo[node]
            key_ref = tuple(ref[p] for p in parents) + (u,)
            key_pi = tuple(
                (piv[p] if (p, node) in pi else ref[p]) for p in parents
            ) + (u,)
            table = scm._tables[node]
            ref[node] = table[key_ref]
            piv[node] = table[key_pi]
        total += float(weights[_event_mask(piv, outcome_codes)].sum())
    return total


def unit_counterfactual(scm, observation, do, outcome) -> dict:
    """Posterior of ``outcome`` under do(), given one fully observed row.

    Abduction conditions the exogenous grid on the observation, action applies
    the intervention, prediction propagates; the result maps every outcome
    domain value to its posterior probability.
    """
    _require_discrete(scm)
    observation = dict(observation)
    missing = sorted(set(scm.graph.nodes) - set(observation))
    if missing:
        raise ModelError(f"observation must cover every endogenous node; missing {missing}")
    obs_codes = scm.encode_event(observation)
    do_codes = scm.encode_event(_as_do(do))
    if outcome not in scm._code:
        raise UnknownNodeError(f"unknown node {outcome!r}")
    k = len(scm.domains[outcome])
    mass = np.zeros(k)
    norm = 0.0
    for exo, weights in scm._chunks():
        actual = scm._propagate(exo)
        mask = _event_mask(actual, obs_codes) & (weights > 0)
        if not mask.any():
            continue
        norm += float(weights[mask].sum())
        sub_exo = {n: exo[n][mask] for n in scm.graph.nodes}
        twin = scm._propagate(sub_exo, do_codes)
        mass += np.bincount(twin[outcome], weights=weights[mask], minlength=k)
    if norm <= 0.0:
        raise ImpossibleObservationError("observation has probability zero")
    return {v: float(mass[i] / norm) for i, v in enumerate(scm.domains[outcome])}


def _require_discrete(scm):
    if not isinstance(scm, DiscreteScm):
        raise UnsupportedModelError(
            "exact counterfactual semantics need explicit structural functions; "
            f"{type(scm).__name__} does not provide them"
        )


# --- mechanism construction helpers ---

def bernoulli_mechanism(parent_domains, prob_of):
    """Finite-noise representation of a binary node with P(node=1 | parents).

    parent_domains: ordered list of parent value tuples (sorted parent
    order).  prob_of: callable taking one value per parent.  Returns
    (support, probs, mechanism table) where the exogenous variable indexes
    the interval partition of [0, 1) at the distinct probability cut points.
    """
    combos = list(itertools.product(*parent_domains))
    p_of = {}
    for combo in combos:
        p = float(prob_of(*combo))
        if not 0.0 <= p <= 1.0:
            raise ParameterRangeError(f"probability {p!r} at parents {combo} outside [0, 1]")
        p_of[combo] = p
    cuts = sorted({0.0, 1.0, *p_of.values()})
    support = tuple(range(len(cuts) - 1))
    probs = tuple(cuts[j + 1] - cuts[j] for j in support)
    rank = {c: j for j, c in enumerate(cuts)}
    table = {}
    for combo, p in p_of.items():
        for j in support:
            table[combo + (j,)] = 1 if j < rank[p] else 0
    return support, probs, table


def constant_mechanism(parent_domains, value_of):
    """Deterministic node: exogenous is a single dummy point."""
    table = {}
    for combo in itertools.product(*parent_domains):
        table[combo + (0,)] = value_of(*combo)
    return (0,), (1.0,), table


# --- sampling ---

def _node_rng(seed, node) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}|{node}".encode()).digest()
    key = np.frombuffer(digest[:16], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample(scm, n, seed) -> Dataset:
    """n i.i.d. rows; bit-reproducible, each node keyed by (seed, node).

    Row i of every column is a pure function of (seed, node, i), so the
    draw order never affects values.
    """
    if n < 1:
        raise ParameterRangeError("n must be at least 1")
    if isinstance(scm, DiscreteScm):
        return _sample_discrete(scm, int(n), seed)
    if isinstance(scm, LinearGaussianScm):
        return _sample_linear(scm, int(n), seed)
    raise UnsupportedModelError(f"cannot sample {type(scm).__name__}")


def _sample_discrete(scm: DiscreteScm, n, seed) -> Dataset:
    exo = {}
    for node in scm.graph.nodes:
        cum = np.cumsum(scm._exo_probs[node])
        u = _node_rng(seed, node).random(n)
        exo[node] = np.searchsorted(cum, u, side="right").clip(max=len(cum) - 1)
    values = scm._propagate(exo)
    coltypes = {
        node: ColumnType(CATEGORICAL, scm.domains[node]) for node in scm.graph.nodes
    }
    return Dataset(scm.graph.nodes, coltypes, values, validate=False)


class LinearGaussianScm:
    """Each node is a linear sum of its parents plus Gaussian noise; root
    nodes may instead be Bernoulli(p) binary (a sensitive attribute in {0,1}).
    """

    def __init__(self, graph: CausalGraph, intercepts, coefficients, noise_var, bernoulli=None):
        self.graph = graph
        self.bernoulli = dict(bernoulli or {})
        self.intercepts = {}
        self.coefficients = {}
        self.noise_var = {}
        for node, p in self.bernoulli.items():
            if node not in graph._parents:
                raise UnknownNodeError(f"unknown node {node!r}")
            if graph.parents(node):
                raise ModelError(f"{node}: bernoulli nodes must be roots")
            if not 0.0 <= float(p) <= 1.0:
                raise ParameterRangeError(f"{node}: bernoulli p outside [0, 1]")
            self.bernoulli[node] = float(p)
        for node in graph.nodes:
            if node in self.bernoulli:
                continue
            coeffs = dict(coefficients.get(node, {}))
            if set(coeffs) != set(graph.parents(node)):
                raise ModelError(f"{node}: coefficients must cover exactly the parents")
            var = float(noise_var.get(node, 0.0))
            if not math.isfinite(var) or var < 0:
                raise ParameterRangeError(f"{node}: noise variance must be finite and >= 0")
            self.intercepts[node] = float(intercepts.get(node, 0.0))
            self.coefficients[node] = {p: float(c) for p, c in coeffs.items()}
            self.noise_var[node] = var


def interventional_mean(scm: LinearGaussianScm, do, node) -> float:
    """E[node | do(...)] by analytic mean propagation."""
    do = _as_do(do)
    means = {}
    for name in scm.graph.topological_order:
        if name in do:
            means[name] = float(do[name])
        elif name in scm.bernoulli:
            means[name] = scm.bernoulli[name]
        else:
            means[name] = scm.intercepts[name] + sum(
                c * means[p] for p, c in scm.coefficients[name].items()
            )
    if node not in means:
        raise UnknownNodeError(f"unknown node {node!r}")
    return means[node]


@dataclass(frozen=True)
class LinearEffects:
    total: float
    direct: float
    per_path: tuple


def linear_path_effects(scm: LinearGaussianScm, a, y) -> LinearEffects:
    """Path-tracing decomposition: per-path products of edge coefficients.

    For binary a in {0,1} these equal the corresponding differences in E[y].
    """
    g = scm.graph
    paths = causal_paths(g, a, y)

    def coef(cause, effect):
        return scm.coefficients[effect][cause]

    per_path = []
    for path in paths:
        product = 1.0
        for cause, effect in path.edges:
            product *= coef(cause, effect)
        per_path.append((path, product))
    direct = coef(a, y) if g.has_edge(a, y) else 0.0
    total = sum(v for _, v in per_path)
    return LinearEffects(total=total, direct=direct, per_path=tuple(per_path))


def _sample_linear(scm: LinearGaussianScm, n, seed) -> Dataset:
    values = {}
    for node in scm.graph.topological_order:
        gen = _node_rng(seed, node)
        u = gen.random(n)
        if node in scm.bernoulli:
            values[node] = (u < scm.bernoulli[node]).astype(np.int64)
        else:
            base = scm.intercepts[node] + sum(
                c * values[p] for p, c in scm.coefficients[node].items()
            )
            sd = math.sqrt(scm.noise_var[node])
            noise = ndtri(np.clip(u, 2.0 ** -53, 1.0 - 2.0 ** -53)) * sd if sd else 0.0
            values[node] = np.asarray(base, dtype=np.float64) + noise
    coltypes = {}
    for node in scm.graph.nodes:
        if node in scm.bernoulli:
            coltypes[node] = ColumnType(CATEGORICAL, (0, 1))
        else:
            coltypes[node] = ColumnType(NUMERIC)
            values[node] = np.broadcast_to(values[node], (n,))
    return Dataset(scm.graph.nodes, coltypes, values, validate=False)
