"""Causal DAGs and the structural queries the rest of the toolkit builds on.

Graphs are small, expert-specified objects (tens of nodes at most), so path
enumeration is exhaustive and d-separation is decided path by path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (
    CycleError,
    DuplicateEdgeError,
    OverlapError,
    PathExplosionError,
    UnknownNodeError,
)

PATH_CAP = 10_000

PATH_KIND_CAUSAL = "causal"
PATH_KIND_BACKDOOR = "backdoor"
PATH_KIND_OTHER = "other"

ROLE_EXPLAINING = "explaining"
ROLE_PROXY = "proxy"
ROLE_NEUTRAL = "neutral"


@dataclass(frozen=True)
class CausalGraph:
    """Directed acyclic graph over named variables.

    Nodes are identified by name; two graphs compare equal when their sorted
    node, edge, and observability data coincide.  Instances are immutable and
    safe to share across threads.
    """

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    unobserved: frozenset[str] = frozenset()

    def __post_init__(self):
        nodes = tuple(sorted(set(self.nodes)))
        seen = set()
        for edge in self.edges:
            cause, effect = edge
            if cause not in nodes or effect not in nodes:
                raise UnknownNodeError(f"edge {cause}->{effect} references an undeclared node")
            if cause == effect:
                raise CycleError([cause, effect])
            if edge in seen:
                raise DuplicateEdgeError(f"duplicate edge {cause}->{effect}")
            seen.add(edge)
        for name in self.unobserved:
            if name not in nodes:
                raise UnknownNodeError(f"unobserved flag on undeclared node {name}")
        edges = tuple(sorted(seen))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "unobserved", frozenset(self.unobserved))

        parents = {n: [] for n in nodes}
        children = {n: [] for n in nodes}
        for cause, effect in edges:
            parents[effect].append(cause)
            children[cause].append(effect)
        object.__setattr__(self, "_parents", {n: tuple(sorted(v)) for n, v in parents.items()})
        object.__setattr__(self, "_children", {n: tuple(sorted(v)) for n, v in children.items()})
        object.__setattr__(self, "_topo", _topological_order(nodes, self._parents, self._children))

    # --- structure accessors ---

    def parents(self, node: str) -> tuple[str, ...]:
        self._require(node)
        return self._parents[node]

    def children(self, node: str) -> tuple[str, ...]:
        self._require(node)
        return self._children[node]

    @property
    def topological_order(self) -> tuple[str, ...]:
        return self._topo

    @property
    def observed(self) -> tuple[str, ...]:
        return tuple(n for n in self.nodes if n not in self.unobserved)

    def is_observed(self, node: str) -> bool:
        self._require(node)
        return node not in self.unobserved

    def has_edge(self, cause: str, effect: str) -> bool:
        return (cause, effect) in set(self.edges)

    def descendants(self, node: str) -> frozenset[str]:
        """Strict descendants (node itself excluded)."""
        self._require(node)
        out, frontier = set(), [node]
        while frontier:
            for child in self._children[frontier.pop()]:
                if child not in out:
                    out.add(child)
                    frontier.append(child)
        return frozenset(out)

    def ancestors(self, node: str) -> frozenset[str]:
        self._require(node)
        out, frontier = set(), [node]
        while frontier:
            for parent in self._parents[frontier.pop()]:
                if parent not in out:
                    out.add(parent)
                    frontier.append(parent)
        return frozenset(out)

    def without_outgoing(self, node: str) -> "CausalGraph":
        """Copy of the graph with every edge leaving ``node`` removed."""
        self._require(node)
        kept = tuple(e for e in self.edges if e[0] != node)
        return CausalGraph(self.nodes, kept, self.unobserved)

    def without_outgoing_all(self, nodes) -> "CausalGraph":
        drop = set(nodes)
        for n in drop:
            self._require(n)
        kept = tuple(e for e in self.edges if e[0] not in drop)
        return CausalGraph(self.nodes, kept, self.unobserved)

    def _require(self, node: str):
        if node not in self._parents:
            raise UnknownNodeError(f"unknown node {node!r}")


def _topological_order(nodes, parents, children) -> tuple[str, ...]:
    indegree = {n: len(parents[n]) for n in nodes}
    ready = sorted(n for n in nodes if indegree[n] == 0)
    order = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        changed = False
        for child in children[node]:
            indegree[child] -= 1
            if indegree[child] == 0:
                ready.append(child)
                changed = True
        if changed:
            ready.sort()
    if len(order) != len(nodes):
        leftover = set(nodes) - set(order)
        raise CycleError(_find_cycle(leftover, parents))
    return tuple(order)


def _find_cycle(leftover, parents) -> list[str]:
    # Every unprocessed node keeps an unprocessed parent, so walking backward
    # must revisit a node; the revisited segment is a cycle.
    seen, trail, node = {}, [], sorted(leftover)[0]
    while node not in seen:
        seen[node] = len(trail)
        trail.append(node)
        node = next(p for p in parents[node] if p in leftover)
    cycle = trail[seen[node]:] + [node]
    cycle.reverse()
    return cycle


def build_graph(nodes, edges, unobserved=()) -> CausalGraph:
    """Validate and build a graph with canonical (lexicographic) node order."""
    return CausalGraph(tuple(nodes), tuple((c, e) for c, e in edges), frozenset(unobserved))


@dataclass(frozen=True)
class Path:
    """A simple path with one direction flag per step.

    ``forward[i]`` is True when the edge runs nodes[i] -> nodes[i+1].
    """

    nodes: tuple[str, ...]
    forward: tuple[bool, ...]

    def __post_init__(self):
        if len(self.nodes) < 2 or len(self.forward) != len(self.nodes) - 1:
            raise ValueError("path needs >= 2 nodes and one flag per step")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("path repeats a node")

    @property
    def kind(self) -> str:
        if all(self.forward):
            return PATH_KIND_CAUSAL
        if not self.forward[0]:
            return PATH_KIND_BACKDOOR
        return PATH_KIND_OTHER

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        out = []
        for i, fwd in enumerate(self.forward):
            a, b = self.nodes[i], self.nodes[i + 1]
            out.append((a, b) if fwd else (b, a))
        return tuple(out)

    def is_collider_at(self, index: int) -> bool:
        """Whether the interior node at ``index`` has both steps pointing in."""
        if index <= 0 or index >= len(self.nodes) - 1:
            return False
        return self.forward[index - 1] and not self.forward[index]

    def render(self) -> str:
        parts = [self.nodes[0]]
        for i, fwd in enumerate(self.forward):
            parts.append(" -> " if fwd else " <- ")
            parts.append(self.nodes[i + 1])
        return "".join(parts)


@dataclass(frozen=True)
class AdjustmentSet:
    """A set of observed nodes certified to block confounding paths."""

    nodes: tuple[str, ...]
    criterion: str = "backdoor"


@dataclass(frozen=True)
class IndependenceStatement:
    """X independent of Y given Z, as implied by the graph."""

    x: str
    y: str
    given: tuple[str, ...]

    def __post_init__(self):
        if self.x == self.y:
            raise OverlapError("statement endpoints must differ")
        if self.x in self.given or self.y in self.given:
            raise OverlapError("conditioning set must exclude the endpoints")

    def render(self) -> str:
        z = "{" + ", ".join(self.given) + "}"
        return f"{self.x} _||_ {self.y} | {z}"


def all_simple_paths(g: CausalGraph, a: str, y: str, cap: int = PATH_CAP) -> list[Path]:
    """Every simple path between ``a`` and ``y`` in the skeleton, any direction.

    Deterministic: sorted lexicographically by node sequence.  Raises
    PathExplosionError past ``cap`` paths.
    """
    g._require(a)
    g._require(y)
    neighbors = {n: sorted(set(g.parents(n)) | set(g.children(n))) for n in g.nodes}
    edge_set = set(g.edges)
    found: list[Path] = []

    def walk(node, trail, flags):
        for nxt in neighbors[node]:
            if nxt in trail:
                continue
            fwd = (node, nxt) in edge_set
            if nxt == y:
                found.append(Path(tuple(trail + [nxt]), tuple(flags + [fwd])))
                if len(found) > cap:
                    raise PathExplosionError(f"more than {cap} paths between {a} and {y}")
            else:
                walk(nxt, trail + [nxt], flags + [fwd])

    walk(a, [a], [])
    found.sort(key=lambda p: p.nodes)
    return found


def causal_paths(g: CausalGraph, a: str, y: str) -> list[Path]:
    """All directed paths a -> ... -> y, sorted by node sequence."""
    return [p for p in all_simple_paths(g, a, y) if p.kind == PATH_KIND_CAUSAL]


def backdoor_paths(g: CausalGraph, a: str, y: str) -> list[Path]:
    """All paths whose first step enters ``a``, sorted by node sequence."""
    return [p for p in all_simple_paths(g, a, y) if p.kind == PATH_KIND_BACKDOOR]


def _as_set(value) -> frozenset[str]:
    if isinstance(value, str):
        return frozenset([value])
    return frozenset(value)


def _path_open(g: CausalGraph, path: Path, given: frozenset[str]) -> bool:
    for i in range(1, len(path.nodes) - 1):
        node = path.nodes[i]
        if path.is_collider_at(i):
            if node not in given and not (g.descendants(node) & given):
                return False
        elif node in given:
            return False
    return True


def d_separated(g: CausalGraph, x, y, z=()) -> bool:
    """Whether every path between the node sets ``x`` and ``y`` is blocked by ``z``.

    Chains and forks are blocked by conditioning on the middle node; a collider
    blocks unless the collider or one of its descendants is conditioned on.
    """
    xs, ys, zs = _as_set(x), _as_set(y), _as_set(z)
    for name in xs | ys | zs:
        g._require(name)
    if xs & ys or xs & zs or ys & zs:
        raise OverlapError("x, y, z must be pairwise disjoint")
    for a in sorted(xs):
        for b in sorted(ys):
            for path in all_simple_paths(g, a, b):
                if _path_open(g, path, zs):
                    return False
    return True


def minimal_adjustment_set(g: CausalGraph, a: str, y: str) -> AdjustmentSet | None:
    """Smallest observed set satisfying the backdoor criterion for (a, y).

    Exhaustive search in increasing cardinality, ties broken lexicographically;
    None when no observed subset works.
    """
    g._require(a)
    g._require(y)
    forbidden = g.descendants(a) | {a, y}
    candidates = sorted(n for n in g.observed if n not in forbidden)
    pruned = g.without_outgoing(a)
    for size in range(len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            if d_separated(pruned, a, y, combo):
                return AdjustmentSet(nodes=combo)
    return None


def implied_independencies(g: CausalGraph) -> list[IndependenceStatement]:
    """Local-Markov statements: each node vs. each non-descendant given parents.

    Statements are canonicalized (endpoints sorted), deduplicated, and returned
    in a deterministic order.
    """
    out = {}
    for node in g.nodes:
        blocked = g.descendants(node) | set(g.parents(node)) | {node}
        given = g.parents(node)
        for other in g.nodes:
            if other in blocked:
                continue
            x, y = sorted((node, other))
            key = (x, y, given)
            out.setdefault(key, IndependenceStatement(x, y, given))
    return [out[k] for k in sorted(out)]


LABEL_DIRECT = "direct"
LABEL_INDIRECT_EXPLAINING = "indirect-explaining"
LABEL_INDIRECT_PROXY = "indirect-proxy"
LABEL_INDIRECT_NEUTRAL = "indirect-neutral"
LABEL_BACKDOOR = "backdoor"
LABEL_OTHER = "other"


@dataclass(frozen=True)
class ClassifiedPath:
    path: Path
    label: str
    mediator_roles: tuple[tuple[str, str], ...] = field(default_factory=tuple)


def classify_paths(g: CausalGraph, a: str, y: str, role_tags=None) -> list[ClassifiedPath]:
    """Label every simple path between a and y for audit reporting.

    Causal paths are 'direct' or 'indirect-*' (proxy dominates explaining,
    untagged mediators count as neutral); non-causal paths keep their
    structural kind ('backdoor' / 'other').
    """
    role_tags = dict(role_tags or {})
    for name, role in role_tags.items():
        g._require(name)
        if role not in (ROLE_EXPLAINING, ROLE_PROXY, ROLE_NEUTRAL):
            raise ValueError(f"unknown role {role!r} for node {name}")
    out = []
    for path in all_simple_paths(g, a, y):
        if path.kind == PATH_KIND_CAUSAL:
            mediators = path.nodes[1:-1]
            roles = tuple((m, role_tags.get(m, ROLE_NEUTRAL)) for m in mediators)
            if not mediators:
                label = LABEL_DIRECT
            elif any(r == ROLE_PROXY for _, r in roles):
                label = LABEL_INDIRECT_PROXY
            elif all(r == ROLE_EXPLAINING for _, r in roles):
                label = LABEL_INDIRECT_EXPLAINING
            else:
                label = LABEL_INDIRECT_NEUTRAL
            out.append(ClassifiedPath(path, label, roles))
        elif path.kind == PATH_KIND_BACKDOOR:
            out.append(ClassifiedPath(path, LABEL_BACKDOOR))
        else:
            out.append(ClassifiedPath(path, LABEL_OTHER))
    return out
