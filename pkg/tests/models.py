"""Shared test plumbing: one model description, two backends.

``make`` builds the package's DiscreteScm and the plain-dict view consumed by
the brute-force oracle from the same description, so cross-checks exercise
identical parameters through two unrelated code paths.
"""

from faircause.graph import build_graph
from faircause.scm import DiscreteScm, Exogenous


def make(nodes, edges, domains, exo, mech, unobserved=()):
    """Return (DiscreteScm, oracle description dict).

    exo: node -> (support, probs); mech: node -> {(parent values..., u): value}
    with parents in sorted-name order.
    """
    graph = build_graph(nodes, edges, unobserved)
    scm = DiscreteScm(
        graph,
        domains,
        {n: Exogenous(f"U_{n}", *exo[n]) for n in graph.nodes},
        mech,
    )
    oracle_funcs = {}
    for node in graph.nodes:
        parents = graph.parents(node)
        table = {
            (k if isinstance(k, tuple) else (k,)): v for k, v in mech[node].items()
        }

        def fn(pa, u, table=table, parents=parents):
            return table[tuple(pa[p] for p in parents) + (u,)]

        oracle_funcs[node] = fn
    oracle_scm = {
        "order": list(graph.topological_order),
        "parents": {n: graph.parents(n) for n in graph.nodes},
        "exo": {n: (tuple(exo[n][0]), tuple(exo[n][1])) for n in graph.nodes},
        "func": oracle_funcs,
    }
    return scm, oracle_scm


def oracle_view(scm):
    """Oracle description for an already-built DiscreteScm.

    Mechanism lookups go through the compiled tables, but enumeration,
    propagation, and weighting stay entirely on the oracle's side.
    """
    order = list(scm.graph.topological_order)
    parents = {n: tuple(scm.graph.parents(n)) for n in order}

    def make_fn(node):
        table = scm._tables[node]
        ps = parents[node]
        domains = scm.domains
        ucode = {u: i for i, u in enumerate(scm.exogenous[node].support)}

        def fn(pa, u):
            idx = tuple(domains[p].index(pa[p]) for p in ps) + (ucode[u],)
            return domains[node][int(table[idx])]

        return fn

    return {
        "order": order,
        "parents": parents,
        "exo": {
            n: (tuple(scm.exogenous[n].support), tuple(scm.exogenous[n].probs))
            for n in order
        },
        "func": {n: make_fn(n) for n in order},
    }
