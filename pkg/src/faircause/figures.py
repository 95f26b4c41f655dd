"""Figure rendering for audit reports.

Two figures accompany a written report: the causal graph with the
audit roles marked, and a chart of the estimated metrics.  Layout and
styling are pure functions of the report content and the PNG metadata
is pinned, so re-rendering the same report yields identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg", force=True)

import matplotlib.pyplot as plt

from .graph import ROLE_EXPLAINING, ROLE_PROXY
from .report import TOOL_NAME

_PNG_METADATA = {"Software": TOOL_NAME}

_FILL = {
    "attribute": "#f4cfa4",
    "outcome": "#c6dbc6",
    ROLE_EXPLAINING: "#ddecdd",
    ROLE_PROXY: "#f0d4d4",
    "plain": "#dce6f1",
    "unobserved": "#eeeeee",
}


def _layers(graph) -> dict:
    """Node -> drawing column, the longest directed distance from a root."""
    depth = {}
    for node in graph.topological_order:
        parents = graph.parents(node)
        depth[node] = max((depth[p] + 1 for p in parents), default=0)
    return depth


def _positions(graph) -> dict:
    depth = _layers(graph)
    columns = {}
    for node in graph.nodes:
        columns.setdefault(depth[node], []).append(node)
    pos = {}
    for col, members in columns.items():
        members.sort()
        for i, node in enumerate(members):
            pos[node] = (2.2 * col, -1.7 * (i - (len(members) - 1) / 2.0))
    return pos


def save_graph_figure(graph, path, roles=None, attribute=None, outcome=None):
    """Draw the causal diagram; unobserved nodes are dashed."""
    roles = dict(roles or {})
    pos = _positions(graph)
    observed = set(graph.observed)
    xs = [p[0] for p in pos.values()]
    ys = [p[1] for p in pos.values()]
    width = max(xs) - min(xs) + 3.0
    height = max(ys) - min(ys) + 2.4
    fig, ax = plt.subplots(figsize=(max(width, 4.0), max(height, 2.8)))
    for cause, effect in graph.edges:
        ax.annotate(
            "",
            xy=pos[effect],
            xytext=pos[cause],
            arrowprops=dict(
                arrowstyle="-|>",
                color="#44505c",
                lw=1.3,
                shrinkA=22,
                shrinkB=22,
                connectionstyle="arc3,rad=0.06",
            ),
        )
    for node, (x, y) in pos.items():
        if node == attribute:
            fill = _FILL["attribute"]
        elif node == outcome:
            fill = _FILL["outcome"]
        elif node in roles:
            fill = _FILL[roles[node]]
        elif node not in observed:
            fill = _FILL["unobserved"]
        else:
            fill = _FILL["plain"]
        ax.text(
            x,
            y,
            node,
            ha="center",
            va="center",
            fontsize=11,
            bbox=dict(
                boxstyle="round,pad=0.45",
                facecolor=fill,
                edgecolor="#44505c",
                linestyle="--" if node not in observed else "-",
                linewidth=1.2,
            ),
        )
    parts = []
    if attribute is not None:
        parts.append(f"attribute {attribute}")
    if outcome is not None:
        parts.append(f"outcome {outcome}")
    title = "Causal graph" + (" (" + ", ".join(parts) + ")" if parts else "")
    ax.set_title(title, fontsize=12)
    ax.set_xlim(min(xs) - 1.4, max(xs) + 1.4)
    ax.set_ylim(min(ys) - 1.1, max(ys) + 1.1)
    ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=144, metadata=dict(_PNG_METADATA))
    plt.close(fig)


def save_metrics_figure(entries, path):
    """Horizontal bar chart of the computed metric values with intervals."""
    rows = [e for e in entries if e["value"] is not None]
    fig, ax = plt.subplots(figsize=(6.4, 1.0 + 0.65 * max(len(rows), 2)))
    if not rows:
        ax.text(0.5, 0.5, "no metrics computed", ha="center", va="center", fontsize=12)
        ax.axis("off")
    else:
        labels = [f"{e['metric']} ({e['tag']})" for e in rows]
        values = [e["value"] for e in rows]
        ypos = list(range(len(rows) - 1, -1, -1))
        colors = ["#b08a2e" if e["degraded"] else "#4878a8" for e in rows]
        ax.barh(ypos, values, color=colors, height=0.55, zorder=2)
        for e, y in zip(rows, ypos):
            ci = e["ci"]
            if ci is not None:
                ax.plot(
                    [ci["lower"], ci["upper"]],
                    [y, y],
                    color="#27323c",
                    lw=1.6,
                    zorder=3,
                )
            ax.annotate(
                f"{e['value']:+.3f}",
                (e["value"], y),
                textcoords="offset points",
                xytext=(6, -3) if e["value"] >= 0 else (-6, -3),
                ha="left" if e["value"] >= 0 else "right",
                fontsize=9,
            )
        ax.axvline(0.0, color="#555555", lw=0.9, zorder=1)
        ax.set_yticks(ypos)
        ax.set_yticklabels(labels)
        ax.set_xlabel("effect on the outcome probability")
        ax.grid(axis="x", color="#dddddd", lw=0.6, zorder=0)
    ax.set_title("Fairness metrics", fontsize=12)
    fig.tight_layout()
    fig.savefig(path, dpi=144, metadata=dict(_PNG_METADATA))
    plt.close(fig)
