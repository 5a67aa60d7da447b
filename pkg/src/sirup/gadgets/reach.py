"""Reachability reductions: undirected graphs and dags."""
from __future__ import annotations

import networkx as nx

from ..model import A, F, T, ABox, Builder, Query
from . import GadgetError


def _graph(g, directed):
    """Accept a networkx graph or a plain edge list."""
    if isinstance(g, nx.Graph):
        return g
    return nx.DiGraph(list(g)) if directed else nx.Graph(list(g))


def _check_ends(g, s, t):
    for v in (s, t):
        if v not in g:
            raise GadgetError(f"{v!r} is not a vertex of the graph")
    if s == t:
        raise GadgetError("source and target must differ")


def glued_core(q: Query) -> tuple[Query, str, str]:
    """Glue every T-node into x and every F-node into y, then drop T(x) and
    F(y). Returns q'' with its two distinguished nodes."""
    if q.twins():
        raise GadgetError("query has an FT-twin")
    ts, fs = q.solitary(T), q.solitary(F)
    if not ts or not fs:
        raise GadgetError("query needs at least one F-node and one T-node")
    x, y = "x_", "y_"
    names = {v: x for v in ts} | {v: y for v in fs}
    g = q.rename(names)
    g = g.with_unary(remove=[(T, x), (F, y)])
    return Query(g.individuals, g.unary, g.binary), x, y


def reach_undirected(q: Query, g, s, t, label_a=False) -> ABox:
    """Every individual defaults to covered (total covering axiom); with
    `label_a` every individual also carries A, so the plain covering axiom
    behaves the same way."""
    g = _graph(g, directed=False)
    _check_ends(g, s, t)
    core, x, y = glued_core(q)
    inner = sorted(core.individuals - {x, y})
    b = Builder()
    for v in g.nodes:
        b.names.add(str(v))
    k = 0
    for u0, v0 in sorted(g.edges, key=repr):
        for u, v in ((u0, v0), (v0, u0)):
            k += 1
            names = {x: str(u), y: str(v)} | {w: f"e{k}_{w}" for w in inner}
            b.copy(core, names, note=f"edge copy e{k}: x -> {u}, y -> {v}")
    b.add(T, str(s))
    b.add(F, str(t))
    if label_a:
        for a in sorted(b.names):
            b.add(A, a)
    return b.build()


def adjacent_pair(q: Query) -> tuple[str, str]:
    """A T-node x and an F-node y with no F- or T-node between them on the
    path; x may come before or after y."""
    if q.path is None:
        raise GadgetError("query is not a path")
    if q.twins():
        raise GadgetError("query has an FT-twin")
    marked = [v for v in q.path if q.label(v) & {F, T}]
    for u, v in zip(marked, marked[1:]):
        if T in q.label(u) and F in q.label(v):
            return u, v
    for u, v in zip(marked, marked[1:]):
        if F in q.label(u) and T in q.label(v):
            return v, u
    raise GadgetError("no adjacent T-node and F-node on the path")


def reach_dag(q: Query, g, s, t) -> ABox:
    g = _graph(g, directed=True)
    if not nx.is_directed_acyclic_graph(g):
        raise GadgetError("graph has a cycle")
    _check_ends(g, s, t)
    x, y = adjacent_pair(q)
    rest = [v for v in q.order if v not in (x, y)]
    b = Builder()
    for v in g.nodes:
        b.names.add(str(v))
    for k, (u, v) in enumerate(sorted(g.edges, key=repr), 1):
        names = {x: str(u), y: str(v)} | {w: f"e{k}_{w}" for w in rest}
        b.copy(q, names, relabel={x: {A}, y: {A}}, note=f"edge copy e{k}: {x} -> {u}, {y} -> {v}")
    b.add(T, str(s))
    b.add(F, str(t))
    return b.build()


def reachable(g, s, t, directed) -> bool:
    g = _graph(g, directed)
    return nx.has_path(g, s, t)
