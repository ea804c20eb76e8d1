"""Definition-level brute force used as an independent source of expected values.

Only plain Python and networkx; nothing from the package except the graph
container.
"""

from __future__ import annotations

import heapq
import itertools
from collections import Counter

import networkx as nx

from sigcover.graph import SignedGraph


def build(n: int, text: str) -> SignedGraph:
    """``"0 1 -, 1 2 +"`` style edge lists."""
    edges = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if chunk:
            u, v, s = chunk.split()
            edges.append((int(u), int(v), -1 if s == "-" else 1))
    return SignedGraph.from_edges(n, edges)


def ends(g: SignedGraph, e: int) -> tuple[int, int]:
    ed = g.edge(e)
    return ed.u, ed.v


def degrees(g: SignedGraph, es) -> Counter:
    d: Counter = Counter()
    for e in es:
        u, v = ends(g, e)
        d[u] += 1
        d[v] += 1
    return d


def verts(g: SignedGraph, es) -> set[int]:
    return {x for e in es for x in ends(g, e)}


def connected(g: SignedGraph, es) -> bool:
    es = list(es)
    if not es:
        return False
    h = nx.MultiGraph()
    for e in es:
        h.add_edge(*ends(g, e))
    return nx.is_connected(h)


def is_circuit(g: SignedGraph, es) -> bool:
    es = list(es)
    return bool(es) and connected(g, es) and all(d == 2 for d in degrees(g, es).values())


def negs(g: SignedGraph, es) -> int:
    return sum(1 for e in es if g.sign(e) < 0)


def _is_path_between(g, p, a_verts, b_verts) -> bool:
    if not p or not connected(g, p):
        return False
    d = degrees(g, p)
    if len(d) != len(p) + 1 or max(d.values()) > 2:
        return False
    endpoints = [v for v, k in d.items() if k == 1]
    inner = set(d) - set(endpoints)
    if inner & (a_verts | b_verts):
        return False
    return len(endpoints) == 2 and (
        (endpoints[0] in a_verts and endpoints[1] in b_verts)
        or (endpoints[1] in a_verts and endpoints[0] in b_verts))


def signed_circuit_kind(g: SignedGraph, es) -> str | None:
    """Kind of the edge set straight from the three-shape definition, or None."""
    es = sorted(set(es))
    if is_circuit(g, es):
        return "balanced_circuit" if negs(g, es) % 2 == 0 else None
    subs = [frozenset(c) for k in range(1, len(es)) for c in itertools.combinations(es, k)
            if is_circuit(g, c) and negs(g, c) % 2 == 1]
    full = frozenset(es)
    for c1, c2 in itertools.combinations(subs, 2):
        if c1 & c2:
            continue
        v1, v2 = verts(g, c1), verts(g, c2)
        rest = full - c1 - c2
        if not rest and len(v1 & v2) == 1:
            return "short_barbell"
        if rest and not (v1 & v2) and _is_path_between(g, sorted(rest), v1, v2):
            return "long_barbell"
    return None


def all_signed_circuits(g: SignedGraph) -> dict[frozenset[int], str]:
    out = {}
    ids = list(g.edge_ids)
    for k in range(1, len(ids) + 1):
        for c in itertools.combinations(ids, k):
            kind = signed_circuit_kind(g, c)
            if kind:
                out[frozenset(c)] = kind
    return out


def _cheapest_cover(ids, sets) -> int | None:
    bit = {e: i for i, e in enumerate(ids)}
    masks = [(len(c), sum(1 << bit[e] for e in c)) for c in sets]
    full = (1 << len(ids)) - 1
    best = {0: 0}
    heap = [(0, 0)]
    while heap:
        d, mask = heapq.heappop(heap)
        if mask == full:
            return d
        if d > best.get(mask, d):
            continue
        for w, cm in masks:
            nm = mask | cm
            if nm != mask and d + w < best.get(nm, 1 << 60):
                best[nm] = d + w
                heapq.heappush(heap, (d + w, nm))
    return None


def min_cover_length(g: SignedGraph) -> int | None:
    """Shortest signed circuit cover by shortest-path search over covered-edge masks."""
    return _cheapest_cover(list(g.edge_ids), list(all_signed_circuits(g)))


def min_negative_count(g: SignedGraph) -> int:
    """Fewest negative edges over all switchings (loops keep their sign)."""
    vs = list(g.vertices)
    best = None
    for bits in itertools.product((0, 1), repeat=max(len(vs) - 1, 0)):
        side = dict(zip(vs[1:], bits))
        side[vs[0]] = 0
        k = 0
        for e in g.edges:
            flip = (side[e.u] != side[e.v])
            s = -e.sign if flip else e.sign
            k += s < 0
        best = k if best is None else min(best, k)
    return best if best is not None else 0


def nx_bridges(g: SignedGraph) -> set[int]:
    h = nx.MultiGraph()
    h.add_nodes_from(g.vertices)
    for e in g.edges:
        if not e.is_loop:
            h.add_edge(e.u, e.v, key=e.id)
    out = set()
    for e in g.edges:
        if e.is_loop:
            continue
        h.remove_edge(e.u, e.v, key=e.id)
        if not nx.has_path(h, e.u, e.v):
            out.add(e.id)
        h.add_edge(e.u, e.v, key=e.id)
    return out


def cut_vertices_by_deletion(g: SignedGraph) -> set[int]:
    h = nx.MultiGraph()
    h.add_nodes_from(g.vertices)
    for e in g.edges:
        if not e.is_loop:
            h.add_edge(e.u, e.v)
    base = nx.number_connected_components(h)
    out = set()
    for v in g.vertices:
        k = h.copy()
        k.remove_node(v)
        if nx.number_connected_components(k) > base:
            out.add(v)
    return out


def min_circuit_cover_length(g: SignedGraph) -> int | None:
    """Shortest cover of an all-positive graph by (unsigned) circuits."""
    ids = list(g.edge_ids)
    circs = [c for k in range(1, len(ids) + 1) for c in itertools.combinations(ids, k) if is_circuit(g, c)]
    return _cheapest_cover(ids, circs)


def _nx(g, skip=()):
    h = nx.MultiGraph()
    h.add_nodes_from(g.vertices)
    for e in g.edges:
        if e.id not in skip and not e.is_loop:
            h.add_edge(e.u, e.v)
    return h


def brute_targets(g):
    """Negatives, bridges with two unbalanced sides, and 2-cut partners of negatives."""
    neg = {e.id for e in g.edges if e.sign < 0}
    br = nx_bridges(g)
    sep = set()
    for b in br:
        h = _nx(g, skip={b})
        sides = [set(c) for c in nx.connected_components(h)]
        ok = True
        for side in sides:
            es = [e.id for e in g.edges if e.id != b and e.u in side]
            if min_negative_count(g.sub(es, keep=side)) == 0:
                ok = False
        if ok:
            sep.add(b)
    base = nx.number_connected_components(_nx(g))
    part = set()
    for t in neg:
        if t in br or g.edge(t).is_loop:
            continue
        for s in g.edge_ids:
            if s == t or s in br or g.edge(s).is_loop:
                continue
            if nx.number_connected_components(_nx(g, skip={s, t})) > base:
                part.add(s)
    return neg, sep, part - neg
