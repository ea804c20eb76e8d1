"""Signed circuits, covers, fundamental circuits and barbell constructors."""

from __future__ import annotations

import enum
import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import (
    SignedGraph,
    StructuralError,
    bfs_path,
    bridges,
    components,
    is_connected,
    walk_vertices,
)
from .signature import is_balanced


class InvalidElement(ValueError):
    pass


class EnumerationCapExceeded(RuntimeError):
    pass


class Kind(str, enum.Enum):
    BALANCED_CIRCUIT = "balanced_circuit"
    SHORT_BARBELL = "short_barbell"
    LONG_BARBELL = "long_barbell"


@dataclass(frozen=True)
class SignedCircuitElement:
    """A signed circuit as an edge set plus the structure that witnesses it.

    ``circuits`` holds one closed edge sequence for a balanced circuit and the
    two unbalanced circuits for a barbell; ``path`` is the connecting path of a
    long barbell (empty otherwise).  ``start`` gives the first vertex of each
    circuit sequence and of the path.
    """

    kind: Kind
    edges: frozenset[int]
    circuits: tuple[tuple[int, ...], ...]
    path: tuple[int, ...] = ()
    starts: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def is_barbell(self) -> bool:
        return self.kind is not Kind.BALANCED_CIRCUIT

    def vertex_sequences(self, g: SignedGraph) -> dict:
        circ = [walk_vertices(g, s, c)[:-1] for s, c in zip(self.starts, self.circuits)]
        path = walk_vertices(g, self.starts[-1], self.path) if self.path else []
        return {"circuits": circ, "path": path}

    def to_record(self, g: SignedGraph) -> dict:
        seqs = self.vertex_sequences(g)
        return {
            "kind": self.kind.value,
            "edges": sorted(self.edges),
            "circuits": seqs["circuits"],
            "path": seqs["path"],
        }


def _trace_circuit(g: SignedGraph, eids: set[int], start: int) -> tuple[list[int], int]:
    """Walk a 2-regular connected edge set from ``start``; returns edges in order."""
    first = min((i for i in eids if start in (g.edge(i).u, g.edge(i).v)))
    e = g.edge(first)
    if e.is_loop:
        return [first], start
    order = [first]
    cur = e.other(start)
    used = {first}
    while cur != start:
        nxt = min(i for i in eids if i not in used and cur in (g.edge(i).u, g.edge(i).v))
        used.add(nxt)
        order.append(nxt)
        cur = g.edge(nxt).other(cur)
    return order, start


def classify(g: SignedGraph, eids: Iterable[int]) -> SignedCircuitElement:
    """Classify an edge set as a signed circuit or raise :class:`InvalidElement`."""
    es = frozenset(eids)
    if not es:
        raise InvalidElement("empty edge set")
    for i in es:
        if not g.has_edge(i):
            raise InvalidElement(f"edge {i} not in graph")
    sub = g.sub(es)
    if not is_connected(sub):
        raise InvalidElement("not connected")
    deg = {v: sub.degree(v) for v in sub.vertices}
    neg = sub.negative_count()
    if all(d == 2 for d in deg.values()):
        if neg % 2:
            raise InvalidElement("circuit is unbalanced")
        start = min(sub.vertices)
        order, _ = _trace_circuit(g, set(es), start)
        return SignedCircuitElement(Kind.BALANCED_CIRCUIT, es, (tuple(order),), (), (start,))
    if sub.m - sub.n + 1 != 2:
        raise InvalidElement("cyclomatic number is not 2")
    high = sorted(v for v, d in deg.items() if d > 2)
    if any(d < 2 for d in deg.values()):
        raise InvalidElement("vertex of degree below 2")
    if len(high) == 1 and deg[high[0]] == 4:
        w = high[0]
        first, _ = _trace_circuit(g, set(es), w)
        rest = set(es) - set(first)
        rest_sub = g.sub(rest)
        if not (rest_sub.m and is_connected(rest_sub) and all(rest_sub.degree(v) == 2 for v in rest_sub.vertices)):
            raise InvalidElement("figure-eight does not split into two circuits")
        second, _ = _trace_circuit(g, rest, w)
        c1, c2 = sorted([tuple(first), tuple(second)], key=min)
        for c in (c1, c2):
            if g.negative_count(c) % 2 == 0:
                raise InvalidElement("barbell contains a balanced circuit")
        return SignedCircuitElement(Kind.SHORT_BARBELL, es, (c1, c2), (), (w, w, w))
    if len(high) == 2 and all(deg[v] == 3 for v in high):
        br = bridges(sub)
        if not br:
            raise InvalidElement("theta graph is not a signed circuit")
        a, b = high
        rest = set(es) - br
        circs = []
        for end in (a, b):
            ce = [i for i in rest if end in (g.edge(i).u, g.edge(i).v)]
            if not ce:
                raise InvalidElement("barbell end has no circuit")
            comp = _component_edges(g, rest, end)
            csub = g.sub(comp)
            if not all(csub.degree(v) == 2 for v in csub.vertices):
                raise InvalidElement("barbell end is not a circuit")
            order, _ = _trace_circuit(g, comp, end)
            circs.append(tuple(order))
        if set(circs[0]) & set(circs[1]) or len(circs[0]) + len(circs[1]) != len(rest):
            raise InvalidElement("barbell ends overlap")
        for c in circs:
            if g.negative_count(c) % 2 == 0:
                raise InvalidElement("barbell contains a balanced circuit")
        path = bfs_path(g.sub(br), [a], [b])
        if path is None or set(path) != br:
            raise InvalidElement("barbell path is not a path")
        return SignedCircuitElement(Kind.LONG_BARBELL, es, tuple(circs), tuple(path), (a, b, a))
    raise InvalidElement("degree pattern matches no signed circuit")


def _component_edges(g: SignedGraph, eids: set[int], start: int) -> set[int]:
    seen = {start}
    q = deque([start])
    out: set[int] = set()
    inc: dict[int, list[int]] = {}
    for i in eids:
        e = g.edge(i)
        inc.setdefault(e.u, []).append(i)
        if not e.is_loop:
            inc.setdefault(e.v, []).append(i)
    while q:
        x = q.popleft()
        for i in inc.get(x, ()):
            out.add(i)
            y = g.edge(i).other(x)
            if y not in seen:
                seen.add(y)
                q.append(y)
    return out


def make_element(g: SignedGraph, eids: Iterable[int]) -> SignedCircuitElement:
    return classify(g, eids)


def validate_element(g: SignedGraph, el: SignedCircuitElement) -> tuple[bool, str]:
    """Check an element against its declared kind; returns ``(ok, reason)``."""
    try:
        got = classify(g, el.edges)
    except InvalidElement as exc:
        return False, str(exc)
    if got.kind is not el.kind:
        return False, f"declared {el.kind.value}, structure is {got.kind.value}"
    return True, ""


@dataclass
class Cover:
    """Multiset of signed circuits with width/length accounting."""

    elements: list[SignedCircuitElement] = field(default_factory=list)
    scope: str = "full"

    @property
    def length(self) -> int:
        return sum(len(el) for el in self.elements)

    def widths(self) -> Counter:
        c: Counter = Counter()
        for el in self.elements:
            c.update(el.edges)
        return c

    def width(self, eid: int | None = None) -> int:
        w = self.widths()
        if eid is None:
            return max(w.values(), default=0)
        return w.get(eid, 0)

    def covered(self) -> set[int]:
        return set(self.widths())

    def extend(self, other: "Cover | Iterable[SignedCircuitElement]") -> "Cover":
        els = other.elements if isinstance(other, Cover) else list(other)
        self.elements.extend(els)
        return self

    def __len__(self) -> int:
        return len(self.elements)


def total_widths(*covers: Cover) -> Counter:
    c: Counter = Counter()
    for cv in covers:
        c.update(cv.widths())
    return c


# ---------------------------------------------------------------------------
# enumeration


def enumerate_circuits(g: SignedGraph, cap: int = 200_000) -> list[tuple[int, ...]]:
    """All elementary circuits as edge-id tuples (sorted), loops included."""
    out: list[tuple[int, ...]] = []
    seen: set[frozenset[int]] = set()
    for e in g.edges:
        if e.is_loop:
            out.append((e.id,))
    order = {v: i for i, v in enumerate(g.vertices)}
    adj = g.adjacency()
    for s in g.vertices:
        rank = order[s]
        path_e: list[int] = []
        on_path = {s}

        def dfs(x: int) -> None:
            for e in adj[x]:
                if e.is_loop or (path_e and e.id == path_e[-1]):
                    continue
                y = e.other(x)
                if y == s:
                    if len(path_e) >= 1:
                        key = frozenset(path_e + [e.id])
                        if len(key) == len(path_e) + 1 and key not in seen:
                            seen.add(key)
                            out.append(tuple(sorted(key)))
                            if len(out) > cap:
                                raise EnumerationCapExceeded(f"more than {cap} circuits")
                    continue
                if order[y] < rank or y in on_path:
                    continue
                on_path.add(y)
                path_e.append(e.id)
                dfs(y)
                path_e.pop()
                on_path.discard(y)

        dfs(s)
    return out


def simple_paths_between(g: SignedGraph, sources: set[int], targets: set[int],
                         avoid: set[int], cap: int) -> list[tuple[int, ...]]:
    """All simple paths (edge tuples) from a source to a target with internal
    vertices outside ``sources | targets | avoid``; length at least one."""
    adj = g.adjacency()
    out: list[tuple[int, ...]] = []
    banned = sources | targets | avoid
    for s in sorted(sources):
        stack_e: list[int] = []
        on = {s}

        def dfs(x: int) -> None:
            for e in adj[x]:
                if e.is_loop:
                    continue
                y = e.other(x)
                if y in targets:
                    out.append(tuple(stack_e + [e.id]))
                    if len(out) > cap:
                        raise EnumerationCapExceeded(f"more than {cap} connecting paths")
                    continue
                if y in banned or y in on:
                    continue
                on.add(y)
                stack_e.append(e.id)
                dfs(y)
                stack_e.pop()
                on.discard(y)

        dfs(s)
    return out


def enumerate_signed_circuits(g: SignedGraph, cap: int = 200_000) -> list[frozenset[int]]:
    """Every signed circuit of ``g`` as an edge set (balanced circuits and barbells)."""
    circs = enumerate_circuits(g, cap)
    out: list[frozenset[int]] = []
    unbalanced = []
    for c in circs:
        if g.negative_count(c) % 2 == 0:
            out.append(frozenset(c))
        else:
            unbalanced.append((frozenset(c), g.endpoints(c)))
    for (c1, v1), (c2, v2) in itertools.combinations(unbalanced, 2):
        if c1 & c2:
            continue
        common = v1 & v2
        if len(common) == 1:
            out.append(c1 | c2)
        elif not common:
            for p in simple_paths_between(g, v1, v2, set(), cap):
                out.append(c1 | c2 | frozenset(p))
                if len(out) > cap:
                    raise EnumerationCapExceeded(f"more than {cap} signed circuits")
    return out


def _admissible_structurally(g: SignedGraph) -> int | None:
    """Witness edge lying in no signed circuit, using the bridge/balance criterion.

    A connected signed graph is flow-admissible iff it is not equivalent to a
    signature with exactly one negative edge and no bridge has a balanced side.
    """
    from .signature import minimum_signature

    for comp in components(g):
        if comp.m == 0:
            continue
        for b in sorted(bridges(comp)):
            rest = comp.without([b])
            for side in components(rest):
                if is_balanced(side):
                    return b
        _, _, eps = minimum_signature(comp)
        if eps == 1:
            h, _, _ = minimum_signature(comp)
            return h.negative_ids()[0]
    return None


def flow_admissibility_witness(g: SignedGraph, enum_limit: int = 18) -> int | None:
    """An edge in no signed circuit, or None when ``g`` is flow-admissible.

    Small graphs are checked edge by edge against the enumerated signed
    circuits; larger ones fall back to the bridge/balance characterisation.
    """
    if g.m == 0:
        return None
    if g.m > enum_limit:
        return _admissible_structurally(g)
    remaining = set(g.edge_ids)
    for comp in components(g):
        if comp.m == 0:
            continue
        todo = set(comp.edge_ids)
        for el in enumerate_signed_circuits(comp):
            todo -= el
            if not todo:
                break
        remaining &= todo | (remaining - set(comp.edge_ids))
        if todo:
            return min(todo)
    return None


def is_flow_admissible(g: SignedGraph) -> bool:
    return flow_admissibility_witness(g) is None


# ---------------------------------------------------------------------------
# fundamental circuits over a positive spanning tree


@dataclass(frozen=True)
class FundamentalSystem:
    graph: SignedGraph
    tree: frozenset[int]
    circuits: dict[int, frozenset[int]]
    parent: dict[int, tuple[int, int] | None]
    depth: dict[int, int]

    @property
    def negatives(self) -> tuple[int, ...]:
        return tuple(sorted(self.circuits))

    def tree_path(self, a: int, b: int) -> list[int]:
        pa: list[int] = []
        pb: list[int] = []
        while a != b:
            if self.depth[a] >= self.depth[b]:
                pv, e = self.parent[a]
                pa.append(e)
                a = pv
            else:
                pv, e = self.parent[b]
                pb.append(e)
                b = pv
        return pa + pb[::-1]

    def vertices_of(self, x: int) -> set[int]:
        return self.graph.endpoints(self.circuits[x])


def fundamental_system(gp: SignedGraph) -> FundamentalSystem:
    """Tree = positive edges; one circuit ``C_x`` per negative edge ``x``."""
    tree = [e for e in gp.edges if e.sign > 0]
    if any(e.is_loop for e in tree):
        raise StructuralError("positive loop: positive edges are not a tree")
    if len(tree) != gp.n - 1:
        raise StructuralError("positive edges do not form a spanning tree")
    tsub = gp.sub([e.id for e in tree], keep=gp.vertices)
    if not is_connected(tsub):
        raise StructuralError("positive edges do not form a spanning tree")
    root = gp.vertices[0]
    parent: dict[int, tuple[int, int] | None] = {root: None}
    depth = {root: 0}
    q = deque([root])
    adj = tsub.adjacency()
    while q:
        x = q.popleft()
        for e in adj[x]:
            y = e.other(x)
            if y not in parent:
                parent[y] = (x, e.id)
                depth[y] = depth[x] + 1
                q.append(y)
    fs = FundamentalSystem(gp, frozenset(e.id for e in tree), {}, parent, depth)
    for e in gp.edges:
        if e.sign < 0:
            fs.circuits[e.id] = frozenset(fs.tree_path(e.u, e.v)) | {e.id}
    return fs


def symmetric_difference_circuit(fs: FundamentalSystem, a: Iterable[int]) -> SignedGraph:
    acc: set[int] = set()
    for x in a:
        acc ^= fs.circuits[x]
    return fs.graph.sub(acc)


def union_graph(fs: FundamentalSystem, a: Iterable[int]) -> SignedGraph:
    acc: set[int] = set()
    for x in a:
        acc |= fs.circuits[x]
    return fs.graph.sub(acc)


def circuits_meet(fs: FundamentalSystem, x: int, y: int) -> bool:
    """``C_x`` and ``C_y`` share at least one vertex."""
    return bool(fs.vertices_of(x) & fs.vertices_of(y))


def barbell_on_cut_pair(fs: FundamentalSystem, x: int, y: int,
                        yset: Iterable[int] = ()) -> SignedCircuitElement | None:
    """The barbell made of ``C_x``, ``C_y`` and the contracted tree path modified by ``yset``.

    The tree path between the contracted circuits is xor-ed with ``C_w`` for
    each ``w`` in ``yset``; if what remains (outside the two circuits) is a
    path between them, the barbell is returned, otherwise None.
    """
    g = fs.graph
    ys = set(yset)
    if x in ys or y in ys:
        raise StructuralError("x and y must not be in the modifying set")
    vx, vy = fs.vertices_of(x), fs.vertices_of(y)
    if vx & vy:
        raise StructuralError("C_x and C_y are not vertex-disjoint")
    tsub = g.sub(fs.tree, keep=g.vertices)
    base = bfs_path(tsub, vx, vy, forbidden=vx | vy)
    acc = set(base or ())
    for w in sorted(ys):
        acc ^= fs.circuits[w]
    cx, cy = fs.circuits[x], fs.circuits[y]
    acc -= cx | cy
    if not acc or not _is_contracted_path(g, acc, vx, vy):
        return None
    try:
        el = classify(g, acc | cx | cy)
    except InvalidElement:
        return None
    return el if el.kind is Kind.LONG_BARBELL else None


def _is_contracted_path(g: SignedGraph, eids: set[int], vx: set[int], vy: set[int]) -> bool:
    def lab(v: int) -> object:
        if v in vx:
            return "X"
        if v in vy:
            return "Y"
        return v

    deg: Counter = Counter()
    for i in eids:
        e = g.edge(i)
        a, b = lab(e.u), lab(e.v)
        if a == b:
            return False
        deg[a] += 1
        deg[b] += 1
    if deg["X"] != 1 or deg["Y"] != 1:
        return False
    if any(d != 2 for k, d in deg.items() if k not in ("X", "Y")):
        return False
    # connectivity of the contracted edge set
    inc: dict[object, list[int]] = {}
    for i in eids:
        e = g.edge(i)
        inc.setdefault(lab(e.u), []).append(i)
        inc.setdefault(lab(e.v), []).append(i)
    seen = {"X"}
    q = deque(["X"])
    used = 0
    seen_e: set[int] = set()
    while q:
        k = q.popleft()
        for i in inc.get(k, ()):
            if i in seen_e:
                continue
            seen_e.add(i)
            used += 1
            e = g.edge(i)
            for t in (lab(e.u), lab(e.v)):
                if t not in seen:
                    seen.add(t)
                    q.append(t)
    return used == len(eids)


def join_circuits(g: SignedGraph, c1: Iterable[int], c2: Iterable[int],
                  avoid: Iterable[int] = (), within: Iterable[int] | None = None) -> SignedCircuitElement | None:
    """Barbell from two unbalanced circuits joined by a shortest admissible path.

    If the circuits share exactly one vertex the short barbell is returned.
    ``avoid`` lists vertices the path may not use; ``within`` restricts the
    path to a set of edges.
    """
    s1, s2 = set(c1), set(c2)
    v1, v2 = g.endpoints(s1), g.endpoints(s2)
    if v1 & v2:
        try:
            return classify(g, s1 | s2)
        except InvalidElement:
            return None
    host = g if within is None else g.sub(set(within) - s1 - s2, keep=v1 | v2)
    p = bfs_path(host, v1, v2, forbidden=v1 | v2 | set(avoid))
    if p is None:
        return None
    try:
        return classify(g, s1 | s2 | set(p))
    except InvalidElement:
        return None


# ---------------------------------------------------------------------------
# connecting Eulerian pieces into a tree of Eulerian graphs


def connect_into_euler_tree(g: SignedGraph, parts: Sequence[SignedGraph]) -> tuple[SignedGraph, list[int]]:
    """Union of vertex-disjoint Eulerian parts plus connecting edges of ``g``.

    Added edges become bridges of the result.  Two or three parts are joined
    by a minimum connector (shortest path, or the best Steiner centre); more
    parts are merged greedily by nearest part.  Returns the subgraph and the
    ids of the added edges.
    """
    parts = [p for p in parts if p.n > 0]
    if not parts:
        raise StructuralError("nothing to connect")
    owner: dict[int, int] = {}
    for k, p in enumerate(parts):
        for v in p.vertices:
            if v in owner:
                raise StructuralError("parts are not vertex-disjoint")
            owner[v] = k
    base_edges = set().union(*(set(p.edge_ids) for p in parts))
    keep = set(owner)
    if len(parts) == 1:
        return g.sub(base_edges, keep=keep), []
    # contracted graph: part k -> node ("P", k); edges inside a part are dropped
    def node(v: int):
        return ("P", owner[v]) if v in owner else ("V", v)

    cadj: dict[object, list[tuple[int, object]]] = {}
    for e in sorted(g.edges, key=lambda e: e.id):
        a, b = node(e.u), node(e.v)
        if a == b:
            continue
        cadj.setdefault(a, []).append((e.id, b))
        cadj.setdefault(b, []).append((e.id, a))
    terminals = [("P", k) for k in range(len(parts))]

    def bfs_tree(src):
        prev = {src: None}
        dist = {src: 0}
        q = deque([src])
        while q:
            x = q.popleft()
            for eid, y in cadj.get(x, ()):
                if y not in prev:
                    prev[y] = (x, eid)
                    dist[y] = dist[x] + 1
                    q.append(y)
        return prev, dist

    def path_to(prev, t):
        out = []
        while prev[t] is not None:
            x, eid = prev[t]
            out.append(eid)
            t = x
        return out

    added: set[int]
    if len(parts) <= 3:
        best = None
        for c in sorted(cadj, key=str):
            prev, dist = bfs_tree(c)
            if any(t not in dist for t in terminals):
                continue
            es: set[int] = set()
            for t in terminals:
                es.update(path_to(prev, t))
            es = _prune_connector(g, es, node, terminals)
            key = (len(es), sorted(es))
            if best is None or key < best[0]:
                best = (key, es)
        if best is None:
            raise StructuralError("parts cannot be connected in g")
        added = best[1]
    else:
        added = set()
        reached = {terminals[0]}
        tree_nodes = {terminals[0]}
        while len(reached) < len(terminals):
            prev = {n: None for n in tree_nodes}
            q = deque(sorted(tree_nodes, key=str))
            hit = None
            while q and hit is None:
                x = q.popleft()
                for eid, y in cadj.get(x, ()):
                    if y in prev:
                        continue
                    prev[y] = (x, eid)
                    if y[0] == "P" and y not in reached:
                        hit = y
                        break
                    q.append(y)
            if hit is None:
                raise StructuralError("parts cannot be connected in g")
            cur = hit
            while prev[cur] is not None:
                x, eid = prev[cur]
                added.add(eid)
                tree_nodes.add(cur)
                cur = x
            reached.add(hit)
        added = _prune_connector(g, added, node, terminals)
    verts = keep | g.endpoints(added)
    return g.sub(base_edges | added, keep=verts), sorted(added)


def _prune_connector(g: SignedGraph, es: set[int], node, terminals) -> set[int]:
    """Drop connector edges hanging off non-terminal leaves."""
    es = set(es)
    tset = set(terminals)
    while True:
        deg: Counter = Counter()
        for i in es:
            e = g.edge(i)
            deg[node(e.u)] += 1
            deg[node(e.v)] += 1
        leaves = [i for i in es
                  if any(deg[node(x)] == 1 and node(x) not in tset for x in (g.edge(i).u, g.edge(i).v))]
        if not leaves:
            return es
        es -= set(leaves)
