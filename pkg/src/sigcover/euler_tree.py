"""Trees of Eulerian graphs: balloons, trail orderings and the circuit-tree covers."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuits import Cover, InvalidElement, Kind, SignedCircuitElement, classify
from .graph import (
    SignedGraph,
    StructuralError,
    bfs_path,
    block_decompose,
    bridges,
    components,
    euler_circuit,
    is_circuit,
    is_connected,
    is_cycle_graph,
    subtract,
)
from .signature import is_balanced


class ConstructionError(RuntimeError):
    """A cover construction reached a state its correctness argument rules out."""


@dataclass(frozen=True)
class Balloon:
    edges: frozenset[int]
    vertices: frozenset[int]
    valency: int
    odd: bool
    is_loop: bool = False

    @property
    def trivial(self) -> bool:
        return not self.edges

    @property
    def anchor(self) -> int | None:
        return next(iter(self.vertices)) if self.trivial else None

    @property
    def leaf(self) -> bool:
        return self.valency == 1

    @property
    def kind(self) -> str:
        return "leaf" if self.leaf else "inner"

    @property
    def parity(self) -> str:
        return "odd" if self.odd else "even"


@dataclass(frozen=True)
class EulerTree:
    graph: SignedGraph
    bridges: frozenset[int]
    balloons: tuple[Balloon, ...]

    @property
    def eps_tilde(self) -> int:
        return sum(1 for e in self.graph.edges if e.sign < 0 and e.id not in self.bridges)

    def leaves(self) -> list[Balloon]:
        return [b for b in self.balloons if b.leaf]

    def is_tree_of_circuits(self) -> bool:
        g = self.graph
        for b in self.balloons:
            if b.trivial or b.is_loop:
                continue
            if not is_circuit(g.sub(b.edges)):
                return False
        return True

    def circuit_balloons(self) -> list[Balloon]:
        return [b for b in self.balloons if not b.trivial]


def build_euler_tree(s: SignedGraph) -> EulerTree:
    """Classify bridges and balloons; fails unless every bridge-deleted component is Eulerian."""
    if s.n == 0 or not is_connected(s):
        raise StructuralError("a tree of Eulerian graphs must be connected and non-empty")
    br = frozenset(bridges(s))
    rest = s.without(br)
    balloons: list[Balloon] = []
    for comp in components(rest):
        if not is_cycle_graph(comp):
            raise StructuralError("not a tree of Eulerian graphs: a bridge-deleted component has an odd vertex")
        plain = [e.id for e in comp.edges if not e.is_loop]
        vs = frozenset(comp.vertices)
        for e in comp.edges:
            if e.is_loop and e.sign < 0:
                balloons.append(Balloon(frozenset([e.id]), frozenset([e.u]), 1, True, True))
        inc_br = sum(1 for b in br for x in (s.edge(b).u, s.edge(b).v) if x in vs)
        inc_loops = sum(1 for e in comp.edges if e.is_loop)
        balloons.append(Balloon(frozenset(plain), vs, inc_br + inc_loops, s.negative_count(plain) % 2 == 1))
    return EulerTree(s, br, tuple(balloons))


def _as_graph(h: "EulerTree | SignedGraph") -> SignedGraph:
    return h.graph if isinstance(h, EulerTree) else h


# ---------------------------------------------------------------------------
# small helpers shared by the recursions


def strip_positive_loops(h: SignedGraph) -> tuple[SignedGraph, list[int]]:
    pos = [e.id for e in h.edges if e.is_loop and e.sign > 0]
    if not pos:
        return h, []
    keep = [i for i in h.edge_ids if i not in set(pos)]
    return h.root.sub(keep, keep=h.vertices) if keep else h.root.sub([], keep=h.vertices[:1]), pos


def prune_pendants(h: SignedGraph) -> SignedGraph:
    """Repeatedly drop degree-1 vertices with their (bridge) edge."""
    edges = set(h.edge_ids)
    deg = {v: h.degree(v) for v in h.vertices}
    inc = {v: [e.id for e in h.incident(v)] for v in h.vertices}
    q = deque(v for v, d in deg.items() if d == 1)
    while q:
        v = q.popleft()
        if deg[v] != 1:
            continue
        eid = next(i for i in inc[v] if i in edges)
        edges.discard(eid)
        e = h.edge(eid)
        for x in (e.u, e.v):
            deg[x] -= 1
            if deg[x] == 1:
                q.append(x)
    if len(edges) == h.m:
        return h
    if not edges:
        return h.root.sub([], keep=h.vertices[:1])
    return h.root.sub(edges)


def loop_element(g: SignedGraph, eid: int) -> SignedCircuitElement:
    return classify(g, [eid])


def add_negative_loop(h: SignedGraph, v: int) -> tuple[SignedGraph, int]:
    g, ids = h.with_new_edges([(v, v, -1)])
    return g, ids[0]


def merge_on_loops(g: SignedGraph, els1: list[SignedCircuitElement], loop1: int,
                   els2: list[SignedCircuitElement], loop2: int) -> list[SignedCircuitElement]:
    """Combine two covers whose auxiliary loops sit at the same cut vertex.

    The i-th element through ``loop1`` is glued to the i-th element through
    ``loop2`` after both loops are removed; the result is re-classified in
    ``g``.
    """
    with1 = [el for el in els1 if loop1 in el.edges]
    with2 = [el for el in els2 if loop2 in el.edges]
    if len(with1) != len(with2):
        raise ConstructionError(
            f"auxiliary loops covered unequally ({len(with1)} vs {len(with2)})")
    out = [el for el in els1 if loop1 not in el.edges] + [el for el in els2 if loop2 not in el.edges]
    for a, b in zip(with1, with2):
        if not (a.is_barbell and b.is_barbell):
            raise ConstructionError("auxiliary loop covered by a balanced circuit")
        try:
            out.append(classify(g, (a.edges - {loop1}) | (b.edges - {loop2})))
        except InvalidElement as exc:
            raise ConstructionError(f"merged barbell is invalid: {exc}") from exc
    return out


def split_endblock(h: SignedGraph, prefer=None) -> tuple[SignedGraph, SignedGraph, int] | None:
    """``(H1, H2, v)`` for an end-block ``H1`` at cut vertex ``v``; None if 2-connected.

    The first end-block whose subgraph satisfies ``prefer`` wins; otherwise
    the first end-block.
    """
    bd = block_decompose(h)
    if bd.is_two_connected() or not bd.endblocks:
        return None
    options = []
    for i in bd.endblocks:
        blk = bd.blocks[i]
        v = min(bd.block_vertices[i] & bd.cut_vertices)
        h1 = h.root.sub(blk)
        h2 = h.root.sub([x for x in h.edge_ids if x not in blk], keep=[v])
        if prefer is None or prefer(h1):
            return h1, h2, v
        options.append((h1, h2, v))
    return options[0]


def eps_tilde(h: SignedGraph) -> int:
    br = bridges(h)
    return sum(1 for e in h.edges if e.sign < 0 and e.id not in br)


# ---------------------------------------------------------------------------
# trail ordering on a tree of circuits


@dataclass(frozen=True)
class CircuitOrdering:
    """Circuits of a tree of circuits in first-visit order along a directed Euler trail.

    ``arcs`` is the trail as ``(edge id, tail, head, owner)`` where owner is the
    circuit index or -1 for a bridge arc.
    """

    circuits: tuple[frozenset[int], ...]
    arcs: tuple[tuple[int, int, int, int], ...]
    first_vertex: tuple[int, ...]

    def segment(self, g: SignedGraph, s: int, t: int) -> list[int]:
        """Shortest piece of the trail leading from ``C_s`` to the next visit of ``C_t``.

        Empty when the two circuits share a vertex.
        """
        vs, vt = g.endpoints(self.circuits[s]), g.endpoints(self.circuits[t])
        if vs & vt:
            return []
        arcs = self.arcs
        k = len(arcs)
        pos_s = next(i for i, a in enumerate(arcs) if a[3] == s)
        q = None
        for d in range(1, k + 1):
            if arcs[(pos_s + d) % k][3] == t:
                q = pos_s + d
                break
        if q is None:
            raise ConstructionError("target circuit never visited")
        window = [arcs[i % k] for i in range(pos_s, q)]
        # trim to the last touch of C_s and the first touch of C_t after it
        heads = [a[2] for a in window]
        i = max(j for j, x in enumerate(heads) if x in vs)
        j = next((j for j in range(i + 1, len(heads)) if heads[j] in vt), len(heads) - 1)
        # erase closed detours (an inner circuit hanging at a single vertex)
        path: list[tuple[int, int, int, int]] = []
        seen: dict[int, int] = {}
        for a in window[i + 1:j + 1]:
            if not path:
                seen = {a[1]: 0}
            path.append(a)
            if a[2] in seen:
                del path[seen[a[2]]:]
                seen = {v: p for v, p in seen.items() if p <= len(path)}
            else:
                seen[a[2]] = len(path)
        return [a[0] for a in path]


def circuit_ordering(h: SignedGraph, circuits: Sequence[frozenset[int]], start: int | None = None) -> CircuitOrdering:
    br = sorted(set(h.edge_ids) - set().union(*circuits)) if circuits else sorted(h.edge_ids)
    arcs: list[tuple[int, int, int, int]] = []
    for k, c in enumerate(circuits):
        csub = h.sub(c)
        w = euler_circuit(csub, start=min(csub.vertices))
        cur = min(csub.vertices)
        for eid in w:
            nxt = h.edge(eid).other(cur)
            arcs.append((eid, cur, nxt, k))
            cur = nxt
    for b in br:
        e = h.edge(b)
        arcs.append((b, e.u, e.v, -1))
        arcs.append((b, e.v, e.u, -1))
    out: dict[int, list[int]] = {v: [] for v in h.vertices}
    for i, a in enumerate(arcs):
        out[a[1]].append(i)
    for v in out:
        out[v].sort(key=lambda i: (arcs[i][0], arcs[i][2]))
    if start is None:
        start = min(v for v in h.vertices if out[v])
    used = [False] * len(arcs)
    ptr = {v: 0 for v in out}
    stack: list[tuple[int, int]] = [(start, -1)]
    trail: list[int] = []
    while stack:
        x, via = stack[-1]
        lst = out[x]
        while ptr[x] < len(lst) and used[lst[ptr[x]]]:
            ptr[x] += 1
        if ptr[x] < len(lst):
            i = lst[ptr[x]]
            used[i] = True
            stack.append((arcs[i][2], i))
        else:
            stack.pop()
            if via >= 0:
                trail.append(via)
    trail.reverse()
    if len(trail) != len(arcs):
        raise ConstructionError("directed trail does not use every arc")
    seq = [arcs[i] for i in trail]
    first: dict[int, int] = {}
    for pos, a in enumerate(seq):
        if a[3] >= 0 and a[3] not in first:
            first[a[3]] = pos
    order = sorted(first, key=first.get)
    remap = {old: new for new, old in enumerate(order)}
    seq2 = tuple((a[0], a[1], a[2], remap[a[3]] if a[3] >= 0 else -1) for a in seq)
    circ2 = tuple(circuits[o] for o in order)
    fv = tuple(seq[first[o]][1] for o in order)
    return CircuitOrdering(circ2, seq2, fv)


def _tree_circuits(h: SignedGraph) -> list[frozenset[int]]:
    t = build_euler_tree(h)
    if not t.is_tree_of_circuits():
        raise StructuralError("not a tree of circuits")
    return [b.edges for b in t.balloons if not b.trivial]


def _barbell(h: SignedGraph, edges: Iterable[int]) -> SignedCircuitElement:
    try:
        el = classify(h, edges)
    except InvalidElement as exc:
        raise ConstructionError(f"trail segment does not give a barbell: {exc}") from exc
    if not el.is_barbell:
        raise ConstructionError("trail segment closed a balanced circuit instead of a barbell")
    return el


def _leaf_elements(h: SignedGraph) -> list[SignedCircuitElement]:
    t = build_euler_tree(h)
    if not t.is_tree_of_circuits():
        raise StructuralError("leaf cover needs a tree of circuits")
    circs = [b for b in t.balloons if not b.trivial]
    if any(b.trivial and b.leaf for b in t.balloons):
        raise StructuralError("leaf cover needs every leaf balloon to be a circuit")
    unbalanced = [b for b in circs if b.odd]
    if not unbalanced:
        if len(circs) == 1:
            return [classify(h, circs[0].edges)]
        raise StructuralError("balanced tree of circuits with several circuits has a balanced leaf")
    if len(unbalanced) == 1:
        raise StructuralError("exactly one unbalanced circuit")
    if any(b.leaf and not b.odd for b in circs):
        raise StructuralError("a leaf circuit is balanced")
    order = circuit_ordering(h, [b.edges for b in circs])
    marked = {b.edges for b in circs if b.leaf}
    # Inner circuits whose attachments all sit at one vertex are erased from
    # every segment; balanced ones are added as themselves, unbalanced ones
    # join the chain of marked circuits.
    while True:
        idx = [i for i, c in enumerate(order.circuits) if c in marked]
        out = []
        for j, s in enumerate(idx):
            t_ = idx[(j + 1) % len(idx)]
            seg = order.segment(h, s, t_)
            out.append(_barbell(h, order.circuits[s] | order.circuits[t_] | set(seg)))
        covered = set().union(*(el.edges for el in out))
        missed = [c for c in order.circuits if not c <= covered]
        odd_missed = [c for c in missed if h.negative_count(c) % 2]
        if not odd_missed:
            return out + [classify(h, c) for c in missed]
        marked.add(odd_missed[0])


def leaf_cover(h: "EulerTree | SignedGraph") -> Cover:
    """Barbells between consecutive leaf circuits along the trail.

    Leaf circuits and bridges end up with width exactly 2 and inner circuits
    with width at most 2 (width 1 unless every attachment of the circuit
    sits at a single vertex).  Positive loops are covered once by themselves.
    """
    g = _as_graph(h)
    g, pos = strip_positive_loops(g)
    els = _leaf_elements(g) if g.m else []
    els += [loop_element(g.root, p) for p in pos]
    return Cover(els, "full")


def three_weak_covers_circuits(h: "EulerTree | SignedGraph") -> tuple[Cover, Cover, Cover]:
    """Three weak covers of a tree of circuits with an even number of unbalanced circuits.

    Total width is at most 4 and the first cover uses every negative loop
    exactly twice.
    """
    a, b, c = _three_circuits(_as_graph(h))
    return Cover(a, "weak"), Cover(b, "weak"), Cover(c, "weak")


def _three_circuits(h: SignedGraph) -> tuple[list, list, list]:
    h, pos = strip_positive_loops(h)
    h = prune_pendants(h)
    extra = [loop_element(h.root, p) for p in pos]
    if h.m == 0:
        return list(extra), list(extra), list(extra)
    circs = _tree_circuits(h)
    unb = [c for c in circs if h.negative_count(c) % 2]
    if len(unb) % 2:
        raise StructuralError("odd number of unbalanced circuits")
    if not unb:
        base = [classify(h, c) for c in circs] + extra
        return list(base), list(base), list(base)
    for b in sorted(bridges(h)):
        sides = components(h.without([b]))
        if any(is_balanced(s) for s in sides):
            parts = [_three_circuits(s) for s in sides if s.m]
            res = tuple(sum((p[i] for p in parts), []) + extra for i in range(3))
            return res  # type: ignore[return-value]
    c1 = _leaf_elements(h)
    order = circuit_ordering(h, circs)
    unb_idx = [i for i, c in enumerate(order.circuits) if h.negative_count(c) % 2]
    kset = [classify(h, c) for c in order.circuits if h.negative_count(c) % 2 == 0]
    u = len(unb_idx)

    def bstar(r: int, s: int) -> SignedCircuitElement:
        i, j = unb_idx[r], unb_idx[s]
        seg = order.segment(h, i, j)
        return _barbell(h, order.circuits[i] | order.circuits[j] | set(seg))

    c2 = [bstar(r, r + 1) for r in range(0, u, 2)] + kset
    c3 = [bstar(r, (r + 1) % u) for r in range(1, u, 2)] + kset
    return c1 + extra, c2 + extra, c3 + extra


# ---------------------------------------------------------------------------
# decomposition of 2-connected Eulerian graphs


def decompose_eulerian(a: SignedGraph, v: int) -> tuple[SignedGraph, SignedGraph] | None:
    """None when ``a`` is a circuit; otherwise ``(A1, A2)`` with ``v`` in A1 and A2 even.

    Both parts are nontrivial Eulerian subgraphs partitioning the edges.
    """
    if any(e.is_loop and e.sign < 0 for e in a.edges):
        raise StructuralError("decomposition needs a graph without negative loops")
    if a.m == 0 or not is_connected(a) or not is_cycle_graph(a):
        raise StructuralError("decomposition needs a nontrivial Eulerian graph")
    if not a.has_vertex(v):
        raise StructuralError(f"vertex {v} not in graph")
    if is_circuit(a):
        return None
    res = _decompose(a, v)
    _check_decomposition(a, v, res)
    return res


def _circuit_through(a: SignedGraph, v: int) -> list[int]:
    for e in a.incident(v):
        if e.is_loop:
            continue
        rest = a.without([e.id])
        p = bfs_path(rest, [e.other(v)], [v])
        if p is not None:
            return [e.id] + p
    raise StructuralError(f"no circuit through {v}; graph is not 2-connected")


def _arc_between(a: SignedGraph, circ: list[int], start: int, x: int, y: int) -> tuple[list[int], list[int]]:
    """Split a circuit (edges in cyclic order from ``start``) into its two x-y arcs.

    The first arc runs from ``x`` to ``y``, the second from ``y`` to ``x``.
    """
    verts = [start]
    for eid in circ:
        verts.append(a.edge(eid).other(verts[-1]))
    verts.pop()
    k = len(circ)
    i, j = verts.index(x), verts.index(y)
    fwd = [circ[(i + d) % k] for d in range((j - i) % k)]
    bwd = [circ[(j + d) % k] for d in range((i - j) % k)]
    return fwd, bwd


def _internal_vertices(a: SignedGraph, path: list[int], x: int) -> set[int]:
    seq = [x]
    for eid in path:
        seq.append(a.edge(eid).other(seq[-1]))
    return set(seq[1:-1])


def _decompose(a: SignedGraph, v: int) -> tuple[SignedGraph, SignedGraph]:
    circ = _circuit_through(a, v)
    root = a.root
    csub = a.sub(circ)
    rest = subtract(a, csub)
    comps = [c for c in components(rest) if c.m]
    for comp in comps:
        if comp.negative_count() % 2 == 0:
            return subtract(a, comp), comp
    cverts = csub.vertices
    best = None
    for ci, comp in enumerate(comps):
        meet = sorted(set(comp.vertices) & set(cverts))
        for i, x in enumerate(meet):
            for y in meet[i + 1:]:
                for arc, s0 in zip(_arc_between(a, circ, v, x, y), (x, y)):
                    if v in _internal_vertices(a, arc, s0):
                        continue
                    key = (len(arc), ci, x, y, sorted(arc))
                    if best is None or key < best[0]:
                        best = (key, comp, x, y, arc)
    if best is None:
        raise ConstructionError("no component meets the circuit twice; graph is not 2-connected")
    _, comp, x, y, arc = best
    w = euler_circuit(comp, start=x)
    seq = [x]
    for eid in w:
        seq.append(a.edge(eid).other(seq[-1]))
    cut = seq.index(y)
    w1, w2 = w[:cut], w[cut:]
    want = a.negative_count(arc) % 2
    half = w1 if a.negative_count(w1) % 2 == want else w2
    a2 = root.sub(set(half) | set(arc))
    a1 = subtract(a, a2)
    return a1, a2


def _check_decomposition(a: SignedGraph, v: int, res: tuple[SignedGraph, SignedGraph]) -> None:
    a1, a2 = res
    if set(a1.edge_ids) | set(a2.edge_ids) != set(a.edge_ids) or set(a1.edge_ids) & set(a2.edge_ids):
        raise ConstructionError("decomposition does not partition the edges")
    for part in (a1, a2):
        if part.m == 0 or not is_connected(part) or not is_cycle_graph(part):
            raise ConstructionError("decomposition part is not a nontrivial Eulerian graph")
    if not a1.has_vertex(v):
        raise ConstructionError("first part misses the chosen vertex")
    if a2.negative_count() % 2:
        raise ConstructionError("second part has an odd number of negative edges")


# ---------------------------------------------------------------------------
# compression of loops


@dataclass(frozen=True)
class LoopAssignment:
    """Map from negative loops to an adjacent non-loop edge of ``source``."""

    source: SignedGraph
    mapping: dict[int, int]

    def preimage(self, eids: Iterable[int]) -> set[int]:
        s = set(eids)
        return {l for l, e in self.mapping.items() if e in s}


def default_assignment(g: SignedGraph, loops: Iterable[int] | None = None) -> LoopAssignment:
    """Each loop goes to the smallest-id non-loop edge at its vertex."""
    if loops is None:
        loops = [e.id for e in g.edges if e.is_loop and e.sign < 0]
    mapping = {}
    for l in loops:
        v = g.edge(l).u
        cand = [e.id for e in g.incident(v) if not e.is_loop]
        if not cand:
            raise StructuralError(f"loop {l} has no adjacent non-loop edge")
        mapping[l] = min(cand)
    return LoopAssignment(g, mapping)


def compress(g: SignedGraph, f: LoopAssignment) -> SignedGraph:
    """Drop the assigned loops and flip each target edge once per loop mapped to it."""
    for l, e in f.mapping.items():
        le, te = g.edge(l), g.edge(e)
        if not le.is_loop or te.is_loop or le.u not in (te.u, te.v):
            raise StructuralError(f"loop {l} is not assigned to an adjacent non-loop edge")
    flips: dict[int, int] = {}
    for e in f.mapping.values():
        flips[e] = -flips.get(e, g.sign(e))
    kept = [i for i in g.edge_ids if i not in f.mapping]
    base = g.sub(kept)
    return base.with_signs({e: s for e, s in flips.items()})


def decompress(g0star: SignedGraph, f: LoopAssignment) -> SignedGraph:
    """Lift a subgraph of the compression back to the source, adding its loops."""
    eids = set(g0star.edge_ids)
    return f.source.root.sub(eids | f.preimage(eids))
