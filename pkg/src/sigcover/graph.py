"""Signed multigraphs and the structural primitives used by the cover constructions.

A :class:`SignedGraph` is an immutable labelled multigraph: loops and parallel
edges are allowed and every edge carries a sign in ``{+1, -1}``.  Subgraphs are
plain :class:`SignedGraph` values that remember the graph they were cut from,
so edge ids stay stable all the way down a recursion.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class StructuralError(ValueError):
    """Raised when an input violates a structural precondition."""


class GraphParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    sign: int

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    @property
    def negative(self) -> bool:
        return self.sign < 0

    def other(self, x: int) -> int:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise StructuralError(f"vertex {x} is not an endpoint of edge {self.id}")


class SignedGraph:
    """Immutable signed multigraph with insertion-ordered vertices and edges."""

    __slots__ = ("_vertices", "_vset", "_edges", "_parent", "_adj")

    def __init__(self, vertices: Iterable[int], edges: Iterable[Edge], parent: "SignedGraph | None" = None):
        verts: list[int] = []
        seen: set[int] = set()
        for v in vertices:
            if v not in seen:
                seen.add(v)
                verts.append(v)
        emap: dict[int, Edge] = {}
        for e in edges:
            if e.id in emap:
                raise StructuralError(f"duplicate edge id {e.id}")
            if e.sign not in (1, -1):
                raise StructuralError(f"edge {e.id} has sign {e.sign}")
            for x in (e.u, e.v):
                if x not in seen:
                    raise StructuralError(f"edge {e.id} references unknown vertex {x}")
            emap[e.id] = e
        self._vertices = tuple(verts)
        self._vset = frozenset(verts)
        self._edges = emap
        self._parent = parent
        self._adj: dict[int, list[Edge]] | None = None

    # construction helpers

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[tuple[int, int, int]]) -> "SignedGraph":
        """Build a graph on vertices ``0..n-1``; edge ids are list positions."""
        return cls(range(n), [Edge(i, u, v, s) for i, (u, v, s) in enumerate(edges)])

    @property
    def root(self) -> "SignedGraph":
        return self._parent if self._parent is not None else self

    @property
    def parent(self) -> "SignedGraph | None":
        return self._parent

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self._edges.values())

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(self._edges)

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return len(self._edges)

    def edge(self, eid: int) -> Edge:
        return self._edges[eid]

    def has_edge(self, eid: int) -> bool:
        return eid in self._edges

    def has_vertex(self, v: int) -> bool:
        return v in self._vset

    def sign(self, eid: int) -> int:
        return self._edges[eid].sign

    def negative_ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self._edges.values() if e.sign < 0)

    def loop_ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self._edges.values() if e.is_loop)

    def negative_count(self, eids: Iterable[int] | None = None) -> int:
        if eids is None:
            return sum(1 for e in self._edges.values() if e.sign < 0)
        return sum(1 for i in eids if self._edges[i].sign < 0)

    def adjacency(self) -> dict[int, list[Edge]]:
        """Vertex -> incident edges in id order; a loop is listed once."""
        if self._adj is None:
            adj: dict[int, list[Edge]] = {v: [] for v in self._vertices}
            for e in sorted(self._edges.values(), key=lambda e: e.id):
                adj[e.u].append(e)
                if not e.is_loop:
                    adj[e.v].append(e)
            self._adj = adj
        return self._adj

    def incident(self, v: int) -> list[Edge]:
        return self.adjacency()[v]

    def degree(self, v: int) -> int:
        return sum(2 if e.is_loop else 1 for e in self.incident(v))

    def endpoints(self, eids: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for i in eids:
            e = self._edges[i]
            out.add(e.u)
            out.add(e.v)
        return out

    # subgraphs

    def sub(self, eids: Iterable[int], keep: Iterable[int] = ()) -> "SignedGraph":
        """Subgraph on the given edges; vertices are their endpoints plus ``keep``."""
        chosen = set(eids)
        es = [e for e in self._edges.values() if e.id in chosen]
        if len(es) != len(chosen):
            missing = chosen - set(self._edges)
            raise StructuralError(f"edges {sorted(missing)} not in graph")
        vs = set(keep) | {x for e in es for x in (e.u, e.v)}
        for x in vs:
            if x not in self._vset:
                raise StructuralError(f"vertex {x} not in graph")
        return SignedGraph([v for v in self._vertices if v in vs], es, parent=self.root)

    def without(self, eids: Iterable[int]) -> "SignedGraph":
        """Delete edges but keep every vertex."""
        drop = set(eids)
        return SignedGraph(self._vertices, [e for e in self._edges.values() if e.id not in drop], parent=self.root)

    def induced_by_vertices(self, vs: Iterable[int]) -> "SignedGraph":
        keep = set(vs)
        es = [e for e in self._edges.values() if e.u in keep and e.v in keep]
        return SignedGraph([v for v in self._vertices if v in keep], es, parent=self.root)

    def with_signs(self, signs: dict[int, int]) -> "SignedGraph":
        """Same underlying graph with some signs replaced; a new root graph."""
        es = [Edge(e.id, e.u, e.v, signs.get(e.id, e.sign)) for e in self._edges.values()]
        return SignedGraph(self._vertices, es)

    def with_new_edges(self, new: Sequence[tuple[int, int, int]]) -> tuple["SignedGraph", list[int]]:
        """Append edges ``(u, v, sign)`` with fresh ids; returns a new root graph."""
        nxt = max(self._edges, default=-1) + 1
        if self._parent is not None:
            nxt = max(nxt, max(self.root._edges, default=-1) + 1)
        es = list(self._edges.values())
        ids = []
        for u, v, s in new:
            es.append(Edge(nxt, u, v, s))
            ids.append(nxt)
            nxt += 1
        return SignedGraph(self._vertices, es), ids

    def same_edges(self, other: "SignedGraph") -> bool:
        return set(self._edges) == set(other._edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignedGraph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._vertices, tuple(self._edges.values())))

    def __repr__(self) -> str:
        body = ", ".join(f"{e.id}:{e.u}{'+' if e.sign > 0 else '-'}{e.v}" for e in self._edges.values())
        return f"SignedGraph(n={self.n}, [{body}])"


# ---------------------------------------------------------------------------
# text format


def parse_graph(text: str) -> SignedGraph:
    """Parse the ``n m`` / ``u v s`` edge-list format; ``#`` lines are comments."""
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise GraphParseError("expected header 'n m'", lineno)
            try:
                n, m = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphParseError("header values must be integers", lineno) from None
            if n < 0 or m < 0:
                raise GraphParseError("negative counts in header", lineno)
            header = (n, m)
            continue
        if len(parts) != 3:
            raise GraphParseError("expected edge line 'u v s'", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError("vertex indices must be integers", lineno) from None
        if parts[2] not in ("+", "-"):
            raise GraphParseError(f"sign must be '+' or '-', got {parts[2]!r}", lineno)
        n = header[0]
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"vertex out of range 0..{n - 1}", lineno)
        if len(edges) >= header[1]:
            raise GraphParseError(f"more than {header[1]} edge lines", lineno)
        edges.append((u, v, 1 if parts[2] == "+" else -1))
    if header is None:
        raise GraphParseError("empty input: missing header")
    if len(edges) != header[1]:
        raise GraphParseError(f"expected {header[1]} edge lines, found {len(edges)}")
    return SignedGraph.from_edges(header[0], edges)


def format_graph(g: SignedGraph, comment: str | None = None) -> str:
    """Inverse of :func:`parse_graph` for graphs on vertices ``0..n-1``."""
    index = {v: i for i, v in enumerate(g.vertices)}
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"{g.n} {g.m}")
    for e in sorted(g.edges, key=lambda e: e.id):
        lines.append(f"{index[e.u]} {index[e.v]} {'+' if e.sign > 0 else '-'}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# connectivity


def components(g: SignedGraph) -> list[SignedGraph]:
    """Connected components (isolated vertices become edgeless components)."""
    adj = g.adjacency()
    seen: set[int] = set()
    out = []
    for s in g.vertices:
        if s in seen:
            continue
        seen.add(s)
        comp_v = [s]
        comp_e: set[int] = set()
        q = deque([s])
        while q:
            x = q.popleft()
            for e in adj[x]:
                comp_e.add(e.id)
                y = e.other(x)
                if y not in seen:
                    seen.add(y)
                    comp_v.append(y)
                    q.append(y)
        out.append(g.sub(comp_e, keep=comp_v))
    return out


def is_connected(g: SignedGraph) -> bool:
    return g.n <= 1 or len(components(g)) == 1


def bfs_path(g: SignedGraph, sources: Iterable[int], targets: Iterable[int],
             forbidden: Iterable[int] = ()) -> list[int] | None:
    """Shortest path (as edge ids) from any source to any target.

    Internal vertices avoid ``forbidden``; ties are broken by vertex and edge id.
    """
    tset = set(targets)
    ban = set(forbidden)
    adj = g.adjacency()
    prev: dict[int, tuple[int, int] | None] = {}
    q: deque[int] = deque()
    for s in sorted(set(sources)):
        if s in tset:
            return []
        prev[s] = None
        q.append(s)
    while q:
        x = q.popleft()
        for e in adj[x]:
            if e.is_loop:
                continue
            y = e.other(x)
            if y in prev:
                continue
            prev[y] = (x, e.id)
            if y in tset:
                path = []
                cur = y
                while prev[cur] is not None:
                    px, pe = prev[cur]
                    path.append(pe)
                    cur = px
                return path[::-1]
            if y in ban:
                continue
            q.append(y)
    return None


def walk_vertices(g: SignedGraph, start: int, eids: Sequence[int]) -> list[int]:
    """Vertex sequence of a walk given by consecutive edge ids."""
    seq = [start]
    for i in eids:
        seq.append(g.edge(i).other(seq[-1]))
    return seq


def bridges(g: SignedGraph) -> set[int]:
    """Bridge edge ids; parallel edges and loops are never bridges."""
    adj = g.adjacency()
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    out: set[int] = set()
    t = 0
    for root in g.vertices:
        if root in disc:
            continue
        disc[root] = low[root] = t
        t += 1
        stack: list[tuple[int, int, Iterator[Edge]]] = [(root, -1, iter(adj[root]))]
        while stack:
            x, pe, it = stack[-1]
            advanced = False
            for e in it:
                if e.is_loop or e.id == pe:
                    continue
                y = e.other(x)
                if y in disc:
                    low[x] = min(low[x], disc[y])
                else:
                    disc[y] = low[y] = t
                    t += 1
                    stack.append((y, e.id, iter(adj[y])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if stack:
                    px = stack[-1][0]
                    low[px] = min(low[px], low[x])
                    if low[x] > disc[px]:
                        out.add(pe)
    return out


@dataclass(frozen=True)
class BlockDecomposition:
    """Blocks in the loop-aware sense used by the cover recursions.

    ``blocks`` partitions every edge: non-loop biconnected components, with
    each loop attached to the unique block through its vertex.  Loops at a
    cut vertex (or at a vertex with no other edge) form their own block.
    """

    blocks: tuple[frozenset[int], ...]
    bridges: frozenset[int]
    cut_vertices: frozenset[int]
    endblocks: tuple[int, ...]
    block_vertices: tuple[frozenset[int], ...]

    def is_two_connected(self) -> bool:
        return len(self.blocks) <= 1


def block_decompose(g: SignedGraph) -> BlockDecomposition:
    if not is_connected(g):
        raise StructuralError("block decomposition needs a connected graph")
    adj = g.adjacency()
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    t = 0
    estack: list[int] = []
    raw_blocks: list[set[int]] = []
    for root in g.vertices:
        if root in disc:
            continue
        disc[root] = low[root] = t
        t += 1
        stack: list[tuple[int, int, Iterator[Edge]]] = [(root, -1, iter(adj[root]))]
        while stack:
            x, pe, it = stack[-1]
            advanced = False
            for e in it:
                if e.is_loop or e.id == pe:
                    continue
                y = e.other(x)
                if y in disc:
                    if disc[y] < disc[x]:
                        estack.append(e.id)
                        low[x] = min(low[x], disc[y])
                else:
                    estack.append(e.id)
                    disc[y] = low[y] = t
                    t += 1
                    stack.append((y, e.id, iter(adj[y])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if stack:
                    px = stack[-1][0]
                    low[px] = min(low[px], low[x])
                    if low[x] >= disc[px]:
                        blk: set[int] = set()
                        while True:
                            eid = estack.pop()
                            blk.add(eid)
                            if eid == pe:
                                break
                        raw_blocks.append(blk)
    vert_blocks: dict[int, list[int]] = {v: [] for v in g.vertices}
    bverts = []
    for bi, blk in enumerate(raw_blocks):
        vs = g.endpoints(blk)
        bverts.append(vs)
        for v in vs:
            vert_blocks[v].append(bi)
    cut = {v for v, bs in vert_blocks.items() if len(bs) >= 2}
    loops_at: dict[int, list[int]] = {}
    for e in g.edges:
        if e.is_loop:
            loops_at.setdefault(e.u, []).append(e.id)
    loop_blocks: list[set[int]] = []
    for v, ls in loops_at.items():
        if len(vert_blocks[v]) == 1:
            raw_blocks[vert_blocks[v][0]].update(ls)
        else:
            loop_blocks.append(set(ls))
            bverts.append({v})
    all_blocks = raw_blocks + loop_blocks
    brs = frozenset(bridges(g))
    order = sorted(range(len(all_blocks)), key=lambda i: min(all_blocks[i]))
    blocks = tuple(frozenset(all_blocks[i]) for i in order)
    bvs = tuple(frozenset(bverts[i]) for i in order)
    ends = []
    if len(blocks) > 1:
        for i, blk in enumerate(blocks):
            if all(g.edge(x).is_loop for x in blk):
                continue
            if len(bvs[i] & cut) <= 1:
                ends.append(i)
    return BlockDecomposition(blocks, brs, frozenset(cut), tuple(ends), bvs)


def is_two_connected(g: SignedGraph) -> bool:
    """No cut vertex, in the sense where loops never create one."""
    if g.m == 0:
        return g.n <= 1
    if not is_connected(g):
        return False
    return block_decompose(g).is_two_connected()


# ---------------------------------------------------------------------------
# Eulerian structure


def is_cycle_graph(g: SignedGraph) -> bool:
    """All degrees even (a *cycle* in the paper-free sense of an even subgraph)."""
    return all(g.degree(v) % 2 == 0 for v in g.vertices)


def is_eulerian(g: SignedGraph) -> bool:
    """Connected with every degree even; the one-vertex graph counts."""
    if g.n == 0:
        return False
    return is_connected(g) and is_cycle_graph(g)


def is_circuit(g: SignedGraph) -> bool:
    """Connected and 2-regular (a loop alone is a circuit)."""
    return g.m >= 1 and is_connected(g) and all(g.degree(v) == 2 for v in g.vertices)


def euler_circuit(g: SignedGraph, start: int | None = None) -> list[int]:
    """Closed Eulerian trail as a list of edge ids (Hierholzer, smallest id first).

    Isolated vertices are ignored; the edges must form one connected even graph.
    """
    if g.m == 0:
        return []
    if not is_cycle_graph(g):
        raise StructuralError("graph has odd-degree vertices")
    adj = g.adjacency()
    if start is None:
        start = min(v for v in g.vertices if adj[v])
    used: set[int] = set()
    ptr = {v: 0 for v in g.vertices}
    stack: list[tuple[int, int]] = [(start, -1)]
    out: list[int] = []
    while stack:
        x, via = stack[-1]
        lst = adj[x]
        while ptr[x] < len(lst) and lst[ptr[x]].id in used:
            ptr[x] += 1
        if ptr[x] < len(lst):
            e = lst[ptr[x]]
            used.add(e.id)
            stack.append((e.other(x), e.id))
        else:
            stack.pop()
            if via >= 0:
                out.append(via)
    if len(out) != g.m:
        raise StructuralError("edges do not form a connected even graph")
    out.reverse()
    return out


def subtract(a1: SignedGraph, a2: SignedGraph) -> SignedGraph:
    """Remove the edges of ``a2`` from ``a1`` and drop isolated vertices."""
    if a1.root is not a2.root:
        raise StructuralError("subtraction needs subgraphs of the same graph")
    drop = set(a2.edge_ids)
    return a1.root.sub([i for i in a1.edge_ids if i not in drop])
