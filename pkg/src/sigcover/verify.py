"""Independent cover checking and an exact shortest-cover oracle for small graphs.

Nothing here relies on the construction code: element shapes are recognised
from degrees, connectivity, cyclomatic number and bridges, and the oracle
enumerates its own circuits and barbells.
"""

from __future__ import annotations

import os
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .graph import SignedGraph
from .setcover import min_set_cover

ORACLE_EDGE_LIMIT = int(os.environ.get("SIGCOVER_ORACLE_LIMIT", "15"))
ORACLE_CAP = int(os.environ.get("SIGCOVER_ORACLE_CAP", "200000"))


@dataclass(frozen=True)
class Violation:
    kind: str  # uncovered edge | invalid element | width breach | loop width | bound breach | unknown edge
    detail: str
    edge: int | None = None
    element: int | None = None


@dataclass(frozen=True)
class Requirements:
    """What a cover must satisfy.

    ``scope`` is ``"full"`` (every edge) or an explicit edge set.
    ``exact_twice`` lists edges that must have width exactly 2.
    """

    scope: object = "full"
    max_width: int | None = None
    exact_twice: frozenset[int] = frozenset()
    bound: Fraction | None = None


@dataclass
class VerificationReport:
    violations: list[Violation] = field(default_factory=list)
    length: int = 0
    widths: dict[int, int] = field(default_factory=dict)
    kinds: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations


# ---------------------------------------------------------------------------
# element recognition


def _edge_bridges(ends: dict[int, tuple[int, int]]) -> set[int]:
    """Bridges of the multigraph given as ``edge id -> (u, v)`` (iterative lowpoint DFS)."""
    adj: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for e, (u, v) in ends.items():
        if u != v:
            adj[u].append((v, e))
            adj[v].append((u, e))
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    out: set[int] = set()
    t = 0
    for s in list(adj):
        if s in disc:
            continue
        disc[s] = low[s] = t
        t += 1
        stack = [(s, -1, iter(adj[s]))]
        while stack:
            x, pe, it = stack[-1]
            for y, e in it:
                if e == pe:
                    continue
                if y in disc:
                    low[x] = min(low[x], disc[y])
                else:
                    disc[y] = low[y] = t
                    t += 1
                    stack.append((y, e, iter(adj[y])))
                    break
            else:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[x])
                    if low[x] > disc[p]:
                        out.add(pe)
    return out


def _groups(ends: dict[int, tuple[int, int]]) -> list[set[int]]:
    """Edge sets of the connected pieces."""
    parent: dict[int, int] = {}

    def find(a: int) -> int:
        while parent.setdefault(a, a) != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in ends.values():
        parent[find(u)] = find(v)
    by: dict[int, set[int]] = defaultdict(set)
    for e, (u, _) in ends.items():
        by[find(u)].add(e)
    return list(by.values())


def _split_at(ends: dict[int, tuple[int, int]], w: int) -> list[set[int]]:
    """The two closed walks through the degree-4 vertex ``w`` of a figure-eight."""
    left = dict(ends)
    cycles = []
    while left:
        start = next(e for e, (u, v) in sorted(left.items()) if w in (u, v))
        u, v = left.pop(start)
        cyc = {start}
        cur = v if u == w else u
        while cur != w:
            e = next(e for e, (a, b) in sorted(left.items()) if cur in (a, b))
            a, b = left.pop(e)
            cyc.add(e)
            cur = b if a == cur else a
        cycles.append(cyc)
    return cycles


def element_kind(g: SignedGraph, edges: Iterable[int]) -> tuple[str | None, str]:
    """``(kind, reason)``: kind is 'balanced_circuit', 'short_barbell', 'long_barbell' or None."""
    es = list(edges)
    if not es:
        return None, "empty element"
    if len(set(es)) != len(es):
        return None, "repeated edge inside an element"
    ends: dict[int, tuple[int, int]] = {}
    neg: dict[int, bool] = {}
    for i in es:
        if not g.has_edge(i):
            return None, f"unknown edge {i}"
        e = g.edge(i)
        ends[i] = (e.u, e.v)
        neg[i] = e.sign < 0
    deg: Counter = Counter()
    for u, v in ends.values():
        deg[u] += 1
        deg[v] += 1
    if len(_groups(ends)) != 1:
        return None, "not connected"
    n, m = len(deg), len(es)
    odd = lambda part: sum(neg[i] for i in part) % 2 == 1  # noqa: E731
    if all(d == 2 for d in deg.values()):
        if odd(es):
            return None, "unbalanced circuit"
        return "balanced_circuit", ""
    if m - n + 1 != 2:
        return None, f"cyclomatic number {m - n + 1}, not 2"
    if min(deg.values()) < 2:
        return None, "vertex of degree 1"
    high = sorted(v for v, d in deg.items() if d > 2)
    if len(high) == 1 and deg[high[0]] == 4:
        cycles = _split_at(ends, high[0])
        kind = "short_barbell"
    elif len(high) == 2 and all(deg[v] == 3 for v in high):
        br = _edge_bridges(ends)
        if not br:
            return None, "theta graph"
        cycles = _groups({i: ends[i] for i in es if i not in br})
        kind = "long_barbell"
    else:
        return None, "degree pattern of neither a circuit nor a barbell"
    if len(cycles) != 2 or not all(odd(c) for c in cycles):
        return None, "a circuit of the barbell is balanced"
    return kind, ""


# ---------------------------------------------------------------------------
# cover checking


def _edge_sets(cover) -> list[list[int]]:
    els = getattr(cover, "elements", cover)
    out = []
    for el in els:
        out.append(sorted(getattr(el, "edges", el)))
    return out


def verify_cover(g: SignedGraph, cover, requirements: Requirements | None = None) -> VerificationReport:
    """Check every element and the cover-level requirements; never raises on bad covers."""
    req = requirements or Requirements()
    rep = VerificationReport()
    sets = _edge_sets(cover)
    width: Counter = Counter()
    for k, es in enumerate(sets):
        kind, why = element_kind(g, es)
        rep.kinds.append(kind or "invalid")
        if kind is None:
            rep.violations.append(Violation("invalid element", f"element {k}: {why}", element=k))
        for i in es:
            if g.has_edge(i):
                width[i] += 1
            else:
                rep.violations.append(Violation("unknown edge", f"element {k} uses edge {i}", edge=i, element=k))
    rep.length = sum(len(es) for es in sets)
    rep.widths = {i: width.get(i, 0) for i in g.edge_ids}
    scope = set(g.edge_ids) if req.scope == "full" else set(req.scope)
    for i in sorted(scope):
        if width.get(i, 0) == 0:
            rep.violations.append(Violation("uncovered edge", f"edge {i} is not covered", edge=i))
    if req.max_width is not None:
        for i, w in sorted(width.items()):
            if w > req.max_width:
                rep.violations.append(Violation("width breach", f"edge {i} has width {w} > {req.max_width}", edge=i))
    for i in sorted(req.exact_twice):
        if width.get(i, 0) != 2:
            rep.violations.append(Violation("loop width", f"edge {i} has width {width.get(i, 0)}, not 2", edge=i))
    if req.bound is not None and rep.length > req.bound:
        rep.violations.append(Violation("bound breach", f"length {rep.length} exceeds {req.bound}"))
    return rep


# ---------------------------------------------------------------------------
# oracle


class OracleIncomplete(RuntimeError):
    """Enumeration hit the cap, so no optimum is claimed."""


class OracleLimit(RuntimeError):
    """The graph is larger than the oracle is configured for."""


class OracleInfeasible(RuntimeError):
    """Some edge lies in no signed circuit."""


@dataclass(frozen=True)
class OracleResult:
    length: int
    elements: tuple[frozenset[int], ...]
    candidates: int


def _incidence(g: SignedGraph) -> dict[int, list[tuple[int, int]]]:
    inc: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for e in g.edges:
        if not e.is_loop:
            inc[e.u].append((e.id, e.v))
            inc[e.v].append((e.id, e.u))
    return inc


def _paths(inc, sources: set[int], targets: set[int], blocked: set[int], budget: list[int]):
    """Simple paths (edge lists) with one end in ``sources``, the other in ``targets``,
    and no inner vertex in ``blocked``."""
    for s in sorted(sources):
        stack = [(s, [], {s})]
        while stack:
            x, path, seen = stack.pop()
            for e, y in inc[x]:
                if y in seen:
                    continue
                if y in targets:
                    budget[0] -= 1
                    if budget[0] < 0:
                        raise OracleIncomplete("too many connecting paths")
                    yield path + [e]
                elif y not in blocked:
                    stack.append((y, path + [e], seen | {y}))


def _all_circuits(g: SignedGraph, budget: list[int]) -> list[frozenset[int]]:
    inc = _incidence(g)
    out = [frozenset([e.id]) for e in g.edges if e.is_loop]
    for e in sorted((e for e in g.edges if not e.is_loop), key=lambda e: e.id):
        sub = {x: [(i, y) for i, y in lst if i > e.id] for x, lst in inc.items()}
        sub = defaultdict(list, sub)
        for p in _paths(sub, {e.v}, {e.u}, set(), budget):
            out.append(frozenset(p) | {e.id})
    return out


def signed_circuits(g: SignedGraph, cap: int = ORACLE_CAP) -> list[frozenset[int]]:
    """All balanced circuits, short barbells and long barbells of ``g`` (as edge sets)."""
    budget = [cap]
    circs = _all_circuits(g, budget)
    neg = {e.id for e in g.edges if e.sign < 0}
    verts = {c: {x for i in c for x in (g.edge(i).u, g.edge(i).v)} for c in circs}
    bal = [c for c in circs if len(c & neg) % 2 == 0]
    unb = [c for c in circs if len(c & neg) % 2 == 1]
    out = set(bal)
    inc = _incidence(g)
    for i, c1 in enumerate(unb):
        for c2 in unb[i + 1:]:
            if c1 & c2:
                continue
            shared = verts[c1] & verts[c2]
            if len(shared) == 1:
                out.add(c1 | c2)
            elif not shared:
                blocked = verts[c1] | verts[c2]
                for p in _paths(inc, verts[c1], verts[c2], blocked, budget):
                    out.add(c1 | c2 | frozenset(p))
            if len(out) > cap:
                raise OracleIncomplete(f"more than {cap} signed circuits")
    return sorted(out, key=lambda c: (len(c), sorted(c)))


def oracle_min_cover(g: SignedGraph, limit: int = ORACLE_EDGE_LIMIT, cap: int = ORACLE_CAP) -> OracleResult:
    """Exact shortest signed circuit cover by set cover over every signed circuit."""
    if g.m > limit:
        raise OracleLimit(f"{g.m} edges exceed the oracle limit {limit}")
    if g.m == 0:
        return OracleResult(0, (), 0)
    cands = signed_circuits(g, cap)
    ids = list(g.edge_ids)
    bit = {e: k for k, e in enumerate(ids)}
    masks = [sum(1 << bit[e] for e in c) for c in cands]
    res = min_set_cover(len(ids), masks, [len(c) for c in cands])
    if res is None:
        raise OracleInfeasible("some edge lies in no signed circuit")
    length, chosen = res
    return OracleResult(length, tuple(cands[j] for j in chosen), len(cands))
