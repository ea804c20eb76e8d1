"""Case engines for an odd number of negative edges in a 2-connected G'.

Each engine follows the bound argument literally: it picks the negative
edges ``x, y, z, w`` (smallest id first), classifies the configuration and
returns the covers that argument promises.  :mod:`sigcover.prime` uses the
engines as audits of its candidate search.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .circuits import (
    FundamentalSystem,
    InvalidElement,
    Kind,
    SignedCircuitElement,
    barbell_on_cut_pair,
    classify,
    fundamental_system,
    simple_paths_between,
)
from .euler_covers import even_tree_cover, even_tree_three_covers
from .euler_tree import ConstructionError
from .graph import SignedGraph, StructuralError, is_connected


class EngineFailure(ConstructionError):
    """The configuration the argument expects was not found."""


@dataclass
class EngineReport:
    """What an engine found.

    ``configuration`` names the branch taken, ``collections`` lists the
    candidate covers it produced and ``best`` is the shortest of them.
    """

    configuration: str
    collections: list[list[SignedCircuitElement]] = field(default_factory=list)
    pair: tuple[int, int] | None = None
    pair_element: SignedCircuitElement | None = None
    solutions: list["Solution"] = field(default_factory=list)

    @property
    def best(self) -> list[SignedCircuitElement]:
        return min(self.collections, key=lambda c: sum(map(len, c)))

    @property
    def best_length(self) -> int:
        return sum(map(len, self.best))


@dataclass(frozen=True)
class Solution:
    """``(a, b, C1, C2)`` with ``C1`` containing ``C_{l,a}`` and ``C2`` containing ``C_{a,b}``."""

    a: int
    b: int
    c1: SignedCircuitElement
    c2: SignedCircuitElement

    def corresponding_cover(self) -> list[SignedCircuitElement]:
        return [self.c1, self.c1, self.c2]

    def check(self, fs: FundamentalSystem, loop: int) -> None:
        need1 = fs.circuits[loop] ^ fs.circuits[self.a]
        need2 = fs.circuits[self.a] ^ fs.circuits[self.b]
        if not need1 <= self.c1.edges:
            raise EngineFailure(f"C1 of solution ({self.a},{self.b}) misses C_(l,a)")
        if not need2 <= self.c2.edges:
            raise EngineFailure(f"C2 of solution ({self.a},{self.b}) misses C_(a,b)")


# ---------------------------------------------------------------------------
# helpers


def _meet_vertices(fs: FundamentalSystem, a: int, b: int) -> set[int]:
    return fs.vertices_of(a) & fs.vertices_of(b)


def _meet(fs: FundamentalSystem, a: int, b: int) -> bool:
    return bool(_meet_vertices(fs, a, b))


def _union_edges(fs: FundamentalSystem, a) -> set[int]:
    acc: set[int] = set()
    for x in a:
        acc |= fs.circuits[x]
    return acc


def nontrivial_path_intersection(g: SignedGraph, fs: FundamentalSystem, dset: set[int], x: int) -> set[int] | None:
    """Edges of ``D ∩ C_x`` when that intersection is a path with at least one edge."""
    cx = fs.circuits[x]
    common_e = cx & dset
    if not common_e:
        return None
    common_v = g.endpoints(cx) & g.endpoints(dset)
    sub = g.sub(common_e)
    if set(sub.vertices) != common_v or not is_connected(sub):
        return None
    if any(sub.degree(v) > 2 for v in sub.vertices) or sub.m != sub.n - 1:
        return None
    return common_e


def extensions(g: SignedGraph, fs: FundamentalSystem, chosen: list[int]):
    """Every ``(x, P)`` with ``x`` outside ``chosen`` and ``C_x ∩ D_chosen`` the non-trivial path ``P``."""
    dset = _union_edges(fs, chosen)
    for x in fs.negatives:
        if x in chosen or g.edge(x).is_loop:
            continue
        p = nontrivial_path_intersection(g, fs, dset, x)
        if p is not None:
            yield x, p


def extend_two_connected(g: SignedGraph, fs: FundamentalSystem, chosen: list[int]) -> tuple[int, set[int]] | None:
    """Smallest ``x`` outside ``chosen`` whose circuit meets ``D_chosen`` in a non-trivial path."""
    return next(extensions(g, fs, chosen), None)


def pair_circuit(g: SignedGraph, fs: FundamentalSystem, a: int, b: int) -> SignedCircuitElement:
    """``C_{a,b}`` itself; fails unless it is a balanced circuit or short barbell."""
    try:
        return classify(g, fs.circuits[a] ^ fs.circuits[b])
    except InvalidElement as exc:
        raise EngineFailure(f"C_({a},{b}) is not a signed circuit: {exc}") from exc


def _barbell(fs: FundamentalSystem, x: int, y: int, ys=()) -> SignedCircuitElement:
    cx, cy = fs.circuits[x], fs.circuits[y]
    if not (cx & cy) and len(fs.vertices_of(x) & fs.vertices_of(y)) == 1:
        # touching circuits: the connecting path is empty and the barbell is short
        el = classify(fs.graph, cx | cy)
        if el.kind is Kind.SHORT_BARBELL:
            return el
    try:
        el = barbell_on_cut_pair(fs, x, y, ys)
    except StructuralError as exc:
        raise EngineFailure(f"B_({x},{y})^{sorted(ys)}: {exc}") from exc
    if el is None:
        raise EngineFailure(f"B_({x},{y})^{sorted(ys)} does not exist")
    return el


def _pair_with_connector(g: SignedGraph, fs: FundamentalSystem, a: int, b: int,
                         avoid: set[int]) -> SignedCircuitElement:
    """Signed circuit containing ``C_{a,b}``; disjoint circuits are joined by a path avoiding ``avoid``."""
    cab = fs.circuits[a] ^ fs.circuits[b]
    try:
        return classify(g, cab)
    except InvalidElement:
        pass
    ca, cb = fs.circuits[a], fs.circuits[b]
    paths = simple_paths_between(g, g.endpoints(ca), g.endpoints(cb), avoid, 100_000)
    best = None
    for p in paths:
        try:
            el = classify(g, ca | cb | set(p))
        except InvalidElement:
            continue
        if best is None or len(el) < len(best):
            best = el
    if best is None:
        raise EngineFailure(f"no barbell joins C_{a} and C_{b} avoiding {sorted(avoid)}")
    return best


def _components_of_x_minus(fs: FundamentalSystem, g: SignedGraph, a: int) -> SignedGraph:
    from .prime import connected_symmetric_difference

    return connected_symmetric_difference(g, fs, [x for x in fs.negatives if x != a])


# ---------------------------------------------------------------------------
# no loops


def case_c_engine(g: SignedGraph, fs: FundamentalSystem | None = None) -> EngineReport:
    """Choice of ``a, b`` with a short ``C_{a,b}``-element, or the two-barbell cover."""
    fs = fs or fundamental_system(g)
    neg = list(fs.negatives)
    if len(neg) % 2 == 0 or len(neg) < 3 or g.loop_ids():
        raise StructuralError("engine needs an odd number (>= 3) of negative edges and no loops")
    limit = Fraction(2, 3) * g.m
    x = neg[0]
    ext = extend_two_connected(g, fs, [x])
    if ext is None:
        raise EngineFailure("no y with C_x ∩ C_y a non-trivial path")
    y = ext[0]
    ext = extend_two_connected(g, fs, [x, y])
    if ext is None:
        raise EngineFailure("no z extending D_{x,y}")
    z = ext[0]
    if _meet(fs, x, z) and _meet(fs, y, z):
        return _three_intersecting(g, fs, (x, y, z), limit)
    if _meet(fs, x, z):
        x, y = y, x  # relabel so that C_x and C_z are the disjoint pair
    dxyz = _union_edges(fs, [x, y, z])
    if dxyz == set(g.edge_ids):
        b1 = _barbell(fs, x, z, ())
        b2 = _barbell(fs, x, z, (y,))
        rep = EngineReport("D_xyz", [[b1, b2]])
        return rep
    ext = extend_two_connected(g, fs, [x, y, z])
    if ext is None:
        raise EngineFailure("no w extending D_{x,y,z}")
    w = ext[0]
    quad = (x, y, z, w)
    for tri in itertools.combinations(quad, 3):
        if all(_meet(fs, p, q) for p, q in itertools.combinations(tri, 2)):
            return _three_intersecting(g, fs, tri, limit)
    hubs = [c for c in quad if all(_meet(fs, c, d) for d in quad if d != c)]
    if hubs:
        hub = hubs[0]
        rest = [c for c in quad if c != hub]
        best = None
        for ys in itertools.product(((), (hub,)), repeat=3):
            try:
                trio = [_barbell(fs, p, q, yy) for (p, q), yy in zip(itertools.combinations(rest, 2), ys)]
            except EngineFailure:
                continue
            tw = Counter()
            for el in trio:
                tw.update(el.edges)
            if max(tw.values()) > 2:
                continue
            el = min(trio, key=len)
            key = len(el)
            if best is None or key < best[0]:
                pairs = list(itertools.combinations(rest, 2))
                best = (key, el, pairs[trio.index(el)])
        if best is None:
            raise EngineFailure("hub configuration: no barbell triple of total width 2")
        _, el, pair = best
        if len(el) > limit:
            raise EngineFailure("hub configuration: shortest barbell exceeds 2/3 m")
        return _with_pair(g, fs, "hub", pair, el)
    order = _chain_order(fs, quad)
    if order is None:
        raise EngineFailure("four circuits form neither a hub nor a chain")
    pairs = list(zip(order, order[1:]))
    els = [pair_circuit(g, fs, p, q) for p, q in pairs]
    if any(el.kind is not Kind.BALANCED_CIRCUIT for el in els):
        raise EngineFailure("chain configuration: a consecutive pair is not a balanced circuit")
    if set.intersection(*(set(el.edges) for el in els)):
        raise EngineFailure("chain configuration: an edge lies in all three circuits")
    i = min(range(3), key=lambda k: len(els[k]))
    if len(els[i]) > limit:
        raise EngineFailure("chain configuration: shortest circuit exceeds 2/3 m")
    return _with_pair(g, fs, "chain", pairs[i], els[i])


def _chain_order(fs, quad):
    for perm in itertools.permutations(quad):
        if all(_meet(fs, p, q) for p, q in zip(perm, perm[1:])):
            return perm
    return None


def _three_intersecting(g, fs, tri, limit) -> EngineReport:
    pairs = list(itertools.combinations(tri, 2))
    els = [pair_circuit(g, fs, p, q) for p, q in pairs]
    if any(el.kind is Kind.LONG_BARBELL for el in els):
        raise EngineFailure("pairwise meeting circuits gave a long barbell")
    i = min(range(3), key=lambda k: len(els[k]))
    if len(els[i]) > limit:
        raise EngineFailure("three intersecting circuits: shortest pair exceeds 2/3 m")
    return _with_pair(g, fs, "three-intersecting", pairs[i], els[i])


def _with_pair(g, fs, name, pair, el) -> EngineReport:
    a, b = pair
    cols = []
    for first in (a, b):
        h = _components_of_x_minus(fs, g, first)
        cols.append(list(even_tree_cover(h).elements) + [el])
    return EngineReport(name, cols, pair=(a, b), pair_element=el)


# ---------------------------------------------------------------------------
# exactly one loop


def case_b_engine(g: SignedGraph, loop: int, fs: FundamentalSystem | None = None) -> EngineReport:
    """Solutions whose corresponding covers have width at most ``2k``, and the resulting collections.

    The construction picks ``x`` through the loop vertex, then ``y`` and ``z``
    extending the union of the circuits chosen so far.  Every admissible choice
    is tried in id order; the first one whose configuration goes through wins,
    and the failure of the last attempt is raised if none does.
    """
    fs = fs or fundamental_system(g)
    neg = list(fs.negatives)
    if len(neg) % 2 == 0 or len(neg) < 3 or g.edge(loop).sign > 0 or not g.edge(loop).is_loop:
        raise StructuralError("engine needs an odd number (>= 3) of negative edges and one negative loop")
    v = g.edge(loop).u
    others = [x for x in neg if x != loop]
    for x, y in itertools.combinations(others, 2):
        if v in fs.vertices_of(x) and v in fs.vertices_of(y):
            sols = [Solution(x, y, pair_circuit(g, fs, loop, x), pair_circuit(g, fs, x, y)),
                    Solution(y, x, pair_circuit(g, fs, loop, y), pair_circuit(g, fs, y, x))]
            return _from_solutions(g, fs, loop, "loop-vertex-shared", sols)
    xs = [x for x in others if v in fs.vertices_of(x)]
    if not xs:
        raise EngineFailure("no circuit passes through the loop vertex")
    last: EngineFailure | None = None
    for x in xs:
        for y, _ in extensions(g, fs, [loop, x]):
            if _union_edges(fs, [loop, x, y]) == set(g.edge_ids):
                try:
                    cover = [pair_circuit(g, fs, loop, x), _barbell(fs, loop, y, ())]
                except EngineFailure as exc:
                    last = exc
                    continue
                return EngineReport("D_lxy", [cover])
            for z, p in extensions(g, fs, [loop, x, y]):
                try:
                    return _case_b_configuration(g, fs, loop, x, y, z, p)
                except EngineFailure as exc:
                    last = exc
    raise last or EngineFailure("no y extending D_{l,x}")


def _case_b_configuration(g, fs, loop, x, y, z, p) -> EngineReport:
    cx, cy = fs.circuits[x], fs.circuits[y]
    if p & (cx - cy):
        return _from_solutions(g, fs, loop, "P-meets-Cx-minus-Cy", _two_path_solutions(g, fs, loop, x, y, z))
    if not p <= cy:
        raise EngineFailure("P is neither in C_y nor meeting C_x - C_y")
    if p <= (cy - cx):
        b_lz = _barbell(fs, loop, z, ())
        if not (b_lz.edges & cx & cy):
            name = "(i)"
            sols = [Solution(x, y, pair_circuit(g, fs, loop, x), pair_circuit(g, fs, x, y)),
                    Solution(y, z, _barbell(fs, loop, y, ()), pair_circuit(g, fs, y, z)),
                    Solution(z, x, _barbell(fs, loop, z, (x, y)), _barbell(fs, x, z, ()))]
        else:
            name = "(ii)"
            sols = [Solution(x, y, pair_circuit(g, fs, loop, x), pair_circuit(g, fs, x, y)),
                    Solution(y, z, _barbell(fs, loop, y, ()), pair_circuit(g, fs, y, z)),
                    Solution(z, x, _barbell(fs, loop, z, (x,)), _barbell(fs, x, z, (y,)))]
    elif p <= (cx & cy):
        name = "(iii)"
        sols = [Solution(x, y, pair_circuit(g, fs, loop, x), pair_circuit(g, fs, x, y)),
                Solution(z, x, _barbell(fs, loop, z, ()), pair_circuit(g, fs, z, x)),
                Solution(z, y, _barbell(fs, loop, z, (x,)), pair_circuit(g, fs, z, y))]
    else:
        raise EngineFailure("P straddles C_y - C_x and C_x ∩ C_y")
    return _from_solutions(g, fs, loop, name, sols)


def _two_path_solutions(g, fs, loop, x, y, z) -> list[Solution]:
    v = g.edge(loop).u
    cy, cz = fs.circuits[y], fs.circuits[z]
    d = _union_edges(fs, [loop, x, y, z]) - cy - cz - {loop}
    host = g.sub(d, keep=[v])
    vy, vz = fs.vertices_of(y), fs.vertices_of(z)
    if v in vy or v in vz:
        raise EngineFailure("loop vertex lies on C_y or C_z")
    p1s = simple_paths_between(host, {v}, vy, set(), 100_000) if host.has_vertex(v) else []
    p2s = simple_paths_between(host, {v}, vz, set(), 100_000) if host.has_vertex(v) else []
    best = None
    for p1 in p1s:
        s1 = set(p1)
        for p2 in p2s:
            if s1 & set(p2):
                continue
            key = (len(p1) + len(p2), sorted(p1), sorted(p2))
            if best is None or key < best[0]:
                best = (key, p1, p2)
    if best is None:
        raise EngineFailure("no edge-disjoint paths P1, P2 from the loop")
    _, p1, p2 = best
    if cy & cz:
        cstar = pair_circuit(g, fs, y, z)
        if cstar.kind is not Kind.BALANCED_CIRCUIT:
            raise EngineFailure("C_(y,z) with shared edges is not a balanced circuit")
    else:
        cstar = _pair_with_connector(g, fs, y, z, {v})
    try:
        c1y = classify(g, {loop} | cy | set(p1))
        c1z = classify(g, {loop} | cz | set(p2))
    except InvalidElement as exc:
        raise EngineFailure(f"loop barbell through P1/P2 is invalid: {exc}") from exc
    return [Solution(y, z, c1y, cstar), Solution(z, y, c1z, cstar)]


def _from_solutions(g, fs, loop, name, sols: list[Solution]) -> EngineReport:
    k = len(sols)
    width: Counter = Counter()
    for s in sols:
        s.check(fs, loop)
        for el in s.corresponding_cover():
            width.update(el.edges)
    if max(width.values()) > 2 * k:
        raise EngineFailure(f"{name}: corresponding covers have width {max(width.values())} > {2 * k}")
    cols = []
    for s in sols:
        h = _components_of_x_minus(fs, g, s.a)
        c1, c2, c3 = even_tree_three_covers(h)
        cols.append(list(c1.elements) + [s.c2])
        cols.append(list(c2.elements) + [s.c1])
        cols.append(list(c3.elements) + [s.c1])
    return EngineReport(name, cols, solutions=sols)
