"""Covers of trees of Eulerian graphs: the even three-cover recursion and the odd-leaf cover."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from .circuits import Cover, InvalidElement, SignedCircuitElement, classify
from .euler_tree import (
    ConstructionError,
    EulerTree,
    _as_graph,
    _three_circuits,
    add_negative_loop,
    build_euler_tree,
    compress,
    decompose_eulerian,
    decompress,
    default_assignment,
    eps_tilde,
    leaf_cover,
    loop_element,
    merge_on_loops,
    prune_pendants,
    split_endblock,
    strip_positive_loops,
)
from .graph import (
    SignedGraph,
    StructuralError,
    block_decompose,
    bridges,
    components,
    is_circuit,
    is_connected,
    is_cycle_graph,
    subtract,
)

CHAIN_SEARCH_BUDGET = int(os.environ.get("SIGCOVER_CHAIN_BUDGET", "200000"))

Triple = tuple[list[SignedCircuitElement], list[SignedCircuitElement], list[SignedCircuitElement]]


def _non_loop_count(h: SignedGraph) -> int:
    return sum(1 for e in h.edges if not e.is_loop)


# ---------------------------------------------------------------------------
# even trees


def even_tree_three_covers(h: "EulerTree | SignedGraph") -> tuple[Cover, Cover, Cover]:
    """Three weak covers with per-cover width <= 2 and total width <= 4.

    The first cover uses every negative loop exactly twice.  Needs an even
    number of negative non-bridge edges.
    """
    g = _as_graph(h)
    build_euler_tree(g)
    if eps_tilde(g) % 2:
        raise StructuralError("odd number of negative non-bridge edges")
    a, b, c = _even3(g)
    return Cover(a, "weak"), Cover(b, "weak"), Cover(c, "weak")


def even_tree_cover(h: "EulerTree | SignedGraph") -> Cover:
    """Shortest of the three even-tree covers (length at most 4/3 of the edge count)."""
    covers = even_tree_three_covers(h)
    return min(covers, key=lambda c: (c.length, covers.index(c)))


def _even3(h: SignedGraph) -> Triple:
    h, pos = strip_positive_loops(h)
    h = prune_pendants(h)
    extra = [loop_element(h.root, p) for p in pos]
    if h.m == 0:
        return list(extra), list(extra), list(extra)
    if eps_tilde(h) % 2:
        raise ConstructionError("even-tree recursion reached an odd part")
    split = split_endblock(h)
    if split is not None:
        h1, h2, v = split
        if eps_tilde(h1) % 2 == 0:
            r1, r2 = _even3(h1), _even3(h2)
            return tuple(r1[i] + r2[i] + extra for i in range(3))  # type: ignore[return-value]
        g1, e1 = add_negative_loop(h1, v)
        g2, e2 = add_negative_loop(h2, v)
        r1, r2 = _even3(g1), _even3(g2)
        merged = tuple(merge_on_loops(h, r1[i], e1, r2[i], e2) + extra for i in range(3))
        for i, want in enumerate((2, 1, 1)):
            got1 = sum(1 for el in r1[i] if e1 in el.edges)
            if got1 != want:
                raise ConstructionError(f"auxiliary loop covered {got1} times by cover {i + 1}")
        return merged  # type: ignore[return-value]
    if h.n == 1 or _non_loop_count(h) == 1:
        r = _three_circuits(h)
        return tuple(x + extra for x in r)  # type: ignore[return-value]
    f = default_assignment(h)
    hs = compress(h, f)
    parts = decompose_eulerian(hs, hs.vertices[0])
    if parts is None:
        r = _three_circuits(h)
        return tuple(x + extra for x in r)  # type: ignore[return-value]
    r1, r2 = (_even3(decompress(p, f)) for p in parts)
    return tuple(r1[i] + r2[i] + extra for i in range(3))  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# odd leaves


def _check_odd_leaf_pre(h: SignedGraph) -> None:
    t = build_euler_tree(h)
    leaves = t.leaves()
    if len(leaves) < 2:
        raise StructuralError("needs at least two leaf balloons")
    if any(not b.odd for b in leaves):
        raise StructuralError("every leaf balloon must be odd")


def odd_leaf_cover(h: "EulerTree | SignedGraph") -> Cover:
    """Cover of width at most 2 using every loop exactly twice.

    Needs at least two leaf balloons, all of them odd.
    """
    g = _as_graph(h)
    _check_odd_leaf_pre(g)
    return Cover(_odd_leaf(g), "full")


def _pair_loops_cyclic(g: SignedGraph, loops: list[int]) -> list[SignedCircuitElement]:
    k = len(loops)
    return [classify(g, [loops[i], loops[(i + 1) % k]]) for i in range(k)]


def _single_even_balloon(h1: SignedGraph) -> bool:
    return not h1.loop_ids() and not bridges(h1) and h1.negative_count() % 2 == 0


def _odd_leaf(h: SignedGraph) -> list[SignedCircuitElement]:
    h, pos = strip_positive_loops(h)
    extra = [loop_element(h.root, p) for p in pos for _ in range(2)]
    _check_odd_leaf_pre(h)
    split = split_endblock(h, prefer=_single_even_balloon)
    if split is not None:
        h1, h2, v = split
        if _single_even_balloon(h1):
            c1 = _even3(h1)[0]
            return c1 + _odd_leaf(h2) + extra
        g1, e1 = add_negative_loop(h1, v)
        g2, e2 = add_negative_loop(h2, v)
        r1, r2 = _odd_leaf(g1), _odd_leaf(g2)
        merged = merge_on_loops(h, r1, e1, r2, e2)
        if sum(len(x) for x in merged) != sum(len(x) for x in r1) + sum(len(x) for x in r2) - 4:
            raise ConstructionError("merge changed the length unexpectedly")
        return merged + extra
    loops = sorted(e.id for e in h.edges if e.is_loop)
    if h.n == 1:
        return _pair_loops_cyclic(h, loops) + extra
    if _non_loop_count(h) == 1:
        return leaf_cover(h).elements + extra
    if len(loops) == 1:
        return _even3(h)[0] + extra
    return _odd_leaf_main(h, loops) + extra


def _odd_leaf_main(h: SignedGraph, loops: list[int]) -> list[SignedCircuitElement]:
    failures = []
    for e1, e2 in itertools.combinations(loops, 2):
        try:
            return _odd_leaf_with(h, e1, e2)
        except ChainNotFound as exc:
            failures.append(f"({e1},{e2}): {exc}")
    raise ConstructionError("no barbell chain found for any loop pair: " + "; ".join(failures))


class ChainNotFound(ConstructionError):
    pass


def _odd_leaf_with(h: SignedGraph, e1: int, e2: int) -> list[SignedCircuitElement]:
    v1, v2 = h.edge(e1).u, h.edge(e2).u
    rest = h.root.sub([i for i in h.edge_ids if i not in (e1, e2)])
    f = default_assignment(rest)
    hs = compress(rest, f)
    if is_circuit(hs):
        return leaf_cover(h).elements
    found = _find_partition(hs, v1, v2)
    if isinstance(found, Partition):
        out: list[SignedCircuitElement] = []
        s_piece = decompress(found.s_part, f)
        hs_full = h.root.sub(set(s_piece.edge_ids) | {e1, e2})
        out += _odd_leaf(hs_full)
        for piece in found.others:
            d = decompress(piece, f)
            if d.negative_count() % 2 == 0:
                out += _even3(d)[0]
            elif len(d.loop_ids()) >= 2:
                out += _odd_leaf(d)
            else:
                raise ConstructionError("partition piece is odd with fewer than two loops")
        return out
    p1, p2 = found
    return _final_chain(h, e1, e2, p1, p2)


# ---------------------------------------------------------------------------
# partition search inside the compressed graph


@dataclass
class Partition:
    s_part: SignedGraph
    others: list[SignedGraph]


def _two_disjoint_paths(g: SignedGraph, a: int, b: int, cap: int = 50000) -> tuple[list[int], list[int]]:
    """Two internally vertex-disjoint a-b paths with the fewest edges in total."""
    adj = g.adjacency()
    paths: list[tuple[list[int], set[int]]] = []
    stack_e: list[int] = []
    on = {a}

    def dfs(x: int) -> None:
        for e in adj[x]:
            if e.is_loop:
                continue
            y = e.other(x)
            if y == b:
                inner = set(on) - {a}
                paths.append((stack_e + [e.id], inner))
                if len(paths) > cap:
                    raise ConstructionError("too many paths between loop vertices")
                continue
            if y in on:
                continue
            on.add(y)
            stack_e.append(e.id)
            dfs(y)
            stack_e.pop()
            on.discard(y)

    dfs(a)
    paths.sort(key=lambda p: (len(p[0]), p[0]))
    best = None
    for i, (pa, ia) in enumerate(paths):
        for pb, ib in paths[i + 1:]:
            if ia & ib or set(pa) & set(pb):
                continue
            key = (len(pa) + len(pb), pa, pb)
            if best is None or key < best:
                best = key
            break
    if best is None:
        raise ConstructionError("no two internally disjoint paths; graph is not 2-connected")
    return best[1], best[2]


def _path_vertices(g: SignedGraph, path: list[int], start: int) -> list[int]:
    seq = [start]
    for eid in path:
        seq.append(g.edge(eid).other(seq[-1]))
    return seq


def _find_partition(hs: SignedGraph, v1: int, v2: int) -> "Partition | tuple[list[int], list[int]]":
    if v1 == v2:
        parts = decompose_eulerian(hs, v1)
        if parts is None:
            raise ConstructionError("compressed graph is a circuit")
        return Partition(parts[0], [parts[1]])
    p1, p2 = _two_disjoint_paths(hs, v1, v2)
    pvs1 = _path_vertices(hs, p1, v1)
    pvs2 = _path_vertices(hs, p2, v1)
    pset = set(pvs1) | set(pvs2)
    rest = subtract(hs, hs.sub(set(p1) | set(p2)))
    comps = [c for c in components(rest) if c.m]

    def split_off(piece: SignedGraph) -> Partition:
        return Partition(subtract(hs, piece), [piece])

    for a in comps:
        bd = block_decompose(a)
        if not bd.is_two_connected():
            i = bd.endblocks[0]
            a1 = hs.root.sub(bd.blocks[i])
            a2 = subtract(a, a1)
            if a1.negative_count() % 2 == 0:
                return split_off(a1)
            if a2.negative_count() % 2 == 0:
                return split_off(a2)
            return split_off(a)
        w = min(set(a.vertices) & pset)
        parts = decompose_eulerian(a, w)
        if parts is not None:
            return split_off(parts[1])
        if a.negative_count() % 2 == 0:
            return split_off(a)
        for pvs, path in ((pvs1, p1), (pvs2, p2)):
            meet = [x for x in pvs if a.has_vertex(x)]
            if len(meet) < 2:
                continue
            u1, u2 = meet[0], meet[1]
            i, j = pvs.index(u1), pvs.index(u2)
            sub_edges = path[i:j]
            sub_vs = set(pvs[i:j + 1])
            b_edges = set(sub_edges)
            for other in comps:
                if other is a:
                    continue
                touch = set(other.vertices) & pset
                if touch and touch <= sub_vs:
                    b_edges |= set(other.edge_ids)
            arcs = _circuit_arcs(a, u1, u2)
            for arc in arcs:
                cand = b_edges | set(arc)
                if hs.negative_count(cand) % 2 == 0:
                    return split_off(hs.root.sub(cand))
            raise ConstructionError("no even closing arc for a doubly attached circuit")
    return p1, p2


def _circuit_arcs(a: SignedGraph, x: int, y: int) -> list[list[int]]:
    from .euler_tree import _arc_between
    from .graph import euler_circuit

    start = min(a.vertices)
    circ = euler_circuit(a, start=start)
    fwd, bwd = _arc_between(a, circ, start, x, y)
    return [fwd, bwd]


# ---------------------------------------------------------------------------
# final configuration: barbell chain along a closed trail


def _final_chain(h: SignedGraph, e1: int, e2: int, p1: list[int], p2: list[int]) -> list[SignedCircuitElement]:
    v1 = h.edge(e1).u
    loops = sorted(e.id for e in h.edges if e.is_loop)
    pverts = h.endpoints(p1) | h.endpoints(p2)
    lset = {l for l in loops if h.edge(l).u in pverts}
    drop = set(p1) | set(p2) | lset
    rest = h.root.sub([i for i in h.edge_ids if i not in drop])
    circ_parts = []
    for comp in components(rest):
        if comp.m and is_circuit(comp) and not comp.loop_ids() and comp.negative_count() % 2:
            circ_parts.append(frozenset(comp.edge_ids))
    variants = [
        [frozenset([l]) for l in loops] + circ_parts,
        [frozenset([l]) for l in loops],
    ]
    tried = []
    for svar in variants:
        if svar in tried:
            continue
        tried.append(svar)
        res = _chain_search(h, svar, frozenset([e1]), v1, prefer_last=set(p2))
        if res is not None:
            return res
    raise ChainNotFound("no closed trail realises the barbell chain")


def _chain_search(h: SignedGraph, selems: list[frozenset[int]], first: frozenset[int], start: int,
                  prefer_last: set[int] = frozenset()) -> list[SignedCircuitElement] | None:
    """Search a closed trail through the non-S edges so consecutive S-circuits form barbells.

    The trail starts at ``start`` with ``first`` as the first circuit.  Every
    S-circuit is used by two barbells and every trail edge by exactly one.
    """
    s_edges = set().union(*selems)
    trail_edges = [i for i in h.edge_ids if i not in s_edges]
    tsub = h.root.sub(trail_edges, keep=[start]) if trail_edges else None
    if tsub is None or not is_cycle_graph(tsub) or not is_connected(tsub):
        return None
    svs = [h.endpoints(c) for c in selems]
    at: dict[int, list[int]] = {}
    for k, vs in enumerate(svs):
        for x in vs:
            at.setdefault(x, []).append(k)
    first_idx = selems.index(first)
    adj = tsub.adjacency()
    budget = [CHAIN_SEARCH_BUDGET]
    result: list[list[SignedCircuitElement]] = []

    def barbell(a: int, b: int, seg: list[int]) -> SignedCircuitElement | None:
        try:
            el = classify(h, selems[a] | selems[b] | set(seg))
        except InvalidElement:
            return None
        return el if el.is_barbell else None

    def events(x: int, visited: frozenset[int], cur: int, seg: list[int], made: list):
        """Yield (new visited, new current, new made list) for arrivals at x."""
        new = [k for k in at.get(x, ()) if k not in visited]
        if not new:
            yield visited, cur, made, False
            return
        for perm in itertools.permutations(new):
            chain = list(made)
            prev, s = cur, seg
            ok = True
            for k in perm:
                el = barbell(prev, k, s)
                if el is None:
                    ok = False
                    break
                chain.append(el)
                prev, s = k, []
            if ok:
                yield visited | set(perm), prev, chain, True

    used: set[int] = set()
    total = len(trail_edges)

    def dfs(x: int, visited: frozenset[int], cur: int, seg: list[int], segv: set[int], made: list) -> bool:
        budget[0] -= 1
        if budget[0] < 0:
            return False
        if len(used) == total:
            if x != start or len(visited) != len(selems):
                return False
            el = barbell(cur, first_idx, seg)
            if el is None:
                return False
            result.append(made + [el])
            return True
        cands = [e for e in adj[x] if e.id not in used]
        cands.sort(key=lambda e: (e.id in prefer_last, e.id))
        for e in cands:
            y = e.other(x)
            last = len(used) + 1 == total
            if last and y != start:
                continue
            if not last and (y in segv or y in svs[cur]):
                continue
            used.add(e.id)
            seg2 = seg + [e.id]
            if last:
                if dfs(y, visited, cur, seg2, segv, made):
                    return True
            else:
                for vis2, cur2, made2, fired in events(y, visited, cur, seg2, made):
                    if fired:
                        ok = dfs(y, vis2, cur2, [], {y}, made2)
                    else:
                        ok = dfs(y, vis2, cur2, seg2, segv | {y}, made2)
                    if ok:
                        return True
            used.discard(e.id)
        return False

    init_new = [k for k in at.get(start, ()) if k != first_idx]
    for perm in itertools.permutations(init_new):
        chain: list[SignedCircuitElement] = []
        prev = first_idx
        ok = True
        for k in perm:
            el = barbell(prev, k, [])
            if el is None:
                ok = False
                break
            chain.append(el)
            prev = k
        if not ok:
            continue
        used.clear()
        if dfs(start, frozenset([first_idx, *perm]), prev, [], {start}, chain):
            return result[0]
    return None
