"""Seeded instance generators for tests, benchmarks and the ``gen`` command."""

from __future__ import annotations

import itertools
import random
from typing import Iterator

from .circuits import is_flow_admissible
from .euler_tree import build_euler_tree, prune_pendants
from .graph import SignedGraph, StructuralError, bridges, is_connected, is_two_connected

MODELS = ("random-multigraph", "tree-plus-chords", "euler-tree")


def _rng(seed: "int | random.Random") -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_tree_edges(rng: random.Random, n: int) -> list[tuple[int, int]]:
    """Uniform-ish random labelled tree via random attachment."""
    order = list(range(n))
    rng.shuffle(order)
    return [(order[rng.randrange(i)], order[i]) for i in range(1, n)]


def random_multigraph(seed, n: int, m: int, negatives: int | None = None,
                      loop_prob: float = 0.1) -> SignedGraph:
    """Connected signed multigraph on ``n`` vertices with ``m`` edges.

    A random spanning tree guarantees connectivity; remaining edges are
    uniform pairs (or loops with probability ``loop_prob``).  Exactly
    ``negatives`` edges are negative when given, otherwise each edge is
    negative with probability 1/2.
    """
    if n < 1 or m < n - 1:
        raise StructuralError(f"cannot build a connected graph with n={n}, m={m}")
    rng = _rng(seed)
    pairs = random_tree_edges(rng, n)
    while len(pairs) < m:
        if n == 1 or rng.random() < loop_prob:
            v = rng.randrange(n)
            pairs.append((v, v))
        else:
            u, v = rng.sample(range(n), 2)
            pairs.append((u, v))
    rng.shuffle(pairs)
    if negatives is None:
        signs = [rng.choice((1, -1)) for _ in pairs]
    else:
        if not 0 <= negatives <= m:
            raise StructuralError("negative edge count out of range")
        neg = set(rng.sample(range(m), negatives))
        signs = [-1 if i in neg else 1 for i in range(m)]
    return SignedGraph.from_edges(n, [(u, v, s) for (u, v), s in zip(pairs, signs)])


def random_flow_admissible(seed, max_n: int = 7, max_m: int = 12, tries: int = 10_000) -> SignedGraph:
    """Rejection-sample a connected flow-admissible signed multigraph with at least one edge."""
    rng = _rng(seed)
    for _ in range(tries):
        n = rng.randint(1, max_n)
        m = rng.randint(max(n - 1, 1), max_m)
        g = random_multigraph(rng, n, m, loop_prob=rng.choice((0.0, 0.1, 0.25)))
        if is_flow_admissible(g):
            return g
    raise StructuralError("no flow-admissible instance found")


def exhaustive_small(max_n: int = 3, max_m: int = 5) -> Iterator[SignedGraph]:
    """Every connected flow-admissible signed multigraph up to relabelling-free duplicates.

    Graphs are generated as multisets of signed edge types on vertices
    ``0..n-1`` with every vertex used, so the sweep is exhaustive (some
    isomorphic copies appear more than once).
    """
    for n in range(1, max_n + 1):
        types = [(u, v, s) for u in range(n) for v in range(u, n) for s in (1, -1)]
        for m in range(1, max_m + 1):
            for combo in itertools.combinations_with_replacement(types, m):
                used = {x for (u, v, _) in combo for x in (u, v)}
                if len(used) != n:
                    continue
                g = SignedGraph.from_edges(n, list(combo))
                if is_connected(g) and is_flow_admissible(g):
                    yield g


def tree_plus_chords(seed, n: int, chords: int, loop_prob: float = 0.25) -> SignedGraph:
    """Positive spanning tree plus ``chords`` negative edges (loops allowed)."""
    if n < 1 or chords < 0:
        raise StructuralError("need n >= 1 and a non-negative chord count")
    rng = _rng(seed)
    edges = [(u, v, 1) for u, v in random_tree_edges(rng, n)]
    for _ in range(chords):
        if n == 1 or rng.random() < loop_prob:
            v = rng.randrange(n)
            edges.append((v, v, -1))
        else:
            u, v = rng.sample(range(n), 2)
            edges.append((u, v, -1))
    rng.shuffle(edges)
    return SignedGraph.from_edges(n, edges)


def _eulerian_piece(rng: random.Random, verts: list[int], circuits: int) -> list[tuple[int, int]]:
    """Union of closed walks over ``verts`` that stays connected; no loops."""
    edges: list[tuple[int, int]] = []
    touched = [verts[0]]
    for _ in range(circuits):
        k = rng.randint(2, max(2, min(len(verts), 4)))
        start = rng.choice(touched)
        pool = [v for v in verts if v != start]
        if not pool:
            break
        rest = rng.sample(pool, min(k - 1, len(pool)))
        cyc = [start] + rest
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            edges.append((a, b))
        touched = sorted(set(touched) | set(cyc))
    return edges


def _raw_euler_tree(rng: random.Random, max_m: int) -> tuple[int, list[tuple[int, int, int]]]:
    nodes = rng.randint(1, 4)
    edges: list[tuple[int, int, int]] = []
    n = 0
    reps: list[list[int]] = []
    for _ in range(nodes):
        kind = rng.random()
        if kind < 0.25:
            verts = [n]
            n += 1
        else:
            size = rng.randint(2, 4)
            verts = list(range(n, n + size))
            n += size
            for a, b in _eulerian_piece(rng, verts, rng.randint(1, 2)):
                edges.append((a, b, rng.choice((1, -1))))
        reps.append(verts)
    for i in range(1, nodes):
        j = rng.randrange(i)
        edges.append((rng.choice(reps[i]), rng.choice(reps[j]), rng.choice((1, -1))))
    for _ in range(rng.randint(0, 3)):
        v = rng.randrange(n)
        edges.append((v, v, -1))
    return n, edges


def _relabel(g: SignedGraph) -> SignedGraph:
    idx = {v: i for i, v in enumerate(g.vertices)}
    return SignedGraph.from_edges(g.n, [(idx[e.u], idx[e.v], e.sign) for e in g.edges])


def random_euler_tree(seed, max_m: int = 14, parity: str = "even", tries: int = 10_000) -> SignedGraph:
    """Tree of Eulerian graphs with at most ``max_m`` edges.

    ``parity="even"`` makes the number of negative non-bridge edges even.
    ``parity="odd-leaves"`` makes every leaf balloon odd and requires at
    least two leaves.  Pendant trivial balloons are pruned away, and there
    are no positive loops.
    """
    if parity not in ("even", "odd-leaves"):
        raise ValueError(f"unknown parity mode {parity!r}")
    rng = _rng(seed)
    for _ in range(tries):
        n, edges = _raw_euler_tree(rng, max_m)
        g = SignedGraph.from_edges(n, edges)
        g = _relabel(prune_pendants(g))
        if g.m == 0 or g.m > max_m:
            continue
        try:
            t = build_euler_tree(g)
        except StructuralError:
            continue
        signs: dict[int, int] = {}
        br = bridges(g)
        if parity == "even":
            eps = sum(1 for e in g.edges if e.sign < 0 and e.id not in br)
            if eps % 2:
                cand = [e.id for e in g.edges if e.id not in br and not e.is_loop]
                if not cand:
                    continue
                c = rng.choice(cand)
                signs[c] = -g.sign(c)
        else:
            leaves = t.leaves()
            if len(leaves) < 2:
                continue
            for b in leaves:
                if not b.odd:
                    cand = sorted(b.edges)
                    if not cand:
                        break
                    c = rng.choice(cand)
                    signs[c] = -g.sign(c)
            else:
                return g.with_signs(signs) if signs else g
            continue
        return g.with_signs(signs) if signs else g
    raise StructuralError("no tree of Eulerian graphs generated")


def random_two_connected_eulerian(seed, max_m: int = 12, tries: int = 10_000) -> SignedGraph:
    """2-connected Eulerian signed multigraph without loops."""
    rng = _rng(seed)
    for _ in range(tries):
        size = rng.randint(2, 6)
        verts = list(range(size))
        edges = _eulerian_piece(rng, verts, rng.randint(1, 4))
        if not edges or len(edges) > max_m:
            continue
        g = SignedGraph.from_edges(size, [(a, b, rng.choice((1, -1))) for a, b in edges])
        g = _relabel(g.sub(g.edge_ids))
        if is_two_connected(g):
            return g
    raise StructuralError("no 2-connected Eulerian instance generated")


def petersen(negative_cycle: bool = True) -> SignedGraph:
    """Petersen graph; the outer 5-cycle is made negative on request."""
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    s = -1 if negative_cycle else 1
    return SignedGraph.from_edges(10, [(u, v, s) for u, v in outer] + [(u, v, 1) for u, v in spokes + inner])


def generate(model: str, seed: int, n: int, m: int, negatives: int | None = None) -> SignedGraph:
    """Dispatcher used by the command line."""
    if model == "random-multigraph":
        return random_multigraph(seed, n, m, negatives)
    if model == "tree-plus-chords":
        if m < n - 1:
            raise StructuralError(f"cannot build a connected graph with n={n}, m={m}")
        return tree_plus_chords(seed, n, m - (n - 1))
    if model == "euler-tree":
        return random_euler_tree(seed, max_m=max(m, 1))
    raise StructuralError(f"unknown model {model!r}")
