import itertools
from collections import Counter

import pytest
from brute import all_signed_circuits, connected, degrees, nx_bridges

from sigcover.euler_tree import build_euler_tree
from sigcover.generators import (
    exhaustive_small,
    generate,
    petersen,
    random_euler_tree,
    random_flow_admissible,
    random_multigraph,
    random_two_connected_eulerian,
    tree_plus_chords,
)
from sigcover.graph import SignedGraph, StructuralError, is_connected, is_two_connected


def admissible_by_definition(g):
    covered = set().union(*all_signed_circuits(g)) if g.m else set()
    return covered == set(g.edge_ids)


def signature(g):
    return tuple(sorted((min(e.u, e.v), max(e.u, e.v), e.sign) for e in g.edges))


class TestRandomMultigraph:
    @pytest.mark.parametrize("seed", range(20))
    def test_shape(self, seed):
        g = random_multigraph(seed, 6, 10, negatives=3)
        assert (g.n, g.m) == (6, 10) and g.negative_count() == 3 and is_connected(g)

    def test_reproducible(self):
        assert random_multigraph(7, 5, 8).same_edges(random_multigraph(7, 5, 8))

    def test_too_few_edges(self):
        with pytest.raises(StructuralError):
            random_multigraph(0, 5, 3)

    def test_negative_count_range(self):
        with pytest.raises(StructuralError):
            random_multigraph(0, 3, 3, negatives=4)


class TestAdmissible:
    @pytest.mark.parametrize("seed", range(40))
    def test_random_flow_admissible(self, seed):
        g = random_flow_admissible(seed, max_n=5, max_m=8)
        assert connected(g, g.edge_ids) or g.n == 1
        assert admissible_by_definition(g)

    def test_exhaustive_small_matches_definition(self):
        got = Counter(signature(g) for g in exhaustive_small(2, 3))
        want = Counter()
        for n in (1, 2):
            types = [(u, v, s) for u in range(n) for v in range(u, n) for s in (1, -1)]
            for m in (1, 2, 3):
                for combo in itertools.combinations_with_replacement(types, m):
                    if {x for u, v, _ in combo for x in (u, v)} != set(range(n)):
                        continue
                    g = SignedGraph.from_edges(n, list(combo))
                    if (n == 1 or connected(g, g.edge_ids)) and admissible_by_definition(g):
                        want[signature(g)] += 1
        assert got == want and sum(got.values()) > 0


class TestTreePlusChords:
    @pytest.mark.parametrize("seed", range(20))
    def test_positive_spanning_tree(self, seed):
        g = tree_plus_chords(seed, 7, 4)
        pos = [e.id for e in g.edges if e.sign > 0]
        assert len(pos) == 6 and is_connected(g.sub(pos, keep=g.vertices))
        assert g.negative_count() == 4

    def test_bad_parameters(self):
        with pytest.raises(StructuralError):
            tree_plus_chords(0, 0, 2)


class TestEulerTrees:
    @pytest.mark.parametrize("seed", range(40))
    def test_even(self, seed):
        g = random_euler_tree(seed, max_m=14)
        t = build_euler_tree(g)
        assert g.m <= 14 and t.eps_tilde % 2 == 0
        assert not any(e.is_loop and e.sign > 0 for e in g.edges)

    @pytest.mark.parametrize("seed", range(40))
    def test_odd_leaves(self, seed):
        g = random_euler_tree(seed, max_m=14, parity="odd-leaves")
        leaves = build_euler_tree(g).leaves()
        assert len(leaves) >= 2 and all(b.odd for b in leaves)

    def test_unknown_parity(self):
        with pytest.raises(ValueError):
            random_euler_tree(0, parity="odd")

    @pytest.mark.parametrize("seed", range(40))
    def test_two_connected_eulerian(self, seed):
        g = random_two_connected_eulerian(seed)
        assert is_two_connected(g) and not nx_bridges(g)
        assert all(d % 2 == 0 for d in degrees(g, g.edge_ids).values())
        assert not any(e.is_loop for e in g.edges)


class TestPetersen:
    def test_structure(self):
        g = petersen()
        assert (g.n, g.m, g.negative_count()) == (10, 15, 5)
        assert set(degrees(g, g.edge_ids).values()) == {3}
        assert petersen(negative_cycle=False).negative_count() == 0


class TestGenerate:
    @pytest.mark.parametrize("model", ["random-multigraph", "tree-plus-chords", "euler-tree"])
    def test_models(self, model):
        g = generate(model, 3, 5, 8)
        assert is_connected(g)
        assert generate(model, 3, 5, 8).same_edges(g)

    def test_unknown_model(self):
        with pytest.raises(StructuralError):
            generate("grid", 0, 3, 3)
