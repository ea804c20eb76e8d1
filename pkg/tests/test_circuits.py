import itertools
import random

import pytest
from brute import all_signed_circuits, build, connected, is_circuit, signed_circuit_kind
from conftest import signed_graphs
from hypothesis import given

from sigcover.circuits import (
    Cover,
    InvalidElement,
    Kind,
    SignedCircuitElement,
    barbell_on_cut_pair,
    classify,
    connect_into_euler_tree,
    enumerate_signed_circuits,
    flow_admissibility_witness,
    fundamental_system,
    is_flow_admissible,
    symmetric_difference_circuit,
    total_widths,
    union_graph,
    validate_element,
)
from sigcover.generators import tree_plus_chords
from sigcover.graph import StructuralError, components, is_connected


class TestClassify:
    def test_two_loops_at_a_vertex_are_a_short_barbell(self):
        g = build(1, "0 0 -, 0 0 -")
        assert classify(g, [0, 1]).kind is Kind.SHORT_BARBELL

    def test_positive_square_is_balanced(self):
        g = build(4, "0 1 +, 1 2 +, 2 3 +, 3 0 +")
        assert classify(g, g.edge_ids).kind is Kind.BALANCED_CIRCUIT

    def test_declared_kind_must_match(self):
        g = build(3, "0 0 -, 0 1 +, 1 2 +, 2 2 -")
        el = classify(g, g.edge_ids)
        assert el.kind is Kind.LONG_BARBELL
        fake = SignedCircuitElement(Kind.SHORT_BARBELL, el.edges, el.circuits, el.path, el.starts)
        ok, why = validate_element(g, fake)
        assert not ok and "long_barbell" in why
        assert validate_element(g, el) == (True, "")

    @pytest.mark.parametrize("n, text", [
        (3, "0 1 -, 1 2 +, 2 0 +"),            # unbalanced circuit
        (2, "0 1 +, 0 1 +, 0 1 +"),            # theta
        (3, "0 1 +, 1 2 +"),                   # path
        (2, "0 0 -, 1 1 -"),                   # disconnected
        (2, "0 1 -, 0 1 +, 0 1 -, 0 1 +"),     # two digons on the same pair
    ])
    def test_rejects_non_elements(self, n, text):
        g = build(n, text)
        with pytest.raises(InvalidElement):
            classify(g, g.edge_ids)

    @given(signed_graphs(max_n=5, max_m=7))
    def test_agrees_with_definition_on_every_subset(self, g):
        for k in range(1, g.m + 1):
            for c in itertools.combinations(g.edge_ids, k):
                want = signed_circuit_kind(g, c)
                try:
                    got = classify(g, c).kind.value
                except InvalidElement:
                    got = None
                assert got == want, (c, got, want)


class TestCover:
    def test_length_and_widths(self):
        g = build(3, "0 0 -, 0 1 +, 1 2 +, 2 2 -")
        el = classify(g, g.edge_ids)
        cv = Cover([el, el])
        assert cv.length == 8 and cv.width() == 2 and cv.width(0) == 2
        assert total_widths(cv, cv)[1] == 4


class TestEnumeration:
    @given(signed_graphs(max_n=5, max_m=7, connected=False))
    def test_matches_brute_force(self, g):
        assert set(enumerate_signed_circuits(g)) == set(all_signed_circuits(g))


class TestFlowAdmissibility:
    def test_single_negative_loop(self):
        assert not is_flow_admissible(build(1, "0 0 -"))

    def test_two_negative_loops(self):
        assert is_flow_admissible(build(1, "0 0 -, 0 0 -"))

    def test_balanced_bridgeless(self):
        g = build(4, "0 1 -, 1 2 -, 2 3 +, 3 0 +, 0 2 +")
        assert is_flow_admissible(g)
        covered = set().union(*all_signed_circuits(g))
        assert covered == set(g.edge_ids)

    @given(signed_graphs(max_n=5, max_m=7))
    def test_witness_is_an_edge_in_no_signed_circuit(self, g):
        covered = set().union(*all_signed_circuits(g)) if g.m else set()
        w = flow_admissibility_witness(g)
        if covered == set(g.edge_ids):
            assert w is None
        else:
            assert w is not None and w not in covered

    @given(signed_graphs(max_n=7, max_m=20))
    def test_structural_rule_agrees_with_enumeration(self, g):
        fast = flow_admissibility_witness(g, enum_limit=0)
        slow = flow_admissibility_witness(g, enum_limit=100)
        assert (fast is None) == (slow is None)


def path_plus_chords():
    # tree path 0-1-2-3, negative chords (0,2) and (1,3)
    return build(4, "0 1 +, 1 2 +, 2 3 +, 0 2 -, 1 3 -")


class TestFundamentalSystem:
    def test_star_with_one_chord(self):
        g = build(4, "0 1 +, 0 2 +, 0 3 +, 1 2 -")
        fs = fundamental_system(g)
        assert fs.circuits[3] == {0, 1, 3}

    def test_path_with_two_chords(self):
        fs = fundamental_system(path_plus_chords())
        assert fs.circuits[3] == {0, 1, 3} and fs.circuits[4] == {1, 2, 4}
        assert fs.circuits[3] & fs.circuits[4] == {1}

    def test_negative_loop(self):
        fs = fundamental_system(build(2, "0 1 +, 1 1 -"))
        assert fs.circuits[1] == {1}

    def test_positive_edges_must_form_a_tree(self):
        with pytest.raises(StructuralError):
            fundamental_system(build(3, "0 1 +, 1 2 +, 2 0 +, 0 0 -"))

    def test_each_circuit_has_one_negative_edge(self):
        for seed in range(30):
            g = tree_plus_chords(seed, 6, 4)
            fs = fundamental_system(g)
            for x, c in fs.circuits.items():
                assert is_circuit(g, c) and [e for e in c if g.sign(e) < 0] == [x]


class TestSymmetricDifference:
    def test_singleton(self):
        fs = fundamental_system(path_plus_chords())
        assert set(symmetric_difference_circuit(fs, [3]).edge_ids) == fs.circuits[3]

    def test_sharing_one_edge_gives_balanced_circuit(self):
        fs = fundamental_system(path_plus_chords())
        c = symmetric_difference_circuit(fs, [3, 4])
        assert set(c.edge_ids) == {0, 2, 3, 4}
        assert classify(c.root, c.edge_ids).kind is Kind.BALANCED_CIRCUIT

    def test_disjoint_circuits_give_their_union(self):
        g = build(6, "0 1 +, 1 2 +, 2 3 +, 3 4 +, 4 5 +, 0 1 -, 4 5 -")
        fs = fundamental_system(g)
        c = symmetric_difference_circuit(fs, [5, 6])
        assert set(c.edge_ids) == {0, 5, 4, 6}
        assert len(components(c)) == 2

    def test_union_keeps_forest_shape(self):
        for seed in range(20):
            g = tree_plus_chords(seed, 7, 4, loop_prob=0)
            fs = fundamental_system(g)
            for a in itertools.combinations(fs.negatives, 2):
                d = union_graph(fs, a)
                forest = d.without(a)
                assert len(components(forest)) == len(components(d))
                assert forest.m == forest.n - len(components(forest))


class TestBarbellOnCutPair:
    def test_tree_path_between_disjoint_circuits(self):
        g = build(6, "0 1 +, 1 2 +, 2 3 +, 3 4 +, 4 5 +, 0 1 -, 4 5 -")
        fs = fundamental_system(g)
        b = barbell_on_cut_pair(fs, 5, 6)
        assert b.kind is Kind.LONG_BARBELL and b.edges == {0, 1, 2, 3, 4, 5, 6}

    def test_touching_circuits_rejected(self):
        fs = fundamental_system(path_plus_chords())
        with pytest.raises(StructuralError):
            barbell_on_cut_pair(fs, 3, 4)

    def test_detour_that_breaks_the_path_fails(self):
        # C_9 hangs off the tree path, so xor-ing it in leaves a disconnected remainder
        g = build(8, "0 1 +, 1 2 +, 2 3 +, 3 4 +, 4 5 +, 2 6 +, 6 7 +, 0 1 -, 4 5 -, 6 7 -")
        fs = fundamental_system(g)
        assert barbell_on_cut_pair(fs, 7, 8) is not None
        assert barbell_on_cut_pair(fs, 7, 8, [9]) is None


def _min_connector_size(g, parts):
    inside = set().union(*(set(p.edge_ids) for p in parts))
    pv = set().union(*(set(p.vertices) for p in parts))
    others = [e for e in g.edge_ids if e not in inside]
    for k in range(len(others) + 1):
        for extra in itertools.combinations(others, k):
            es = inside | set(extra)
            vs = pv | {x for e in extra for x in (g.edge(e).u, g.edge(e).v)}
            if connected(g, es) and {x for e in es for x in (g.edge(e).u, g.edge(e).v)} >= vs:
                return k
    return None


class TestConnector:
    def test_single_part_is_unchanged(self):
        g = build(3, "0 1 +, 1 2 +, 2 0 +")
        h, added = connect_into_euler_tree(g, [g.sub(g.edge_ids)])
        assert added == [] and set(h.edge_ids) == {0, 1, 2}

    def test_two_triangles_and_unique_path(self):
        g = build(7, "0 1 +, 1 2 +, 2 0 +, 4 5 +, 5 6 +, 6 4 +, 2 3 +, 3 4 +")
        h, added = connect_into_euler_tree(g, [g.sub([0, 1, 2]), g.sub([3, 4, 5])])
        assert sorted(added) == [6, 7]

    def test_minimum_for_three_parts(self):
        rng = random.Random(5)
        checked = 0
        for _ in range(200):
            n = rng.randint(6, 9)
            edges = [(rng.randrange(v), v, 1) for v in range(1, n)]
            edges += [(rng.randrange(n), rng.randrange(n), 1) for _ in range(rng.randint(2, 5))]
            edges = [e for e in edges if e[0] != e[1]]
            g = build(n, ", ".join(f"{u} {v} +" for u, v, _ in edges))
            picks = rng.sample(range(n), 3)
            parts = [g.sub([], keep=[v]) for v in picks]
            h, added = connect_into_euler_tree(g, parts)
            assert is_connected(h)
            assert len(added) == _min_connector_size(g, parts)
            checked += 1
        assert checked == 200
