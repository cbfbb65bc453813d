from fractions import Fraction

import pytest

from properad.cobar import (
    CapacityError, DecoratedGraph, add_canonical, canonicalize,
    cobar_differential, graft, graph_genus, has_directed_circuit,
    single_vertex_graph, to_dot, verify_d_squared,
)
from properad.core import ClosedFrobenius, OpenFrobenius, Properad, SignMutation
from properad.cycles import Cycle
from properad.frobenius import ClosedGenerator, OpenSurface

CF = ClosedFrobenius()
MUTATION = lambda x, y, eta: x.chi == 1 and y.chi == 2 and len(eta) == 1


class TestGraphBasics:
    def test_genus_single_vertex(self):
        g = single_vertex_graph(CF, ClosedGenerator({"c"}, {"d"}, 4))
        assert graph_genus(CF, g) == 2

    def test_genus_tree_adds_vertex_genera(self):
        q1 = ClosedGenerator({"c"}, {"~00"}, 4)     # G = 2
        q2 = ClosedGenerator({"~00"}, {"d"}, 4)     # G = 2
        graph = DecoratedGraph([q1, q2], [(1, 0, "~00")],
                               [("c", 0)], [("d", 1)])
        assert graph_genus(CF, graph) == 4

    def test_genus_parallel_edges_add_loop(self):
        q1 = ClosedGenerator(set(), {"~00", "~01"}, 2)
        q2 = ClosedGenerator({"~00", "~01"}, set(), 2)
        graph = DecoratedGraph([q1, q2], [(1, 0, "~00"), (1, 0, "~01")], [], [])
        assert graph_genus(CF, graph) == 1 + 1 + 1

    def test_circuit_detection(self):
        assert has_directed_circuit(1, [(0, 0, "~00")])
        assert not has_directed_circuit(2, [(1, 0, "~00")])
        assert has_directed_circuit(2, [(0, 1, "~00"), (1, 0, "~01")])


class TestCanonicalize:
    def test_single_vertex_fixed_point(self):
        g = single_vertex_graph(CF, ClosedGenerator({"c"}, {"d"}, 2))
        canon, coeff = canonicalize(CF, g)
        assert canon == g and coeff == 1

    def test_isomorphic_labelings_merge(self):
        q_top = ClosedGenerator({"c"}, {"~00"}, 2)
        q_bot = ClosedGenerator({"~00"}, {"d"}, 2)
        g1 = DecoratedGraph([q_top, q_bot], [(1, 0, "~00")],
                            [("c", 0)], [("d", 1)])
        g2 = DecoratedGraph([q_bot, q_top], [(0, 1, "~00")],
                            [("c", 1)], [("d", 0)])
        c1 = canonicalize(CF, g1)
        c2 = canonicalize(CF, g2)
        assert c1[0] == c2[0]
        # swapping two degree-1 wedge markers gives opposite signs
        assert c1[1] == -c2[1]

    def test_parallel_edge_automorphism_stable(self):
        q1 = ClosedGenerator(set(), {"~00", "~01"}, 2)
        q2 = ClosedGenerator({"~00", "~01"}, set(), 2)
        graph = DecoratedGraph([q1, q2], [(1, 0, "~00"), (1, 0, "~01")], [], [])
        canon, coeff = canonicalize(CF, graph)
        assert coeff in (1, -1)
        swapped = DecoratedGraph([q1, q2], [(1, 0, "~01"), (1, 0, "~00")], [], [])
        assert canonicalize(CF, swapped)[0] == canon

    def test_genus_invariant_under_canonicalize(self):
        q_top = ClosedGenerator({"c"}, {"~00"}, 4)
        q_bot = ClosedGenerator({"~00"}, {"d"}, 2)
        g = DecoratedGraph([q_bot, q_top], [(0, 1, "~00")],
                           [("c", 1)], [("d", 0)])
        canon, _ = canonicalize(CF, g)
        assert graph_genus(CF, canon) == graph_genus(CF, g)

    def test_vertex_cap(self):
        decs = [ClosedGenerator({"c%d" % i}, set(), 1) for i in range(6)]
        # six isolated vertices are disconnected anyway; only the cap fires
        graph = DecoratedGraph(decs, [], [("c%d" % i, i) for i in range(6)], [])
        with pytest.raises(CapacityError):
            canonicalize(CF, graph)


class TestGraft:
    def test_two_corollas_make_a_tree(self):
        g1 = single_vertex_graph(CF, ClosedGenerator({"c1"}, {"d1", "d2"}, 1))
        g2 = single_vertex_graph(CF, ClosedGenerator({"e1"}, {"f1"}, 2))
        combo = graft(CF, g1, g2, {"d1": "e1"})
        assert len(combo) == 1
        (graph, coeff), = combo.items()
        assert graph.n_vertices == 2 and len(graph.edges) == 1

    def test_grafting_never_creates_circuits(self):
        # every new edge points from the right factor into the left one, so
        # iterated grafts of acyclic graphs stay acyclic; the internal
        # circuit guard is defensive only
        left = single_vertex_graph(CF, ClosedGenerator({"u"}, {"v"}, 2))
        right = single_vertex_graph(CF, ClosedGenerator({"w"}, {"x"}, 2))
        (t2, _), = graft(CF, left, right, {"v": "w"}).items()
        for g, _ in graft(CF, t2, t2, {"x": "u"}).items():
            assert not has_directed_circuit(g.n_vertices, g.edges)

    def test_circuit_guard_rejects_cyclic_input(self):
        # feeding an (invalid) cyclic graph through the guard yields zero
        from properad.cobar import DecoratedGraph
        q_top = ClosedGenerator({"c"}, {"~00"}, 2)
        q_bot = ClosedGenerator({"~00"}, {"d"}, 2)
        cyclic = DecoratedGraph(
            [ClosedGenerator({"u", "~00"}, {"~01"}, 3),
             ClosedGenerator({"~01"}, {"x", "~00"}, 3)],
            [(0, 1, "~01"), (1, 0, "~00")], [("u", 0)], [("x", 1)])
        assert has_directed_circuit(cyclic.n_vertices, cyclic.edges)
        probe = single_vertex_graph(CF, ClosedGenerator({"w"}, {"y"}, 2))
        assert graft(CF, cyclic, probe, {"x": "w"}) == {}

    def test_graft_chi_additive(self):
        g1 = single_vertex_graph(CF, ClosedGenerator({"c1"}, {"d1"}, 4))
        g2 = single_vertex_graph(CF, ClosedGenerator({"e1"}, {"f1"}, 2))
        (graph, _), = graft(CF, g1, g2, {"d1": "e1"}).items()
        assert sum(CF.chi(dec) for dec in graph.decorations) == 6

    def test_graft_commutes_with_canonicalize(self):
        # build the same 3-vertex graph by grafting in two different orders
        top = single_vertex_graph(CF, ClosedGenerator({"c"}, {"p", "q"}, 1))
        mid = single_vertex_graph(CF, ClosedGenerator({"u"}, {"r"}, 2))
        bot = single_vertex_graph(CF, ClosedGenerator({"v", "w"}, {"d"}, 1))
        route1 = {}
        for g, c in graft(CF, top, mid, {"p": "u"}).items():
            for g2, c2 in graft(CF, g, bot, {"q": "v", "r": "w"}).items():
                route1[g2] = route1.get(g2, 0) + c * c2
        route2 = {}
        for g, c in graft(CF, mid, bot, {"r": "w"}).items():
            for g2, c2 in graft(CF, top, g, {"p": "u", "q": "v"}).items():
                route2[g2] = route2.get(g2, 0) + c * c2
        assert route1 == route2


class ZeroProperad(Properad):
    """All compositions and the differential vanish."""

    generalized = True

    def basis(self, outputs, inputs, chi):
        if chi != 1:
            return []
        return [("z", tuple(sorted(outputs)), tuple(sorted(inputs)))]

    def corolla(self, key):
        return frozenset(key[1]), frozenset(key[2])

    def chi(self, key):
        return 1

    def act(self, rho, sigma, key):
        return {("z", tuple(sorted(rho[c] for c in key[1])),
                 tuple(sorted(sigma[d] for d in key[2]))): Fraction(1)}

    def compose(self, xkey, ykey, eta):
        return {}

    def split_chi_pairs(self, chi, k):
        return [(1, 1)]


class TestDifferential:
    def test_spec_example_terms(self):
        key = ClosedGenerator({"c1"}, {"d1"}, 2)
        once = cobar_differential(CF, {single_vertex_graph(CF, key): Fraction(1)})
        shapes = sorted((len(g.edges), abs(c)) for g, c in once.items())
        # splittings into two chi = 1 vertices joined by one or two edges;
        # a two-edge bundle carries the 1/2! class normalization
        assert shapes == [(1, Fraction(1)), (1, Fraction(1)),
                          (2, Fraction(1, 2)), (2, Fraction(1, 2))]

    def test_zero_properad_gives_zero(self):
        Z = ZeroProperad()
        start = {single_vertex_graph(Z, ("z", ("c",), ("d",))): Fraction(1)}
        assert cobar_differential(Z, start) == {}

    def test_d_squared_on_single_generators(self):
        key = ClosedGenerator({"c1", "c2"}, {"d1"}, 3)
        start = {single_vertex_graph(CF, key): Fraction(1)}
        once = cobar_differential(CF, start)
        assert cobar_differential(CF, once) == {}

    def test_wedge_antisymmetry(self):
        # permuting the decoration order negates the folded coefficient
        q_top = ClosedGenerator({"c"}, {"~00"}, 2)
        q_bot = ClosedGenerator({"~00"}, {"d"}, 2)
        g_ab = DecoratedGraph([q_top, q_bot], [(1, 0, "~00")],
                              [("c", 0)], [("d", 1)])
        g_ba = DecoratedGraph([q_bot, q_top], [(0, 1, "~00")],
                              [("c", 1)], [("d", 0)])
        acc = {}
        add_canonical(CF, acc, g_ab, Fraction(1))
        add_canonical(CF, acc, g_ba, Fraction(1))
        assert acc == {}


class TestVerifyDSquared:
    def test_closed_small(self):
        rep = verify_d_squared(CF, range(0, 3), range(0, 3), 4)
        assert rep["ok"] and rep["checked"] > 10

    def test_open_small(self):
        OF = OpenFrobenius(genus_cap=2, empty_cap=2)
        rep = verify_d_squared(OF, range(0, 3), range(0, 3), 4)
        assert rep["ok"]

    def test_mutated_fails_with_witness(self):
        bad = SignMutation(CF, MUTATION)
        rep = verify_d_squared(bad, range(0, 2), range(0, 2), 4)
        assert not rep["ok"]
        assert rep["witness"].n_vertices == 3
        assert rep["coefficient"] != 0


class TestDotExport:
    def test_contains_vertices_and_legs(self):
        g = single_vertex_graph(CF, ClosedGenerator({"c1"}, {"d1"}, 4))
        text = to_dot(CF, g)
        assert "digraph" in text
        assert 'label="V0\\nG=2"' in text
        assert "out_c1" in text and "in_d1" in text

    def test_edges_directed(self):
        q_top = ClosedGenerator({"c"}, {"~00"}, 2)
        q_bot = ClosedGenerator({"~00"}, {"d"}, 2)
        graph = DecoratedGraph([q_top, q_bot], [(1, 0, "~00")],
                               [("c", 0)], [("d", 1)])
        assert "v1 -> v0" in to_dot(CF, graph)
