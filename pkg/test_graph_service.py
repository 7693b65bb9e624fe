"""
Tests for canonical forms, admissibility, contraction, collapse and enumeration
"""

from itertools import permutations

import pytest

from app.core.exceptions import ContractError, StructuralError, SubsetError, UsageError
from app.models.graph import ClassPredicate, DirectedGraph, OrientedGraphTerm
from app.services.graph_service import boundary_graph, graph_service

DEFAULT = ClassPredicate()

W2 = graph_service.make_graph(1, 2, [[("b", 1), ("b", 2)]]).graph
P1 = graph_service.make_graph(1, 2, [[("b", 1)]]).graph
L1 = graph_service.make_graph(1, 1, [[("b", 1)]]).graph
B2 = boundary_graph(2)


def test_make_graph_keeps_canonical_single_vertex_graph():
    term = graph_service.make_graph(1, 2, [[("b", 1), ("b", 2)]])
    assert term.graph.key() == "1,2;[b1 b2]"
    assert term.sign == 1


def test_swapping_two_edges_of_one_vertex_flips_the_sign():
    term = graph_service.make_graph(1, 2, [[("b", 2), ("b", 1)]])
    assert term.graph == W2
    assert term.sign == -1


def test_edgeless_graph_is_canonical():
    term = graph_service.make_graph(0, 2, [])
    assert term.graph.key() == "0,2;[]"
    assert term.sign == 1


def test_vertex_swap_sign_is_product_of_out_degrees():
    straight = graph_service.make_graph(2, 2, [[("b", 1)], [("b", 2)]])
    swapped = graph_service.make_graph(2, 2, [[("b", 2)], [("b", 1)]])
    assert straight.graph == swapped.graph
    assert straight.sign == 1
    assert swapped.sign == -1


def test_odd_automorphism_gives_sign_zero():
    term = graph_service.make_graph(2, 1, [[("b", 1)], [("b", 1)]])
    assert term.sign == 0
    assert term.is_zero


def test_canonical_key_does_not_depend_on_labeling():
    first = graph_service.make_graph(2, 2, [[("v", 2), ("b", 1)], [("b", 2)]])
    second = graph_service.make_graph(2, 2, [[("b", 2)], [("v", 1), ("b", 1)]])
    assert first.graph == second.graph
    assert first.sign == second.sign


def test_dangling_target_is_structural_error():
    with pytest.raises(StructuralError):
        graph_service.make_graph(1, 2, [[("b", 9)]])


def test_missing_vertex_list_is_structural_error():
    with pytest.raises(StructuralError):
        graph_service.canonicalize(DirectedGraph(n=2, m=1, out_edges=((("b", 1),),)))


def test_is_in_class():
    loop = DirectedGraph(n=1, m=1, out_edges=((("v", 1), ("b", 1)),))
    parallel = DirectedGraph(n=1, m=2, out_edges=((("b", 1), ("b", 1)),))
    sink = DirectedGraph(n=1, m=1, out_edges=((),))
    assert graph_service.is_in_class(W2, DEFAULT)
    assert not graph_service.is_in_class(loop, DEFAULT)
    assert not graph_service.is_in_class(parallel, DEFAULT)
    assert graph_service.is_in_class(parallel, ClassPredicate.named("no-parallel-off"))
    assert not graph_service.is_in_class(sink, DEFAULT)


def test_unknown_class_name_is_usage_error():
    with pytest.raises(UsageError):
        ClassPredicate.named("everything")


def test_excess():
    assert graph_service.excess(W2) == 0
    assert graph_service.excess(B2) == 0
    assert graph_service.excess(P1) == -1


def test_contracting_e3_gives_w2():
    e3 = DirectedGraph(n=2, m=2, out_edges=((("v", 2), ("b", 1)), (("b", 2),)))
    result = graph_service.contract_edge(OrientedGraphTerm(graph=e3), 0, DEFAULT)
    assert result == OrientedGraphTerm(graph=W2, sign=1)


def test_contracting_e4_is_zero():
    e4 = DirectedGraph(n=2, m=2, out_edges=((("v", 2), ("b", 1)), (("b", 1), ("b", 2))))
    assert graph_service.contract_edge(OrientedGraphTerm(graph=e4), 0, DEFAULT) is None


def test_contracting_boundary_edge_is_contract_error():
    with pytest.raises(ContractError):
        graph_service.contract_edge(OrientedGraphTerm(graph=W2), 0, DEFAULT)


def test_collapse_normal_subgraph_of_p1():
    sub, quotient = graph_service.collapse_normal_subgraph(
        OrientedGraphTerm(graph=P1), [("b", 1), ("v", 1)], DEFAULT
    )
    assert sub.graph == L1
    assert quotient.graph == B2
    assert quotient.sign == 1

    sub, quotient = graph_service.collapse_normal_subgraph(
        OrientedGraphTerm(graph=P1), [("b", 1), ("b", 2)], DEFAULT
    )
    assert sub.graph == B2
    assert quotient.graph == L1


def test_collapse_rejects_non_normal_and_malformed_subsets():
    assert graph_service.collapse_normal_subgraph(
        OrientedGraphTerm(graph=P1), [("b", 2), ("v", 1)], DEFAULT
    ) is None
    with pytest.raises(SubsetError):
        graph_service.collapse_normal_subgraph(OrientedGraphTerm(graph=P1), [("v", 1)], DEFAULT)
    b3 = boundary_graph(3)
    with pytest.raises(SubsetError):
        graph_service.collapse_normal_subgraph(OrientedGraphTerm(graph=b3), [("b", 1), ("b", 3)], DEFAULT)


def test_enumerate_normal_subsets_of_p1():
    subsets = graph_service.enumerate_normal_subsets(OrientedGraphTerm(graph=P1), DEFAULT)
    assert sorted(sorted(s) for s in subsets) == [[("b", 1), ("b", 2)], [("b", 1), ("v", 1)]]


def test_enumerate_graphs_small_cases():
    assert [g.key() for g in graph_service.enumerate_graphs(1, 2, 0, DEFAULT)] == ["1,2;[b1 b2]"]
    assert [g.key() for g in graph_service.enumerate_graphs(1, 2, -1, DEFAULT)] == ["1,2;[b1]", "1,2;[b2]"]
    assert [g.key() for g in graph_service.enumerate_graphs(0, 2, 0, DEFAULT)] == ["0,2;[]"]
    assert graph_service.enumerate_graphs(0, 2, 1, DEFAULT) == []


def test_enumerated_graphs_are_canonical_and_admissible():
    for graph in graph_service.enumerate_graphs(2, 2, 0, DEFAULT):
        term = graph_service.canonicalize(graph)
        assert term.graph == graph
        assert term.sign != 0
        assert graph_service.is_in_class(graph, DEFAULT)


def test_graph_from_key_round_trip():
    for graph in graph_service.enumerate_graphs(2, 2, -1, DEFAULT) + [W2, B2]:
        term = graph_service.graph_from_key(graph.key())
        assert term == OrientedGraphTerm(graph=graph, sign=1)


def test_graph_from_key_rejects_garbage():
    with pytest.raises(UsageError):
        graph_service.graph_from_key("W2")
    with pytest.raises(UsageError):
        graph_service.graph_from_key("1,2;[x1]")


def test_permute_boundary():
    swapped = graph_service.permute_boundary(OrientedGraphTerm(graph=W2), [2, 1])
    assert swapped == OrientedGraphTerm(graph=W2, sign=-1)
    moved = graph_service.permute_boundary(OrientedGraphTerm(graph=P1), [2, 1])
    assert moved.graph.key() == "1,2;[b2]"


def test_product_factors():
    sign, factors = graph_service.product_factors(B2)
    assert sign == 1
    assert factors == [boundary_graph(1), boundary_graph(1)]

    product = graph_service.disjoint_union(L1, W2)
    sign, factors = graph_service.product_factors(graph_service.canonicalize(product).graph)
    assert sign == 1
    assert factors == [L1, W2]

    interleaved = DirectedGraph(n=2, m=3, out_edges=((("b", 1), ("b", 3)), (("b", 2),)))
    sign, factors = graph_service.product_factors(interleaved)
    assert factors == [interleaved]


def relabeled(graph, order):
    """Internal vertex v becomes order[v - 1], every out-list reversed"""
    def move(t):
        return ("v", order[t[1] - 1]) if t[0] == "v" else t

    lists = [None] * graph.n
    for v, targets in enumerate(graph.out_edges, start=1):
        lists[order[v - 1] - 1] = tuple(move(t) for t in reversed(targets))
    return DirectedGraph(n=graph.n, m=graph.m, out_edges=tuple(lists))


def moved_edge(graph, order, edge):
    source, _ = graph.edges()[edge]
    position = edge - sum(len(t) for t in graph.out_edges[: source - 1])
    image = relabeled(graph, order)
    target_vertex = order[source - 1]
    offset = sum(len(t) for t in image.out_edges[: target_vertex - 1])
    return offset + len(graph.out_edges[source - 1]) - 1 - position


def test_contract_edge_does_not_depend_on_the_representative():
    checked = 0
    for n in (2, 3):
        for m in range(3):
            for excess in (-1, 0):
                for graph in graph_service.enumerate_graphs(n, m, excess, DEFAULT):
                    for order in permutations(range(1, n + 1)):
                        image = relabeled(graph, order)
                        orientation = graph_service.canonicalize(image)
                        assert orientation.graph == graph and orientation.sign != 0
                        for edge in graph_service.internal_edges(graph):
                            expected = graph_service.contract_edge(OrientedGraphTerm(graph=graph), edge, DEFAULT)
                            actual = graph_service.contract_edge(
                                OrientedGraphTerm(graph=image), moved_edge(graph, order, edge), DEFAULT
                            )
                            if expected is None:
                                assert actual is None, (graph.key(), order, edge)
                                continue
                            assert actual == OrientedGraphTerm(
                                graph=expected.graph, sign=expected.sign * orientation.sign
                            ), (graph.key(), order, edge)
                            checked += 1
    assert checked > 0


def test_collapse_splits_edges_and_vertices():
    checked = 0
    for n in range(3):
        for m in range(1, 4):
            for excess in (-1, 0, 1):
                for graph in graph_service.enumerate_graphs(n, m, excess, DEFAULT):
                    term = OrientedGraphTerm(graph=graph)
                    for subset in graph_service.enumerate_normal_subsets(term, DEFAULT):
                        sub, quotient = graph_service.collapse_normal_subgraph(term, subset, DEFAULT)
                        assert sub.graph.edge_count + quotient.graph.edge_count == graph.edge_count
                        assert sub.graph.n + quotient.graph.n == graph.n
                        assert sub.graph.m + quotient.graph.m == graph.m + 1
                        checked += 1
    assert checked > 0
