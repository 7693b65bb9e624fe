"""
Tests for the graph Hopf algebra operations
"""

from fractions import Fraction

from app.models.graph import ClassPredicate
from app.models.vectors import GraphVector, TensorVector
from app.services.algebra_service import algebra_service
from app.services.graph_service import EMPTY_GRAPH, boundary_graph, graph_service

DEFAULT = ClassPredicate()

W2 = graph_service.make_graph(1, 2, [[("b", 1), ("b", 2)]]).graph
P1 = graph_service.make_graph(1, 2, [[("b", 1)]]).graph
L1 = graph_service.make_graph(1, 1, [[("b", 1)]]).graph
B2 = boundary_graph(2)


def small_graphs():
    graphs = []
    for n in range(3):
        for m in range(4):
            for excess in (-1, 0, 1):
                graphs += graph_service.enumerate_graphs(n, m, excess, DEFAULT)
    return [g for g in graphs if not g.is_empty]


def test_differential_of_e3():
    e3 = graph_service.make_graph(2, 2, [[("v", 2), ("b", 1)], [("b", 2)]])
    assert e3.sign == -1
    result = algebra_service.differential(algebra_service.from_term(e3), DEFAULT)
    assert result.to_json() == {"1,2;[b1 b2]": "1/1"}


def test_differential_squares_to_zero():
    for graph in small_graphs():
        once = algebra_service.differential(GraphVector.single(graph), DEFAULT)
        assert algebra_service.differential(once, DEFAULT) == GraphVector(), graph.key()


def test_differential_of_boundary_only_graph_is_zero():
    assert algebra_service.differential(GraphVector.single(W2), DEFAULT) == GraphVector()


def test_product_concatenates_boundary_labels():
    assert algebra_service.product_graphs(L1, B2).graph.key() == "1,3;[b1]"
    assert algebra_service.product_graphs(B2, L1).graph.key() == "1,3;[b3]"


def test_product_commutes_up_to_boundary_block_swap():
    for a in (L1, W2, P1, B2):
        for b in (L1, W2, P1):
            forward = algebra_service.product_graphs(a, b)
            backward = algebra_service.product_graphs(b, a)
            swap = [b.m + j for j in range(1, a.m + 1)] + list(range(1, b.m + 1))
            swapped = graph_service.permute_boundary(forward, swap)
            sign = (-1) ** (a.edge_count * b.edge_count)
            assert algebra_service.from_term(swapped) == algebra_service.from_term(backward) * sign


def test_product_with_unit():
    vector = GraphVector.single(P1, 3)
    assert algebra_service.product(algebra_service.unit(), vector) == vector
    assert algebra_service.product(vector, algebra_service.unit()) == vector


def test_coproduct_of_p1():
    reduced = algebra_service.reduced_coproduct(GraphVector.single(P1), DEFAULT)
    assert reduced == TensorVector({(L1, B2): 1, (B2, L1): 1})

    full = algebra_service.coproduct(GraphVector.single(P1), DEFAULT)
    assert full[(P1, EMPTY_GRAPH)] == 1
    assert full[(EMPTY_GRAPH, P1)] == 1
    assert len(full) == 4


def test_coproduct_of_w2_has_no_reduced_part():
    assert algebra_service.reduced_coproduct(GraphVector.single(W2), DEFAULT) == TensorVector()


def test_counit():
    assert algebra_service.counit(algebra_service.unit()) == Fraction(1)
    assert algebra_service.counit(GraphVector.single(P1)) == Fraction(0)


def test_antipode_of_generators():
    assert algebra_service.antipode(GraphVector.single(L1), DEFAULT) == GraphVector.single(L1, -1)
    assert algebra_service.antipode(GraphVector.single(B2), DEFAULT) == GraphVector.single(B2, -1)
    assert algebra_service.antipode(algebra_service.unit(), DEFAULT) == algebra_service.unit()


def test_antipode_of_p1():
    result = algebra_service.antipode(GraphVector.single(P1), DEFAULT)
    assert result.to_json() == {"1,2;[b1]": "-1/1", "1,3;[b1]": "1/1", "1,3;[b3]": "1/1"}


def test_antipode_convolution_identity():
    for graph in small_graphs():
        total = GraphVector()
        for (left, right), coefficient in algebra_service.coproduct(GraphVector.single(graph), DEFAULT).items():
            image = algebra_service.antipode(GraphVector.single(left), DEFAULT)
            total = total + algebra_service.product(image, GraphVector.single(right)) * coefficient
        assert total == GraphVector(), graph.key()


def test_empty_graph_key():
    assert algebra_service.unit().to_json() == {"0,0;[]": "1/1"}
