"""
Tests for the axiom suites
"""

import pytest

from app.core.exceptions import UsageError
from app.models.graph import ClassPredicate
from app.models.vectors import GraphVector, TensorVector
from app.services.algebra_service import algebra_service
from app.services.check_service import check_service
from app.services.graph_service import EMPTY_GRAPH, boundary_graph, graph_service

DEFAULT = ClassPredicate()

B1 = boundary_graph(1)
B2 = boundary_graph(2)
B3 = boundary_graph(3)
L1 = graph_service.make_graph(1, 1, [[("b", 1)]]).graph
P1 = graph_service.make_graph(1, 2, [[("b", 1)]]).graph
# two vertices pointing at b1 and at each other
CYCLE = graph_service.graph_from_key("2,1;[b1 v2|b1 v1]").graph
CYCLE_B1 = graph_service.graph_from_key("2,2;[b1 v2|b1 v1]").graph
CYCLE_B2 = graph_service.graph_from_key("2,3;[b1 v2|b1 v1]").graph


def test_hopf_suite_passes_on_one_vertex_graphs():
    report = check_service.run_suite("hopf", 1, 2, 0, DEFAULT)
    assert report["passed"]
    assert report["graphs"] == 5
    for name in ("d_squared", "coassociativity", "coderivation", "counit", "antipode_left", "antipode_right"):
        assert report["axioms"][name]["failed"] == 0, name
        assert report["axioms"][name]["verified"] == 5, name


def test_hopf_suite_on_full_range_reports_literal_failures():
    report = check_service.run_suite("hopf", 3, 3, 1, DEFAULT)
    axioms = report["axioms"]
    for name in ("d_squared", "graded_commutativity", "leibniz", "coderivation", "counit", "antipode_left"):
        assert axioms[name]["failed"] == 0, (name, axioms[name]["witnesses"][:5])
        assert axioms[name]["verified"] > 0, name
    assert "2,3;[b1 v2|b1 v1]" in axioms["coassociativity"]["witnesses"]
    assert "2,3;[b1 v2|b1 v1]" in axioms["antipode_right"]["witnesses"]
    assert "1,1;[b1] * 0,1;[]" in axioms["multiplicativity"]["witnesses"]
    assert report["passed"] is False


def test_coassociativity_and_antipode_hold_without_disjoint_pieces():
    graphs = check_service.graphs_in_range(2, 2, 1, DEFAULT) + check_service.graphs_in_range(1, 3, 1, DEFAULT)
    assert P1 in graphs and B3 in graphs
    for graph in graphs:
        assert not check_service.coassociativity_defect(graph, DEFAULT), graph.key()
        assert not check_service.convolution(graph, 0, DEFAULT), graph.key()
        assert not check_service.convolution(graph, 1, DEFAULT), graph.key()


def test_coassociativity_defect_on_two_boundary_pieces():
    # {v1,v2,b1} and {b2,b3} collapse independently
    assert algebra_service.reduced_coproduct(GraphVector.single(CYCLE_B2), DEFAULT) == TensorVector({
        (CYCLE, B3): 1,
        (B2, CYCLE_B1): 2,
        (CYCLE_B1, B2): 1,
        (B3, CYCLE): 1,
    })
    defect = check_service.coassociativity_defect(CYCLE_B2, DEFAULT)
    assert defect == TensorVector({(CYCLE, B2, B2): -1, (B2, CYCLE, B2): -1})
    assert check_service.convolution(CYCLE_B2, 1, DEFAULT)


def test_multiplicativity_compares_every_summand():
    defect = check_service.multiplicativity_defect(L1, B1, DEFAULT)
    assert defect == TensorVector({(L1, B2): 1, (B2, L1): 1, (L1, B1): -1, (B1, L1): -1})


def test_multiplicativity_with_the_unit():
    assert not check_service.multiplicativity_defect(P1, EMPTY_GRAPH, DEFAULT)
    assert not check_service.multiplicativity_defect(EMPTY_GRAPH, B3, DEFAULT)


def test_d2_suite_passes_with_positive_excess():
    report = check_service.run_suite("d2", 3, 3, 1, DEFAULT)
    assert report["passed"]
    assert report["axioms"]["d_squared"]["failed"] == 0


def test_cobar_suite_on_words_of_three_letters():
    report = check_service.run_suite("cobar-d2", 2, 2, 0, DEFAULT, seed=42, max_len=3)
    assert report["passed"], report["axioms"]["d_squared"]["witnesses"][:5]
    assert report["seed"] == 42
    assert report["axioms"]["d_squared"]["verified"] == report["words"]
    assert report["axioms"]["pairing"]["verified"] > 0


def test_cobar_suite_fails_on_two_boundary_pieces():
    report = check_service.run_suite("cobar-d2", 2, 3, -1, DEFAULT, seed=7, max_len=1)
    assert report["passed"] is False
    assert "[2,3;[b1 v2|b1 v1]]" in report["axioms"]["d_squared"]["witnesses"]
    assert report["axioms"]["pairing"]["failed"] == 0


def test_unknown_suite_is_usage_error():
    with pytest.raises(UsageError):
        check_service.run_suite("associativity")
