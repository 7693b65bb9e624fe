"""
Tests for weight cochains, the cobar differential and the truncated cohomology
"""

from fractions import Fraction

import pytest

from app.core.exceptions import ResourceError
from app.core.config import settings
from app.models.graph import ClassPredicate, OrientedGraphTerm
from app.models.vectors import CobarVector, GraphVector, TensorVector, WeightFunctional
from app.services.algebra_service import algebra_service
from app.services.cobar_service import cobar_service
from app.services.graph_service import boundary_graph, graph_service

DEFAULT = ClassPredicate()

W2 = graph_service.make_graph(1, 2, [[("b", 1), ("b", 2)]]).graph
P1 = graph_service.make_graph(1, 2, [[("b", 1)]]).graph
P1_RIGHT = graph_service.make_graph(1, 2, [[("b", 2)]]).graph
L1 = graph_service.make_graph(1, 1, [[("b", 1)]]).graph
B2 = boundary_graph(2)
B3 = boundary_graph(3)
B4 = boundary_graph(4)


def test_delta_weight_on_p1():
    weights = WeightFunctional({L1: Fraction(3), B2: Fraction(5)})
    value = cobar_service.delta_on_weight(weights, OrientedGraphTerm(graph=P1), DEFAULT)
    assert value == Fraction(30)


def test_weight_value_reads_table_first():
    weights = WeightFunctional({B2: Fraction(1, 2)})
    assert cobar_service.weight_value(weights, B2) == Fraction(1, 2)
    assert cobar_service.weight_value(weights, W2) == 0
    assert cobar_service.weight_value(weights, boundary_graph(0)) == 1


def test_weight_value_multiplies_connected_factors():
    weights = WeightFunctional({L1: Fraction(2), W2: Fraction(-3)})
    product = graph_service.canonicalize(graph_service.disjoint_union(L1, W2)).graph
    assert cobar_service.weight_value(weights, product) == Fraction(-6)


def test_is_cocycle_finds_both_p1_graphs():
    weights = WeightFunctional({L1: 1, B2: 1})
    holds, witnesses = cobar_service.is_cocycle(weights, 1, 2, DEFAULT)
    assert not holds
    assert dict(witnesses) == {P1: Fraction(2), P1_RIGHT: Fraction(2)}


def test_boundary_weight_alone_fails_on_b3():
    weights = WeightFunctional({B2: 1})
    holds, witnesses = cobar_service.is_cocycle(weights, 0, 3, DEFAULT)
    assert not holds
    assert witnesses == [(B3, Fraction(2))]


def test_zero_functional_is_cocycle():
    holds, witnesses = cobar_service.is_cocycle(WeightFunctional(), 2, 3, DEFAULT)
    assert holds
    assert witnesses == []


def test_letter_differential_of_p1():
    result = cobar_service.letter_differential(P1, DEFAULT)
    assert result == CobarVector({(L1, B2): -1, (B2, L1): 1})


def test_pairing_with_cobar_differential_is_delta_weight():
    weights = WeightFunctional({L1: Fraction(3), B2: Fraction(5)})
    image = cobar_service.cobar_differential(CobarVector({(P1,): 1}), DEFAULT)
    assert cobar_service.pair(weights, image) == Fraction(30)


def test_cobar_differential_of_w2_is_zero():
    assert cobar_service.cobar_differential(CobarVector({(W2,): 1}), DEFAULT) == CobarVector()


def test_reduced_coproduct_of_b4_counts_boundary_runs():
    reduced = algebra_service.reduced_coproduct(GraphVector.single(B4), DEFAULT)
    assert reduced == TensorVector({(B2, B3): 3, (B3, B2): 2})


def test_square_on_b4_is_not_zero():
    # three runs of length two against two runs of length three
    once = cobar_service.cobar_differential(CobarVector({(B4,): 1}), DEFAULT)
    twice = cobar_service.cobar_differential(once, DEFAULT)
    assert twice == CobarVector({(B2, B2, B2): -2})


def test_square_vanishes_on_two_separate_legs():
    graph = graph_service.make_graph(2, 2, [[("b", 1)], [("b", 2)]]).graph
    once = cobar_service.cobar_differential(CobarVector({(graph,): 1}), DEFAULT)
    assert cobar_service.cobar_differential(once, DEFAULT) == CobarVector()


def test_square_vanishes_on_short_words():
    letters = [B2, B3, L1, P1, P1_RIGHT, W2]
    for word in cobar_service.all_words(letters, 3, 4):
        vector = CobarVector({word: 1})
        square = cobar_service.cobar_differential(cobar_service.cobar_differential(vector, DEFAULT), DEFAULT)
        assert square == CobarVector(), CobarVector.basis_key(word)


def test_cohomology_table_is_consistent():
    table = cobar_service.truncated_cohomology_ranks(2, 2, DEFAULT, boundary_max=2)
    assert [row["degree"] for row in table] == sorted(row["degree"] for row in table)
    for row in table:
        assert row["nullity"] == row["dim"] - row["rank"]
        assert 0 <= row["rank"] <= row["dim"]


def test_cohomology_basis_limit(monkeypatch):
    monkeypatch.setattr(settings, "cohomology_max_basis", 3)
    with pytest.raises(ResourceError):
        cobar_service.truncated_cohomology_ranks(3, 2, DEFAULT, boundary_max=3)
