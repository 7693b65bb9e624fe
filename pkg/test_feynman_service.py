"""
Tests for Feynman rules, the bullet and collapse lemmas and the obstruction
"""

from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from app.core.exceptions import ContractError, StateError, SubsetError
from app.models.graph import ClassPredicate, OrientedGraphTerm
from app.models.poly import PolyDiffOperator, PolyVectorField, polynomial_ring
from app.models.vectors import WeightFunctional
from app.services.feynman_service import feynman_service
from app.services.graph_service import boundary_graph, graph_service
from app.services.polyalg_service import koszul_sign, polyalg_service

DEFAULT = ClassPredicate()
R = polynomial_ring(2)
x1, x2 = R.gens

W2 = graph_service.make_graph(1, 2, [[("b", 1), ("b", 2)]])
P1 = graph_service.make_graph(1, 2, [[("b", 1)]])
L1 = graph_service.make_graph(1, 1, [[("b", 1)]])
E3 = graph_service.make_graph(2, 2, [[("b", 1), ("v", 2)], [("b", 2)]])
B2 = OrientedGraphTerm(graph=boundary_graph(2))


def field(*terms, dimension=2):
    return PolyVectorField(dimension, {tuple(indices): coefficient for indices, coefficient in terms})


def random_states(rng, graph, dimension=2):
    return [polyalg_service.random_field(rng, dimension, len(targets)) for targets in graph.out_edges]


def test_edgeless_graph_is_multiplication():
    assert feynman_service.evaluate_U(B2, [], dimension=2) == PolyDiffOperator.multiplication(2)


def test_w2_on_constant_bivector_is_poisson_bracket():
    op = feynman_service.evaluate_U(W2, [field(((1, 2), 1))])
    f, g = x1 ** 2 * x2, x1 + x2 ** 3
    expected = f.diff(x1) * g.diff(x2) - f.diff(x2) * g.diff(x1)
    assert op.apply([f, g]) == expected


def test_l1_on_euler_field():
    op = feynman_service.evaluate_U(L1, [field(((1,), x1))])
    f = x1 ** 3 + x1 * x2
    assert op.apply([f]) == x1 * f.diff(x1)


def test_signature_mismatch_is_state_error():
    with pytest.raises(StateError):
        feynman_service.evaluate_U(W2, [field(((1,), 1))])
    with pytest.raises(StateError):
        feynman_service.evaluate_U(W2, [])


def test_zero_field_fits_any_vertex():
    assert feynman_service.evaluate_U(W2, [PolyVectorField(2)]).is_zero


def test_evaluate_wedge_on_single_vertex_graph_equals_evaluate_u():
    state = [field(((1, 2), x1))]
    assert feynman_service.evaluate_wedge(W2, state) == feynman_service.evaluate_U(W2, state)


def test_evaluate_wedge_is_graded_symmetric_in_states():
    rng = np.random.default_rng(17)
    three = graph_service.make_graph(3, 2, [[("b", 1), ("v", 2)], [("b", 2), ("v", 3)], [("b", 1)]])
    for term in (E3, three):
        states = random_states(rng, term.graph)
        degrees = [s.arity or 0 for s in states]
        reference = feynman_service.evaluate_wedge(term, states)
        for order in permutations(range(len(states))):
            permuted = [states[i] for i in order]
            value = feynman_service.evaluate_wedge(term, permuted)
            assert value == reference.scale(koszul_sign(order, degrees))


BASIS_CASES = [
    (W2, [field(((1, 2), 3))]),
    (L1, [field(((1,), 2), ((2,), -1))]),
]


def random_invertible(rng, dimension=2):
    while True:
        matrix = [[int(a) for a in row] for row in rng.integers(-2, 3, size=(dimension, dimension))]
        if round(np.linalg.det(np.array(matrix, dtype=float))):
            return matrix


def test_basis_independence_on_constant_states():
    rng = np.random.default_rng(19)
    matrices = [[[1, 1], [0, 1]], [[0, 1], [1, 0]], [[Fraction(1, 2), 0], [1, 1]]]
    for term, states in BASIS_CASES:
        for matrix in matrices:
            args = [polyalg_service.random_polynomial(rng, 2) for _ in range(term.graph.m)]
            assert feynman_service.basis_independence_check(term, states, args, matrix)


def test_basis_independence_on_random_matrices():
    rng = np.random.default_rng(41)
    matrices = [random_invertible(rng) for _ in range(10)]
    for term in (W2, L1, E3, P1):
        for matrix in matrices:
            states = random_states(rng, term.graph)
            args = [polyalg_service.random_polynomial(rng, 2) for _ in range(term.graph.m)]
            assert feynman_service.basis_independence_check(term, states, args, matrix), (term.graph.key(), matrix)


def test_bullet_lemma_on_e3():
    rng = np.random.default_rng(23)
    for _ in range(3):
        report = feynman_service.lemma_bullet_check(E3, 1, random_states(rng, E3.graph))
        assert report["holds"]
        assert report["family_size"] == 2


def test_bullet_lemma_rejects_boundary_edge():
    rng = np.random.default_rng(23)
    with pytest.raises(ContractError):
        feynman_service.lemma_bullet_check(E3, 0, random_states(rng, E3.graph))


def test_bullet_lemma_on_every_admissible_contraction():
    rng = np.random.default_rng(29)
    checked = 0
    for m in range(3):
        for excess in (-1, 0, 1):
            for graph in graph_service.enumerate_graphs(2, m, excess, DEFAULT):
                term = OrientedGraphTerm(graph=graph)
                for edge in graph_service.internal_edges(graph):
                    for _ in range(20):
                        try:
                            report = feynman_service.lemma_bullet_check(term, edge, random_states(rng, graph))
                        except ContractError:
                            break
                        assert report["holds"], (graph.key(), edge)
                        checked += 1
    assert checked > 0


def test_bullet_corollary_on_l1_is_vector_field_commutator():
    x_field = field(((1,), x2), ((2,), x1 * x1))
    y_field = field(((1,), x1 * x2), ((2,), 1))
    report = feynman_service.corollary_bullet_check(L1, [x_field, y_field])
    assert report["holds"]
    assert report["extensions"] == 1
    commutator = polyalg_service.vector_field_commutator(x_field, y_field)
    assert report["rhs"] == feynman_service.evaluate_U(L1, [commutator]).to_json()


def test_bullet_corollary_on_w2():
    rng = np.random.default_rng(31)
    for arities in ((2, 1), (1, 2)):
        states = [polyalg_service.random_field(rng, 2, k) for k in arities]
        assert feynman_service.corollary_bullet_check(W2, states)["holds"], arities


def test_bullet_corollary_on_every_one_vertex_generator():
    rng = np.random.default_rng(43)
    for m in range(1, 4):
        dimension = max(2, m)
        bases = graph_service.enumerate_graphs(1, m, 0, DEFAULT)
        assert bases, m
        for base in bases:
            for k1 in range(1, m + 1):
                k2 = m + 1 - k1
                if k1 > dimension or k2 > dimension:
                    continue
                for _ in range(3):
                    states = [
                        polyalg_service.random_field(rng, dimension, k1),
                        polyalg_service.random_field(rng, dimension, k2),
                    ]
                    report = feynman_service.corollary_bullet_check(OrientedGraphTerm(graph=base), states)
                    assert report["holds"], (base.key(), k1, k2)


def test_collapse_lemma_on_p1():
    state = [field(((1,), 1))]
    report = feynman_service.lemma_pp_check(P1, [("b", 1), ("b", 2)], state)
    assert report["holds"]
    assert report["family_size"] == 2
    assert not report["single_graph_holds"]

    report = feynman_service.lemma_pp_check(P1, [("v", 1), ("b", 1)], state)
    assert report["holds"]
    assert report["family_size"] == 1
    assert report["single_graph_holds"]


def test_collapse_lemma_rejects_non_normal_subset():
    with pytest.raises(SubsetError):
        feynman_service.lemma_pp_check(W2, [("v", 1), ("b", 1)], [field(((1, 2), 1))])


def test_collapse_lemma_on_every_normal_subset():
    rng = np.random.default_rng(37)
    for n in range(3):
        for m in range(4):
            for graph in graph_service.enumerate_graphs(n, m, -1, DEFAULT):
                term = OrientedGraphTerm(graph=graph)
                for subset in graph_service.enumerate_normal_subsets(term, DEFAULT):
                    report = feynman_service.lemma_pp_check(term, subset, random_states(rng, graph))
                    assert report["holds"], (graph.key(), sorted(subset))


def test_obstruction_arities():
    assert feynman_service.obstruction_arities(1, 2, 2) == [1]
    assert feynman_service.obstruction_arities(2, 3, 2) == [2, 2]
    assert feynman_service.obstruction_arities(2, 1, 2) == [1, 1]
    assert sum(feynman_service.obstruction_arities(3, 2, 2)) == 5


def test_obstruction_paths_agree_on_random_inputs():
    for seed in (0, 1, 2):
        weights, states, args = feynman_service.obstruction_inputs(1, 2, seed=seed, dimension=2)
        report = feynman_service.assemble_obstruction(1, 2, weights, states, args, DEFAULT, 2)
        assert report["paths_agree"]
        assert report["lhs_equals_rhs"]
        assert report["graphs"] == 2


@pytest.mark.parametrize("n, m", [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)])
def test_obstruction_paths_agree_over_ten_seeds(n, m):
    for seed in range(10):
        weights, states, args = feynman_service.obstruction_inputs(n, m, seed=seed, dimension=2)
        report = feynman_service.assemble_obstruction(n, m, weights, states, args, DEFAULT, 2)
        assert report["paths_agree"], seed
        assert report["lhs_equals_rhs"], seed


def test_obstruction_vanishes_for_boundary_only_weights():
    weights = WeightFunctional({boundary_graph(2): Fraction(1)})
    _, states, args = feynman_service.obstruction_inputs(1, 2, seed=6, dimension=2)
    report = feynman_service.assemble_obstruction(1, 2, weights, states, args, DEFAULT, 2)
    assert report["lhs"] == {}
    assert report["rhs"] == {}
    assert report["direct"]["lhs"] == {}


def test_obstruction_of_a_cocycle_vanishes():
    report = feynman_service.assemble_obstruction(
        1, 2, WeightFunctional(), [field(((1,), x1))], [x1, x2], DEFAULT, 2
    )
    assert report["rhs"] == {}
    assert all(row["delta_w"] == "0/1" for row in report["table"].values())


def test_obstruction_input_counts_are_checked():
    with pytest.raises(StateError):
        feynman_service.assemble_obstruction(1, 2, WeightFunctional(), [], [x1, x2], DEFAULT, 2)
    with pytest.raises(StateError):
        feynman_service.assemble_obstruction(1, 2, WeightFunctional(), [field(((1,), 1))], [x1], DEFAULT, 2)


def test_random_inputs_are_seeded():
    first = feynman_service.obstruction_inputs(1, 2, seed=8, dimension=2)
    second = feynman_service.obstruction_inputs(1, 2, seed=8, dimension=2)
    assert first[0] == second[0]
    assert first[1] == second[1]
    assert first[2] == second[2]
    assert first[0][boundary_graph(2)] == 1
