"""Service running the axiom suites of the graph Hopf algebra and the cobar complex"""

from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

from app.core.config import settings
from app.core.exceptions import UsageError
from app.models.graph import ClassPredicate, DirectedGraph, OrientedGraphTerm
from app.models.schemas import AxiomResult
from app.models.vectors import CobarVector, GraphVector, TensorVector
from app.services.algebra_service import algebra_service
from app.services.cobar_service import cobar_service
from app.services.feynman_service import feynman_service
from app.services.graph_service import EMPTY_GRAPH, graph_service

logger = logging.getLogger(__name__)

SUITES = ("hopf", "d2", "cobar-d2")


class CheckService:
    """Exhaustive identity checks over enumerated graphs"""

    def graphs_in_range(
        self, max_n: int, max_m: int, max_l: int, predicate: ClassPredicate
    ) -> List[DirectedGraph]:
        """Canonical graphs with n <= max_n, m <= max_m and excess -1..max_l"""
        found = []
        for n in range(max_n + 1):
            for m in range(max_m + 1):
                for excess in range(-1, max_l + 1):
                    found.extend(graph_service.enumerate_graphs(n, m, excess, predicate))
        return [g for g in found if not g.is_empty]

    def pairs_in_range(
        self, graphs: List[DirectedGraph], max_n: int, max_m: int
    ) -> List[Tuple[DirectedGraph, DirectedGraph]]:
        return [
            (g1, g2) for g1 in graphs for g2 in graphs
            if g1.n + g2.n <= max_n and g1.m + g2.m <= max_m
        ]

    def run_suite(
        self,
        suite: str,
        max_n: int = 2,
        max_m: int = 3,
        max_l: int = 0,
        predicate: Optional[ClassPredicate] = None,
        seed: Optional[int] = None,
        max_len: int = 2,
    ) -> Dict[str, object]:
        if suite == "hopf":
            return self.check_hopf(max_n, max_m, max_l, predicate)
        if suite == "d2":
            return self.check_d2(max_n, max_m, max_l, predicate)
        if suite == "cobar-d2":
            return self.check_cobar_d2(max_n, max_m, max_l, predicate, seed, max_len)
        raise UsageError(f"Unknown suite: {suite}. Choose from {', '.join(SUITES)}")

    # Hopf algebra

    def check_hopf(
        self, max_n: int, max_m: int, max_l: int, predicate: Optional[ClassPredicate] = None
    ) -> Dict[str, object]:
        """
        Run every Hopf algebra axiom over the graphs in range and their products

        Each identity is compared exactly; an instance with any non-zero
        difference is a failure and its key is listed as a witness.

        Returns:
            Report with one AxiomResult per axiom and `passed`
        """
        predicate = predicate or ClassPredicate()
        graphs = self.graphs_in_range(max_n, max_m, max_l, predicate)
        pairs = self.pairs_in_range(graphs, max_n, max_m)
        logger.info(f"Hopf suite on {len(graphs)} graphs and {len(pairs)} pairs")

        axioms = {
            name: AxiomResult()
            for name in (
                "d_squared", "graded_commutativity", "leibniz", "coassociativity", "coderivation",
                "multiplicativity", "counit", "antipode_left", "antipode_right",
            )
        }

        for graph in graphs:
            key = graph.key()
            axioms["d_squared"].record(self.d_squared_holds(graph, predicate), key)
            axioms["counit"].record(self.counit_holds(graph, predicate), key)
            axioms["coderivation"].record(self.coderivation_holds(graph, predicate), key)
            axioms["coassociativity"].record(not self.coassociativity_defect(graph, predicate), key)
            axioms["antipode_left"].record(not self.convolution(graph, 0, predicate), key)
            axioms["antipode_right"].record(not self.convolution(graph, 1, predicate), key)

        for first, second in pairs:
            key = f"{first.key()} * {second.key()}"
            axioms["graded_commutativity"].record(self.commutativity_holds(first, second), key)
            axioms["leibniz"].record(self.leibniz_holds(first, second, predicate), key)
            axioms["multiplicativity"].record(not self.multiplicativity_defect(first, second, predicate), key)

        failing = {name: result.failed for name, result in axioms.items() if result.failed}
        if failing:
            logger.warning(f"Hopf suite failures: {failing}")
        return {
            "suite": "hopf",
            "passed": not failing,
            "graphs": len(graphs),
            "pairs": len(pairs),
            "axioms": {name: result.model_dump() for name, result in axioms.items()},
        }

    def d_squared_holds(self, graph: DirectedGraph, predicate: ClassPredicate) -> bool:
        once = algebra_service.differential(GraphVector.single(graph), predicate)
        return not algebra_service.differential(once, predicate)

    def commutativity_holds(self, first: DirectedGraph, second: DirectedGraph) -> bool:
        """Block-swapped boundary of first*second equals (-1)^{E1 E2} second*first"""
        forward = algebra_service.product_graphs(first, second)
        backward = algebra_service.product_graphs(second, first)
        swap = [second.m + j for j in range(1, first.m + 1)] + list(range(1, second.m + 1))
        swapped = graph_service.permute_boundary(forward, swap)
        sign = (-1) ** (first.edge_count * second.edge_count)
        return algebra_service.from_term(swapped) == algebra_service.from_term(backward) * sign

    def leibniz_holds(self, first: DirectedGraph, second: DirectedGraph, predicate: ClassPredicate) -> bool:
        a, b = GraphVector.single(first), GraphVector.single(second)
        lhs = algebra_service.differential(algebra_service.product(a, b), predicate)
        rhs = algebra_service.product(algebra_service.differential(a, predicate), b)
        rhs = rhs + algebra_service.product(a, algebra_service.differential(b, predicate)) * (-1) ** first.edge_count
        return lhs == rhs

    def coassociativity_defect(self, graph: DirectedGraph, predicate: ClassPredicate) -> TensorVector:
        """(Delta(x)id)Delta - (id(x)Delta)Delta on one graph"""
        coproduct = algebra_service.coproduct(GraphVector.single(graph), predicate)

        def split(v: GraphVector) -> TensorVector:
            return algebra_service.coproduct(v, predicate)

        return algebra_service.tensor_map(coproduct, 0, split) - algebra_service.tensor_map(coproduct, 1, split)

    def convolution(self, graph: DirectedGraph, slot: int, predicate: ClassPredicate) -> GraphVector:
        """
        m o (S(x)id) o Delta for slot 0, m o (id(x)S) o Delta for slot 1

        The unit times the counit vanishes on a non-empty graph, so the
        antipode axiom holds exactly when the result is zero.
        """
        coproduct = algebra_service.coproduct(GraphVector.single(graph), predicate)
        return algebra_service.multiply_slots(
            algebra_service.tensor_map(coproduct, slot, lambda v: algebra_service.antipode(v, predicate))
        )

    def coderivation_holds(self, graph: DirectedGraph, predicate: ClassPredicate) -> bool:
        single = GraphVector.single(graph)

        def d(v: GraphVector) -> GraphVector:
            return algebra_service.differential(v, predicate)

        lhs = algebra_service.reduced_coproduct(d(single), predicate)
        reduced = algebra_service.reduced_coproduct(single, predicate)
        rhs = algebra_service.tensor_map(reduced, 0, d) + algebra_service.tensor_map(reduced, 1, d, koszul=True)
        return lhs == rhs

    def counit_holds(self, graph: DirectedGraph, predicate: ClassPredicate) -> bool:
        coproduct = algebra_service.coproduct(GraphVector.single(graph), predicate)
        left, right = GraphVector(), GraphVector()
        for (a, b), coefficient in coproduct.items():
            if a == EMPTY_GRAPH:
                left.add_term(b, coefficient)
            if b == EMPTY_GRAPH:
                right.add_term(a, coefficient)
        expected = GraphVector.single(graph)
        return left == expected and right == expected

    def multiplicativity_defect(
        self, first: DirectedGraph, second: DirectedGraph, predicate: ClassPredicate
    ) -> TensorVector:
        """Delta(first * second) - Delta(first) Delta(second), all summands included"""
        a, b = GraphVector.single(first), GraphVector.single(second)
        lhs = algebra_service.coproduct(algebra_service.product(a, b), predicate)
        rhs = algebra_service.tensor_multiply(
            algebra_service.coproduct(a, predicate), algebra_service.coproduct(b, predicate)
        )
        return lhs - rhs

    # Differential

    def check_d2(
        self, max_n: int, max_m: int, max_l: int, predicate: Optional[ClassPredicate] = None
    ) -> Dict[str, object]:
        predicate = predicate or ClassPredicate()
        graphs = self.graphs_in_range(max_n, max_m, max_l, predicate)
        logger.info(f"d^2 suite on {len(graphs)} graphs")
        result = AxiomResult()
        for graph in graphs:
            result.record(self.d_squared_holds(graph, predicate), graph.key())
        return {
            "suite": "d2",
            "passed": result.failed == 0,
            "graphs": len(graphs),
            "axioms": {"d_squared": result.model_dump()},
        }

    # Cobar

    def check_cobar_d2(
        self,
        max_n: int,
        max_m: int,
        max_l: int,
        predicate: Optional[ClassPredicate] = None,
        seed: Optional[int] = None,
        max_len: int = 2,
    ) -> Dict[str, object]:
        """
        Check D^2 = 0 on every word of letters in range

        Also pairs a seeded random weight cochain against D of every
        one-letter word and compares with delta W.
        """
        predicate = predicate or ClassPredicate()
        seed = settings.default_seed if seed is None else seed
        letters = [g for g in self.graphs_in_range(max_n, max_m, max_l, predicate) if g.m > 0]
        total_edges = max(g.edge_count for g in letters) if letters else 0
        words = cobar_service.all_words(letters, max_len, total_edges)
        logger.info(f"Cobar D^2 suite on {len(words)} words over {len(letters)} letters")

        square = AxiomResult()
        for word in words:
            vector = CobarVector({word: 1})
            twice = cobar_service.cobar_differential(cobar_service.cobar_differential(vector, predicate), predicate)
            square.record(not twice, CobarVector.basis_key(word))
        if square.failed:
            logger.warning(f"D^2 is non-zero on {square.failed} of {len(words)} words")

        rng = np.random.default_rng(seed)
        weights = feynman_service.random_weights(rng, max_n, max_m, predicate)
        pairing = AxiomResult()
        for letter in letters:
            word_image = cobar_service.cobar_differential(CobarVector({(letter,): 1}), predicate)
            value = cobar_service.pair(weights, word_image)
            expected = cobar_service.delta_on_weight(weights, OrientedGraphTerm(graph=letter), predicate)
            pairing.record(value == expected, letter.key())

        return {
            "suite": "cobar-d2",
            "passed": square.failed == 0 and pairing.failed == 0,
            "words": len(words),
            "seed": seed,
            "axioms": {"d_squared": square.model_dump(), "pairing": pairing.model_dump()},
        }


check_service = CheckService()
