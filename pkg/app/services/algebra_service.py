"""Service implementing the dg-Hopf algebra H of oriented graphs"""

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, NamedTuple, Tuple
import logging

from app.models.graph import ClassPredicate, DirectedGraph, OrientedGraphTerm
from app.models.vectors import GraphVector, TensorVector
from app.services.graph_service import EMPTY_GRAPH, graph_service

logger = logging.getLogger(__name__)


class CoproductTerm(NamedTuple):
    """One summand of the reduced coproduct of a graph"""
    coefficient: int
    sub: DirectedGraph
    quotient: DirectedGraph


def coproduct_terms(graph: DirectedGraph, predicate: ClassPredicate) -> List[CoproductTerm]:
    """Normal-subgraph summands of a labeled graph, signs included"""
    if graph.m == 0:
        return []
    return list(_coproduct_terms(graph, predicate))


@lru_cache(maxsize=None)
def _coproduct_terms(graph: DirectedGraph, predicate: ClassPredicate) -> Tuple[CoproductTerm, ...]:
    terms = []
    for subset in graph_service.candidate_subsets(graph):
        split = graph_service.collapse_labeled(graph, subset, predicate)
        if split is None:
            continue
        sub, quotient, sign, _ = split
        sub_term, quotient_term = graph_service.canonicalize(sub), graph_service.canonicalize(quotient)
        coefficient = sign * sub_term.sign * quotient_term.sign
        if coefficient:
            terms.append(CoproductTerm(coefficient, sub_term.graph, quotient_term.graph))
    return tuple(terms)


class AlgebraService:
    """Product, coproduct, differential, counit and antipode on GraphVectors"""

    def __init__(self):
        self._antipode_memo: Dict[Tuple[DirectedGraph, ClassPredicate], GraphVector] = {}

    def unit(self) -> GraphVector:
        return GraphVector.single(EMPTY_GRAPH)

    def from_term(self, term: OrientedGraphTerm) -> GraphVector:
        return GraphVector.single(term.graph, term.sign) if term.sign else GraphVector()

    def product_graphs(self, first: DirectedGraph, second: DirectedGraph) -> OrientedGraphTerm:
        return graph_service.canonicalize(graph_service.disjoint_union(first, second))

    def product(self, a: GraphVector, b: GraphVector) -> GraphVector:
        """Bilinear disjoint union with concatenated labels"""
        result = GraphVector()
        for g1, c1 in a.items():
            for g2, c2 in b.items():
                term = self.product_graphs(g1, g2)
                result.add_term(term.graph, c1 * c2 * term.sign)
        return result

    def differential(self, a: GraphVector, predicate: ClassPredicate) -> GraphVector:
        """Sum of all internal-edge contractions"""
        result = GraphVector()
        for graph, coefficient in a.items():
            term = OrientedGraphTerm(graph=graph, sign=1)
            for edge in graph_service.internal_edges(graph):
                contracted = graph_service.contract_edge(term, edge, predicate)
                if contracted is not None:
                    result.add_term(contracted.graph, coefficient * contracted.sign)
        return result

    def reduced_coproduct(self, a: GraphVector, predicate: ClassPredicate) -> TensorVector:
        result = TensorVector()
        for graph, coefficient in a.items():
            for term in coproduct_terms(graph, predicate):
                result.add_term((term.sub, term.quotient), coefficient * term.coefficient)
        return result

    def coproduct(self, a: GraphVector, predicate: ClassPredicate) -> TensorVector:
        """Full coproduct a(x)1 + 1(x)a + reduced part"""
        result = self.reduced_coproduct(a, predicate)
        for graph, coefficient in a.items():
            if graph.is_empty:
                result.add_term((EMPTY_GRAPH, EMPTY_GRAPH), coefficient)
                continue
            result.add_term((graph, EMPTY_GRAPH), coefficient)
            result.add_term((EMPTY_GRAPH, graph), coefficient)
        return result

    def counit(self, a: GraphVector) -> Fraction:
        return a.get(EMPTY_GRAPH, Fraction(0))

    def antipode(self, a: GraphVector, predicate: ClassPredicate) -> GraphVector:
        result = GraphVector()
        for graph, coefficient in a.items():
            result = result + self._antipode_graph(graph, predicate) * coefficient
        return result

    def _antipode_graph(self, graph: DirectedGraph, predicate: ClassPredicate) -> GraphVector:
        key = (graph, predicate)
        if key in self._antipode_memo:
            return self._antipode_memo[key]
        if graph.is_empty:
            value = self.unit()
        else:
            value = -GraphVector.single(graph)
            for term in coproduct_terms(graph, predicate):
                left = self._antipode_graph(term.sub, predicate)
                value = value - self.product(left, GraphVector.single(term.quotient)) * term.coefficient
        self._antipode_memo.setdefault(key, value)
        return self._antipode_memo[key]

    # Tensor helpers

    def tensor_multiply(self, x: TensorVector, y: TensorVector) -> TensorVector:
        """(a(x)b)(c(x)d) = (-1)^{|b||c|} ac (x) bd"""
        result = TensorVector()
        for (a, b), cx in x.items():
            for (c, d), cy in y.items():
                left = self.product_graphs(a, c)
                right = self.product_graphs(b, d)
                sign = (-1) ** (b.edge_count * c.edge_count) * left.sign * right.sign
                if sign:
                    result.add_term((left.graph, right.graph), cx * cy * sign)
        return result

    def tensor_map(
        self,
        x: TensorVector,
        slot: int,
        fn: Callable[[GraphVector], object],
        koszul: bool = False,
    ) -> TensorVector:
        """
        Apply a linear map to one tensor slot

        Args:
            x: Tensor vector
            slot: Position of the slot the map acts on
            fn: Map returning a GraphVector or TensorVector for a single graph
            koszul: Whether the map is odd, so that it picks up (-1)^{edges left of slot}

        Returns:
            The resulting tensor vector (slots expand when fn returns tensors)
        """
        result = TensorVector()
        for basis, coefficient in x.items():
            image = fn(GraphVector.single(basis[slot]))
            sign = (-1) ** sum(g.edge_count for g in basis[:slot]) if koszul else 1
            for piece, c in image.items():
                piece = piece if isinstance(piece, tuple) else (piece,)
                result.add_term(basis[:slot] + piece + basis[slot + 1:], coefficient * c * sign)
        return result

    def multiply_slots(self, x: TensorVector) -> GraphVector:
        """m: H(x)H -> H"""
        result = GraphVector()
        for (a, b), coefficient in x.items():
            term = self.product_graphs(a, b)
            result.add_term(term.graph, coefficient * term.sign)
        return result


algebra_service = AlgebraService()
