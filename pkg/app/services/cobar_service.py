"""Service for the cobar construction of the graph coalgebra and its dual"""

from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Tuple
import logging

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from app.core.config import settings
from app.core.exceptions import ResourceError
from app.models.graph import ClassPredicate, DirectedGraph, OrientedGraphTerm
from app.models.vectors import CobarVector, GraphVector, TensorVector, WeightFunctional, parity_sign
from app.services.algebra_service import algebra_service, coproduct_terms
from app.services.graph_service import graph_service

logger = logging.getLogger(__name__)

Word = Tuple[DirectedGraph, ...]


@lru_cache(maxsize=None)
def _letter_terms(letter: DirectedGraph, predicate: ClassPredicate) -> Tuple[Tuple[Word, Fraction], ...]:
    result = CobarVector()
    for graph, coefficient in algebra_service.differential(GraphVector.single(letter), predicate).items():
        result.add_term((graph,), coefficient)
    for term in coproduct_terms(letter, predicate):
        result.add_term((term.sub, term.quotient), parity_sign(term.sub.edge_count) * term.coefficient)
    return tuple(result.items())


class CobarService:
    """Cobar differential, weight cochains and truncated cohomology ranks"""

    # Weights

    def weight_value(self, weights: WeightFunctional, graph: DirectedGraph) -> Fraction:
        """W on a canonical graph: table value, else product over connected factors"""
        if graph.is_empty or graph in weights:
            return weights.value_on_table(graph)
        sign, factors = graph_service.product_factors(graph)
        if len(factors) == 1:
            return Fraction(0)
        value = Fraction(sign)
        for factor in factors:
            value *= self.weight_value(weights, factor)
            if not value:
                break
        return value

    def weight_on_vector(self, weights: WeightFunctional, vector: GraphVector) -> Fraction:
        return sum((c * self.weight_value(weights, g) for g, c in vector.items()), Fraction(0))

    def weight_on_tensor(self, weights: WeightFunctional, tensor: TensorVector) -> Fraction:
        total = Fraction(0)
        for basis, coefficient in tensor.items():
            value = coefficient
            for graph in basis:
                value *= self.weight_value(weights, graph)
            total += value
        return total

    def weight_cochain(self, weights: WeightFunctional, word: Word) -> Fraction:
        """Dual cochain of W: (-1)^{sum (k-i) e(x_i)} prod W(x_i)"""
        k = len(word)
        exponent = sum((k - i) * letter.edge_count for i, letter in enumerate(word, start=1))
        value = Fraction((-1) ** exponent)
        for letter in word:
            value *= self.weight_value(weights, letter)
        return value

    def pair(self, weights: WeightFunctional, vector: CobarVector) -> Fraction:
        return sum((c * self.weight_cochain(weights, w) for w, c in vector.items()), Fraction(0))

    def delta_on_weight(
        self, weights: WeightFunctional, term: OrientedGraphTerm, predicate: ClassPredicate
    ) -> Fraction:
        """
        Evaluate (delta W)(term) = W(d term) + W(reduced coproduct of term)

        Args:
            weights: Weight functional
            term: Oriented graph
            predicate: Admissible class

        Returns:
            Exact rational value
        """
        vector = algebra_service.from_term(term)
        value = self.weight_on_vector(weights, algebra_service.differential(vector, predicate))
        value += self.weight_on_tensor(weights, algebra_service.reduced_coproduct(vector, predicate))
        return value

    def is_cocycle(
        self, weights: WeightFunctional, n_max: int, m_max: int, predicate: ClassPredicate
    ) -> Tuple[bool, List[Tuple[DirectedGraph, Fraction]]]:
        """Test delta W = 0 on every excess -1 graph up to the bounds"""
        witnesses = []
        checked = 0
        for n in range(n_max + 1):
            for m in range(m_max + 1):
                for graph in graph_service.enumerate_graphs(n, m, -1, predicate):
                    checked += 1
                    value = self.delta_on_weight(weights, OrientedGraphTerm(graph=graph), predicate)
                    if value:
                        witnesses.append((graph, value))
        logger.info(f"Cocycle test on {checked} graphs: {len(witnesses)} failures")
        return not witnesses, witnesses

    # Cobar differential

    def letter_differential(self, letter: DirectedGraph, predicate: ClassPredicate) -> CobarVector:
        """D on a one-letter word: [d x] plus (-1)^{e(g)} [g, g'] over the reduced coproduct"""
        return CobarVector(_letter_terms(letter, predicate))

    def cobar_differential(self, vector: CobarVector, predicate: ClassPredicate) -> CobarVector:
        """Extend the letter differential as a derivation with Koszul signs"""
        result = CobarVector()
        for word, coefficient in vector.items():
            prefix_degree = 0
            for i, letter in enumerate(word):
                sign = parity_sign(prefix_degree)
                for piece, c in self.letter_differential(letter, predicate).items():
                    result.add_term(word[:i] + piece + word[i + 1:], coefficient * sign * c)
                prefix_degree += letter.edge_count - 1
        return result

    # Truncated cohomology

    def letters(self, edge_max: int, boundary_max: int, predicate: ClassPredicate) -> List[DirectedGraph]:
        """Non-empty canonical graphs with at most edge_max edges and boundary_max boundary vertices"""
        found = []
        for edges in range(edge_max + 1):
            for n in range(edges + 1):
                for m in range(boundary_max + 1):
                    if n == 0 and m == 0:
                        continue
                    found.extend(graph_service.enumerate_by_edges(n, m, edges, predicate))
        return found

    def truncated_basis(
        self, edge_max: int, len_max: int, boundary_max: int, predicate: ClassPredicate
    ) -> List[Word]:
        letters = self.letters(edge_max, boundary_max, predicate)
        words: List[Word] = []
        frontier: List[Word] = [()]
        for _ in range(len_max):
            grown = []
            for word in frontier:
                used = sum(g.edge_count for g in word)
                for letter in letters:
                    if used + letter.edge_count <= edge_max:
                        grown.append(word + (letter,))
            words.extend(grown)
            frontier = grown
            if len(words) > settings.cohomology_max_basis:
                raise ResourceError(
                    f"Cobar basis exceeds {settings.cohomology_max_basis} words", size=len(words)
                )
        return sorted(words, key=lambda w: CobarVector.basis_key(w))

    def truncated_cohomology_ranks(
        self,
        edge_max: int,
        len_max: int,
        predicate: ClassPredicate,
        boundary_max: Optional[int] = None,
    ) -> List[Dict[str, object]]:
        """
        Rank table of the dual differential on the truncated cobar complex

        Args:
            edge_max: Bound on the total edge count of a word
            len_max: Bound on the word length
            predicate: Admissible class
            boundary_max: Bound on boundary vertices per letter

        Returns:
            One record per cobar degree with dim, rank, nullity, betti,
            escaped and square_zero
        """
        boundary_max = settings.cohomology_max_boundary if boundary_max is None else boundary_max
        basis = self.truncated_basis(edge_max, len_max, boundary_max, predicate)
        logger.info(f"Truncated cobar basis: {len(basis)} words (E<={edge_max}, L<={len_max}, M<={boundary_max})")

        by_degree: Dict[int, List[Word]] = {}
        for word in basis:
            by_degree.setdefault(CobarVector.cobar_degree(word), []).append(word)
        index = {word: i for words in by_degree.values() for i, word in enumerate(words)}

        matrices: Dict[int, DomainMatrix] = {}
        escaped: Dict[int, int] = {}
        for degree, words in by_degree.items():
            targets = by_degree.get(degree - 1, [])
            rows: Dict[int, Dict[int, object]] = {}
            escaped[degree] = 0
            for column, word in enumerate(words):
                image = self.cobar_differential(CobarVector({word: 1}), predicate)
                if any(target not in index for target in image):
                    escaped[degree] += 1
                for target, coefficient in image.items():
                    if target in index:
                        row = rows.setdefault(index[target], {})
                        row[column] = QQ(coefficient.numerator, coefficient.denominator)
            matrices[degree] = DomainMatrix(rows, (len(targets), len(words)), QQ)
            if escaped[degree]:
                logger.warning(f"{escaped[degree]} words of degree {degree} have images outside the truncation")

        def rank(degree: int) -> int:
            matrix = matrices.get(degree)
            if matrix is None or 0 in matrix.shape:
                return 0
            return matrix.rank()

        table = []
        for degree in sorted(by_degree):
            dim = len(by_degree[degree])
            rank_out = rank(degree + 1)
            rank_in = rank(degree)
            square_zero = True
            if degree + 1 in matrices and degree in matrices:
                lower, upper = matrices[degree], matrices[degree + 1]
                if 0 not in lower.shape and 0 not in upper.shape:
                    square_zero = (lower * upper).is_zero_matrix
            table.append({
                "degree": degree,
                "dim": dim,
                "rank": rank_out,
                "nullity": dim - rank_out,
                "betti": dim - rank_out - rank_in,
                "escaped": escaped[degree],
                "square_zero": square_zero,
            })
        return table

    def all_words(self, letters: List[DirectedGraph], len_max: int, edge_max: int) -> List[Word]:
        """Words over `letters` with bounded length and total edge count"""
        words = []
        for length in range(1, len_max + 1):
            for word in product(letters, repeat=length):
                if sum(g.edge_count for g in word) <= edge_max:
                    words.append(word)
        return words


cobar_service = CobarService()
