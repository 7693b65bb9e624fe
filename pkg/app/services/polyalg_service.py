"""Service for T_poly and D_poly: bullet, Schouten and Gerstenhaber brackets"""

from fractions import Fraction
from itertools import combinations, permutations
from math import factorial
from typing import Callable, List, Optional, Sequence
import logging

import numpy as np
from sympy import Matrix, Rational

from app.core.config import settings
from app.core.exceptions import StateError
from app.models.vectors import parity_sign
from app.models.poly import (
    MultiIndex,
    PolyDiffOperator,
    Polynomial,
    PolyVectorField,
    polynomial_ring,
    to_qq,
    unit_index,
)

logger = logging.getLogger(__name__)

FieldEvaluator = Callable[[Sequence[PolyVectorField]], PolyDiffOperator]
Composer = Callable[[PolyDiffOperator, PolyDiffOperator], PolyDiffOperator]


def koszul_sign(order: Sequence[int], degrees: Sequence[int]) -> int:
    """
    Sign of listing graded objects in the given order

    Args:
        order: Original positions in their new order
        degrees: Degree of the object at each original position

    Returns:
        Product of (-1)^{|a||b|} over every pair that changes order
    """
    exponent = 0
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j]:
                exponent += degrees[order[i]] * degrees[order[j]]
    return -1 if exponent % 2 else 1


class PolyAlgService:
    """Pre-Lie bullet, brackets and the Hochschild differential"""

    def _same_dimension(self, *objects) -> int:
        dimensions = {o.dimension for o in objects}
        if len(dimensions) != 1:
            raise StateError(f"Dimension mismatch: {sorted(dimensions)}")
        return dimensions.pop()

    # T_poly

    def bullet(self, first: PolyVectorField, second: PolyVectorField) -> PolyVectorField:
        """
        Pre-Lie bullet sum_i (d first / d psi_i) ^ (d second / d x_i)

        Args:
            first: Polyvector field; the odd derivative is taken from the left
            second: Polyvector field differentiated in x

        Returns:
            The bullet product
        """
        d = self._same_dimension(first, second)
        result = PolyVectorField(d)
        for i in range(1, d + 1):
            result = result + first.odd_derivative(i).wedge(second.partial(i))
        return result

    def _right_bullet(self, first: PolyVectorField, second: PolyVectorField) -> PolyVectorField:
        d = self._same_dimension(first, second)
        result = PolyVectorField(d)
        for i in range(1, d + 1):
            result = result + first.right_odd_derivative(i).wedge(second.partial(i))
        return result

    def schouten_bracket(self, first: PolyVectorField, second: PolyVectorField) -> PolyVectorField:
        """
        Schouten-Nijenhuis bracket, graded antisymmetric in the shifted degrees k - 1

        Built from the right odd derivative, which equals the left one up to
        (-1)^{k-1}; on vector fields it is the antisymmetrized bullet.
        """
        d = self._same_dimension(first, second)
        result = PolyVectorField(d)
        for k1, a in first.homogeneous_parts().items():
            for k2, b in second.homogeneous_parts().items():
                sign = parity_sign((k1 - 1) * (k2 - 1))
                result = result + self._right_bullet(a, b) - self._right_bullet(b, a).scale(sign)
        return result

    def bullet_antisymmetrization(self, first: PolyVectorField, second: PolyVectorField) -> PolyVectorField:
        """first . second - (-1)^{(k1-1)(k2-1)} second . first"""
        d = self._same_dimension(first, second)
        result = PolyVectorField(d)
        for k1, a in first.homogeneous_parts().items():
            for k2, b in second.homogeneous_parts().items():
                sign = parity_sign((k1 - 1) * (k2 - 1))
                result = result + self.bullet(a, b) - self.bullet(b, a).scale(sign)
        return result

    def first_order_operator(self, field: PolyVectorField) -> PolyDiffOperator:
        """The derivation sum_i X^i d/dx_i of a vector field"""
        if field and field.arity != 1:
            raise StateError(f"Expected a vector field, got arities {field.arities()}")
        op = PolyDiffOperator(field.dimension, 1)
        for (i,), coefficient in field.items():
            op.add_term((unit_index(field.dimension, i),), coefficient)
        return op

    def vector_field_commutator(self, first: PolyVectorField, second: PolyVectorField) -> PolyVectorField:
        """[X, Y] computed from the composition of first-order operators"""
        d = self._same_dimension(first, second)
        x_op, y_op = self.first_order_operator(first), self.first_order_operator(second)
        commutator = x_op.insert(1, y_op) - y_op.insert(1, x_op)
        result = PolyVectorField(d)
        for (alpha,), coefficient in commutator.items():
            if sum(alpha) != 1:
                raise StateError(f"Commutator has a term of order {sum(alpha)}")
            result.add_term((alpha.index(1) + 1,), coefficient)
        return result

    # D_poly

    def gerstenhaber_compose(self, first: PolyDiffOperator, second: PolyDiffOperator) -> PolyDiffOperator:
        """sum_i (-1)^{(i-1)(r-1)} first(.., second(f_i..f_{i+r-1}), ..)"""
        self._same_dimension(first, second)
        r = second.arity
        result = PolyDiffOperator(first.dimension, first.arity + r - 1)
        for slot in range(1, first.arity + 1):
            result = result + first.insert(slot, second).scale(parity_sign((slot - 1) * (r - 1)))
        return result

    def gerstenhaber_bracket(self, first: PolyDiffOperator, second: PolyDiffOperator) -> PolyDiffOperator:
        sign = parity_sign((first.arity - 1) * (second.arity - 1))
        return self.gerstenhaber_compose(first, second) - self.gerstenhaber_compose(second, first).scale(sign)

    def hochschild_d(self, op: PolyDiffOperator) -> PolyDiffOperator:
        """[m_A, op]"""
        return self.gerstenhaber_bracket(PolyDiffOperator.multiplication(op.dimension), op)

    def wedge_compose(
        self,
        first: FieldEvaluator,
        second: FieldEvaluator,
        gammas: Sequence[PolyVectorField],
        k: int,
        l: int,
        compose: Optional[Composer] = None,
    ) -> PolyDiffOperator:
        """
        Skew composition 1/(k! l!) sum_sigma eps(sigma) first(gamma_sigma[:k]) o second(gamma_sigma[k:])

        Args:
            first: Skew evaluator taking k fields
            second: Skew evaluator taking l fields
            gammas: The k + l fields, each homogeneous
            k: Number of fields fed to `first`
            l: Number of fields fed to `second`
            compose: Binary composition of the two outputs, Gerstenhaber by default

        Returns:
            The composed operator

        Raises:
            StateError: k + l differs from the number of fields
        """
        if k + l != len(gammas):
            raise StateError(f"wedge_compose expects {k} + {l} fields, got {len(gammas)}")
        compose = compose or self.gerstenhaber_compose
        degrees = [g.arity or 0 for g in gammas]
        scale = Fraction(1, factorial(k) * factorial(l))
        total: Optional[PolyDiffOperator] = None
        for order in permutations(range(len(gammas))):
            sign = koszul_sign(order, degrees)
            left = first([gammas[i] for i in order[:k]])
            right = second([gammas[i] for i in order[k:]])
            term = compose(left, right)
            term = term.scale(sign)
            total = term if total is None else total + term
        if total is None:
            raise StateError("wedge_compose needs at least one composition")
        return total.scale(scale)

    # Coordinate changes

    def change_basis_polynomial(self, p: Polynomial, matrix: Sequence[Sequence[Fraction]]) -> Polynomial:
        """p(A^{-1} y) for the linear coordinates y = A x"""
        R = p.ring
        inverse = Matrix([[Rational(c.numerator, c.denominator) for c in map(Fraction, row)] for row in matrix]).inv()
        images = [
            sum((R.gens[j] * to_qq(Fraction(int(inverse[i, j].p), int(inverse[i, j].q))) for j in range(R.ngens)), R.zero)
            for i in range(R.ngens)
        ]
        result = R.zero
        for monom, coefficient in p.items():
            term = R(coefficient)
            for i, e in enumerate(monom):
                if e:
                    term *= images[i] ** e
            result += term
        return result

    def change_basis_field(self, field: PolyVectorField, matrix: Sequence[Sequence[Fraction]]) -> PolyVectorField:
        """Push a polyvector field through y = A x: psi_i -> sum_j A_ji psi'_j"""
        d = field.dimension
        result = PolyVectorField(d)
        for indices, coefficient in field.items():
            image = PolyVectorField(d, {(): self.change_basis_polynomial(coefficient, matrix)})
            for i in indices:
                column = PolyVectorField(d, {(j,): to_qq(Fraction(matrix[j - 1][i - 1])) for j in range(1, d + 1)})
                image = image.wedge(column)
            result = result + image
        return result

    # Random elements

    def random_polynomial(
        self,
        rng: np.random.Generator,
        dimension: int,
        degree: Optional[int] = None,
        bound: Optional[int] = None,
    ) -> Polynomial:
        degree = settings.random_poly_degree if degree is None else degree
        bound = settings.random_coefficient_bound if bound is None else bound
        R = polynomial_ring(dimension)
        result = R.zero
        for monom in _monomials(dimension, degree):
            coefficient = int(rng.integers(-bound, bound + 1))
            if coefficient:
                result += R({monom: to_qq(coefficient)})
        return result

    def random_field(
        self, rng: np.random.Generator, dimension: int, arity: int, degree: Optional[int] = None
    ) -> PolyVectorField:
        field = PolyVectorField(dimension)
        for indices in combinations(range(1, dimension + 1), arity):
            field.add_term(indices, self.random_polynomial(rng, dimension, degree))
        return field

    def random_operator(
        self, rng: np.random.Generator, dimension: int, arity: int, order: int = 1, terms: int = 3
    ) -> PolyDiffOperator:
        op = PolyDiffOperator(dimension, arity)
        for _ in range(terms):
            derivatives = tuple(
                tuple(int(a) for a in rng.integers(0, order + 1, size=dimension)) for _ in range(arity)
            )
            op.add_term(derivatives, self.random_polynomial(rng, dimension, degree=1))
        return op


def _monomials(dimension: int, degree: int) -> List[MultiIndex]:
    if dimension == 0:
        return [()]
    found = []
    for head in range(degree + 1):
        for rest in _monomials(dimension - 1, degree - head):
            found.append((head,) + rest)
    return sorted(found)


polyalg_service = PolyAlgService()
