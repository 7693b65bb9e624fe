"""Sparse linear combinations with exact rational coefficients"""

from fractions import Fraction
from typing import Any, Dict, Hashable, Iterable, Tuple, TypeVar, Union

from app.models.graph import DirectedGraph

Scalar = Union[int, Fraction]
V = TypeVar("V", bound="FormalVector")


def format_rational(value: Scalar) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: Any) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text).strip())


def parity_sign(exponent: int) -> int:
    """(-1)^exponent for any integer exponent, negative ones included"""
    return -1 if exponent % 2 else 1


class FormalVector(dict):
    """Mapping basis element -> Fraction with zero coefficients absent"""

    def __init__(self, terms: Union[Dict[Hashable, Scalar], Iterable[Tuple[Hashable, Scalar]], None] = None):
        super().__init__()
        if terms is None:
            return
        items = terms.items() if isinstance(terms, dict) else terms
        for basis, coefficient in items:
            self.add_term(basis, coefficient)

    def add_term(self, basis: Hashable, coefficient: Scalar) -> None:
        if not coefficient:
            return
        value = self.get(basis, Fraction(0)) + Fraction(coefficient)
        if value:
            self[basis] = value
        else:
            self.pop(basis, None)

    def copy(self: V) -> V:
        return type(self)(self)

    def __add__(self: V, other: V) -> V:
        result = self.copy()
        for basis, coefficient in other.items():
            result.add_term(basis, coefficient)
        return result

    def __sub__(self: V, other: V) -> V:
        result = self.copy()
        for basis, coefficient in other.items():
            result.add_term(basis, -coefficient)
        return result

    def __neg__(self: V) -> V:
        return type(self)((basis, -coefficient) for basis, coefficient in self.items())

    def __mul__(self: V, scalar: Scalar) -> V:
        return type(self)((basis, coefficient * scalar) for basis, coefficient in self.items())

    __rmul__ = __mul__

    @classmethod
    def total(cls: type, vectors: Iterable["FormalVector"]) -> "FormalVector":
        result = cls()
        for vector in vectors:
            for basis, coefficient in vector.items():
                result.add_term(basis, coefficient)
        return result

    @staticmethod
    def basis_key(basis: Hashable) -> str:
        return str(basis)

    def to_json(self) -> Dict[str, str]:
        rendered = {self.basis_key(basis): format_rational(c) for basis, c in self.items()}
        return dict(sorted(rendered.items()))


class GraphVector(FormalVector):
    """Element of H: canonical graphs with rational coefficients"""

    @staticmethod
    def basis_key(basis: DirectedGraph) -> str:
        return basis.key()

    @classmethod
    def single(cls, graph: DirectedGraph, coefficient: Scalar = 1) -> "GraphVector":
        return cls({graph: coefficient})


class TensorVector(FormalVector):
    """Element of H^{(x)k}: tuples of canonical graphs"""

    @staticmethod
    def basis_key(basis: Tuple[DirectedGraph, ...]) -> str:
        return " (x) ".join(graph.key() for graph in basis)


class CobarVector(FormalVector):
    """Element of the cobar construction: words of non-empty canonical graphs"""

    @staticmethod
    def basis_key(basis: Tuple[DirectedGraph, ...]) -> str:
        return "[" + " | ".join(graph.key() for graph in basis) + "]"

    @staticmethod
    def cobar_degree(word: Tuple[DirectedGraph, ...]) -> int:
        return sum(letter.edge_count - 1 for letter in word)


class WeightFunctional(dict):
    """Rational values on generators; missing keys read as zero.

    The empty graph always has weight one. Evaluation on products is done by
    the cobar service, which factors graphs into connected pieces.
    """

    def value_on_table(self, graph: DirectedGraph) -> Fraction:
        if graph.is_empty:
            return Fraction(1)
        return Fraction(self.get(graph, 0))

    def to_json(self) -> Dict[str, str]:
        return dict(sorted((graph.key(), format_rational(v)) for graph, v in self.items()))
