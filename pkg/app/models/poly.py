"""Polynomials, polyvector fields and polydifferential operators over QQ"""

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import factorial, prod
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.combinatorics import Permutation
from sympy.polys.rings import PolyElement, PolyRing, ring

from app.core.exceptions import StateError
from app.models.vectors import format_rational, parse_rational

Polynomial = PolyElement
MultiIndex = Tuple[int, ...]
PsiIndices = Tuple[int, ...]
Coefficient = Union[int, Fraction, PolyElement]


@lru_cache(maxsize=None)
def polynomial_ring(dimension: int) -> PolyRing:
    """QQ[x1..xd], shared per dimension"""
    if dimension < 1:
        raise StateError(f"Dimension must be positive, got {dimension}")
    names = ",".join(f"x{i}" for i in range(1, dimension + 1))
    return ring(names, QQ)[0]


def to_qq(value: Union[int, Fraction]):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def from_qq(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def as_polynomial(dimension: int, value: Coefficient) -> Polynomial:
    R = polynomial_ring(dimension)
    if isinstance(value, PolyElement):
        if value.ring != R:
            raise StateError(f"Polynomial over {value.ring.ngens} variables used in dimension {dimension}")
        return value
    return R(to_qq(value))


def zero_index(dimension: int) -> MultiIndex:
    return (0,) * dimension


def unit_index(dimension: int, i: int) -> MultiIndex:
    """Multi-index of the first-order derivative d/dx_i (1-based)"""
    return tuple(1 if q == i - 1 else 0 for q in range(dimension))


def add_indices(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def partial(p: Polynomial, alpha: MultiIndex) -> Polynomial:
    """Apply the derivative with multi-index alpha"""
    gens = p.ring.gens
    for q, order in enumerate(alpha):
        for _ in range(order):
            if not p:
                return p
            p = p.diff(gens[q])
    return p


def polynomial_to_json(p: Polynomial) -> Dict[str, str]:
    return {
        ",".join(str(e) for e in monom): format_rational(from_qq(c))
        for monom, c in sorted(p.items())
    }


def polynomial_from_json(dimension: int, data: Dict[str, object]) -> Polynomial:
    R = polynomial_ring(dimension)
    terms = {}
    for key, value in data.items():
        try:
            monom = tuple(int(e) for e in str(key).split(","))
            coefficient = parse_rational(value)
        except ValueError:
            raise StateError(f"Malformed polynomial term {key!r}: {value!r}")
        if len(monom) != dimension or min(monom) < 0:
            raise StateError(f"Exponent {key!r} does not fit dimension {dimension}")
        terms[monom] = to_qq(coefficient)
    return R.from_dict(terms) if terms else R.zero


def sort_sign(indices: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on repeats"""
    if len(set(indices)) != len(indices):
        return 0, tuple(sorted(indices))
    order = sorted(range(len(indices)), key=lambda i: indices[i])
    sign = Permutation(order).signature() if len(order) > 1 else 1
    return sign, tuple(indices[i] for i in order)


def shuffles(size: int, first: int) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...], int]]:
    """(first, size-first) shuffles of positions 0..size-1 with their signs"""
    for chosen in combinations(range(size), first):
        rest = tuple(i for i in range(size) if i not in chosen)
        order = list(chosen) + list(rest)
        sign = Permutation(order).signature() if size > 1 else 1
        yield chosen, rest, sign


class PolyVectorField(dict):
    """Skew multivector sum_I c_I psi_I keyed by strictly increasing index tuples"""

    def __init__(self, dimension: int, terms: Union[Dict[PsiIndices, Coefficient], Iterable, None] = None):
        super().__init__()
        self.dimension = dimension
        self.ring = polynomial_ring(dimension)
        if terms is None:
            return
        items = terms.items() if isinstance(terms, dict) else terms
        for indices, coefficient in items:
            self.add_term(tuple(indices), coefficient)

    def add_term(self, indices: PsiIndices, coefficient: Coefficient) -> None:
        if any(not 1 <= i <= self.dimension for i in indices):
            raise StateError(f"psi index out of range in {indices} for dimension {self.dimension}")
        sign, ordered = sort_sign(indices)
        if not sign:
            return
        value = as_polynomial(self.dimension, coefficient)
        if not value:
            return
        total = self.get(ordered, self.ring.zero) + value * sign
        if total:
            self[ordered] = total
        else:
            self.pop(ordered, None)

    @property
    def is_zero(self) -> bool:
        return not self

    def arities(self) -> List[int]:
        return sorted({len(indices) for indices in self})

    @property
    def arity(self) -> Optional[int]:
        """Arity of a homogeneous field; None for the zero field"""
        arities = self.arities()
        if len(arities) > 1:
            raise StateError(f"Field is not homogeneous: arities {arities}")
        return arities[0] if arities else None

    def homogeneous_parts(self) -> Dict[int, "PolyVectorField"]:
        parts: Dict[int, PolyVectorField] = {}
        for indices, coefficient in self.items():
            parts.setdefault(len(indices), PolyVectorField(self.dimension)).add_term(indices, coefficient)
        return parts

    def coefficient_on(self, indices: Sequence[int]) -> Polynomial:
        """Signed coefficient on an arbitrary index tuple, zero on repeats"""
        sign, ordered = sort_sign(tuple(indices))
        if not sign:
            return self.ring.zero
        value = self.get(ordered)
        return value * sign if value is not None else self.ring.zero

    def _check(self, other: "PolyVectorField") -> None:
        if other.dimension != self.dimension:
            raise StateError(f"Dimension mismatch: {self.dimension} vs {other.dimension}")

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        self._check(other)
        result = PolyVectorField(self.dimension, self)
        for indices, coefficient in other.items():
            result.add_term(indices, coefficient)
        return result

    def __neg__(self) -> "PolyVectorField":
        return PolyVectorField(self.dimension, {k: -v for k, v in self.items()})

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        return self + (-other)

    def scale(self, factor: Coefficient) -> "PolyVectorField":
        factor = as_polynomial(self.dimension, factor)
        return PolyVectorField(self.dimension, {k: v * factor for k, v in self.items()})

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        return self.dimension == other.dimension and dict.__eq__(self, other)

    def __ne__(self, other: object) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def wedge(self, other: "PolyVectorField") -> "PolyVectorField":
        self._check(other)
        result = PolyVectorField(self.dimension)
        for left, a in self.items():
            for right, b in other.items():
                result.add_term(left + right, a * b)
        return result

    def odd_derivative(self, k: int) -> "PolyVectorField":
        """Left derivative d/dpsi_k: removing psi_k at position p costs (-1)^p"""
        result = PolyVectorField(self.dimension)
        for indices, coefficient in self.items():
            if k in indices:
                p = indices.index(k)
                result.add_term(indices[:p] + indices[p + 1:], coefficient * (-1) ** p)
        return result

    def right_odd_derivative(self, k: int) -> "PolyVectorField":
        """Right derivative: removing psi_k costs (-1)^(number of factors after it)"""
        result = PolyVectorField(self.dimension)
        for indices, coefficient in self.items():
            if k in indices:
                p = indices.index(k)
                result.add_term(indices[:p] + indices[p + 1:], coefficient * (-1) ** (len(indices) - 1 - p))
        return result

    def partial(self, i: int) -> "PolyVectorField":
        """d/dx_i applied to every coefficient"""
        x = self.ring.gens[i - 1]
        return PolyVectorField(self.dimension, {k: v.diff(x) for k, v in self.items()})

    def to_json(self) -> List[Dict[str, object]]:
        return [
            {"psi": list(indices), "coeff": polynomial_to_json(coefficient)}
            for indices, coefficient in sorted(self.items())
        ]

    @classmethod
    def from_json(cls, dimension: int, records: Iterable[Dict[str, object]]) -> "PolyVectorField":
        field = cls(dimension)
        for record in records:
            try:
                indices = tuple(int(i) for i in record["psi"])
                coefficient = polynomial_from_json(dimension, record["coeff"])
            except (KeyError, TypeError):
                raise StateError(f"Malformed field record {record!r}")
            field.add_term(indices, coefficient)
        return field

    def __repr__(self) -> str:
        return f"PolyVectorField(d={self.dimension}, {self.to_json()})"


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def leibniz_splits(alpha: MultiIndex, parts: int) -> Iterator[Tuple[int, List[MultiIndex]]]:
    """Distribute d^alpha over a product of `parts` factors with multinomial weights"""
    per_coordinate = []
    for order in alpha:
        options = []
        for split in _compositions(order, parts):
            weight = factorial(order) // prod(factorial(s) for s in split)
            options.append((weight, split))
        per_coordinate.append(options)
    for choice in product(*per_coordinate):
        weight = prod(w for w, _ in choice)
        pieces = [tuple(split[t] for _, split in choice) for t in range(parts)]
        yield weight, pieces


class PolyDiffOperator(dict):
    """m-ary operator (f_1..f_m) -> sum c * prod_j d^{alpha_j} f_j keyed by (alpha_1..alpha_m)"""

    def __init__(
        self,
        dimension: int,
        arity: int,
        terms: Union[Dict[Tuple[MultiIndex, ...], Coefficient], Iterable, None] = None,
    ):
        super().__init__()
        self.dimension = dimension
        self.arity = arity
        self.ring = polynomial_ring(dimension)
        if terms is None:
            return
        items = terms.items() if isinstance(terms, dict) else terms
        for derivatives, coefficient in items:
            self.add_term(tuple(tuple(a) for a in derivatives), coefficient)

    def add_term(self, derivatives: Tuple[MultiIndex, ...], coefficient: Coefficient) -> None:
        if len(derivatives) != self.arity or any(len(a) != self.dimension for a in derivatives):
            raise StateError(f"Derivative tuple {derivatives} does not fit arity {self.arity}, d={self.dimension}")
        value = as_polynomial(self.dimension, coefficient)
        if not value:
            return
        total = self.get(derivatives, self.ring.zero) + value
        if total:
            self[derivatives] = total
        else:
            self.pop(derivatives, None)

    @classmethod
    def identity(cls, dimension: int) -> "PolyDiffOperator":
        return cls(dimension, 1, {(zero_index(dimension),): 1})

    @classmethod
    def multiplication(cls, dimension: int, arity: int = 2) -> "PolyDiffOperator":
        """m_A for arity 2; the plain product of all arguments in general"""
        return cls(dimension, arity, {(zero_index(dimension),) * arity: 1})

    @property
    def is_zero(self) -> bool:
        return not self

    def _check(self, other: "PolyDiffOperator") -> None:
        if other.dimension != self.dimension:
            raise StateError(f"Dimension mismatch: {self.dimension} vs {other.dimension}")
        if other.arity != self.arity and self and other:
            raise StateError(f"Arity mismatch: {self.arity} vs {other.arity}")

    def __add__(self, other: "PolyDiffOperator") -> "PolyDiffOperator":
        self._check(other)
        arity = self.arity if self else other.arity
        result = PolyDiffOperator(self.dimension, arity, self)
        for derivatives, coefficient in other.items():
            result.add_term(derivatives, coefficient)
        return result

    def __neg__(self) -> "PolyDiffOperator":
        return PolyDiffOperator(self.dimension, self.arity, {k: -v for k, v in self.items()})

    def __sub__(self, other: "PolyDiffOperator") -> "PolyDiffOperator":
        return self + (-other)

    def scale(self, factor: Coefficient) -> "PolyDiffOperator":
        factor = as_polynomial(self.dimension, factor)
        return PolyDiffOperator(self.dimension, self.arity, {k: v * factor for k, v in self.items()})

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyDiffOperator):
            return NotImplemented
        if not self and not other:
            return self.dimension == other.dimension
        return (self.dimension, self.arity) == (other.dimension, other.arity) and dict.__eq__(self, other)

    def __ne__(self, other: object) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def apply(self, args: Sequence[Polynomial]) -> Polynomial:
        if len(args) != self.arity:
            raise StateError(f"Operator of arity {self.arity} applied to {len(args)} arguments")
        total = self.ring.zero
        for derivatives, coefficient in self.items():
            value = coefficient
            for alpha, f in zip(derivatives, args):
                value *= partial(f, alpha)
                if not value:
                    break
            total += value
        return total

    def insert(self, slot: int, inner: "PolyDiffOperator") -> "PolyDiffOperator":
        """Plain insertion self(f_1, .., inner(f_slot, ..), ..) without sign"""
        if inner.dimension != self.dimension:
            raise StateError(f"Dimension mismatch: {self.dimension} vs {inner.dimension}")
        if not 1 <= slot <= self.arity:
            raise StateError(f"Slot {slot} out of range for arity {self.arity}")
        r = inner.arity
        result = PolyDiffOperator(self.dimension, self.arity + r - 1)
        for outer_derivs, outer_coefficient in self.items():
            alpha = outer_derivs[slot - 1]
            for inner_derivs, inner_coefficient in inner.items():
                for weight, pieces in leibniz_splits(alpha, r + 1):
                    coefficient = partial(inner_coefficient, pieces[0])
                    if not coefficient:
                        continue
                    middle = tuple(add_indices(b, piece) for b, piece in zip(inner_derivs, pieces[1:]))
                    derivatives = outer_derivs[:slot - 1] + middle + outer_derivs[slot:]
                    result.add_term(derivatives, outer_coefficient * coefficient * weight)
        return result

    def compose_unsigned(self, inner: "PolyDiffOperator") -> "PolyDiffOperator":
        """Sum of the plain insertions of inner into every slot"""
        result = PolyDiffOperator(self.dimension, self.arity + inner.arity - 1)
        for slot in range(1, self.arity + 1):
            result = result + self.insert(slot, inner)
        return result

    def to_json(self) -> List[Dict[str, object]]:
        return [
            {"derivatives": [list(a) for a in derivatives], "coeff": polynomial_to_json(coefficient)}
            for derivatives, coefficient in sorted(self.items())
        ]

    def __repr__(self) -> str:
        return f"PolyDiffOperator(d={self.dimension}, arity={self.arity}, {self.to_json()})"
