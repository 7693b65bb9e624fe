"""Service evaluating graphs on vertex states and assembling the L-infinity obstruction"""

from fractions import Fraction
from itertools import permutations, product
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from app.core.config import settings
from app.core.exceptions import ContractError, StateError, SubsetError
from app.models.graph import BOUNDARY, INTERNAL, ClassPredicate, DirectedGraph, OrientedGraphTerm, Target
from app.models.poly import (
    PolyDiffOperator,
    Polynomial,
    PolyVectorField,
    partial,
    polynomial_ring,
    polynomial_to_json,
    shuffles,
    to_qq,
    zero_index,
    add_indices,
    unit_index,
)
from app.models.vectors import GraphVector, WeightFunctional, format_rational
from app.services.algebra_service import algebra_service
from app.services.cobar_service import cobar_service
from app.services.graph_service import boundary_graph, graph_service
from app.services.polyalg_service import koszul_sign, polyalg_service

logger = logging.getLogger(__name__)


class FeynmanService:
    """Feynman rules U_Gamma and the identities they satisfy"""

    def _dimension(self, states: Sequence[PolyVectorField], dimension: Optional[int]) -> int:
        dimensions = {s.dimension for s in states}
        if dimension is not None:
            dimensions.add(dimension)
        if len(dimensions) > 1:
            raise StateError(f"States of mixed dimensions {sorted(dimensions)}")
        return dimensions.pop() if dimensions else settings.default_dimension

    def signature_matches(self, graph: DirectedGraph, states: Sequence[PolyVectorField]) -> bool:
        """Each state has the out-degree of its vertex as arity; a zero field fits anywhere"""
        if len(states) != graph.n:
            return False
        return all(s.is_zero or s.arity == len(targets) for s, targets in zip(states, graph.out_edges))

    def raw_evaluate(
        self, graph: DirectedGraph, states: Sequence[PolyVectorField], dimension: Optional[int] = None
    ) -> PolyDiffOperator:
        """
        State sum of a labeled graph, state i sitting on internal vertex i

        Every assignment of coordinate indices to edges contributes the product
        of the vertex coefficients on their out-edge indices, differentiated
        along incoming edges, times the boundary derivatives.
        """
        d = self._dimension(states, dimension)
        if len(states) != graph.n:
            raise StateError(f"{graph.key()} needs {graph.n} states, got {len(states)}")
        R = polynomial_ring(d)
        edges = graph.edges()
        outgoing: List[List[int]] = [[] for _ in range(graph.n)]
        incoming: Dict[Target, List[int]] = {}
        for index, (source, target) in enumerate(edges):
            outgoing[source - 1].append(index)
            incoming.setdefault(target, []).append(index)

        def derivative(target: Target, labels: Sequence[int]) -> tuple:
            alpha = zero_index(d)
            for index in incoming.get(target, ()):
                alpha = add_indices(alpha, unit_index(d, labels[index]))
            return alpha

        result = PolyDiffOperator(d, graph.m)
        for labels in product(range(1, d + 1), repeat=len(edges)):
            coefficient = R.one
            for v in range(1, graph.n + 1):
                factor = states[v - 1].coefficient_on([labels[i] for i in outgoing[v - 1]])
                if factor:
                    factor = partial(factor, derivative((INTERNAL, v), labels))
                if not factor:
                    break
                coefficient *= factor
            else:
                derivatives = tuple(derivative((BOUNDARY, j), labels) for j in range(1, graph.m + 1))
                result.add_term(derivatives, coefficient)
        return result

    def evaluate_U(
        self, term: OrientedGraphTerm, states: Sequence[PolyVectorField], dimension: Optional[int] = None
    ) -> PolyDiffOperator:
        """
        Feynman rule of an oriented graph on a state of matching signature

        Raises:
            StateError: signature or dimension mismatch
        """
        if not self.signature_matches(term.graph, states):
            signature = [s.arities() for s in states]
            degrees = [len(t) for t in term.graph.out_edges]
            raise StateError(f"State signature {signature} does not fit out-degrees {degrees} of {term.graph.key()}")
        return self.raw_evaluate(term.graph, states, dimension).scale(term.sign)

    def labelings(self, graph: DirectedGraph) -> List[DirectedGraph]:
        """Distinct relabelings of the internal vertices, out-lists sorted"""
        found = set()
        for perm in permutations(range(1, graph.n + 1)):
            out_edges: List[tuple] = [()] * graph.n
            for old, targets in enumerate(graph.out_edges, start=1):
                out_edges[perm[old - 1] - 1] = tuple(sorted(
                    (kind, perm[index - 1]) if kind == INTERNAL else (kind, index) for kind, index in targets
                ))
            found.add(DirectedGraph(n=graph.n, m=graph.m, out_edges=tuple(out_edges)))
        return sorted(found, key=lambda g: g.key())

    def evaluate_wedge(
        self, term: OrientedGraphTerm, states: Sequence[PolyVectorField], dimension: Optional[int] = None
    ) -> PolyDiffOperator:
        """Skew Feynman rule: the signed sum of raw evaluations over all labelings"""
        d = self._dimension(states, dimension)
        graph = term.graph
        if len(states) != graph.n:
            raise StateError(f"{graph.key()} needs {graph.n} states, got {len(states)}")
        result = PolyDiffOperator(d, graph.m)
        if not term.sign:
            return result
        for labeled in self.labelings(graph):
            if not self.signature_matches(labeled, states):
                continue
            sign = graph_service.canonicalize(labeled).sign
            if sign:
                result = result + self.raw_evaluate(labeled, states, d).scale(sign)
        # labelings carry signs relative to the canonical representative
        return result.scale(term.sign * graph_service.canonicalize(graph).sign)

    def basis_independence_check(
        self,
        term: OrientedGraphTerm,
        states: Sequence[PolyVectorField],
        args: Sequence[Polynomial],
        matrix: Sequence[Sequence[Fraction]],
    ) -> bool:
        """U_Gamma commutes with an invertible linear change of coordinates"""
        before = self.evaluate_U(term, states).apply(args)
        moved_states = [polyalg_service.change_basis_field(s, matrix) for s in states]
        moved_args = [polyalg_service.change_basis_polynomial(f, matrix) for f in args]
        after = self.evaluate_U(term, moved_states).apply(moved_args)
        return after == polyalg_service.change_basis_polynomial(before, matrix)

    # Lemma on contracted edges

    def lemma_bullet_check(
        self,
        term: OrientedGraphTerm,
        edge: int,
        states: Sequence[PolyVectorField],
        predicate: Optional[ClassPredicate] = None,
    ) -> Dict[str, object]:
        """
        Compare the contracted graph on the merged bullet state with its lift family

        Args:
            term: Oriented graph; states follow its labels
            edge: Index of an internal edge in the global edge sequence
            states: Vertex state of matching signature
            predicate: Admissible class of the contraction

        Returns:
            Report with `holds`, `family_size`, `single_graph_holds` and both sides

        Raises:
            ContractError: edge not internal or contraction not admissible
        """
        predicate = predicate or ClassPredicate()
        graph = term.graph
        d = self._dimension(states, None)
        if not self.signature_matches(graph, states):
            raise StateError(f"State signature does not fit {graph.key()}")
        contracted = graph_service.contract_labeled(graph, edge)
        if contracted is None or not graph_service.is_in_class(contracted[0], predicate):
            raise ContractError(f"Contracting edge {edge} of {graph.key()} is not admissible")
        merged, _ = contracted
        if (INTERNAL, 1) in merged.out_edges[0]:
            raise ContractError(f"Contracting edge {edge} of {graph.key()} creates a loop")

        source, (_, target) = graph.edges()[edge]
        position = graph.out_edges[source - 1].index((INTERNAL, target))
        others = [v for v in range(1, graph.n + 1) if v not in (source, target)]
        s_u, s_w = states[source - 1], states[target - 1]
        rest = [states[v - 1] for v in others]

        rhs = self.raw_evaluate(merged, [polyalg_service.bullet(s_u, s_w)] + rest, d)

        def shift(t: Target) -> Target:
            return (INTERNAL, t[1] + 1) if t[0] == INTERNAL else t

        merged_list = merged.out_edges[0]
        incoming = [
            (v, i) for v in range(2, merged.n + 1)
            for i, t in enumerate(merged.out_edges[v - 1]) if t == (INTERNAL, 1)
        ]
        lhs = PolyDiffOperator(d, graph.m)
        family = 0
        for chosen, complement, sign in shuffles(len(merged_list), len(graph.out_edges[source - 1]) - 1):
            u_list = ((INTERNAL, 2),) + tuple(shift(merged_list[p]) for p in chosen)
            w_list = tuple(shift(merged_list[p]) for p in complement)
            for redirect in product((1, 2), repeat=len(incoming)):
                choice = dict(zip(incoming, redirect))
                other_lists = tuple(
                    tuple(
                        (INTERNAL, choice[(v, i)]) if (v, i) in choice else shift(t)
                        for i, t in enumerate(merged.out_edges[v - 1])
                    )
                    for v in range(2, merged.n + 1)
                )
                lift = DirectedGraph(n=graph.n, m=graph.m, out_edges=(u_list, w_list) + other_lists)
                lhs = lhs + self.raw_evaluate(lift, [s_u, s_w] + rest, d).scale(sign)
                family += 1

        single = self.raw_evaluate(graph, states, d).scale((-1) ** position)
        logger.debug(f"Bullet lemma on {graph.key()} edge {edge}: family of {family}")
        return {
            "holds": lhs == rhs,
            "family_size": family,
            "single_graph_holds": single == rhs,
            "lhs": lhs.to_json(),
            "rhs": rhs.to_json(),
        }

    def corollary_bullet_check(
        self, term: OrientedGraphTerm, states: Sequence[PolyVectorField], predicate: Optional[ClassPredicate] = None
    ) -> Dict[str, object]:
        """
        Sum over one-edge extensions against the sum of bullet insertions

        Args:
            term: The contracted graph
            states: One more state than `term` has internal vertices
            predicate: Admissible class

        Returns:
            Report with `holds`, `extensions` and both sides
        """
        predicate = predicate or ClassPredicate()
        base = term.graph
        n = base.n + 1
        if len(states) != n:
            raise StateError(f"Extensions of {base.key()} need {n} states, got {len(states)}")
        d = self._dimension(states, None)

        lhs = PolyDiffOperator(d, base.m)
        extensions = 0
        for graph in graph_service.enumerate_by_edges(n, base.m, base.edge_count + 1, predicate):
            coefficient = algebra_service.differential(GraphVector.single(graph), predicate).get(base, Fraction(0))
            if not coefficient:
                continue
            extensions += 1
            value = self.evaluate_wedge(OrientedGraphTerm(graph=graph), states, d)
            lhs = lhs + value.scale(coefficient * term.sign)

        degrees = [s.arity or 0 for s in states]
        rhs = PolyDiffOperator(d, base.m)
        for i, j in permutations(range(n), 2):
            order = [i, j] + [v for v in range(n) if v not in (i, j)]
            merged = polyalg_service.bullet(states[i], states[j])
            rest = [states[v] for v in order[2:]]
            value = self.evaluate_wedge(term, [merged] + rest, d)
            rhs = rhs + value.scale(koszul_sign(order, degrees))
        logger.debug(f"Bullet corollary on {base.key()}: {extensions} extensions")
        return {"holds": lhs == rhs, "extensions": extensions, "lhs": lhs.to_json(), "rhs": rhs.to_json()}

    # Lemma on normal subgraphs

    def lemma_pp_check(
        self,
        term: OrientedGraphTerm,
        subset: Sequence[Target],
        states: Sequence[PolyVectorField],
        predicate: Optional[ClassPredicate] = None,
    ) -> Dict[str, object]:
        """
        Insert the subgraph's operator into the quotient's at the collapsed slot

        The insertion equals the sum over lifts that reattach every edge into
        the collapsed vertex to some vertex of the subgraph.

        Raises:
            SubsetError: subset violating the collapse preconditions or not normal
        """
        predicate = predicate or ClassPredicate()
        graph = term.graph
        subset = frozenset(subset)
        graph_service.check_subset(graph, subset)
        split = graph_service.collapse_labeled(graph, subset, predicate)
        if split is None:
            raise SubsetError(f"Subset {sorted(subset)} is not normal in {graph.key()}")
        sub, quotient, _, star = split
        d = self._dimension(states, None)
        if not self.signature_matches(graph, states):
            raise StateError(f"State signature does not fit {graph.key()}")

        inner = sorted(i for kind, i in subset if kind == INTERNAL)
        outer = [v for v in range(1, graph.n + 1) if v not in inner]
        inner_states = [states[v - 1] for v in inner]
        outer_states = [states[v - 1] for v in outer]
        lhs = self.raw_evaluate(quotient, outer_states, d).insert(
            star, self.raw_evaluate(sub, inner_states, d)
        )

        width = sub.m
        attach = [(INTERNAL, v) for v in range(1, sub.n + 1)] + [(BOUNDARY, star + j - 1) for j in range(1, width + 1)]

        def from_sub(t: Target) -> Target:
            return t if t[0] == INTERNAL else (BOUNDARY, star + t[1] - 1)

        def from_quotient(t: Target) -> Target:
            kind, index = t
            if kind == INTERNAL:
                return (INTERNAL, sub.n + index)
            return (BOUNDARY, index if index < star else index + width - 1)

        into_star = [
            (v, i) for v in range(1, quotient.n + 1)
            for i, t in enumerate(quotient.out_edges[v - 1]) if t == (BOUNDARY, star)
        ]
        sub_lists = tuple(tuple(from_sub(t) for t in targets) for targets in sub.out_edges)
        rhs = PolyDiffOperator(d, graph.m)
        family = 0
        for assignment in product(attach, repeat=len(into_star)):
            choice = dict(zip(into_star, assignment))
            quotient_lists = tuple(
                tuple(choice.get((v, i)) or from_quotient(t) for i, t in enumerate(quotient.out_edges[v - 1]))
                for v in range(1, quotient.n + 1)
            )
            lift = DirectedGraph(n=graph.n, m=graph.m, out_edges=sub_lists + quotient_lists)
            rhs = rhs + self.raw_evaluate(lift, inner_states + outer_states, d)
            family += 1

        single = self.raw_evaluate(graph, states, d)
        return {
            "holds": lhs == rhs,
            "family_size": family,
            "single_graph_holds": lhs == single,
            "lhs": lhs.to_json(),
            "rhs": rhs.to_json(),
        }

    # Obstruction

    def assemble_obstruction(
        self,
        n: int,
        m: int,
        weights: WeightFunctional,
        states: Sequence[PolyVectorField],
        args: Sequence[Polynomial],
        predicate: Optional[ClassPredicate] = None,
        dimension: Optional[int] = None,
    ) -> Dict[str, object]:
        """
        Assemble the obstruction on (n, m) along the graph and the direct path

        Args:
            n: Number of states
            m: Number of boundary arguments
            weights: Weight functional
            states: n homogeneous polyvector fields
            args: m polynomials
            predicate: Admissible class
            dimension: Coordinate dimension when no state fixes it

        Returns:
            Report with lhs, rhs, the bullet and composition parts of the lhs, `paths_agree`
            and the per-graph table {c_gamma, delta_w}

        Raises:
            StateError: wrong number of states or arguments
        """
        predicate = predicate or ClassPredicate()
        d = self._dimension(states, dimension)
        if len(states) != n:
            raise StateError(f"Obstruction on n={n} needs {n} states, got {len(states)}")
        if len(args) != m:
            raise StateError(f"Obstruction on m={m} needs {m} arguments, got {len(args)}")
        R = polynomial_ring(d)
        if any(f.ring != R for f in args):
            raise StateError(f"Arguments must be polynomials in {d} variables")

        graphs = graph_service.enumerate_graphs(n, m, -1, predicate)
        logger.info(f"Assembling obstruction on {len(graphs)} graphs with n={n}, m={m}, d={d}")

        bullet_part, composition_part, rhs = R.zero, R.zero, R.zero
        table = {}
        for graph in graphs:
            term = OrientedGraphTerm(graph=graph)
            single = GraphVector.single(graph)
            w_d = cobar_service.weight_on_vector(weights, algebra_service.differential(single, predicate))
            w_b = cobar_service.weight_on_tensor(weights, algebra_service.reduced_coproduct(single, predicate))
            delta = cobar_service.delta_on_weight(weights, term, predicate)
            table[graph.key()] = {"c_gamma": format_rational(w_d + w_b), "delta_w": format_rational(delta)}
            if not (w_d or w_b or delta):
                continue
            value = self.evaluate_wedge(term, states, d).apply(args)
            bullet_part += value * to_qq(w_d)
            composition_part += value * to_qq(w_b)
            rhs += value * to_qq(delta)

        direct_bullet = self._direct_bullet_part(n, m, weights, states, args, predicate, d)
        direct_composition = self._direct_composition_part(n, m, weights, states, args, predicate, d)
        lhs = bullet_part + composition_part
        paths_agree = bullet_part == direct_bullet and composition_part == direct_composition
        if not paths_agree:
            logger.warning(f"Graph and direct paths disagree for n={n}, m={m}")
        return {
            "n": n,
            "m": m,
            "dimension": d,
            "graphs": len(graphs),
            "lhs": polynomial_to_json(lhs),
            "rhs": polynomial_to_json(rhs),
            "bullet_part": polynomial_to_json(bullet_part),
            "composition_part": polynomial_to_json(composition_part),
            "direct": {
                "bullet_part": polynomial_to_json(direct_bullet),
                "composition_part": polynomial_to_json(direct_composition),
                "lhs": polynomial_to_json(direct_bullet + direct_composition),
            },
            "paths_agree": paths_agree,
            "lhs_equals_rhs": lhs == rhs,
            "table": dict(sorted(table.items())),
        }

    def _direct_bullet_part(self, n, m, weights, states, args, predicate, d) -> Polynomial:
        """Bullet part of the lhs as bullet insertions over the excess-0 graphs with one vertex fewer"""
        R = polynomial_ring(d)
        total = R.zero
        if n < 2:
            return total
        degrees = [s.arity or 0 for s in states]
        for base in graph_service.enumerate_graphs(n - 1, m, 0, predicate):
            weight = cobar_service.weight_value(weights, base)
            if not weight:
                continue
            term = OrientedGraphTerm(graph=base)
            for i, j in permutations(range(n), 2):
                order = [i, j] + [v for v in range(n) if v not in (i, j)]
                merged = polyalg_service.bullet(states[i], states[j])
                rest = [states[v] for v in order[2:]]
                value = self.evaluate_wedge(term, [merged] + rest, d).apply(args)
                total += value * to_qq(weight * koszul_sign(order, degrees))
        return total

    def _direct_composition_part(self, n, m, weights, states, args, predicate, d) -> Polynomial:
        """Composition part of the lhs as skew compositions over pairs (subgraph, quotient)"""
        R = polynomial_ring(d)
        total = R.zero
        edges = 2 * n + m - 3

        def compose(inner: PolyDiffOperator, outer: PolyDiffOperator) -> PolyDiffOperator:
            return outer.compose_unsigned(inner)

        for n_g in range(n + 1):
            n_h = n - n_g
            for m_g in range(1, m + 1):
                m_h = m + 1 - m_g
                if n_g + m_g < 2 or n_h + m_h < 2:
                    continue
                for e_g in range(edges + 1):
                    subs = graph_service.enumerate_by_edges(n_g, m_g, e_g, predicate)
                    quotients = graph_service.enumerate_by_edges(n_h, m_h, edges - e_g, predicate)
                    for g in subs:
                        w_g = cobar_service.weight_value(weights, g)
                        if not w_g:
                            continue
                        for h in quotients:
                            w_h = cobar_service.weight_value(weights, h)
                            if not w_h:
                                continue
                            op = polyalg_service.wedge_compose(
                                lambda fields, g=g: self.evaluate_wedge(OrientedGraphTerm(graph=g), fields, d),
                                lambda fields, h=h: self.evaluate_wedge(OrientedGraphTerm(graph=h), fields, d),
                                states,
                                n_g,
                                n_h,
                                compose=compose,
                            )
                            if op:
                                total += op.apply(args) * to_qq(w_g * w_h)
        return total

    # Random inputs

    def random_weights(
        self,
        rng: np.random.Generator,
        n_max: int,
        m_max: int,
        predicate: Optional[ClassPredicate] = None,
        bound: Optional[int] = None,
    ) -> WeightFunctional:
        """Seeded rationals on every connected excess-0 graph in range, W(B2) = 1"""
        predicate = predicate or ClassPredicate()
        bound = settings.random_coefficient_bound if bound is None else bound
        weights = WeightFunctional({boundary_graph(2): Fraction(1)})
        for n in range(1, n_max + 1):
            for m in range(m_max + 1):
                for graph in graph_service.enumerate_graphs(n, m, 0, predicate):
                    _, factors = graph_service.product_factors(graph)
                    if len(factors) != 1:
                        continue
                    numerator = int(rng.integers(-bound, bound + 1))
                    denominator = int(rng.integers(1, bound + 1))
                    if numerator:
                        weights[graph] = Fraction(numerator, denominator)
        logger.debug(f"Random weight functional on {len(weights)} generators")
        return weights

    def random_states(
        self, rng: np.random.Generator, arities: Sequence[int], dimension: Optional[int] = None
    ) -> List[PolyVectorField]:
        d = dimension or settings.default_dimension
        return [polyalg_service.random_field(rng, d, k) for k in arities]

    def random_arguments(self, rng: np.random.Generator, m: int, dimension: Optional[int] = None) -> List[Polynomial]:
        d = dimension or settings.default_dimension
        return [polyalg_service.random_polynomial(rng, d) for _ in range(m)]

    def obstruction_arities(self, n: int, m: int, dimension: int) -> List[int]:
        """Out-degrees summing to the edge count 2n + m - 3 of the excess -1 graphs"""
        arities = [2] * n
        surplus = 2 * n + m - 3 - sum(arities)
        i = 0
        while surplus and n and i < 4 * n * (dimension + 2):
            v = i % n
            if surplus > 0 and arities[v] < dimension:
                arities[v] += 1
                surplus -= 1
            elif surplus < 0 and arities[v] > 0:
                arities[v] -= 1
                surplus += 1
            i += 1
        return arities

    def obstruction_inputs(
        self,
        n: int,
        m: int,
        weights: Optional[WeightFunctional] = None,
        states: Optional[List[PolyVectorField]] = None,
        args: Optional[List[Polynomial]] = None,
        seed: Optional[int] = None,
        dimension: Optional[int] = None,
        predicate: Optional[ClassPredicate] = None,
    ) -> Tuple[WeightFunctional, List[PolyVectorField], List[Polynomial]]:
        """Fill in every missing obstruction input from one seeded generator"""
        seed = settings.default_seed if seed is None else seed
        rng = np.random.default_rng(seed)
        if dimension is None:
            if states:
                dimension = states[0].dimension
            elif args:
                dimension = args[0].ring.ngens
            else:
                dimension = settings.default_dimension
        if weights is None:
            weights = self.random_weights(rng, n, m, predicate)
        if states is None:
            states = self.random_states(rng, self.obstruction_arities(n, m, dimension), dimension)
        if args is None:
            args = self.random_arguments(rng, m, dimension)
        logger.debug(f"Obstruction inputs for n={n}, m={m} from seed {seed}")
        return weights, states, args


feynman_service = FeynmanService()
