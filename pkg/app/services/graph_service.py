"""Service for directed graphs, their orientation classes and quotients"""

from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple
import logging
import re

from pydantic import ValidationError
from sympy.combinatorics import Permutation

from app.core.config import settings
from app.core.exceptions import ContractError, ResourceError, StructuralError, SubsetError, UsageError
from app.models.graph import (
    BOUNDARY,
    INTERNAL,
    ClassPredicate,
    DirectedGraph,
    OrientedGraphTerm,
    Target,
)

logger = logging.getLogger(__name__)

VertexSubset = FrozenSet[Target]
EMPTY_GRAPH = DirectedGraph(n=0, m=0, out_edges=())

_KEY_PATTERN = re.compile(r"(\d+),(\d+);\[(.*)\]")
_TARGET_PATTERN = re.compile(r"([bv])(\d+)")


def permutation_sign(order: Sequence[int]) -> int:
    """Signature of the permutation listing 0..k-1 in the given order"""
    if len(order) < 2:
        return 1
    return Permutation(list(order)).signature()


def boundary_graph(m: int) -> DirectedGraph:
    """The edgeless graph B_m"""
    return DirectedGraph(n=0, m=m, out_edges=())


def _edge_offsets(graph: DirectedGraph) -> List[int]:
    offsets, running = [], 0
    for targets in graph.out_edges:
        offsets.append(running)
        running += len(targets)
    return offsets


def _relabel_target(target: Target, perm: Sequence[int]) -> Target:
    kind, index = target
    return (kind, perm[index - 1]) if kind == INTERNAL else target


@lru_cache(maxsize=None)
def _canonical_form(graph: DirectedGraph) -> Tuple[DirectedGraph, int]:
    # A repeated target at one vertex admits an odd within-vertex swap.
    for targets in graph.out_edges:
        if len(set(targets)) != len(targets):
            return graph, 0

    offsets = _edge_offsets(graph)
    best_key = None
    best: List[List[int]] = []
    for perm in permutations(range(1, graph.n + 1)):
        blocks: List[Tuple[Tuple[Target, ...], List[int]]] = [((), [])] * graph.n
        for old, targets in enumerate(graph.out_edges, start=1):
            mapped = sorted(
                (_relabel_target(target, perm), offsets[old - 1] + position)
                for position, target in enumerate(targets)
            )
            blocks[perm[old - 1] - 1] = (
                tuple(target for target, _ in mapped),
                [index for _, index in mapped],
            )
        key = tuple(targets for targets, _ in blocks)
        order = [index for _, indices in blocks for index in indices]
        if best_key is None or key < best_key:
            best_key, best = key, [order]
        elif key == best_key:
            best.append(order)

    signs = {permutation_sign(order) for order in best}
    canonical = DirectedGraph(n=graph.n, m=graph.m, out_edges=best_key or ())
    if len(signs) > 1:
        return canonical, 0
    return canonical, signs.pop()


class GraphService:
    """Canonical forms, admissibility, contraction, collapse and enumeration"""

    def validate(self, graph: DirectedGraph) -> None:
        """
        Check the structural invariants of a graph

        Raises:
            StructuralError: wrong number of vertex lists or dangling targets
            ResourceError: too many internal vertices for the canonical search
        """
        if len(graph.out_edges) != graph.n:
            raise StructuralError(
                f"Expected {graph.n} out-edge lists, got {len(graph.out_edges)}"
            )
        for vertex, targets in enumerate(graph.out_edges, start=1):
            for kind, index in targets:
                if kind == BOUNDARY:
                    limit = graph.m
                elif kind == INTERNAL:
                    limit = graph.n
                else:
                    raise StructuralError(f"Unknown target kind '{kind}' at v{vertex}")
                if not 1 <= index <= limit:
                    raise StructuralError(f"Dangling target {kind}{index} at v{vertex}")
        if graph.n > settings.max_canonical_vertices:
            raise ResourceError(
                f"{graph.n} internal vertices exceed the canonical search limit "
                f"{settings.max_canonical_vertices}",
                size=graph.n,
            )

    def make_graph(self, n: int, m: int, out_edges: Iterable[Iterable[Tuple[str, int]]]) -> OrientedGraphTerm:
        try:
            graph = DirectedGraph(n=n, m=m, out_edges=tuple(tuple(t) for t in out_edges))
        except ValidationError as e:
            raise StructuralError(f"Malformed graph: {e.errors()[0]['msg']}")
        return self.canonicalize(graph)

    def graph_from_key(self, key: str) -> OrientedGraphTerm:
        """Parse a key string `n,m;[t11 t12|t21]` and canonicalize it"""
        match = _KEY_PATTERN.fullmatch(key.strip())
        if match is None:
            raise UsageError(f"Malformed graph key {key!r}")
        n, m, body = int(match.group(1)), int(match.group(2)), match.group(3)
        pieces = body.split("|") if n else ([] if not body.strip() else [body])
        if len(pieces) != n:
            raise StructuralError(f"Graph key {key!r} lists {len(pieces)} vertices, expected {n}")
        out_edges = []
        for piece in pieces:
            targets = []
            for token in piece.split():
                target = _TARGET_PATTERN.fullmatch(token)
                if target is None:
                    raise UsageError(f"Malformed target {token!r} in graph key {key!r}")
                targets.append((target.group(1), int(target.group(2))))
            out_edges.append(tuple(targets))
        return self.make_graph(n, m, out_edges)

    def canonicalize(self, graph: DirectedGraph) -> OrientedGraphTerm:
        """
        Minimal representative over internal relabelings and edge reorderings

        Args:
            graph: Structurally valid graph with any labeling

        Returns:
            Canonical graph with the parity of the induced edge permutation,
            or sign 0 when an automorphism acts oddly on the edges
        """
        self.validate(graph)
        canonical, sign = _canonical_form(graph)
        return OrientedGraphTerm(graph=canonical, sign=sign)

    def is_in_class(self, graph: DirectedGraph, predicate: ClassPredicate) -> bool:
        for vertex, targets in enumerate(graph.out_edges, start=1):
            if predicate.forbid_loops and (INTERNAL, vertex) in targets:
                return False
            if predicate.forbid_parallel_edges and len(set(targets)) != len(targets):
                return False
            if predicate.require_internal_outdegree_at_least_one and not targets:
                return False
        return True

    def excess(self, graph: DirectedGraph) -> int:
        return graph.edge_count - (2 * graph.n + graph.m - 2)

    def disjoint_union(self, first: DirectedGraph, second: DirectedGraph) -> DirectedGraph:
        """Labeled product: labels of `second` shifted past those of `first`"""
        def shift(target: Target) -> Target:
            kind, index = target
            return (kind, index + (first.n if kind == INTERNAL else first.m))

        shifted = tuple(tuple(shift(t) for t in targets) for targets in second.out_edges)
        return DirectedGraph(n=first.n + second.n, m=first.m + second.m, out_edges=first.out_edges + shifted)

    def permute_boundary(self, term: OrientedGraphTerm, perm: Sequence[int]) -> OrientedGraphTerm:
        """Relabel boundary vertex j as perm[j-1] and recanonicalize"""
        if sorted(perm) != list(range(1, term.graph.m + 1)):
            raise StructuralError(f"Not a boundary permutation: {list(perm)}")
        relabeled = DirectedGraph(
            n=term.graph.n,
            m=term.graph.m,
            out_edges=tuple(
                tuple((k, perm[i - 1]) if k == BOUNDARY else (k, i) for k, i in targets)
                for targets in term.graph.out_edges
            ),
        )
        result = self.canonicalize(relabeled)
        return OrientedGraphTerm(graph=result.graph, sign=result.sign * term.sign)

    # Contraction

    def contract_labeled(self, graph: DirectedGraph, edge: int) -> Optional[Tuple[DirectedGraph, int]]:
        """
        Contract one internal edge of a labeled graph

        The edge moves to the front of the sequence, followed by the source's
        remaining edges, the target's edges and all other edges in order. The
        merged vertex takes label 1 and the other vertices keep their order.

        Returns:
            (labeled merged graph, sign of the reordering), or None for a loop

        Raises:
            ContractError: the edge index is out of range or ends on the boundary
        """
        edges = graph.edges()
        if not 0 <= edge < len(edges):
            raise ContractError(f"Edge index {edge} out of range for {graph.key()}")
        source, (kind, target) = edges[edge]
        if kind != INTERNAL:
            raise ContractError(f"Edge {edge} of {graph.key()} ends on the boundary")
        if target == source:
            return None

        offsets = _edge_offsets(graph)
        position = edge - offsets[source - 1]
        source_rest = [i for i in range(len(graph.out_edges[source - 1])) if i != position]
        order = [edge]
        order += [offsets[source - 1] + i for i in source_rest]
        order += [offsets[target - 1] + i for i in range(len(graph.out_edges[target - 1]))]
        others = [v for v in range(1, graph.n + 1) if v not in (source, target)]
        for v in others:
            order += [offsets[v - 1] + i for i in range(len(graph.out_edges[v - 1]))]

        labels: Dict[int, int] = {source: 1, target: 1}
        labels.update({v: new for new, v in enumerate(others, start=2)})

        def relabel(t: Target) -> Target:
            return (INTERNAL, labels[t[1]]) if t[0] == INTERNAL else t

        merged = tuple(relabel(graph.out_edges[source - 1][i]) for i in source_rest)
        merged += tuple(relabel(t) for t in graph.out_edges[target - 1])
        rest = tuple(tuple(relabel(t) for t in graph.out_edges[v - 1]) for v in others)
        contracted = DirectedGraph(n=graph.n - 1, m=graph.m, out_edges=(merged,) + rest)
        return contracted, permutation_sign(order)

    def contract_edge(
        self, term: OrientedGraphTerm, edge: int, predicate: ClassPredicate
    ) -> Optional[OrientedGraphTerm]:
        """Contract edge `edge`; None stands for the zero result"""
        contracted = self.contract_labeled(term.graph, edge)
        if contracted is None or term.sign == 0:
            return None
        labeled, sign = contracted
        if not self.is_in_class(labeled, predicate):
            return None
        result = self.canonicalize(labeled)
        if result.sign == 0:
            return None
        return OrientedGraphTerm(graph=result.graph, sign=term.sign * sign * result.sign)

    def internal_edges(self, graph: DirectedGraph) -> List[int]:
        return [i for i, (_, (kind, _)) in enumerate(graph.edges()) if kind == INTERNAL]

    # Normal subgraphs

    def check_subset(self, graph: DirectedGraph, subset: VertexSubset) -> None:
        """
        Raises:
            SubsetError: subset not a proper set of at least two vertices
                meeting the boundary in a consecutive run
        """
        vertices = set(graph.vertices())
        unknown = set(subset) - vertices
        if unknown:
            raise SubsetError(f"Unknown vertices {sorted(unknown)} for {graph.key()}")
        if len(subset) < 2 or len(subset) >= len(vertices):
            raise SubsetError(f"Subset must have at least two vertices and a non-empty complement")
        run = sorted(i for kind, i in subset if kind == BOUNDARY)
        if not run:
            raise SubsetError("Subset does not meet the boundary")
        if run != list(range(run[0], run[0] + len(run))):
            raise SubsetError(f"Boundary vertices {run} are not a consecutive run")

    def collapse_labeled(
        self, graph: DirectedGraph, subset: VertexSubset, predicate: ClassPredicate
    ) -> Optional[Tuple[DirectedGraph, DirectedGraph, int, int]]:
        """
        Split a labeled graph along a subset assumed to satisfy check_subset

        Returns:
            (labeled subgraph, labeled quotient, partition sign, position of the
            collapsed boundary vertex), or None when the subset is not normal
        """
        inner = sorted(i for kind, i in subset if kind == INTERNAL)
        run = sorted(i for kind, i in subset if kind == BOUNDARY)
        for v in inner:
            if any(target not in subset for target in graph.out_edges[v - 1]):
                return None

        start, width = run[0], len(run)
        inner_labels = {old: new for new, old in enumerate(inner, start=1)}
        outer = [v for v in range(1, graph.n + 1) if v not in inner_labels]
        outer_labels = {old: new for new, old in enumerate(outer, start=1)}

        def to_sub(t: Target) -> Target:
            kind, index = t
            return (INTERNAL, inner_labels[index]) if kind == INTERNAL else (BOUNDARY, index - start + 1)

        def to_quotient(t: Target) -> Target:
            kind, index = t
            if t in subset:
                return (BOUNDARY, start)
            if kind == INTERNAL:
                return (INTERNAL, outer_labels[index])
            return (BOUNDARY, index if index < start else index - width + 1)

        sub = DirectedGraph(
            n=len(inner),
            m=width,
            out_edges=tuple(tuple(to_sub(t) for t in graph.out_edges[v - 1]) for v in inner),
        )
        quotient = DirectedGraph(
            n=len(outer),
            m=graph.m - width + 1,
            out_edges=tuple(tuple(to_quotient(t) for t in graph.out_edges[v - 1]) for v in outer),
        )
        if not (self.is_in_class(sub, predicate) and self.is_in_class(quotient, predicate)):
            return None

        offsets = _edge_offsets(graph)
        order = [offsets[v - 1] + i for v in inner for i in range(len(graph.out_edges[v - 1]))]
        order += [offsets[v - 1] + i for v in outer for i in range(len(graph.out_edges[v - 1]))]
        return sub, quotient, permutation_sign(order), start

    def collapse_normal_subgraph(
        self, term: OrientedGraphTerm, subset: Iterable[Target], predicate: ClassPredicate
    ) -> Optional[Tuple[OrientedGraphTerm, OrientedGraphTerm]]:
        """
        Collapse a normal subgraph meeting the boundary

        Args:
            term: Oriented graph
            subset: Vertices of the subgraph
            predicate: Admissible class

        Returns:
            (subgraph, quotient) with the partition sign and the sign of `term`
            carried by the quotient, or None when the subset is not normal
        """
        subset = frozenset(subset)
        self.check_subset(term.graph, subset)
        split = self.collapse_labeled(term.graph, subset, predicate)
        if split is None:
            return None
        sub, quotient, sign, _ = split
        sub_term, quotient_term = self.canonicalize(sub), self.canonicalize(quotient)
        if sub_term.sign == 0 or quotient_term.sign == 0:
            return None
        return sub_term, OrientedGraphTerm(
            graph=quotient_term.graph, sign=quotient_term.sign * sign * term.sign
        )

    def candidate_subsets(self, graph: DirectedGraph) -> Iterable[VertexSubset]:
        """Subsets passing check_subset, by boundary run and then internal part"""
        total = graph.n + graph.m
        for start in range(1, graph.m + 1):
            for stop in range(start, graph.m + 1):
                run = [(BOUNDARY, j) for j in range(start, stop + 1)]
                for size in range(graph.n + 1):
                    for inner in combinations(range(1, graph.n + 1), size):
                        subset = frozenset(run + [(INTERNAL, v) for v in inner])
                        if 2 <= len(subset) < total:
                            yield subset

    def enumerate_normal_subsets(self, term: OrientedGraphTerm, predicate: ClassPredicate) -> List[VertexSubset]:
        return [
            subset
            for subset in self.candidate_subsets(term.graph)
            if self.collapse_normal_subgraph(term, subset, predicate) is not None
        ]

    # Enumeration

    def enumerate_by_edges(self, n: int, m: int, edges: int, predicate: ClassPredicate) -> List[DirectedGraph]:
        """All canonical admissible graphs with the given vertex and edge counts"""
        if n < 0 or m < 0 or edges < 0:
            return []
        if n == 0:
            return [boundary_graph(m)] if edges == 0 else []
        if n > settings.max_canonical_vertices:
            raise ResourceError(f"Cannot enumerate graphs with {n} internal vertices", size=n)

        available = []
        for v in range(1, n + 1):
            targets = [(BOUNDARY, j) for j in range(1, m + 1)]
            targets += [(INTERNAL, i) for i in range(1, n + 1) if i != v or not predicate.forbid_loops]
            available.append(targets)
        lowest = 1 if predicate.require_internal_outdegree_at_least_one else 0

        found = set()
        for degrees in _degree_sequences([len(a) for a in available], lowest, edges):
            choices = [combinations(a, d) for a, d in zip(available, degrees)]
            for out_edges in product(*choices):
                graph = DirectedGraph(n=n, m=m, out_edges=out_edges)
                if not self.is_in_class(graph, predicate):
                    continue
                canonical, sign = _canonical_form(graph)
                if sign != 0:
                    found.add(canonical)
        return sorted(found, key=lambda g: g.key())

    def enumerate_graphs(self, n: int, m: int, excess: int, predicate: ClassPredicate) -> List[DirectedGraph]:
        graphs = self.enumerate_by_edges(n, m, 2 * n + m - 2 + excess, predicate)
        logger.debug(f"Enumerated {len(graphs)} graphs with n={n}, m={m}, l={excess}")
        return graphs

    # Connected factors

    def connected_components(self, graph: DirectedGraph) -> List[List[Target]]:
        parent: Dict[Target, Target] = {v: v for v in graph.vertices()}

        def find(v: Target) -> Target:
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for source, target in graph.edges():
            parent[find((INTERNAL, source))] = find(target)

        groups: Dict[Target, List[Target]] = {}
        for v in graph.vertices():
            groups.setdefault(find(v), []).append(v)
        return list(groups.values())

    def product_factors(self, graph: DirectedGraph) -> Tuple[int, List[DirectedGraph]]:
        """
        Factor a graph into connected canonical graphs whose product it is

        Components without boundary vertices come first, then the others by
        their boundary run. A graph whose components interleave along the
        boundary is returned unfactored.

        Returns:
            (sign, factors) with graph = sign * product(factors)
        """
        components = self.connected_components(graph)
        if len(components) <= 1:
            return 1, [graph] if not graph.is_empty else []

        def order_key(component: List[Target]) -> Tuple[int, int]:
            runs = sorted(i for kind, i in component if kind == BOUNDARY)
            inner = sorted(i for kind, i in component if kind == INTERNAL)
            return (runs[0], 0) if runs else (0, inner[0])

        components.sort(key=order_key)
        for component in components:
            run = sorted(i for kind, i in component if kind == BOUNDARY)
            if run and run != list(range(run[0], run[0] + len(run))):
                return 1, [graph]

        offsets = _edge_offsets(graph)
        sign, order, factors = 1, [], []
        for component in components:
            inner = sorted(i for kind, i in component if kind == INTERNAL)
            run = sorted(i for kind, i in component if kind == BOUNDARY)
            labels = {old: new for new, old in enumerate(inner, start=1)}
            base = run[0] - 1 if run else 0
            piece = DirectedGraph(
                n=len(inner),
                m=len(run),
                out_edges=tuple(
                    tuple((k, labels[i]) if k == INTERNAL else (k, i - base) for k, i in graph.out_edges[v - 1])
                    for v in inner
                ),
            )
            order += [offsets[v - 1] + i for v in inner for i in range(len(graph.out_edges[v - 1]))]
            canonical, piece_sign = _canonical_form(piece)
            sign *= piece_sign
            factors.append(canonical)
        return sign * permutation_sign(order), factors


def _degree_sequences(limits: List[int], lowest: int, total: int) -> Iterable[Tuple[int, ...]]:
    if not limits:
        if total == 0:
            yield ()
        return
    head, tail = limits[0], limits[1:]
    for degree in range(lowest, min(head, total) + 1):
        for rest in _degree_sequences(tail, lowest, total - degree):
            yield (degree,) + rest


graph_service = GraphService()
