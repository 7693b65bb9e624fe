from pydantic import BaseModel, Field
from typing import List, Tuple

from app.core.config import settings
from app.core.exceptions import UsageError

# A target is ("b", j) for boundary vertex j or ("v", j) for internal vertex j.
# Boundary targets sort first.
Target = Tuple[str, int]
OutEdges = Tuple[Tuple[Target, ...], ...]

BOUNDARY = "b"
INTERNAL = "v"


def format_target(target: Target) -> str:
    return f"{target[0]}{target[1]}"


class DirectedGraph(BaseModel):
    """Directed graph with labeled internal and boundary vertices.

    Only internal vertices have outgoing edges; the global edge order is the
    concatenation of the per-vertex sequences in vertex-label order.
    """
    n: int = Field(..., ge=0, description="Number of internal vertices")
    m: int = Field(..., ge=0, description="Number of boundary vertices")
    out_edges: OutEdges = Field(default=(), description="Ordered targets for each internal vertex")

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {
                "n": 1,
                "m": 2,
                "out_edges": [[["b", 1], ["b", 2]]]
            }
        }

    @property
    def edge_count(self) -> int:
        return sum(len(targets) for targets in self.out_edges)

    @property
    def is_empty(self) -> bool:
        return self.n == 0 and self.m == 0

    def edges(self) -> List[Tuple[int, Target]]:
        """Global edge sequence as (source label, target) pairs"""
        return [
            (vertex, target)
            for vertex, targets in enumerate(self.out_edges, start=1)
            for target in targets
        ]

    def vertices(self) -> List[Target]:
        return [(INTERNAL, i) for i in range(1, self.n + 1)] + [(BOUNDARY, j) for j in range(1, self.m + 1)]

    def key(self) -> str:
        body = "|".join(" ".join(format_target(t) for t in targets) for targets in self.out_edges)
        return f"{self.n},{self.m};[{body}]"

    def __str__(self) -> str:
        return self.key()


class OrientedGraphTerm(BaseModel):
    """A canonical graph with the sign relating it to an orientation class"""
    graph: DirectedGraph
    sign: int = Field(default=1, ge=-1, le=1, description="+1, -1, or 0 for a degenerate class")

    class Config:
        frozen = True

    @property
    def is_zero(self) -> bool:
        return self.sign == 0


class ClassPredicate(BaseModel):
    """Admissibility switches of the graph class"""
    forbid_loops: bool = Field(default_factory=lambda: settings.forbid_loops)
    forbid_parallel_edges: bool = Field(default_factory=lambda: settings.forbid_parallel_edges)
    require_internal_outdegree_at_least_one: bool = Field(
        default_factory=lambda: settings.require_internal_outdegree
    )

    class Config:
        frozen = True

    @classmethod
    def named(cls, name: str) -> "ClassPredicate":
        """Predicate for the CLI names `default` and `no-parallel-off`"""
        if name == "default":
            return cls()
        if name == "no-parallel-off":
            return cls(forbid_parallel_edges=False)
        raise UsageError(f"Unknown graph class: {name}")
