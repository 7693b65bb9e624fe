from pydantic import BaseModel, Field
from typing import Dict, List, Optional, Union

# Rationals travel as "p/q" strings; plain integers are accepted too
Rational = Union[str, int]


class AxiomResult(BaseModel):
    """Tally of one identity checked over many instances"""
    verified: int = Field(default=0, description="Instances where the identity holds")
    failed: int = Field(default=0, description="Instances where it fails")
    witnesses: List[str] = Field(default_factory=list, description="Keys of the failing instances")

    def record(self, holds: bool, witness: str) -> None:
        if holds:
            self.verified += 1
        else:
            self.failed += 1
            self.witnesses.append(witness)


class GraphInput(BaseModel):
    """A graph given by its vertex counts and target tokens such as b1 or v2"""
    name: Optional[str] = Field(None, description="Name used in reports")
    n: int = Field(..., ge=0, description="Number of internal vertices")
    m: int = Field(..., ge=0, description="Number of boundary vertices")
    out_edges: List[List[str]] = Field(default_factory=list, description="Targets of each internal vertex")

    class Config:
        json_schema_extra = {
            "example": {
                "name": "E3",
                "n": 2,
                "m": 2,
                "out_edges": [["v2", "b1"], ["b2"]]
            }
        }


class GraphRequest(BaseModel):
    """Graphs given as structured records, in the text format, or both"""
    graphs: List[GraphInput] = Field(default_factory=list)
    text: Optional[str] = Field(None, description="Graph blocks in the text format")
    graph_class: str = Field(default="default", description="default or no-parallel-off")

    class Config:
        json_schema_extra = {
            "example": {
                "text": "graph E3 { n=2; m=2; v1: v2 b1; v2: b2; }",
                "graph_class": "default"
            }
        }


class CobarRequest(BaseModel):
    """A cobar vector given as words of graph keys"""
    words: List[List[str]] = Field(..., min_length=1, description="Each word lists graph keys")
    graph_class: str = Field(default="default")

    class Config:
        json_schema_extra = {
            "example": {
                "words": [["1,2;[b1]"]],
                "graph_class": "default"
            }
        }


class WeightRequest(BaseModel):
    """A weight table keyed by graph keys, with the graph or range to test it on"""
    weights: Dict[str, Rational] = Field(..., description="Graph key -> rational p/q")
    graph: Optional[GraphInput] = Field(None, description="Graph for delta-weight")
    max_n: int = Field(default=2, ge=0)
    max_m: int = Field(default=3, ge=0)
    graph_class: str = Field(default="default")

    class Config:
        json_schema_extra = {
            "example": {
                "weights": {"1,1;[b1]": "1/1", "0,2;[]": "1/1"},
                "graph": {"n": 1, "m": 2, "out_edges": [["b1"]]},
                "max_n": 2,
                "max_m": 3
            }
        }


class FieldTerm(BaseModel):
    """One term c(x) psi_I of a polyvector field"""
    psi: List[int] = Field(default_factory=list, description="Odd coordinate indices, 1-based")
    coeff: Dict[str, Rational] = Field(..., description="Exponent tuple 'e1,e2' -> rational")


class StateDocument(BaseModel):
    """Polyvector fields placed on the internal vertices in label order"""
    dimension: int = Field(..., ge=1)
    fields: List[List[FieldTerm]] = Field(default_factory=list)

    class Config:
        json_schema_extra = {
            "example": {
                "dimension": 2,
                "fields": [[{"psi": [1, 2], "coeff": {"0,0": "1/1"}}]]
            }
        }


class ArgumentsDocument(BaseModel):
    """Polynomials fed to the boundary vertices"""
    dimension: int = Field(..., ge=1)
    polynomials: List[Dict[str, Rational]] = Field(default_factory=list)

    class Config:
        json_schema_extra = {
            "example": {
                "dimension": 2,
                "polynomials": [{"1,0": "1/1"}, {"0,1": "1/1"}]
            }
        }


class EvaluateRequest(BaseModel):
    """Evaluate one graph on a vertex state, optionally applied to arguments"""
    graph: GraphInput
    state: StateDocument
    args: Optional[ArgumentsDocument] = None
    skew: bool = Field(default=False, description="Sum over all labelings instead of the given one")


class ObstructionRequest(BaseModel):
    """Obstruction on (n, m); missing inputs are drawn from the seed"""
    n: int = Field(..., ge=0)
    m: int = Field(..., ge=0)
    weights: Optional[Dict[str, Rational]] = None
    state: Optional[StateDocument] = None
    args: Optional[ArgumentsDocument] = None
    seed: Optional[int] = None
    dimension: Optional[int] = Field(None, ge=1)
    graph_class: str = Field(default="default")

    class Config:
        json_schema_extra = {
            "example": {
                "n": 1,
                "m": 2,
                "seed": 20240917,
                "dimension": 2
            }
        }
