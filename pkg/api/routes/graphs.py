from fastapi import APIRouter, HTTPException, Query
from typing import List
import logging

from app.core.exceptions import GraphAlgebraError
from app.models.graph import ClassPredicate
from app.models.schemas import GraphRequest
from app.services.algebra_service import algebra_service
from app.services.graph_service import graph_service
from app.services.io_service import NamedTerm, io_service

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/graphs", tags=["Graphs"])


def named_terms(request: GraphRequest) -> List[NamedTerm]:
    """Structured graphs first, then the blocks of the text"""
    terms = [
        (data.name or f"graph{i}", io_service.graph_from_input(data))
        for i, data in enumerate(request.graphs, start=1)
    ]
    if request.text:
        terms += io_service.parse_graph_file(request.text)
    if not terms:
        raise GraphAlgebraError("No graphs given")
    return terms


@router.post("/canonicalize")
async def canonicalize_graphs(request: GraphRequest):
    """
    Canonical key and orientation sign of each graph
    """
    try:
        terms = named_terms(request)
        predicate = ClassPredicate.named(request.graph_class)
        data = {
            name: {
                "key": term.graph.key(),
                "sign": term.sign,
                "excess": graph_service.excess(term.graph),
                "admissible": graph_service.is_in_class(term.graph, predicate),
            }
            for name, term in terms
        }
        return {"success": True, "data": data}
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error canonicalizing graphs: {e}")
        raise HTTPException(status_code=500, detail=f"Error canonicalizing graphs: {str(e)}")


@router.get("/enumerate")
async def enumerate_graphs(
    n: int = Query(..., ge=0, description="Internal vertices"),
    m: int = Query(..., ge=0, description="Boundary vertices"),
    l: int = Query(0, ge=-2, description="Excess |E| - (2n + m - 2)"),
    graph_class: str = Query("default", description="default or no-parallel-off"),
):
    """
    All canonical admissible graphs with the given n, m and excess
    """
    try:
        predicate = ClassPredicate.named(graph_class)
        graphs = graph_service.enumerate_graphs(n, m, l, predicate)
        return {
            "success": True,
            "data": {"count": len(graphs), "graphs": [g.key() for g in graphs]},
        }
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error enumerating graphs: {e}")
        raise HTTPException(status_code=500, detail=f"Error enumerating graphs: {str(e)}")


@router.post("/differential")
async def graph_differential(request: GraphRequest):
    """
    Sum of all admissible internal-edge contractions
    """
    try:
        predicate = ClassPredicate.named(request.graph_class)
        terms = named_terms(request)
        data = io_service.per_graph(
            terms, lambda t: algebra_service.differential(algebra_service.from_term(t), predicate).to_json()
        )
        return {"success": True, "data": data}
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error computing differential: {e}")
        raise HTTPException(status_code=500, detail=f"Error computing differential: {str(e)}")


@router.post("/coproduct")
async def graph_coproduct(request: GraphRequest):
    """
    Full coproduct, trivial terms included
    """
    try:
        predicate = ClassPredicate.named(request.graph_class)
        terms = named_terms(request)
        data = io_service.per_graph(
            terms, lambda t: algebra_service.coproduct(algebra_service.from_term(t), predicate).to_json()
        )
        return {"success": True, "data": data}
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error computing coproduct: {e}")
        raise HTTPException(status_code=500, detail=f"Error computing coproduct: {str(e)}")


@router.post("/antipode")
async def graph_antipode(request: GraphRequest):
    try:
        predicate = ClassPredicate.named(request.graph_class)
        terms = named_terms(request)
        data = io_service.per_graph(
            terms, lambda t: algebra_service.antipode(algebra_service.from_term(t), predicate).to_json()
        )
        return {"success": True, "data": data}
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error computing antipode: {e}")
        raise HTTPException(status_code=500, detail=f"Error computing antipode: {str(e)}")


@router.post("/product")
async def graph_product(request: GraphRequest):
    """
    Product of the graphs in the order given
    """
    try:
        terms = named_terms(request)
        result = algebra_service.unit()
        for _, term in terms:
            result = algebra_service.product(result, algebra_service.from_term(term))
        return {"success": True, "data": result.to_json()}
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error computing product: {e}")
        raise HTTPException(status_code=500, detail=f"Error computing product: {str(e)}")
