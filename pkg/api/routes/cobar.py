from fastapi import APIRouter, HTTPException, Query
from typing import Optional
import logging

from app.core.exceptions import GraphAlgebraError
from app.models.graph import ClassPredicate
from app.models.schemas import CobarRequest, WeightRequest
from app.models.vectors import CobarVector, format_rational
from app.services.cobar_service import cobar_service
from app.services.io_service import io_service

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/cobar", tags=["Cobar"])


@router.post("/differential")
async def cobar_differential(request: CobarRequest):
    """
    Total cobar differential of a sum of words
    """
    try:
        predicate = ClassPredicate.named(request.graph_class)
        vector = CobarVector.total(io_service.word_from_keys(word) for word in request.words)
        return {"success": True, "data": cobar_service.cobar_differential(vector, predicate).to_json()}
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error computing cobar differential: {e}")
        raise HTTPException(status_code=500, detail=f"Error computing cobar differential: {str(e)}")


@router.post("/delta-weight")
async def delta_weight(request: WeightRequest):
    """
    (delta W)(graph) = W(d graph) + W(reduced coproduct of graph)
    """
    try:
        if request.graph is None:
            raise GraphAlgebraError("delta-weight needs a graph")
        predicate = ClassPredicate.named(request.graph_class)
        weights = io_service.load_weights(request.weights)
        term = io_service.graph_from_input(request.graph)
        value = cobar_service.delta_on_weight(weights, term, predicate)
        return {"success": True, "data": {"graph": term.graph.key(), "delta_w": format_rational(value)}}
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error evaluating delta W: {e}")
        raise HTTPException(status_code=500, detail=f"Error evaluating delta W: {str(e)}")


@router.post("/cocycle")
async def cocycle(request: WeightRequest):
    """
    Test delta W = 0 on every excess -1 graph in range
    """
    try:
        predicate = ClassPredicate.named(request.graph_class)
        weights = io_service.load_weights(request.weights)
        holds, witnesses = cobar_service.is_cocycle(weights, request.max_n, request.max_m, predicate)
        return {
            "success": True,
            "data": {
                "cocycle": holds,
                "witnesses": {graph.key(): format_rational(value) for graph, value in witnesses},
            },
        }
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error testing cocycle: {e}")
        raise HTTPException(status_code=500, detail=f"Error testing cocycle: {str(e)}")


@router.get("/cohomology")
async def cohomology(
    max_edges: int = Query(3, ge=0, description="Bound on total edges of a word"),
    max_len: int = Query(2, ge=1, description="Bound on word length"),
    max_boundary: Optional[int] = Query(None, ge=0, description="Bound on boundary vertices per letter"),
    graph_class: str = Query("default"),
):
    """
    Rank table of the truncated dual cobar complex
    """
    try:
        predicate = ClassPredicate.named(graph_class)
        table = cobar_service.truncated_cohomology_ranks(max_edges, max_len, predicate, max_boundary)
        return {"success": True, "data": table}
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error computing cohomology ranks: {e}")
        raise HTTPException(status_code=500, detail=f"Error computing cohomology ranks: {str(e)}")
