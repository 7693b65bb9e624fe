from fastapi import APIRouter, HTTPException
import logging

from app.core.exceptions import GraphAlgebraError
from app.models.graph import ClassPredicate
from app.models.poly import polynomial_to_json
from app.models.schemas import EvaluateRequest, ObstructionRequest
from app.services.feynman_service import feynman_service
from app.services.io_service import io_service

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/feynman", tags=["Feynman rules"])


@router.post("/evaluate")
async def evaluate_graph(request: EvaluateRequest):
    """
    Feynman rule of one graph on a vertex state

    Returns the polydifferential operator, and its value when arguments are given.
    """
    try:
        term = io_service.graph_from_input(request.graph)
        states = io_service.load_state(request.state)
        if request.skew:
            op = feynman_service.evaluate_wedge(term, states, request.state.dimension)
        else:
            op = feynman_service.evaluate_U(term, states, request.state.dimension)
        data = {"graph": term.graph.key(), "sign": term.sign, "operator": op.to_json()}
        if request.args is not None:
            data["value"] = polynomial_to_json(op.apply(io_service.load_arguments(request.args)))
        return {"success": True, "data": data}
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error evaluating graph: {e}")
        raise HTTPException(status_code=500, detail=f"Error evaluating graph: {str(e)}")


@router.post("/obstruction")
async def obstruction(request: ObstructionRequest):
    """
    Obstruction on (n, m) along the graph and the direct path, with its per-graph table
    """
    try:
        predicate = ClassPredicate.named(request.graph_class)
        weights = io_service.load_weights(request.weights) if request.weights is not None else None
        states = io_service.load_state(request.state) if request.state is not None else None
        args = io_service.load_arguments(request.args) if request.args is not None else None
        weights, states, args = feynman_service.obstruction_inputs(
            request.n, request.m, weights, states, args, request.seed, request.dimension, predicate
        )
        dimension = request.dimension or (args[0].ring.ngens if args else None)
        report = feynman_service.assemble_obstruction(
            request.n, request.m, weights, states, args, predicate, dimension
        )
        return {"success": True, "data": report}
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error assembling obstruction: {e}")
        raise HTTPException(status_code=500, detail=f"Error assembling obstruction: {str(e)}")
