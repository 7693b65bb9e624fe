from fastapi import APIRouter, HTTPException, Query
from typing import Optional
import logging

from app.core.exceptions import GraphAlgebraError
from app.models.graph import ClassPredicate
from app.services.check_service import check_service

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/checks", tags=["Checks"])


@router.get("/{suite}")
async def run_check(
    suite: str,
    max_n: int = Query(2, ge=0, description="Largest number of internal vertices"),
    max_m: int = Query(3, ge=0, description="Largest number of boundary vertices"),
    max_l: int = Query(0, ge=-1, description="Largest excess"),
    max_len: int = Query(2, ge=1, description="Longest cobar word (cobar-d2 only)"),
    seed: Optional[int] = Query(None, description="Seed of the random weights (cobar-d2 only)"),
    graph_class: str = Query("default"),
):
    """
    Run the hopf, d2 or cobar-d2 suite
    """
    try:
        predicate = ClassPredicate.named(graph_class)
        report = check_service.run_suite(suite, max_n, max_m, max_l, predicate, seed, max_len)
        return {"success": True, "data": report}
    except GraphAlgebraError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.error(f"Error running suite {suite}: {e}")
        raise HTTPException(status_code=500, detail=f"Error running suite {suite}: {str(e)}")
