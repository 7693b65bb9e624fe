from fastapi import FastAPI
import uvicorn
from app.core.config import settings
from app.core.logging_config import configure_logging
from api.routes.graphs import router as graphs_router
from api.routes.cobar import router as cobar_router
from api.routes.feynman import router as feynman_router
from api.routes.checks import router as checks_router


configure_logging()

app = FastAPI(title=settings.api_title,
    version=settings.api_version,
    description="Exact graph Hopf algebra, cobar cohomology and Feynman-rule obstructions",
    debug=settings.debug)

app.include_router(graphs_router)
app.include_router(cobar_router)
app.include_router(feynman_router)
app.include_router(checks_router)

@app.get("/")
async def read_root():
    return {"message": f"Hello, World! {settings.api_title}"}

if __name__ == "__main__":
    uvicorn.run("main:app", host="0.0.0.0", port=8000, reload=True)
