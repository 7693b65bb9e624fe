from pydantic_settings import BaseSettings


class Settings(BaseSettings):

    # API Settings
    api_title: str = "Graph Cohomology Workbench"
    api_version: str = "1.0.0"
    debug: bool = False
    log_level: str = "INFO"

    # Randomized suites
    default_seed: int = 20240917
    random_poly_degree: int = 2
    random_coefficient_bound: int = 3

    # Admissible graph class
    forbid_loops: bool = True
    forbid_parallel_edges: bool = True
    require_internal_outdegree: bool = True

    # Search and truncation limits
    max_canonical_vertices: int = 7
    cohomology_max_basis: int = 10000
    cohomology_max_boundary: int = 2

    # Polyvector states
    default_dimension: int = 2

    class Config:
        env_file = ".env"
        case_sensitive = False


settings = Settings()
