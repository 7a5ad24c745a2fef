# zsm/core/config.py
from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Logging (ZSM_LOG)
    LOG: str = "WARNING"

    # Shadow model
    EPSILON: float = 1e5
    LOS_THRESHOLD: float = 38.0
    DEFAULT_RANGE: float = 2e7

    # Constrained zonotope kernel
    MAX_GENERATORS: int = 20
    ACTIVE_SET_LIMIT: int = 2**21
    VERTEX_TOL: float = 1e-9
    FEASIBILITY_TOL: float = 1e-7
    SEGMENT_TOL: float = 1e-6

    # Planar polygons
    SNAP_GRID: float = 1e-9
    SLIVER_AREA: float = 1e-12
    SLIVER_WIDTH: float = 1e-5
    POINT_TOL: float = 1e-9

    # Map preprocessing
    WELD_TOL: float = 1e-6
    TRIANGLE_AREA_TOL: float = 1e-9
    FLATNESS_TOL: float = 1e-6

    # Parallelism
    THREADS: int = 1

    model_config = SettingsConfigDict(
        env_prefix="ZSM_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )


# Module-level defaults; runtime code reads get_settings()
settings = Settings()


@lru_cache()
def get_settings() -> Settings:
    return Settings()
