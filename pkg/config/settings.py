from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field
import logging


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="FDPOWER_", env_file=".env", case_sensitive=False)

    # App
    app_name: str = "fdpower"
    version: str = "1.0.0"
    log_level: str = "WARNING"
    log_json: bool = True

    # Quadrature
    quad_rel_tol: float = Field(default=1e-8, gt=0)
    quad_abs_tol: float = Field(default=1e-12, gt=0)
    quad_limit: int = Field(default=200, ge=10)
    triple_rel_tol: float = Field(default=1e-4, gt=0)
    exact_table_points: int = Field(default=24, ge=4)

    # Monte-Carlo
    mc_target_ci_halfwidth: float = Field(default=0.005, gt=0, lt=0.5)
    mc_chunk_size: int = Field(default=2000, ge=1)
    mc_workers: int = Field(default=1, ge=1)
    default_seed: int = Field(default=20240601, ge=0)

    def check_budget(self):
        # the triple integral gets 10x the budget of each nested 1-D integral
        if self.triple_rel_tol < 10 * self.quad_rel_tol:
            raise ValueError(
                f"triple_rel_tol ({self.triple_rel_tol:g}) must be at least 10x quad_rel_tol ({self.quad_rel_tol:g})"
            )
        logging.getLogger(__name__).debug("Quadrature tolerance budget is consistent.")


settings = Settings()
settings.check_budget()
