"""
Configuration settings for the scene grammar parser.
"""
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables (prefix ``SCENEGRAMMAR_``)."""

    model_config = SettingsConfigDict(
        env_prefix="SCENEGRAMMAR_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Adjacency graph construction (meters)
    adjacency_threshold: float = Field(default=0.05, gt=0)
    occluded_adjacency_threshold: float = Field(default=0.5, gt=0)

    # Symbol naming conventions
    start_symbol: str = "S"
    terminal_symbol: str = "segment"
    plane_symbol: str = "Plane"
    complex_suffix: str = "Complex"

    # Features
    schema_id: str = "geom-v1"
    coplanarity_angle_deg: float = Field(default=15.0, gt=0, lt=90)

    # Probability model
    goal_penalty_k: float = Field(default=5.0, gt=0)
    covariance_epsilon: float = Field(default=1e-6, gt=0)
    prior_floor: float = Field(default=1e-6, gt=0)

    # Inference
    kld_max_expansions: int = Field(default=2_000_000, gt=0)
    kld_max_seconds: float = Field(default=30.0, gt=0)
    beam_width: Optional[int] = Field(default=200, gt=0)
    beam_samples_per_state: Optional[int] = Field(default=4, gt=0)
    beam_max_steps: int = Field(default=10_000, gt=0)
    exhaustive_max_terminals: int = Field(default=10, gt=0)

    # Corpora and evaluation
    seed: int = 0
    folds: int = Field(default=4, gt=1)

    # Logging
    log_level: str = "INFO"
    log_file: str = "./logs/scenegrammar.log"


# Global settings instance
settings = Settings()
