"""
Configuration management for the quantum data-processing toolkit.
Uses Pydantic Settings for environment variable validation and type safety.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables (prefix QDPI_)."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="QDPI_",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = "Quantum Data Processing Toolkit"
    app_version: str = "1.0.0"
    debug: bool = False

    # Logging
    log_level: str = "WARNING"
    log_json: bool = True

    # Numerical tolerances
    support_cutoff: float = 1e-12
    hermitian_tol: float = 1e-10
    state_tol: float = 1e-10
    completeness_tol: float = 1e-9
    theorem_tol: float = 1e-9
    optimizer_tol: float = 1e-8
    cp_tol: float = 1e-8
    kraus_recovery_cutoff: float = 1e-10

    # c(S) optimizer budget
    grid_points: int = 4096
    random_starts: int = 4096
    refine_starts: int = 16
    coordinate_iterations: int = 200
    refinement_rounds: int = 4

    # Two-Pauli sweep
    agreement_tol: float = 1e-6

    # Fuzzing
    default_seed: int = 0

    # HTTP service
    api_host: str = "0.0.0.0"
    api_port: int = 8000


# Global settings instance
settings = Settings()
