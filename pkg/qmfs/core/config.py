from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Logging
    log_level: str = "INFO"

    # Kernel evaluation
    r_min: float = 1e-10
    zero_tol_scale: float = 1e-12
    sc_tol_scale: float = 1e-8

    # Finite differences
    fd_step: float = 1e-4
    nested_fd_step: float = 1e-3

    # Collocation / linear algebra
    condition_limit: float = 1e12
    collision_tol: float = 1e-6
    tangential_tol: float = 1e-10
    max_workers: int = 1

    # Output
    default_output: str = "results.csv"
    # wall_ms breaks bit-identical reruns, so it stays out of the CSV unless disabled
    deterministic_csv: bool = True

    model_config = SettingsConfigDict(
        env_prefix="QMFS_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


# Create settings instance
settings = Settings()
