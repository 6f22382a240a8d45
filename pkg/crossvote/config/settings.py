"""Process-level settings (environment / .env driven)."""
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings, overridable with CROSSVOTE_* environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="CROSSVOTE_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Output root for run directories
    OUT: Path = Path("runs")

    # Checkpoint directory (defaults to <OUT>/checkpoints)
    CHECKPOINTS: Optional[Path] = None

    # Default worker processes for sweeps
    PARALLEL: int = 1

    LOG_LEVEL: str = "INFO"

    def checkpoint_dir(self, out: Optional[Path] = None) -> Path:
        """Resolve the checkpoint directory against an output root."""
        if self.CHECKPOINTS is not None:
            return self.CHECKPOINTS
        return Path(out if out is not None else self.OUT) / "checkpoints"


settings = Settings()
