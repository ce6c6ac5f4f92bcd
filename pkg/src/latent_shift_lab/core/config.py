# latent-shift-lab/src/latent_shift_lab/core/config.py
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        case_sensitive=True,
        env_file=".env",
        env_prefix="LCS_",
        extra="ignore",
    )

    LOG_LEVEL: str = "INFO"
    OUTPUT_DIR: str = "out"

    # Significant digits used for every float written to CSV.
    FLOAT_FORMAT_DIGITS: int = 17
    CHECKPOINT_FORMAT_VERSION: int = 1

    @field_validator("LOG_LEVEL", mode="before")
    def normalize_log_level(cls, v: str) -> str:
        return str(v).upper()

    @property
    def float_format(self) -> str:
        return f"%.{self.FLOAT_FORMAT_DIGITS}g"


settings = Settings()
