from pydantic_settings import BaseSettings
from pydantic import field_validator


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    # App
    APP_NAME: str = "kQ8 Deformation Verifier"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # Series arithmetic
    SERIES_PRECISION: int = 16
    PSI_ORDER: int = 8

    # Irreducibility of pi(x): mod t^2 first, escalate when inconclusive
    IRREDUCIBILITY_PRECISION: int = 2
    IRREDUCIBILITY_ESCALATION: int = 8

    # Parameter search
    MAX_SEARCH_DEGREE: int = 8
    DEFAULT_SEARCH_LIMIT: int = 5

    # z is free in the construction; the presets fix it to t
    DEFAULT_Z: str = "t"

    # Largest t-degree accepted from the text grammar
    MAX_PARSE_DEGREE: int = 4096

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def parse_log_level(cls, v):
        """Normalize log level names (info -> INFO)"""
        if isinstance(v, str):
            return v.strip().upper()
        return v

    @field_validator(
        "SERIES_PRECISION",
        "PSI_ORDER",
        "IRREDUCIBILITY_PRECISION",
        "IRREDUCIBILITY_ESCALATION",
    )
    @classmethod
    def validate_precision(cls, v):
        """Precisions are positive"""
        if v < 1:
            raise ValueError("Precision must be a positive integer")
        return v

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"  # Ignore extra fields in .env


# Singleton instance
settings = Settings()
