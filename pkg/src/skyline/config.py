"""Configuration management for the reverse-skyline engines and benchmark driver."""

import json
import os
from typing import Optional
from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator


CONFIG_ENV_VAR = "RSKYLINE_CONFIG"
ENGINES = ("brs", "rsl", "basic-brs", "basic-rsl", "batch", "bb")
DISTRIBUTIONS = ("un", "co", "ac")


class IndexConfig(BaseModel):
    """R-tree configuration model."""

    page_bytes: int = Field(default=4096, ge=256, description="Simulated disk page size in bytes")
    fanout: Optional[int] = Field(
        default=None, ge=2, description="Fanout override, derived from page_bytes when None"
    )


class WorkloadConfig(BaseModel):
    """Workload configuration model (defaults follow the experimental parameter table)."""

    products: int = Field(default=100000, ge=0, description="Number of products |P|")
    customers: int = Field(default=100000, ge=0, description="Number of customers |C|")
    candidates: int = Field(default=1000, ge=0, description="Number of candidates |Q|")
    dimensions: int = Field(default=3, ge=2, le=8, description="Dimensionality D")
    distribution: str = Field(default="un", description="Synthetic distribution")
    seed: int = Field(default=1, description="Base seed for generated data")

    @field_validator('distribution')
    @classmethod
    def validate_distribution(cls, v):
        """Validate distribution name."""
        v = v.strip().lower()
        if v not in DISTRIBUTIONS:
            raise ValueError(f"Unknown distribution '{v}', expected one of {DISTRIBUTIONS}")
        return v


class KmacConfig(BaseModel):
    """k-MAC evaluation configuration model."""

    k: int = Field(default=1, ge=1, description="Number of candidates to select")
    batch_size: int = Field(default=10, ge=1, le=1000, description="Candidates per Hilbert batch")
    engine: str = Field(default="basic-rsl", description="Evaluator to run")
    exhaustive_guard: int = Field(default=1_000_000, ge=1, description="Max subsets for exhaustive_opt")

    @field_validator('engine')
    @classmethod
    def validate_engine(cls, v):
        """Validate engine name."""
        v = v.strip().lower()
        if v not in ENGINES:
            raise ValueError(f"Unknown engine '{v}', expected one of {ENGINES}")
        return v


class LoggingConfig(BaseModel):
    """Logging configuration model."""

    level: str = Field(default="INFO", pattern="^(DEBUG|INFO|WARNING|ERROR|CRITICAL)$")
    format: str = Field(default="json", pattern="^(json|text)$")
    log_file: Optional[str] = Field(default=None, description="Optional log file path")


class Config(BaseModel):
    """Main configuration model."""

    index: IndexConfig = Field(default_factory=IndexConfig)
    workload: WorkloadConfig = Field(default_factory=WorkloadConfig)
    kmac: KmacConfig = Field(default_factory=KmacConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


class ConfigManager:
    """Configuration manager for loading and saving config."""

    def __init__(self, config_path: Optional[str] = None):
        """Initialize config manager.

        Args:
            config_path: Path to config file. Defaults to $RSKYLINE_CONFIG or
                config/default_config.json
        """
        if config_path is None:
            load_dotenv()
            config_path = os.environ.get(CONFIG_ENV_VAR) or os.path.join(
                os.path.dirname(os.path.dirname(os.path.dirname(__file__))),
                "config", "default_config.json"
            )
        self.config_path = config_path

        self._config: Optional[Config] = None

    def load_config(self) -> Config:
        """Load configuration from file.

        Returns:
            Config: Loaded configuration

        Raises:
            ValueError: If config file is invalid
        """
        try:
            if os.path.exists(self.config_path):
                with open(self.config_path, 'r', encoding='utf-8') as f:
                    config_data = json.load(f)
                self._config = Config(**config_data)
            else:
                self._config = Config()
                self.save_config()

            return self._config

        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid JSON in config file: {e}")
        except Exception as e:
            raise ValueError(f"Error loading config: {e}")

    def save_config(self) -> None:
        """Save current configuration to file.

        Raises:
            ValueError: If no config is loaded
        """
        if self._config is None:
            raise ValueError("No config loaded to save")

        directory = os.path.dirname(self.config_path)
        if directory:
            os.makedirs(directory, exist_ok=True)

        try:
            with open(self.config_path, 'w', encoding='utf-8') as f:
                json.dump(self._config.model_dump(), f, indent=2, ensure_ascii=False)
        except Exception as e:
            raise ValueError(f"Error saving config: {e}")

    def get_config(self) -> Config:
        """Get current configuration.

        Returns:
            Config: Current configuration
        """
        if self._config is None:
            return self.load_config()
        return self._config


_config_manager: Optional[ConfigManager] = None


def get_config_manager() -> ConfigManager:
    """Get global config manager instance.

    Returns:
        ConfigManager: Global config manager
    """
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def get_config() -> Config:
    """Get current configuration.

    Returns:
        Config: Current configuration
    """
    return get_config_manager().get_config()
