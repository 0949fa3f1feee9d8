"""
Runtime settings for the DPS workbench

Settings are layered: defaults from src.utils.config, then environment
variables (prefix DPS_, nested delimiter __, optional .env file), then an
explicit YAML file passed with --config. Example override:

    DPS_CACHE__L1_SIZE=65536 python scripts/dps_workbench.py list
"""

from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..energy.energy_model import EpiTable, ScalingModel
from ..simulation.cache_simulator import CacheConfig
from .config import DEFAULT_ENERGY_SCALING
from .exceptions import WorkbenchError
from .logger import get_logger

logger = get_logger(__name__)


class WorkbenchSettings(BaseSettings):
    """
    Configuration consumed by the pipeline and the CLI
    """

    cache: CacheConfig = Field(default_factory=CacheConfig, description="Data cache hierarchy")
    epi: EpiTable = Field(default_factory=EpiTable, description="Energy per instruction table (nJ)")
    energy_scaling: ScalingModel = Field(
        DEFAULT_ENERGY_SCALING, description="EPI scaling model for approximable instructions"
    )
    jobs: int = Field(1, ge=1, description="Parallel fault-injection experiments")
    log_level: str = Field("INFO", description="Logging level")

    model_config = SettingsConfigDict(
        env_prefix="DPS_",
        env_nested_delimiter="__",
        env_file=".env",
        case_sensitive=False,
        extra="ignore"
    )


def _flatten_params(raw: Dict[str, Any]) -> Dict[str, Any]:
    """Map the params.yaml sections onto WorkbenchSettings fields"""
    values: Dict[str, Any] = {}
    if 'cache' in raw:
        values['cache'] = raw['cache']
    if 'epi' in raw:
        values['epi'] = raw['epi']
    energy = raw.get('energy') or {}
    if 'scaling' in energy:
        values['energy_scaling'] = energy['scaling']
    profiling = raw.get('profiling') or {}
    if 'jobs' in profiling:
        values['jobs'] = profiling['jobs']
    logging_cfg = raw.get('logging') or {}
    if 'level' in logging_cfg:
        values['log_level'] = logging_cfg['level']
    return values


def load_settings(config_path: Optional[Path] = None) -> WorkbenchSettings:
    """
    Load settings, optionally overridden by a YAML configuration file

    Args:
        config_path: Path to a YAML file with cache/epi/energy/profiling/logging sections

    Returns:
        Validated settings

    Raises:
        FileNotFoundError: If the configuration file doesn't exist
        WorkbenchError: If the file is not valid YAML or fails validation
    """
    if config_path is None:
        return WorkbenchSettings()

    config_path = Path(config_path)
    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    logger.info(f"Loading configuration from: {config_path}")
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
    except yaml.YAMLError as e:
        raise WorkbenchError(f"Invalid YAML in {config_path}: {e}") from e

    if not isinstance(raw, dict):
        raise WorkbenchError(f"Configuration root must be a mapping: {config_path}")

    try:
        return WorkbenchSettings(**_flatten_params(raw))
    except ValidationError as e:
        raise WorkbenchError(f"Invalid configuration in {config_path}: {e}") from e
