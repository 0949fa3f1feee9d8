"""
Omission schedules and policy configuration
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, ValidationError, computed_field, model_validator

from ..tracing.transformers import TruncateTransformer
from ..utils.exceptions import WorkbenchError
from ..utils.logger import get_logger

logger = get_logger(__name__)


class PolicyKind(str, Enum):
    DPS = "dps"
    DPS_PLUS = "dps+"
    SPS = "sps"
    SPS_PLUS = "sps+"

    @property
    def needs_matrices(self) -> bool:
        return self is not PolicyKind.SPS


class PolicyConfig(BaseModel):
    """
    Which planner to run and with which bound
    """

    kind: PolicyKind = Field(..., description="Planner")
    target: Optional[float] = Field(None, ge=0, description="Target accuracy loss (MRE) for dps/dps+/sps+")
    fraction: Optional[float] = Field(None, ge=0, le=1, description="Omitted mantissa fraction for sps")

    @model_validator(mode='after')
    def _check_bound(self) -> "PolicyConfig":
        if self.kind is PolicyKind.SPS and self.fraction is None:
            raise ValueError("sps requires a fraction")
        if self.kind is not PolicyKind.SPS and self.target is None:
            raise ValueError(f"{self.kind.value} requires a target accuracy loss")
        return self

    @property
    def label(self) -> str:
        if self.kind is PolicyKind.SPS:
            return f"{self.kind.value}@{self.fraction:g}"
        return f"{self.kind.value}@{self.target:g}"


class ScheduleProvenance(BaseModel):
    """Where a schedule came from"""

    policy: PolicyKind
    target: Optional[float] = None
    fraction: Optional[float] = None
    num_bits: int = Field(..., ge=0)
    matrix_fingerprint: Optional[str] = None
    workload: Dict[str, Any] = Field(default_factory=dict)


class OmissionSchedule(BaseModel):
    """
    Number of omitted mantissa bits for every dynamic call
    """

    omitted: List[int] = Field(..., description="Omitted bits per dynamic call, execution order")
    provenance: ScheduleProvenance
    static_fns: List[str] = Field(default_factory=list, description="Static function of every call")

    @model_validator(mode='after')
    def _check_range(self) -> "OmissionSchedule":
        num_bits = self.provenance.num_bits
        for i, k in enumerate(self.omitted):
            if not 0 <= k <= num_bits:
                raise ValueError(f"omitted[{i}] = {k} outside [0, {num_bits}]")
        if self.static_fns and len(self.static_fns) != len(self.omitted):
            raise ValueError(
                f"{len(self.static_fns)} static function labels for {len(self.omitted)} calls"
            )
        return self

    @computed_field
    @property
    def static_function_map(self) -> Dict[str, List[int]]:
        mapping: Dict[str, List[int]] = {}
        for i, fn in enumerate(self.static_fns):
            mapping.setdefault(fn, []).append(i)
        return mapping

    @property
    def num_calls(self) -> int:
        return len(self.omitted)

    @property
    def mean_omitted(self) -> float:
        return sum(self.omitted) / len(self.omitted) if self.omitted else 0.0

    def to_transformer(self) -> TruncateTransformer:
        return TruncateTransformer(self.omitted)

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as fh:
            fh.write(self.model_dump_json(indent=2))
        logger.info(f"Schedule saved to {path}")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "OmissionSchedule":
        """
        Raises:
            FileNotFoundError: If the file doesn't exist
            WorkbenchError: If it is not a valid schedule
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Schedule file not found: {path}")
        try:
            with open(path, 'r', encoding='utf-8') as fh:
                payload = json.load(fh)
            payload.pop('static_function_map', None)
            return cls(**payload)
        except (json.JSONDecodeError, AttributeError, TypeError, ValidationError) as e:
            raise WorkbenchError(f"Invalid schedule file {path}: {e}") from e
