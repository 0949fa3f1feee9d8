"""
Pydantic schemas for run reports and sweep rows
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from ..energy.energy_model import EnergyReport
from ..monitoring.accuracy_loss import AccuracySummary
from ..policies.schedule import OmissionSchedule
from ..utils.exceptions import WorkbenchError


class AccuracyBlock(BaseModel):
    """
    Accuracy loss of a run against its golden output
    """
    mre: float = Field(..., ge=0, le=1, description="Mean relative error (capped per point)")
    max_error: float = Field(..., ge=0, le=1, description="Largest per-point error")
    num_points: int = Field(..., ge=1, description="Output data points")
    cap: float = Field(..., description="Per-point error cap")
    thresholds: List[float] = Field(default_factory=list, description="Histogram thresholds")
    fraction_below: List[float] = Field(default_factory=list, description="Points strictly below each threshold")
    histogram: List[float] = Field(default_factory=list, description="Bucket fractions, summing to 1")
    errors: List[float] = Field(default_factory=list, description="Per-point relative errors")

    @classmethod
    def from_summary(cls, summary: AccuracySummary, thresholds: List[float]) -> "AccuracyBlock":
        return cls(**summary.to_dict(thresholds), errors=summary.errors.tolist())

    def summary(self) -> AccuracySummary:
        return AccuracySummary(errors=np.asarray(self.errors, dtype=np.float64), cap=self.cap)


class CallRecord(BaseModel):
    """One point of the per-call omitted-bits series"""
    call: int
    static_fn: str
    label: str
    omitted: int
    energy_nj: float


class RunReport(BaseModel):
    """
    Outcome of replaying one schedule on one workload input

    Self-describing: carries the workload fingerprint, the schedule with
    its provenance and the configuration energy was computed with.
    """
    workload: Dict[str, Any] = Field(..., description="Workload/input/seed fingerprint of the run")
    schedule: OmissionSchedule
    accuracy: AccuracyBlock
    energy: EnergyReport
    calls: List[CallRecord] = Field(default_factory=list, description="Per-call omitted-bits series")
    config: Dict[str, Any] = Field(default_factory=dict, description="Settings used for the run")
    cache_hit_rates: Dict[str, float] = Field(default_factory=dict)

    @property
    def name(self) -> str:
        prov = self.schedule.provenance
        bound = prov.fraction if prov.target is None else prov.target
        return f"{self.workload.get('workload', 'run')}:{prov.policy.value}@{bound:g}"

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as fh:
            fh.write(self.model_dump_json(indent=2))
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RunReport":
        """
        Raises:
            FileNotFoundError: If the file doesn't exist
            WorkbenchError: If the file is not a valid run report
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Run report not found: {path}")
        try:
            with open(path, 'r', encoding='utf-8') as fh:
                payload = json.load(fh)
            if isinstance(payload.get('schedule'), dict):
                payload['schedule'].pop('static_function_map', None)
            return cls(**payload)
        except (json.JSONDecodeError, AttributeError, TypeError, ValidationError) as e:
            raise WorkbenchError(f"Invalid run report {path}: {e}") from e


class SweepRow(BaseModel):
    """One (policy, bound) row of a sweep table"""
    workload: str
    seed: int
    input: Optional[str] = None
    profile_input: Optional[str] = None
    policy: str
    target: Optional[float] = None
    fraction: Optional[float] = None
    mre: float
    max_error: float
    energy_savings: float
    savings_upper_bound: float
    mean_omitted_bits: float
    energy_nj: float
    baseline_energy_nj: float
