"""
EPI energy model
Energy of a traced execution under an omission schedule

Every instruction costs the EPI of its operand-source category. Approximable
instructions of a call that omits k mantissa bits cost a scaled EPI that
shrinks linearly with the remaining operand width:

    total_width:  EPI_C * (total_bits - k) / total_bits
    significand:  EPI_C * (p - k) / p,   p = mantissa_bits + 1
"""

from typing import Dict, List, Literal, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..policies.schedule import OmissionSchedule
from ..precision.fpbits import PrecisionFormat
from ..simulation.cache_simulator import CATEGORY_ORDER, OperandCategory
from ..tracing.call_trace import APPROX, NON_APPROX, CallTrace
from ..utils.config import DEFAULT_ENERGY_SCALING, EPI_DEFAULTS_NJ
from ..utils.exceptions import ScheduleMismatchError
from ..utils.logger import get_logger

logger = get_logger(__name__)

ScalingModel = Literal['total_width', 'significand']


class EpiTable(BaseModel):
    """
    Energy per instruction (nJ) by operand source
    """

    rf: float = Field(EPI_DEFAULTS_NJ['rf'], gt=0, description="Register-file operands")
    l1: float = Field(EPI_DEFAULTS_NJ['l1'], gt=0, description="L1 hit")
    l2: float = Field(EPI_DEFAULTS_NJ['l2'], gt=0, description="L2 hit")
    mem_rd: float = Field(EPI_DEFAULTS_NJ['mem_rd'], gt=0, description="Load served by memory")
    mem_wr: float = Field(EPI_DEFAULTS_NJ['mem_wr'], gt=0, description="Store served by memory")

    model_config = ConfigDict(frozen=True)

    def value(self, category: Union[OperandCategory, str]) -> float:
        return float(getattr(self, OperandCategory(category).value))

    def as_array(self) -> np.ndarray:
        """EPI values in CATEGORY_ORDER"""
        return np.array([self.value(c) for c in CATEGORY_ORDER], dtype=np.float64)


def width_ratio(fmt: PrecisionFormat, k: int, scaling: ScalingModel = DEFAULT_ENERGY_SCALING) -> float:
    """
    Fraction of the full-precision EPI paid with k omitted bits

    Raises:
        ValueError: If k is outside [0, mantissa_bits] or the model is unknown
    """
    k = int(k)
    if not 0 <= k <= fmt.mantissa_bits:
        raise ValueError(f"Omitted bit count {k} outside [0, {fmt.mantissa_bits}]")
    if scaling == 'total_width':
        return (fmt.total_bits - k) / fmt.total_bits
    if scaling == 'significand':
        width = fmt.mantissa_bits + 1
        return (width - k) / width
    raise ValueError(f"Unknown energy scaling model: {scaling}")


def epi_scaled(
    category: Union[OperandCategory, str],
    fmt: PrecisionFormat,
    k: int,
    table: EpiTable = EpiTable(),
    scaling: ScalingModel = DEFAULT_ENERGY_SCALING
) -> float:
    """
    EPI (nJ) of an approximable instruction with k omitted mantissa bits

    Args:
        category: Operand source
        fmt: Precision format of the operands
        k: Omitted mantissa bits
        table: EPI table
        scaling: Width scaling model

    Returns:
        Scaled energy per instruction in nJ
    """
    return table.value(category) * width_ratio(fmt, k, scaling)


class EnergyReport(BaseModel):
    """
    Energy of one execution under a schedule, against full precision

    Energies are in nJ. per_category includes the residual work outside calls.
    """

    scaling: ScalingModel
    precision: str
    per_call: List[float]
    residual: float
    total: float
    baseline: float
    savings: float = Field(..., description="1 - total / baseline")
    per_category: Dict[str, float]
    baseline_per_category: Dict[str, float]
    approximable_share: float = Field(..., description="Baseline energy share of approximable instructions")
    max_width_reduction: float = Field(..., description="EPI reduction with every mantissa bit omitted")

    def savings_upper_bound(self) -> float:
        """Savings reachable if every approximable instruction dropped its whole mantissa"""
        return self.approximable_share * self.max_width_reduction


def _call_energies(counts: np.ndarray, epi: np.ndarray, ratios: np.ndarray) -> np.ndarray:
    """[num_calls, category] energy: full EPI for non-approx, scaled EPI for approx"""
    return counts[:, :, NON_APPROX] * epi + counts[:, :, APPROX] * (epi[None, :] * ratios[:, None])


def energy_of_trace(
    trace: CallTrace,
    schedule: Union[Sequence[int], OmissionSchedule],
    table: EpiTable = EpiTable(),
    scaling: ScalingModel = DEFAULT_ENERGY_SCALING
) -> EnergyReport:
    """
    Energy of a trace when call i omits schedule[i] mantissa bits

    Args:
        trace: Instruction counts of the execution
        schedule: Per-call omitted bits (an OmissionSchedule or a sequence)
        table: EPI table
        scaling: Width scaling model

    Raises:
        ScheduleMismatchError: If the schedule length differs from the call count
        ValueError: If an omitted count is outside the mantissa
    """
    omitted = list(getattr(schedule, 'omitted', schedule))
    if len(omitted) != trace.num_calls:
        raise ScheduleMismatchError(
            f"Schedule covers {len(omitted)} calls but the trace has {trace.num_calls}"
        )

    fmt = trace.fmt
    epi = table.as_array()
    counts = trace.counts.astype(np.float64)
    ratios = np.array([width_ratio(fmt, k, scaling) for k in omitted], dtype=np.float64)
    residual = (trace.residual.astype(np.float64) * epi[:, None]).sum(axis=1)

    scheduled = _call_energies(counts, epi, ratios)
    full = _call_energies(counts, epi, np.ones_like(ratios))

    per_call = scheduled.sum(axis=1)
    total = float(per_call.sum() + residual.sum())
    baseline = float(full.sum(axis=1).sum() + residual.sum())
    approximable = float((counts[:, :, APPROX] * epi).sum())

    return EnergyReport(
        scaling=scaling,
        precision=fmt.name,
        per_call=per_call.tolist(),
        residual=float(residual.sum()),
        total=total,
        baseline=baseline,
        savings=1.0 - total / baseline if baseline > 0 else 0.0,
        per_category={c.value: float(v) for c, v in zip(CATEGORY_ORDER, scheduled.sum(axis=0) + residual)},
        baseline_per_category={c.value: float(v) for c, v in zip(CATEGORY_ORDER, full.sum(axis=0) + residual)},
        approximable_share=approximable / baseline if baseline > 0 else 0.0,
        max_width_reduction=1.0 - width_ratio(fmt, fmt.mantissa_bits, scaling),
    )
