"""
Workload abstractions shared by the built-in kernels
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..precision.fpbits import is_result_valid
from ..tracing.execution_context import ExecutionContext


@dataclass(frozen=True)
class WorkloadSpec:
    """
    Static description of a workload

    Attributes:
        name: Registry name
        description: One-line summary
        static_functions: Approximable functions (dynamic calls come from these)
        precision: Default precision format name
        params: Default size parameters (overridable per run)
        accepts_input_file: Whether an external input file may replace the embedded generator
    """

    name: str
    description: str
    static_functions: Tuple[str, ...]
    precision: str = "single"
    params: Mapping[str, Any] = field(default_factory=dict)
    accepts_input_file: bool = False

    def __post_init__(self):
        if not self.static_functions:
            raise ValueError(f"Workload {self.name} declares no approximable function")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'description': self.description,
            'static_functions': list(self.static_functions),
            'precision': self.precision,
            'params': dict(self.params),
            'accepts_input_file': self.accepts_input_file,
        }


@dataclass(frozen=True)
class WorkloadOutput:
    """Ordered vector of output data points (held in float64)"""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'values', np.asarray(self.values, dtype=np.float64).reshape(-1))

    def __len__(self) -> int:
        return int(self.values.size)

    def is_finite(self) -> bool:
        return is_result_valid(self.values)


class Workload(ABC):
    """
    A deterministic, single-threaded kernel with designated approximable functions

    prepare() derives every input from (seed, input file, params); execute()
    must not mutate the prepared inputs, and its address stream must not
    depend on computed values.
    """

    spec: WorkloadSpec

    @abstractmethod
    def prepare(self, seed: int, input_path: Optional[Path], params: Mapping[str, Any]) -> Dict[str, Any]:
        ...

    @abstractmethod
    def execute(self, ctx: ExecutionContext, inputs: Mapping[str, Any], params: Mapping[str, Any]) -> np.ndarray:
        ...


def sequential_sum(ctx: ExecutionContext, values: Sequence) -> Any:
    """Left-to-right accumulation, one tracked add per element after the first"""
    values = np.asarray(values)
    total = values[0]
    for value in values[1:]:
        total = ctx.op(total + value)
    return total


def prefix_sums(ctx: ExecutionContext, values: Sequence) -> np.ndarray:
    """Running sums with one tracked add per element after the first"""
    values = np.asarray(values)
    out = np.empty_like(values)
    running = values[0]
    out[0] = running
    for j in range(1, values.size):
        running = ctx.op(running + values[j])
        out[j] = running
    return out
