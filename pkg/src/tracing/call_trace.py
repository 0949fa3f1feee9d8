"""
Dynamic-call trace types
Per-call instruction counts split by operand-source category and approximability
"""

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from ..precision.fpbits import PrecisionFormat
from ..simulation.cache_simulator import CATEGORY_ORDER

NON_APPROX = 0
APPROX = 1


@dataclass(frozen=True)
class DynamicCall:
    """One invocation of an approximable static function"""

    index: int
    static_fn: str
    label: str


@dataclass
class CallTrace:
    """
    Instruction counts of one workload execution

    Attributes:
        fmt: Precision format of the workload's floating-point data
        calls: Dynamic calls in execution order
        counts: int64 array [num_calls, category, approximable]
        residual: int64 array [category, approximable] for instructions outside any call
    """

    fmt: PrecisionFormat
    calls: List[DynamicCall]
    counts: np.ndarray
    residual: np.ndarray = field(default_factory=lambda: np.zeros((len(CATEGORY_ORDER), 2), dtype=np.int64))

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64).reshape(len(self.calls), len(CATEGORY_ORDER), 2)
        self.residual = np.asarray(self.residual, dtype=np.int64).reshape(len(CATEGORY_ORDER), 2)
        if (self.counts < 0).any() or (self.residual < 0).any():
            raise ValueError("Instruction counts must be non-negative")

    @property
    def num_calls(self) -> int:
        return len(self.calls)

    @property
    def total(self) -> int:
        return int(self.counts.sum() + self.residual.sum())

    @property
    def static_functions(self) -> List[str]:
        return [call.static_fn for call in self.calls]

    def same_counts(self, other: "CallTrace") -> bool:
        """True iff both traces have the same call sequence and identical counts"""
        return (
            self.calls == other.calls
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.residual, other.residual)
        )

    def category_totals(self) -> Dict[str, int]:
        per_category = self.counts.sum(axis=(0, 2)) + self.residual.sum(axis=1)
        return {category.value: int(n) for category, n in zip(CATEGORY_ORDER, per_category)}
