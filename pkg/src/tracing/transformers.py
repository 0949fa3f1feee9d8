"""
Value transformers applied at approximable floating-point sites
"""

from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple

from ..precision.fpbits import ArrayOrScalar, MantissaFault, PrecisionFormat, inject_fault, truncate_mantissa
from ..utils.exceptions import ScheduleMismatchError


class Transformer(ABC):
    """
    Maps a value produced inside dynamic call `call_index` to its transformed value
    """

    @abstractmethod
    def apply(self, values: ArrayOrScalar, call_index: int, fmt: PrecisionFormat) -> ArrayOrScalar:
        ...

    def check_call(self, call_index: int) -> None:
        """Hook invoked when a dynamic call starts"""

    def check_call_count(self, num_calls: int) -> None:
        """Hook invoked when the workload finishes"""


class IdentityTransformer(Transformer):
    """Full precision: the golden run"""

    def apply(self, values, call_index, fmt):
        return values


class TruncateTransformer(Transformer):
    """
    Omit omitted[i] least-significant mantissa bits during dynamic call i
    """

    def __init__(self, omitted: Sequence[int]):
        self.omitted: Tuple[int, ...] = tuple(int(k) for k in omitted)
        if any(k < 0 for k in self.omitted):
            raise ValueError("Omitted bit counts must be non-negative")

    def apply(self, values, call_index, fmt):
        k = self.omitted[call_index]
        if k == 0:
            return values
        return truncate_mantissa(values, fmt, k)

    def check_call(self, call_index: int) -> None:
        if call_index >= len(self.omitted):
            raise ScheduleMismatchError(
                f"Schedule covers {len(self.omitted)} calls but the workload started call {call_index}"
            )

    def check_call_count(self, num_calls: int) -> None:
        if num_calls != len(self.omitted):
            raise ScheduleMismatchError(
                f"Schedule covers {len(self.omitted)} calls but the workload made {num_calls}"
            )


class FaultTransformer(Transformer):
    """
    Stuck-at fault active for the whole duration of one target call
    """

    def __init__(self, fault: MantissaFault, target_call: int):
        if target_call < 0:
            raise ValueError("Target call index must be non-negative")
        self.fault = fault
        self.target_call = int(target_call)

    def apply(self, values, call_index, fmt):
        if call_index != self.target_call:
            return values
        return inject_fault(values, fmt, self.fault)


def make_transformer(omitted: Optional[Sequence[int]] = None) -> Transformer:
    """Identity when no schedule is given, truncation otherwise"""
    if omitted is None:
        return IdentityTransformer()
    return TruncateTransformer(omitted)
