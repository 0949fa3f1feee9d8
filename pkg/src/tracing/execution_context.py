"""
Workload execution harness
Applies a transformer at every approximable floating-point site, tracks
dynamic-call boundaries and accumulates per-call instruction counts

Instruction accounting is at the model level: one instruction per tracked
arithmetic result element, per load, per store, plus declared overhead.
Inside a dynamic call every tracked instruction is approximable; outside
it is counted as non-approximable in the residual bucket.
"""

from bisect import bisect_right
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Union

import numpy as np

from ..precision.fpbits import ArrayOrScalar, PrecisionFormat
from ..simulation.cache_simulator import CATEGORY_ORDER, CacheConfig, CacheSimulator, OperandCategory
from ..utils.config import MEMORY_BASE_ADDRESS
from ..utils.exceptions import TraceUsageError
from ..utils.logger import get_logger
from .call_trace import APPROX, NON_APPROX, CallTrace, DynamicCall
from .transformers import IdentityTransformer, Transformer

logger = get_logger(__name__)

CATEGORY_POSITION = {category: pos for pos, category in enumerate(CATEGORY_ORDER)}
RF_POSITION = CATEGORY_POSITION[OperandCategory.RF]

Index = Union[int, np.ndarray, Iterable[int]]


@dataclass
class TrackedBuffer:
    """A named floating-point array placed in the simulated address space"""

    name: str
    base: int
    data: np.ndarray

    @property
    def itemsize(self) -> int:
        return self.data.itemsize

    @property
    def end(self) -> int:
        return self.base + self.data.nbytes

    def address(self, index: Index) -> Union[int, np.ndarray]:
        if np.isscalar(index):
            return self.base + int(index) * self.itemsize
        return self.base + np.asarray(index, dtype=np.int64) * self.itemsize

    def snapshot(self) -> np.ndarray:
        return self.data.copy()


class ExecutionContext:
    """
    One workload execution: memory image, cache state, call boundaries and counts
    """

    def __init__(
        self,
        fmt: PrecisionFormat,
        transformer: Optional[Transformer] = None,
        cache_config: Optional[CacheConfig] = None
    ):
        """
        Initialize ExecutionContext

        Args:
            fmt: Precision format the workload computes in
            transformer: Value transformer (Identity when None)
            cache_config: Data cache geometry
        """
        self.fmt = fmt
        self.dtype = fmt.dtype
        self.transformer = transformer or IdentityTransformer()
        self.cache = CacheSimulator(cache_config)

        self._calls: List[DynamicCall] = []
        self._counts: List[List[List[int]]] = []
        self._residual = [[0, 0] for _ in CATEGORY_ORDER]
        self._current: Optional[int] = None

        self._buffers: List[TrackedBuffer] = []
        self._bases: List[int] = []
        self._next_address = MEMORY_BASE_ADDRESS

    # ------------------------------------------------------------------
    # Memory image
    # ------------------------------------------------------------------

    def allocate(self, name: str, values) -> TrackedBuffer:
        """
        Place an array in the simulated address space (line-aligned)

        Args:
            name: Buffer name (for diagnostics)
            values: Initial contents, converted to the workload's dtype

        Returns:
            The tracked buffer
        """
        data = np.array(values, dtype=self.dtype, copy=True).reshape(-1)
        line = self.cache.config.line_size
        base = -(-self._next_address // line) * line
        buffer = TrackedBuffer(name=name, base=base, data=data)
        self._buffers.append(buffer)
        self._bases.append(base)
        self._next_address = buffer.end + line
        return buffer

    def _resolve(self, addr: int):
        pos = bisect_right(self._bases, addr) - 1
        if pos >= 0:
            buffer = self._buffers[pos]
            if addr < buffer.end and (addr - buffer.base) % buffer.itemsize == 0:
                return buffer, (addr - buffer.base) // buffer.itemsize
        raise TraceUsageError(f"Address {addr:#x} does not belong to any tracked buffer")

    # ------------------------------------------------------------------
    # Dynamic calls
    # ------------------------------------------------------------------

    def begin_call(self, static_fn: str, label: Optional[str] = None) -> int:
        """
        Open a new dynamic call of an approximable function

        Returns:
            Global 0-based call index

        Raises:
            TraceUsageError: If a call is already open
        """
        if self._current is not None:
            raise TraceUsageError(
                f"Cannot begin {static_fn}: call {self._current} "
                f"({self._calls[self._current].static_fn}) is still open"
            )
        index = len(self._calls)
        self.transformer.check_call(index)
        self._calls.append(DynamicCall(index=index, static_fn=static_fn, label=label or f"{static_fn}#{index}"))
        self._counts.append([[0, 0] for _ in CATEGORY_ORDER])
        self._current = index
        return index

    def end_call(self) -> None:
        if self._current is None:
            raise TraceUsageError("end_call() without a matching begin_call()")
        self._current = None

    @contextmanager
    def call(self, static_fn: str, label: Optional[str] = None) -> Iterator[int]:
        """Context manager wrapping begin_call()/end_call()"""
        index = self.begin_call(static_fn, label)
        try:
            yield index
        finally:
            self.end_call()

    # ------------------------------------------------------------------
    # Tracked instructions
    # ------------------------------------------------------------------

    def _bucket(self) -> List[List[int]]:
        return self._residual if self._current is None else self._counts[self._current]

    def _count(self, position: int, n: int) -> None:
        if self._current is None:
            self._residual[position][NON_APPROX] += n
        else:
            self._counts[self._current][position][APPROX] += n

    def _transform(self, values: ArrayOrScalar) -> ArrayOrScalar:
        if self._current is None:
            return values
        return self.transformer.apply(values, self._current, self.fmt)

    def _cast(self, values) -> ArrayOrScalar:
        arr = np.asarray(values, dtype=self.dtype)
        return arr[()] if arr.ndim == 0 else arr

    def track_fp_op(
        self,
        result,
        operand_sources: Optional[Iterable[OperandCategory]] = None
    ) -> ArrayOrScalar:
        """
        Account for a floating-point arithmetic result (one instruction per element)

        The result is rounded to the workload's format first, then transformed
        when inside a dynamic call.

        Args:
            result: Value or array computed by the kernel
            operand_sources: Categories of memory operands, RF for register-register ops;
                ignored outside a dynamic call

        Returns:
            The (possibly transformed) result
        """
        value = self._cast(result)
        position = RF_POSITION
        # Outside a call every op is a register op
        if operand_sources and self._current is not None:
            position = max(CATEGORY_POSITION[OperandCategory(c)] for c in operand_sources)
        self._count(position, int(np.size(value)))
        return self._transform(value)

    op = track_fp_op

    def track_fp_load(self, addr: int) -> ArrayOrScalar:
        """Load one value from the memory image through the cache model"""
        buffer, offset = self._resolve(int(addr))
        category = self.cache.access(addr, is_write=False)
        self._count(CATEGORY_POSITION[category], 1)
        return self._transform(buffer.data[offset])

    def track_fp_store(self, addr: int, value) -> ArrayOrScalar:
        """Store one value (transformed inside a call) into the memory image"""
        buffer, offset = self._resolve(int(addr))
        stored = self._transform(self._cast(value))
        category = self.cache.access(addr, is_write=True)
        self._count(CATEGORY_POSITION[category], 1)
        buffer.data[offset] = stored
        return stored

    def _access_many(self, addresses: np.ndarray, is_write: bool) -> None:
        for addr in addresses.tolist():
            category = self.cache.access(addr, is_write=is_write)
            self._count(CATEGORY_POSITION[category], 1)

    def load(self, buffer: TrackedBuffer, index: Index) -> ArrayOrScalar:
        """
        Load buffer[index] (scalar or gather) through the cache model

        Accesses are issued in index order.
        """
        if np.isscalar(index):
            return self.track_fp_load(buffer.address(index))
        idx = np.asarray(index, dtype=np.int64)
        self._access_many(buffer.address(idx), is_write=False)
        return self._transform(buffer.data[idx].copy())

    def store(self, buffer: TrackedBuffer, index: Index, values) -> ArrayOrScalar:
        """Store values into buffer[index] (scalar or scatter) through the cache model"""
        if np.isscalar(index):
            return self.track_fp_store(buffer.address(index), values)
        idx = np.asarray(index, dtype=np.int64)
        stored = self._transform(np.broadcast_to(self._cast(values), idx.shape).copy())
        self._access_many(buffer.address(idx), is_write=True)
        buffer.data[idx] = stored
        return stored

    def track_overhead(self, n: int) -> None:
        """Account for n non-floating-point ROI instructions (RF, non-approximable)"""
        if n < 0:
            raise ValueError("Overhead instruction count must be non-negative")
        self._bucket()[RF_POSITION][NON_APPROX] += int(n)

    # ------------------------------------------------------------------
    # Completion
    # ------------------------------------------------------------------

    def finish(self) -> CallTrace:
        """
        Close the execution and return its trace

        Raises:
            TraceUsageError: If a dynamic call is still open
            ScheduleMismatchError: If the transformer expected a different call count
        """
        if self._current is not None:
            raise TraceUsageError(
                f"Workload exited with call {self._current} "
                f"({self._calls[self._current].static_fn}) still open"
            )
        self.transformer.check_call_count(len(self._calls))
        counts = np.array(self._counts, dtype=np.int64).reshape(len(self._calls), len(CATEGORY_ORDER), 2)
        return CallTrace(
            fmt=self.fmt,
            calls=list(self._calls),
            counts=counts,
            residual=np.array(self._residual, dtype=np.int64)
        )
