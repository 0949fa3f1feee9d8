"""
Fault-injection profiler
Runs the golden execution once, then one faulty execution per
(dynamic call, mantissa bit, polarity) and records the accuracy loss of each
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from ..kernels.base import WorkloadOutput
from ..kernels.registry import PreparedWorkload
from ..monitoring.accuracy_loss import mean_relative_error
from ..precision.fpbits import FaultPolarity, MantissaFault
from ..simulation.cache_simulator import CacheConfig
from ..tracing.transformers import FaultTransformer
from ..utils.exceptions import ConsistencyError, WorkloadError
from ..utils.logger import get_logger
from .acc_loss import AccLossMatrices

logger = get_logger(__name__)

ExperimentKey = Tuple[int, int, str]

POLARITIES = (FaultPolarity.STUCK_AT_0, FaultPolarity.STUCK_AT_1)


@dataclass
class ProfilePartial:
    """
    Losses of a subset of experiments, keyed by (call, bit, polarity)

    NaN marks an Invalid experiment.
    """

    entries: Dict[ExperimentKey, float] = field(default_factory=dict)

    @property
    def runs(self) -> int:
        return len(self.entries)


def fault_loss(
    prepared: PreparedWorkload,
    golden: WorkloadOutput,
    call: int,
    bit: int,
    polarity: FaultPolarity,
    expected_calls: int,
    cache_config: Optional[CacheConfig] = None
) -> float:
    """
    Accuracy loss of one faulty execution (NaN when the output is not finite)

    Raises:
        ConsistencyError: If the faulty run made a different number of calls
    """
    transformer = FaultTransformer(MantissaFault(bit, polarity), target_call=call)
    output, trace = prepared.run(transformer, cache_config)
    if trace.num_calls != expected_calls:
        raise ConsistencyError(
            f"Faulty run {(call, bit, polarity.value)} made {trace.num_calls} calls, "
            f"golden made {expected_calls}"
        )
    if not output.is_finite():
        return float('nan')
    return mean_relative_error(output, golden).mre


def _profile_call(
    prepared: PreparedWorkload,
    golden: WorkloadOutput,
    call: int,
    num_bits: int,
    expected_calls: int,
    cache_config: Optional[CacheConfig]
) -> ProfilePartial:
    partial = ProfilePartial()
    for bit in range(num_bits):
        for polarity in POLARITIES:
            partial.entries[(call, bit, polarity.value)] = fault_loss(
                prepared, golden, call, bit, polarity, expected_calls, cache_config
            )
    logger.debug(f"Profiled call {call} ({num_bits} bits)")
    return partial


def merge_results(
    partials: Iterable[ProfilePartial],
    static_fns: Sequence[str],
    num_bits: int,
    precision: str = "single",
    fingerprint: Optional[Dict] = None
) -> AccLossMatrices:
    """
    Assemble partial campaign results into matrices

    The result depends only on the keys and values, never on the order
    in which partials arrive.

    Raises:
        ConsistencyError: On overlapping, out-of-range or missing keys
    """
    num_calls = len(static_fns)
    s0 = np.full((num_calls, num_bits), np.nan)
    s1 = np.full((num_calls, num_bits), np.nan)
    seen = np.zeros((num_calls, num_bits, 2), dtype=bool)

    for partial in partials:
        for (call, bit, polarity), loss in partial.entries.items():
            polarity = FaultPolarity(polarity)
            if not (0 <= call < num_calls and 0 <= bit < num_bits):
                raise ConsistencyError(f"Experiment {(call, bit, polarity.value)} outside the campaign")
            p = POLARITIES.index(polarity)
            if seen[call, bit, p]:
                raise ConsistencyError(f"Experiment {(call, bit, polarity.value)} reported twice")
            seen[call, bit, p] = True
            (s0 if p == 0 else s1)[call, bit] = loss

    if not seen.all():
        call, bit, p = (int(v) for v in np.argwhere(~seen)[0])
        raise ConsistencyError(
            f"Missing experiment {(call, bit, POLARITIES[p].value)} "
            f"({int((~seen).sum())} of {seen.size} absent)"
        )

    return AccLossMatrices(
        s0=s0,
        s1=s1,
        static_fns=list(static_fns),
        precision=precision,
        fingerprint=dict(fingerprint or {}),
        experiments=int(seen.size),
    )


class FaultInjectionProfiler:
    """
    Exhaustive single-bit stuck-at campaign over every dynamic call
    """

    def __init__(self, jobs: int = 1, cache_config: Optional[CacheConfig] = None):
        """
        Initialize FaultInjectionProfiler

        Args:
            jobs: Parallel workers for the faulty executions (1 = serial)
            cache_config: Data cache geometry used by every execution
        """
        if jobs < 1:
            raise ValueError("jobs must be >= 1")
        self.jobs = jobs
        self.cache_config = cache_config
        self.runs_executed = 0

    def golden_run(self, prepared: PreparedWorkload):
        """
        Full-precision reference execution

        Raises:
            WorkloadError: If the golden output is not finite
        """
        output, trace = prepared.run(None, self.cache_config)
        if not output.is_finite():
            raise WorkloadError(f"Golden run of {prepared.name} produced non-finite output")
        return output, trace

    def profile(self, prepared: PreparedWorkload, num_bits: Optional[int] = None) -> AccLossMatrices:
        """
        Build AccLossS0/AccLossS1 for a prepared workload

        Args:
            prepared: Workload bound to its inputs
            num_bits: Profile bits 0..num_bits-1 (default: the whole mantissa)

        Returns:
            Matrices holding num_calls x num_bits x 2 experiments
        """
        mantissa_bits = prepared.fmt.mantissa_bits
        num_bits = mantissa_bits if num_bits is None else int(num_bits)
        if not 0 <= num_bits <= mantissa_bits:
            raise ValueError(f"num_bits {num_bits} outside [0, {mantissa_bits}]")

        golden, trace = self.golden_run(prepared)
        num_calls = trace.num_calls
        total = num_calls * num_bits * len(POLARITIES)
        logger.info(
            f"Profiling {prepared.name}: {num_calls} calls x {num_bits} bits x 2 polarities "
            f"= {total} runs (jobs={self.jobs})"
        )

        partials: List[ProfilePartial] = Parallel(n_jobs=self.jobs)(
            delayed(_profile_call)(prepared, golden, call, num_bits, num_calls, self.cache_config)
            for call in range(num_calls)
        )
        runs = sum(p.runs for p in partials)
        self.runs_executed += runs

        matrices = merge_results(
            partials,
            static_fns=trace.static_functions,
            num_bits=num_bits,
            precision=prepared.fmt.name,
            fingerprint=prepared.fingerprint(),
        )
        invalid = int((~matrices.valid()).sum())
        logger.info(f"Campaign finished: {runs} runs, {invalid} entries with an Invalid polarity")
        return matrices
