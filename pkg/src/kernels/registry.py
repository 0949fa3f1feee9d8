"""
Workload registry
Resolves workload names, merges size parameters and runs prepared workloads
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import joblib
import numpy as np

from ..precision.fpbits import PrecisionFormat
from ..simulation.cache_simulator import CacheConfig
from ..tracing.call_trace import CallTrace
from ..tracing.execution_context import ExecutionContext
from ..tracing.transformers import Transformer
from ..utils.config import RANDOM_STATE
from ..utils.exceptions import WorkloadInputError
from ..utils.logger import get_logger
from .base import Workload, WorkloadOutput, WorkloadSpec
from .blackscholes import BlackScholesWorkload
from .hotspot import HotspotWorkload
from .pagerank import PageRankWorkload
from .particlefilter import ParticleFilterWorkload
from .synthetic import SyntheticAdditiveWorkload

logger = get_logger(__name__)

_WORKLOADS: Dict[str, Workload] = {
    w.spec.name: w
    for w in (
        BlackScholesWorkload(),
        HotspotWorkload(),
        PageRankWorkload(),
        ParticleFilterWorkload(),
        SyntheticAdditiveWorkload(),
    )
}


def list_workloads() -> List[WorkloadSpec]:
    """Workload descriptors in a stable order"""
    return [w.spec for w in _WORKLOADS.values()]


def get_workload(name: str) -> Workload:
    try:
        return _WORKLOADS[name]
    except KeyError:
        known = ", ".join(_WORKLOADS)
        raise WorkloadInputError(f"Unknown workload '{name}' (known: {known})")


@dataclass
class PreparedWorkload:
    """
    A workload bound to fixed inputs; every run() sees identical data

    Attributes:
        workload: Kernel implementation
        fmt: Precision format of the run
        seed: Seed the inputs were derived from
        input_path: External input file (None for embedded inputs)
        params: Effective size parameters
        inputs: Prepared (read-only) inputs
    """

    workload: Workload
    fmt: PrecisionFormat
    seed: int
    input_path: Optional[Path]
    params: Dict[str, Any]
    inputs: Dict[str, Any]

    @property
    def name(self) -> str:
        return self.workload.spec.name

    def run(
        self,
        transformer: Optional[Transformer] = None,
        cache_config: Optional[CacheConfig] = None
    ) -> Tuple[WorkloadOutput, CallTrace]:
        """
        Execute once under a transformer

        Returns:
            (output vector, call trace)
        """
        ctx = ExecutionContext(self.fmt, transformer, cache_config)
        # Faulty runs may overflow; validity is judged on the output
        with np.errstate(all='ignore'):
            values = self.workload.execute(ctx, self.inputs, self.params)
        trace = ctx.finish()
        return WorkloadOutput(values), trace

    def fingerprint(self) -> Dict[str, Any]:
        """Identity of (workload, input, seed, precision, params) for provenance"""
        return {
            'workload': self.name,
            'input': str(self.input_path) if self.input_path is not None else None,
            'seed': self.seed,
            'precision': self.fmt.name,
            'params': dict(self.params),
            'inputs_hash': joblib.hash(self.inputs),
        }


def _merge_params(spec: WorkloadSpec, overrides: Optional[Mapping[str, Any]]) -> Dict[str, Any]:
    params = dict(spec.params)
    for key, value in (overrides or {}).items():
        if key not in params:
            raise ValueError(f"Unknown parameter '{key}' for workload {spec.name}")
        params[key] = value
    return params


def prepare_workload(
    name: str,
    seed: int = RANDOM_STATE,
    input_path: Optional[Union[str, Path]] = None,
    params: Optional[Mapping[str, Any]] = None,
    precision: Optional[str] = None
) -> PreparedWorkload:
    """
    Resolve a workload and derive its inputs

    Args:
        name: Registry name
        seed: Seed for every embedded generator
        input_path: External input file (only for workloads accepting one)
        params: Size parameter overrides
        precision: 'single' or 'double' (default: the workload's own)

    Raises:
        WorkloadInputError: Unknown workload or unusable input file
        FileNotFoundError: If input_path does not exist
    """
    workload = get_workload(name)
    spec = workload.spec
    merged = _merge_params(spec, params)
    path = Path(input_path) if input_path is not None else None
    if path is not None and not spec.accepts_input_file:
        raise WorkloadInputError(f"Workload {name} does not accept an input file")

    fmt = PrecisionFormat.from_name(precision or spec.precision)
    inputs = workload.prepare(int(seed), path, merged)
    logger.debug(f"Prepared {name} (seed={seed}, precision={fmt.name}, params={merged})")
    return PreparedWorkload(
        workload=workload, fmt=fmt, seed=int(seed), input_path=path, params=merged, inputs=inputs
    )


def run_workload(
    name: str,
    transformer: Optional[Transformer] = None,
    seed: int = RANDOM_STATE,
    input_path: Optional[Union[str, Path]] = None,
    params: Optional[Mapping[str, Any]] = None,
    precision: Optional[str] = None,
    cache_config: Optional[CacheConfig] = None
) -> Tuple[WorkloadOutput, CallTrace]:
    """One-shot prepare + run; the golden run uses transformer=None"""
    prepared = prepare_workload(name, seed, input_path, params, precision)
    return prepared.run(transformer, cache_config)
