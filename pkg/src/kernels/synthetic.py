"""
Synthetic additive workload (validation only)

Call i loads one term and stores twice it. The output is the exact sum of the
stored terms (accumulated in double precision outside the calls) replicated at
power-of-two scales, so corrupting call i changes the result independently of
every other call.

Bit occupancy is controlled: each mantissa position b belongs to exactly one
call (owner[b]) and every term shares one exponent. Flipping bit b therefore
moves the result by the same amount whichever call it happens in, and the
loss of truncating n bits everywhere equals the per-call cumulative sum of the
per-bit losses over b < n.
"""

import math
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import numpy as np

from ..tracing.execution_context import ExecutionContext
from ..utils.config import SYNTHETIC_CALLS
from ..utils.exceptions import WorkloadInputError
from .base import Workload, WorkloadSpec

STATIC_FN = "additive_term"
OUTPUT_SCALES = (1.0, 2.0, 4.0, 8.0)


def build_terms(calls: int, mantissa_bits: int, exponent: int, owner: np.ndarray) -> np.ndarray:
    """Terms (1 + sum of owned bits) * 2**exponent, exact in the workload format"""
    mantissas = np.zeros(calls, dtype=np.int64)
    for bit in range(mantissa_bits):
        mantissas[owner[bit]] |= 1 << bit
    return np.array(
        [math.ldexp(1.0 + m / 2.0 ** mantissa_bits, exponent) for m in mantissas.tolist()],
        dtype=np.float64,
    )


class SyntheticAdditiveWorkload(Workload):
    """
    Workload whose accuracy loss is exactly additive over calls and bits
    """

    spec = WorkloadSpec(
        name="synthetic_additive",
        description="Validation workload with exactly additive per-call error",
        static_functions=(STATIC_FN,),
        params={'calls': SYNTHETIC_CALLS, 'mantissa_bits': 23},
    )

    def prepare(self, seed: int, input_path: Optional[Path], params: Mapping[str, Any]) -> Dict[str, Any]:
        if input_path is not None:
            raise WorkloadInputError("synthetic_additive uses embedded inputs only")
        calls = int(params['calls'])
        mantissa_bits = int(params['mantissa_bits'])
        if calls < 1:
            raise ValueError("synthetic_additive needs calls >= 1")

        rng = np.random.default_rng(seed)
        permutation = rng.permutation(calls)
        owner = permutation[np.arange(mantissa_bits) % calls]
        exponent = int(rng.integers(-4, 5))
        return {
            'owner': owner,
            'exponent': exponent,
            'terms': build_terms(calls, mantissa_bits, exponent, owner),
        }

    def execute(self, ctx: ExecutionContext, inputs: Mapping[str, Any], params: Mapping[str, Any]) -> np.ndarray:
        if int(params['mantissa_bits']) > ctx.fmt.mantissa_bits:
            raise ValueError("mantissa_bits exceeds the precision format")
        base = ctx.allocate('base_terms', inputs['terms'])
        doubled = ctx.allocate('terms', np.zeros(base.data.size))

        for i in range(base.data.size):
            with ctx.call(STATIC_FN, label=f"term{i}"):
                value = ctx.load(base, i)
                ctx.store(doubled, i, ctx.op(value * 2.0))

        terms = ctx.load(doubled, np.arange(base.data.size))
        # Exact double-precision accumulation, accounted as plain adds
        ctx.track_overhead(terms.size)
        total = math.fsum(terms.astype(np.float64).tolist())
        return np.array([total * scale for scale in OUTPUT_SCALES], dtype=np.float64)
