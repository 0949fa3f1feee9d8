"""
Hotspot thermal simulation workload
A 5-point stencil over a square grid; find_delta computes the temperature
difference of every cell once per outer iteration, the update is applied outside.
"""

from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import numpy as np

from ..tracing.execution_context import ExecutionContext
from ..utils.config import HOTSPOT_GRID, HOTSPOT_ITERATIONS
from ..utils.exceptions import WorkloadInputError
from .base import Workload, WorkloadSpec

STATIC_FN = "find_delta"

AMBIENT_TEMP = 80.0
STEP = 0.1
CX = 1.0
CY = 1.0
CZ = 0.5


def stencil_indices(grid: int) -> np.ndarray:
    """Per cell (row-major): center, north, south, east, west with clamped borders"""
    rows, cols = np.divmod(np.arange(grid * grid), grid)
    north = np.maximum(rows - 1, 0) * grid + cols
    south = np.minimum(rows + 1, grid - 1) * grid + cols
    east = rows * grid + np.minimum(cols + 1, grid - 1)
    west = rows * grid + np.maximum(cols - 1, 0)
    center = rows * grid + cols
    return np.stack([center, north, south, east, west], axis=1)


class HotspotWorkload(Workload):
    """
    Explicit thermal relaxation toward the ambient temperature under a power map
    """

    spec = WorkloadSpec(
        name="hotspot",
        description="5-point stencil thermal grid, find_delta once per iteration",
        static_functions=(STATIC_FN,),
        params={'grid': HOTSPOT_GRID, 'iterations': HOTSPOT_ITERATIONS},
    )

    def prepare(self, seed: int, input_path: Optional[Path], params: Mapping[str, Any]) -> Dict[str, Any]:
        if input_path is not None:
            raise WorkloadInputError("hotspot uses embedded inputs only")
        grid = int(params['grid'])
        if grid < 2 or int(params['iterations']) < 1:
            raise ValueError("hotspot needs grid >= 2 and iterations >= 1")

        rng = np.random.default_rng(seed)
        return {
            'temp': 323.15 + rng.uniform(0.0, 10.0, grid * grid),
            'power': rng.uniform(0.0, 2.0, grid * grid),
            'stencil': stencil_indices(grid),
        }

    def execute(self, ctx: ExecutionContext, inputs: Mapping[str, Any], params: Mapping[str, Any]) -> np.ndarray:
        op = ctx.op
        temp = ctx.allocate('temp', inputs['temp'])
        power = ctx.allocate('power', inputs['power'])
        delta = ctx.allocate('delta', np.zeros(temp.data.size))

        stencil = inputs['stencil']
        cells = stencil[:, 0]
        interleaved = stencil.reshape(-1)

        for it in range(int(params['iterations'])):
            with ctx.call(STATIC_FN, label=f"iteration{it}"):
                neighborhood = ctx.load(temp, interleaved).reshape(-1, 5)
                c, n, s, e, w = (neighborhood[:, j] for j in range(5))
                p = ctx.load(power, cells)

                two_c = op(c * 2.0)
                vertical = op(op(n + s) - two_c)
                horizontal = op(op(e + w) - two_c)
                ambient = op(AMBIENT_TEMP - c)

                acc = op(p + op(vertical * CY))
                acc = op(acc + op(horizontal * CX))
                acc = op(acc + op(ambient * CZ))
                ctx.store(delta, cells, op(acc * STEP))

            updated = op(ctx.load(temp, cells) + ctx.load(delta, cells))
            ctx.store(temp, cells, updated)

        return temp.snapshot()
