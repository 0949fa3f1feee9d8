"""
Particle filter workload (reduced)
Tracks an object moving at constant velocity from noisy per-frame observations.
Every frame calls five approximable functions in order: apply_motion_model,
particle_filter_likelihood, update_weights, normalize_weights and calc_u.
Position estimation and systematic resampling run outside the calls.
"""

from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import numpy as np

from ..tracing.execution_context import ExecutionContext
from ..utils.config import PARTICLEFILTER_FRAMES, PARTICLEFILTER_PARTICLES
from ..utils.exceptions import WorkloadInputError
from .base import Workload, WorkloadSpec, prefix_sums, sequential_sum

MOTION_MODEL = "apply_motion_model"
LIKELIHOOD = "particle_filter_likelihood"
UPDATE_WEIGHTS = "update_weights"
NORMALIZE_WEIGHTS = "normalize_weights"
CALC_U = "calc_u"

START = (16.0, 16.0)
VELOCITY = (1.0, -0.5)
MOTION_STD = 1.0
OBSERVATION_STD = 0.5
LIKELIHOOD_SIGMA = 2.0


class ParticleFilterWorkload(Workload):
    """
    Bootstrap particle filter; output is the estimated (x, y) of every frame
    """

    spec = WorkloadSpec(
        name="particlefilter_lite",
        description="Object tracking particle filter, five approximable calls per frame",
        static_functions=(MOTION_MODEL, LIKELIHOOD, UPDATE_WEIGHTS, NORMALIZE_WEIGHTS, CALC_U),
        params={'frames': PARTICLEFILTER_FRAMES, 'particles': PARTICLEFILTER_PARTICLES},
    )

    def prepare(self, seed: int, input_path: Optional[Path], params: Mapping[str, Any]) -> Dict[str, Any]:
        if input_path is not None:
            raise WorkloadInputError("particlefilter_lite uses embedded inputs only")
        frames = int(params['frames'])
        particles = int(params['particles'])
        if frames < 1 or particles < 2:
            raise ValueError("particlefilter_lite needs frames >= 1 and particles >= 2")

        rng = np.random.default_rng(seed)
        steps = np.arange(1, frames + 1)
        truth = np.stack([START[0] + VELOCITY[0] * steps, START[1] + VELOCITY[1] * steps], axis=1)
        return {
            'observations': (truth + rng.normal(0.0, OBSERVATION_STD, truth.shape)).reshape(-1),
            'noise_x': rng.normal(0.0, 1.0, frames * particles),
            'noise_y': rng.normal(0.0, 1.0, frames * particles),
            'randu': rng.uniform(0.0, 1.0, frames),
        }

    def execute(self, ctx: ExecutionContext, inputs: Mapping[str, Any], params: Mapping[str, Any]) -> np.ndarray:
        op = ctx.op
        frames = int(params['frames'])
        n = int(params['particles'])
        everyone = np.arange(n)
        inv_n = ctx.fmt.cast(1.0 / n)
        ranks = ctx.fmt.cast(everyone / n)
        likelihood_scale = -1.0 / (2.0 * LIKELIHOOD_SIGMA ** 2)
        # Binary search per particle during resampling
        search_overhead = n * int(np.ceil(np.log2(n)))

        xs = ctx.allocate('arrayX', np.full(n, START[0]))
        ys = ctx.allocate('arrayY', np.full(n, START[1]))
        weights = ctx.allocate('weights', np.full(n, 1.0 / n))
        likelihood = ctx.allocate('likelihood', np.zeros(n))
        cdf = ctx.allocate('CDF', np.zeros(n))
        u = ctx.allocate('u', np.zeros(n))
        noise_x = ctx.allocate('noise_x', inputs['noise_x'])
        noise_y = ctx.allocate('noise_y', inputs['noise_y'])
        observations = ctx.allocate('observations', inputs['observations'])
        randu = ctx.allocate('randu', inputs['randu'])

        estimates = []
        for frame in range(frames):
            noise_slice = frame * n + everyone

            with ctx.call(MOTION_MODEL, label=f"frame{frame}"):
                x = ctx.load(xs, everyone)
                moved_x = op(op(x + VELOCITY[0]) + op(ctx.load(noise_x, noise_slice) * MOTION_STD))
                ctx.store(xs, everyone, moved_x)
                y = ctx.load(ys, everyone)
                moved_y = op(op(y + VELOCITY[1]) + op(ctx.load(noise_y, noise_slice) * MOTION_STD))
                ctx.store(ys, everyone, moved_y)

            with ctx.call(LIKELIHOOD, label=f"frame{frame}"):
                x = ctx.load(xs, everyone)
                y = ctx.load(ys, everyone)
                zx = ctx.load(observations, 2 * frame)
                zy = ctx.load(observations, 2 * frame + 1)
                dx = op(x - zx)
                dy = op(y - zy)
                dist2 = op(op(dx * dx) + op(dy * dy))
                ctx.store(likelihood, everyone, op(dist2 * likelihood_scale))

            with ctx.call(UPDATE_WEIGHTS, label=f"frame{frame}"):
                w = ctx.load(weights, everyone)
                lk = ctx.load(likelihood, everyone)
                ctx.store(weights, everyone, op(w * op(np.exp(lk))))

            with ctx.call(NORMALIZE_WEIGHTS, label=f"frame{frame}"):
                w = ctx.load(weights, everyone)
                total = sequential_sum(ctx, w)
                ctx.store(weights, everyone, op(w / total))

            w = ctx.load(weights, everyone)
            x_est = sequential_sum(ctx, op(ctx.load(xs, everyone) * w))
            y_est = sequential_sum(ctx, op(ctx.load(ys, everyone) * w))
            estimates.extend([x_est, y_est])

            with ctx.call(CALC_U, label=f"frame{frame}"):
                w = ctx.load(weights, everyone)
                ctx.store(cdf, everyone, prefix_sums(ctx, w))
                u1 = op(ctx.load(randu, frame) * inv_n)
                ctx.store(u, everyone, op(u1 + ranks))

            self._resample(ctx, xs, ys, weights, cdf, u, everyone, inv_n, search_overhead)

        return np.asarray(estimates, dtype=np.float64)

    @staticmethod
    def _resample(ctx, xs, ys, weights, cdf, u, everyone, inv_n, search_overhead):
        """Systematic resampling: particle i copies the first j with CDF[j] >= u[i]"""
        c = ctx.load(cdf, everyone)
        targets = ctx.load(u, everyone)
        ctx.track_overhead(search_overhead)
        chosen = np.minimum(np.searchsorted(c, targets, side='left'), everyone.size - 1)
        # Whole arrays are streamed in and out so the address stream stays fixed
        x = ctx.load(xs, everyone)
        y = ctx.load(ys, everyone)
        ctx.store(xs, everyone, x[chosen])
        ctx.store(ys, everyone, y[chosen])
        ctx.store(weights, everyone, np.full(everyone.size, inv_n))
