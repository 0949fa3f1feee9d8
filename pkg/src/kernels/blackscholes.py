"""
Black-Scholes option pricing workload
One dynamic call per option; every call prices a different stock option,
so an error in one call only affects that option's price.
"""

from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import numpy as np

from ..tracing.execution_context import ExecutionContext
from ..utils.config import BLACKSCHOLES_OPTIONS
from ..utils.exceptions import WorkloadInputError
from .base import Workload, WorkloadSpec

STATIC_FN = "BlkSchlsEqEuroNoDiv"

INV_SQRT_2PI = 0.39894228040143270286

# Polynomial approximation of the cumulative normal distribution
CNDF_GAMMA = 0.2316419
CNDF_A1 = 0.319381530
CNDF_A2 = -0.356563782
CNDF_A3 = 1.781477937
CNDF_A4 = -1.821255978
CNDF_A5 = 1.330274429

CALL, PUT = 0, 1


def cndf(ctx: ExecutionContext, x):
    """Cumulative normal distribution; the sign fix-up is evaluated unconditionally"""
    op = ctx.op
    negative = bool(x < 0)
    ax = op(np.abs(x))

    exp_values = op(np.exp(op(op(ax * ax) * -0.5)))
    n_prime = op(exp_values * INV_SQRT_2PI)

    k2 = op(1.0 / op(op(ax * CNDF_GAMMA) + 1.0))
    k2_2 = op(k2 * k2)
    k2_3 = op(k2_2 * k2)
    k2_4 = op(k2_3 * k2)
    k2_5 = op(k2_4 * k2)

    local_1 = op(k2 * CNDF_A1)
    local_2 = op(k2_2 * CNDF_A2)
    local_2 = op(local_2 + op(k2_3 * CNDF_A3))
    local_2 = op(local_2 + op(k2_4 * CNDF_A4))
    local_2 = op(local_2 + op(k2_5 * CNDF_A5))
    local_1 = op(local_1 + local_2)

    result = op(1.0 - op(local_1 * n_prime))
    flipped = op(1.0 - result)
    return flipped if negative else result


def price_option(ctx: ExecutionContext, spot, strike, rate, volatility, time, option_type: int):
    """European option price without dividends"""
    op = ctx.op
    log_term = op(np.log(op(spot / strike)))
    power_term = op(op(volatility * volatility) * 0.5)

    d1 = op(op(op(rate + power_term) * time) + log_term)
    den = op(volatility * op(np.sqrt(time)))
    d1 = op(d1 / den)
    d2 = op(d1 - den)

    n_d1 = cndf(ctx, d1)
    n_d2 = cndf(ctx, d2)

    future_value = op(strike * op(np.exp(op(op(-rate) * time))))
    if option_type == CALL:
        return op(op(spot * n_d1) - op(future_value * n_d2))
    neg_d1 = op(1.0 - n_d1)
    neg_d2 = op(1.0 - n_d2)
    return op(op(future_value * neg_d2) - op(spot * neg_d1))


class BlackScholesWorkload(Workload):
    """
    Closed-form pricing of a portfolio of European options
    """

    spec = WorkloadSpec(
        name="blackscholes",
        description="European option pricing, one dynamic call per option",
        static_functions=(STATIC_FN,),
        params={'n_options': BLACKSCHOLES_OPTIONS},
    )

    def prepare(self, seed: int, input_path: Optional[Path], params: Mapping[str, Any]) -> Dict[str, Any]:
        if input_path is not None:
            raise WorkloadInputError("blackscholes uses embedded inputs only")
        n = int(params['n_options'])
        if n < 1:
            raise ValueError("n_options must be positive")

        rng = np.random.default_rng(seed)
        spot = rng.uniform(30.0, 60.0, n)
        return {
            'spot': spot,
            'strike': spot * rng.uniform(0.9, 1.1, n),
            'rate': rng.uniform(0.01, 0.1, n),
            'volatility': rng.uniform(0.2, 0.5, n),
            'time': rng.uniform(0.5, 2.0, n),
            'option_type': rng.integers(CALL, PUT + 1, n),
        }

    def execute(self, ctx: ExecutionContext, inputs: Mapping[str, Any], params: Mapping[str, Any]) -> np.ndarray:
        spot = ctx.allocate('sptprice', inputs['spot'])
        strike = ctx.allocate('strike', inputs['strike'])
        rate = ctx.allocate('rate', inputs['rate'])
        volatility = ctx.allocate('volatility', inputs['volatility'])
        time = ctx.allocate('otime', inputs['time'])
        prices = ctx.allocate('prices', np.zeros(spot.data.size))
        option_type = inputs['option_type']

        for i in range(spot.data.size):
            with ctx.call(STATIC_FN, label=f"option{i}"):
                # Option type dispatch is integer work
                ctx.track_overhead(1)
                price = price_option(
                    ctx,
                    ctx.load(spot, i),
                    ctx.load(strike, i),
                    ctx.load(rate, i),
                    ctx.load(volatility, i),
                    ctx.load(time, i),
                    int(option_type[i]),
                )
                ctx.store(prices, i, price)

        return prices.snapshot()
