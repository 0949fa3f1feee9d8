"""
Precision-scaling planners
Turn accuracy-loss matrices (or a fixed fraction) into per-call omission schedules

dps:  per call, omit the longest prefix of low-order bits whose cumulative
      worst-polarity loss stays strictly below the target
dps+: additionally require the next call to tolerate the same omission,
      since call i's truncated results feed call i+1
sps:  omit ceil(fraction * num_bits) bits in every call
sps+: run dps, then give every call of a static function that function's minimum
"""

import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..profiling.acc_loss import AccLossMatrices
from ..utils.logger import get_logger
from .schedule import OmissionSchedule, PolicyConfig, PolicyKind, ScheduleProvenance

logger = get_logger(__name__)

# Absorbs representation error of decimal fractions such as 0.7 * 10
_CEIL_EPSILON = 1e-9


def _check_target(target: float) -> float:
    target = float(target)
    if not target >= 0:
        raise ValueError(f"Target accuracy loss must be >= 0, got {target}")
    return target


def tolerated_bits(losses: np.ndarray, target: float) -> int:
    """
    Longest prefix of one call's per-bit losses whose running sum stays below target

    A NaN (Invalid) entry ends the prefix.
    """
    cumulative = 0.0
    omitted = 0
    for loss in losses.tolist():
        if math.isnan(loss):
            break
        cumulative += loss
        if not cumulative < target:
            break
        omitted += 1
    return omitted


def _provenance(kind: PolicyKind, m: AccLossMatrices, target: float) -> ScheduleProvenance:
    return ScheduleProvenance(
        policy=kind,
        target=target,
        num_bits=m.num_bits,
        matrix_fingerprint=m.content_hash(),
        workload=m.fingerprint,
    )


def _dps_counts(m: AccLossMatrices, target: float) -> List[int]:
    losses = m.max_loss()
    return [tolerated_bits(losses[i], target) for i in range(m.num_calls)]


def plan_dps(m: AccLossMatrices, target: float) -> OmissionSchedule:
    """
    Basic dynamic precision scaling

    Args:
        m: Profiled accuracy-loss matrices
        target: Target accuracy loss (MRE)

    Returns:
        Schedule with omitted[i] chosen independently per call
    """
    target = _check_target(target)
    omitted = _dps_counts(m, target)
    logger.debug(f"dps@{target:g}: mean omitted {np.mean(omitted) if omitted else 0:.2f} bits")
    return OmissionSchedule(omitted=omitted, provenance=_provenance(PolicyKind.DPS, m, target), static_fns=m.static_fns)


def plan_dps_plus(m: AccLossMatrices, target: float) -> OmissionSchedule:
    """
    Dependency-aware dynamic precision scaling

    Call i keeps only as many omitted bits as both call i and call i+1
    tolerate; the last call follows the basic rule.
    """
    target = _check_target(target)
    single = _dps_counts(m, target)
    # Both prefix conditions are monotone in n, so the joint bound is the smaller one
    omitted = [min(single[i], single[i + 1]) for i in range(m.num_calls - 1)]
    if single:
        omitted.append(single[-1])
    return OmissionSchedule(
        omitted=omitted, provenance=_provenance(PolicyKind.DPS_PLUS, m, target), static_fns=m.static_fns
    )


def plan_sps(
    fraction: float,
    num_bits: int,
    num_calls: int,
    static_fns: Optional[Sequence[str]] = None
) -> OmissionSchedule:
    """
    Static precision scaling: the same omission everywhere

    Args:
        fraction: Share of mantissa bits to omit, in [0, 1]
        num_bits: Mantissa bits available for omission
        num_calls: Dynamic calls of the workload
        static_fns: Optional static function per call
    """
    fraction = float(fraction)
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"SPS fraction must be in [0, 1], got {fraction}")
    if num_bits < 0 or num_calls < 0:
        raise ValueError("num_bits and num_calls must be non-negative")
    k = min(num_bits, max(0, math.ceil(fraction * num_bits - _CEIL_EPSILON)))
    return OmissionSchedule(
        omitted=[k] * num_calls,
        provenance=ScheduleProvenance(policy=PolicyKind.SPS, fraction=fraction, num_bits=num_bits),
        static_fns=list(static_fns or []),
    )


def plan_sps_plus(m: AccLossMatrices, target: float) -> OmissionSchedule:
    """
    Static per-function scaling derived from dps: every call of a static
    function gets the minimum dps omission over that function's calls
    """
    target = _check_target(target)
    single = _dps_counts(m, target)
    omitted = list(single)
    minimum: Dict[str, int] = {}
    for fn in dict.fromkeys(m.static_fns):
        calls = m.calls_of(fn)
        minimum[fn] = min(single[i] for i in calls)
        for i in calls:
            omitted[i] = minimum[fn]
    logger.debug(f"sps+@{target:g}: per-function omission {minimum}")
    return OmissionSchedule(
        omitted=omitted, provenance=_provenance(PolicyKind.SPS_PLUS, m, target), static_fns=m.static_fns
    )


def plan(
    config: PolicyConfig,
    matrices: Optional[AccLossMatrices] = None,
    num_bits: Optional[int] = None,
    num_calls: Optional[int] = None,
    static_fns: Optional[Sequence[str]] = None
) -> OmissionSchedule:
    """
    Dispatch a policy configuration to its planner

    sps takes its geometry from the matrices when given, otherwise from
    num_bits/num_calls.
    """
    if config.kind.needs_matrices and matrices is None:
        raise ValueError(f"{config.kind.value} needs accuracy-loss matrices")

    if config.kind is PolicyKind.DPS:
        schedule = plan_dps(matrices, config.target)
    elif config.kind is PolicyKind.DPS_PLUS:
        schedule = plan_dps_plus(matrices, config.target)
    elif config.kind is PolicyKind.SPS_PLUS:
        schedule = plan_sps_plus(matrices, config.target)
    elif matrices is not None:
        schedule = plan_sps(config.fraction, matrices.num_bits, matrices.num_calls, matrices.static_fns)
        schedule.provenance.workload = matrices.fingerprint
    else:
        if num_bits is None or num_calls is None:
            raise ValueError("sps without matrices needs num_bits and num_calls")
        schedule = plan_sps(config.fraction, num_bits, num_calls, static_fns)

    logger.info(f"Planned {config.label}: {schedule.num_calls} calls, mean omitted {schedule.mean_omitted:.2f} bits")
    return schedule
