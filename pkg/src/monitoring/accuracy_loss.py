"""
Accuracy Loss Module
Mean relative error of an approximate run against the full-precision golden run,
plus distribution summaries of the per-point errors
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from ..kernels.base import WorkloadOutput
from ..utils.config import DEFAULT_TARGETS, RELATIVE_ERROR_CAP
from ..utils.logger import get_logger

logger = get_logger(__name__)

OutputLike = Union[WorkloadOutput, Sequence[float], np.ndarray]


def _values(output: OutputLike) -> np.ndarray:
    if isinstance(output, WorkloadOutput):
        return output.values
    return np.asarray(output, dtype=np.float64).reshape(-1)


def _check_thresholds(thresholds: Sequence[float]) -> np.ndarray:
    edges = np.asarray(thresholds, dtype=np.float64).reshape(-1)
    if edges.size and (not np.isfinite(edges).all() or (edges < 0).any()):
        raise ValueError("Thresholds must be finite and non-negative")
    if edges.size > 1 and (np.diff(edges) <= 0).any():
        raise ValueError("Thresholds must be strictly ascending")
    return edges


@dataclass(frozen=True)
class AccuracySummary:
    """
    Per-point relative errors of one approximate output

    Attributes:
        errors: Capped relative error of every output point
        cap: Error value of a totally inaccurate point
    """

    errors: np.ndarray
    cap: float = RELATIVE_ERROR_CAP

    @property
    def mre(self) -> float:
        return float(np.mean(self.errors))

    @property
    def max_error(self) -> float:
        return float(np.max(self.errors))

    @property
    def num_points(self) -> int:
        return int(self.errors.size)

    def fraction_below(self, thresholds: Sequence[float] = DEFAULT_TARGETS) -> List[float]:
        """Fraction of points whose error is strictly below each threshold"""
        edges = _check_thresholds(thresholds)
        return [float(np.count_nonzero(self.errors < t)) / self.num_points for t in edges]

    def histogram(self, thresholds: Sequence[float] = DEFAULT_TARGETS) -> List[float]:
        """
        Bucket fractions over [0,t1), [t1,t2), ..., [tn,cap]

        Returns:
            len(thresholds) + 1 fractions summing to 1
        """
        edges = _check_thresholds(thresholds)
        buckets = np.searchsorted(edges, self.errors, side='right')
        counts = np.bincount(buckets, minlength=edges.size + 1)
        return (counts / self.num_points).tolist()

    def to_dict(self, thresholds: Sequence[float] = DEFAULT_TARGETS) -> Dict[str, Any]:
        edges = [float(t) for t in thresholds]
        return {
            'mre': self.mre,
            'max_error': self.max_error,
            'num_points': self.num_points,
            'cap': self.cap,
            'thresholds': edges,
            'fraction_below': self.fraction_below(edges),
            'histogram': self.histogram(edges),
        }


def relative_errors(approx: OutputLike, golden: OutputLike, cap: float = RELATIVE_ERROR_CAP) -> np.ndarray:
    """
    Capped per-point relative errors

    A zero golden point is exact only when the approximate point is zero too;
    any non-finite approximate point counts as totally inaccurate.

    Raises:
        ValueError: Length mismatch, empty output or non-finite golden values
    """
    a = _values(approx)
    g = _values(golden)
    if a.size != g.size:
        raise ValueError(f"Output length mismatch: approx has {a.size} points, golden has {g.size}")
    if g.size == 0:
        raise ValueError("Cannot compute relative errors of an empty output")
    if not np.isfinite(g).all():
        raise ValueError("Golden output must be finite")

    with np.errstate(all='ignore'):
        rel = np.abs(a - g) / np.abs(g)
    rel = np.where(g == 0.0, np.where(a == 0.0, 0.0, cap), rel)
    return np.where(np.isfinite(a), np.minimum(rel, cap), cap)


def mean_relative_error(approx: OutputLike, golden: OutputLike, cap: float = RELATIVE_ERROR_CAP) -> AccuracySummary:
    """
    Accuracy loss of an approximate output with respect to the golden output

    Args:
        approx: Output of the approximate run
        golden: Output of the full-precision run
        cap: Upper bound of a single point's relative error

    Returns:
        AccuracySummary (its mre is the accuracy loss)
    """
    return AccuracySummary(errors=relative_errors(approx, golden, cap), cap=cap)


def error_distribution(summary: AccuracySummary, thresholds: Sequence[float] = DEFAULT_TARGETS) -> List[float]:
    """Fraction of points strictly below each (ascending) threshold"""
    return summary.fraction_below(thresholds)
