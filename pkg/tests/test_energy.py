"""
Unit tests for the EPI energy model
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

# Add project root to path
project_root = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(project_root))

from src.energy import EpiTable, energy_of_trace, epi_scaled, width_ratio
from src.kernels import prepare_workload
from src.precision.fpbits import DOUBLE, SINGLE
from src.simulation.cache_simulator import CATEGORY_ORDER, OperandCategory
from src.tracing.call_trace import APPROX, NON_APPROX, CallTrace, DynamicCall
from src.utils.exceptions import ScheduleMismatchError


def _trace(counts, residual=None, fmt=SINGLE):
    counts = np.asarray(counts, dtype=np.int64)
    calls = [DynamicCall(index=i, static_fn='f', label=f"f#{i}") for i in range(counts.shape[0])]
    if residual is None:
        residual = np.zeros((len(CATEGORY_ORDER), 2), dtype=np.int64)
    return CallTrace(fmt=fmt, calls=calls, counts=counts, residual=residual)


def _rf_only(n_calls, n_ops, approx=True):
    counts = np.zeros((n_calls, len(CATEGORY_ORDER), 2), dtype=np.int64)
    counts[:, OperandCategory.RF.position, APPROX if approx else NON_APPROX] = n_ops
    return _trace(counts)


class TestEpi:
    """
    Test suite for EPI tables and width scaling
    """

    @pytest.mark.parametrize("category,expected", [
        ('rf', 0.45), ('l1', 0.88), ('l2', 7.72), ('mem_rd', 52.14), ('mem_wr', 62.14)
    ])
    def test_full_precision_values(self, category, expected):
        assert epi_scaled(category, SINGLE, 0) == pytest.approx(expected)

    def test_half_width(self):
        assert epi_scaled(OperandCategory.RF, SINGLE, 16) == pytest.approx(0.225)

    def test_double_memory_write(self):
        assert epi_scaled(OperandCategory.MEM_WR, DOUBLE, 0) == pytest.approx(62.14)

    def test_significand_scaling(self):
        assert width_ratio(SINGLE, 12, 'significand') == pytest.approx(12 / 24)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            epi_scaled('rf', SINGLE, 24)

    def test_unknown_scaling(self):
        with pytest.raises(ValueError):
            width_ratio(SINGLE, 1, 'quadratic')

    def test_table_rejects_non_positive(self):
        with pytest.raises(ValidationError):
            EpiTable(rf=0.0)

    def test_custom_table(self):
        table = EpiTable(rf=1.0)
        assert epi_scaled('rf', SINGLE, 8, table) == pytest.approx(24 / 32)


class TestEnergyOfTrace:
    """
    Test suite for energy_of_trace
    """

    def test_zero_schedule_saves_nothing(self):
        prepared = prepare_workload('hotspot', params={'grid': 8, 'iterations': 3})
        _, trace = prepared.run()
        report = energy_of_trace(trace, [0] * trace.num_calls)
        assert report.savings == 0.0
        assert report.total == report.baseline

    def test_fully_truncated_rf_ops(self):
        report = energy_of_trace(_rf_only(1, 10), [23])
        assert report.total == pytest.approx(10 * 0.45 * 9 / 32)
        assert report.savings == pytest.approx(23 / 32)

    def test_non_approximable_work_is_fixed(self):
        trace = _rf_only(2, 5, approx=False)
        assert energy_of_trace(trace, [0, 0]).total == pytest.approx(energy_of_trace(trace, [23, 23]).total)

    def test_residual_counted_at_full_epi(self):
        residual = np.zeros((len(CATEGORY_ORDER), 2), dtype=np.int64)
        residual[OperandCategory.MEM_RD.position, NON_APPROX] = 2
        counts = np.zeros((1, len(CATEGORY_ORDER), 2), dtype=np.int64)
        report = energy_of_trace(_trace(counts, residual), [5])
        assert report.residual == pytest.approx(2 * 52.14)
        assert report.total == pytest.approx(2 * 52.14)

    def test_length_mismatch(self):
        with pytest.raises(ScheduleMismatchError):
            energy_of_trace(_rf_only(3, 1), [0, 0])

    def test_length_mismatch_is_value_error(self):
        with pytest.raises(ValueError):
            energy_of_trace(_rf_only(3, 1), [0])

    def test_additivity(self):
        prepared = prepare_workload('particlefilter_lite', params={'frames': 2, 'particles': 16})
        _, trace = prepared.run()
        schedule = list(np.arange(trace.num_calls) % 24)
        report = energy_of_trace(trace, schedule)
        assert report.total == pytest.approx(sum(report.per_call) + report.residual)
        assert report.total == pytest.approx(sum(report.per_category.values()))
        assert report.baseline == pytest.approx(sum(report.baseline_per_category.values()))

    def test_monotone_in_schedule(self):
        prepared = prepare_workload('blackscholes', params={'n_options': 8})
        _, trace = prepared.run()
        rng = np.random.default_rng(4)
        low = rng.integers(0, 12, trace.num_calls)
        high = low + rng.integers(0, 12, trace.num_calls)
        assert energy_of_trace(trace, high).total <= energy_of_trace(trace, low).total

    def test_savings_below_upper_bound(self):
        prepared = prepare_workload('pagerank', params={'vertices': 16, 'iterations': 4})
        _, trace = prepared.run()
        report = energy_of_trace(trace, [23] * trace.num_calls)
        assert 0 < report.savings <= report.savings_upper_bound() + 1e-12
        assert report.max_width_reduction == pytest.approx(23 / 32)

    def test_report_is_self_describing(self):
        report = energy_of_trace(_rf_only(1, 1), [0], scaling='significand')
        assert report.scaling == 'significand'
        assert report.precision == 'single'
