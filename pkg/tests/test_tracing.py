"""
Unit tests for execution contexts, call traces and value transformers
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(project_root))

from src.precision.fpbits import SINGLE, FaultPolarity, MantissaFault, truncate_mantissa
from src.simulation.cache_simulator import OperandCategory
from src.tracing.call_trace import APPROX, NON_APPROX
from src.tracing.execution_context import ExecutionContext
from src.tracing.transformers import (
    FaultTransformer,
    IdentityTransformer,
    TruncateTransformer,
    make_transformer
)
from src.utils.exceptions import ScheduleMismatchError, TraceUsageError

RF, L1, MEM_RD, MEM_WR = (c.position for c in (
    OperandCategory.RF, OperandCategory.L1, OperandCategory.MEM_RD, OperandCategory.MEM_WR
))


class TestCallBoundaries:
    """
    Test suite for begin_call/end_call
    """

    def test_sequential_indices(self):
        ctx = ExecutionContext(SINGLE)
        with ctx.call('f') as first:
            pass
        with ctx.call('g') as second:
            pass
        assert (first, second) == (0, 1)
        trace = ctx.finish()
        assert trace.static_functions == ['f', 'g']
        assert trace.calls[1].label == 'g#1'

    def test_nested_call_rejected(self):
        ctx = ExecutionContext(SINGLE)
        ctx.begin_call('f')
        with pytest.raises(TraceUsageError):
            ctx.begin_call('g')

    def test_unclosed_call_rejected(self):
        ctx = ExecutionContext(SINGLE)
        ctx.begin_call('f')
        with pytest.raises(TraceUsageError):
            ctx.finish()

    def test_end_without_begin(self):
        with pytest.raises(TraceUsageError):
            ExecutionContext(SINGLE).end_call()

    def test_empty_call_has_zero_counts(self):
        ctx = ExecutionContext(SINGLE)
        with ctx.call('f'):
            pass
        trace = ctx.finish()
        assert trace.counts[0].sum() == 0
        assert trace.total == 0

    def test_exception_inside_call_closes_it(self):
        ctx = ExecutionContext(SINGLE)
        with pytest.raises(RuntimeError):
            with ctx.call('f'):
                raise RuntimeError("kernel failed")
        with ctx.call('g') as index:
            pass
        assert index == 1
        assert ctx.finish().num_calls == 2


class TestFpOps:
    """
    Test suite for track_fp_op
    """

    def test_identity_counts_rf(self):
        ctx = ExecutionContext(SINGLE)
        with ctx.call('f'):
            result = ctx.op(np.float32(1.0) + np.float32(2.0))
        assert result == 3.0
        trace = ctx.finish()
        assert trace.counts[0, RF, APPROX] == 1
        assert trace.total == 1

    def test_operand_sources_pick_slowest(self):
        ctx = ExecutionContext(SINGLE)
        with ctx.call('f'):
            ctx.op(1.0, [OperandCategory.RF, OperandCategory.MEM_RD])
        assert ctx.finish().counts[0, MEM_RD, APPROX] == 1

    def test_operand_sources_ignored_outside_call(self):
        ctx = ExecutionContext(SINGLE)
        ctx.op(1.0, [OperandCategory.L2])
        trace = ctx.finish()
        assert trace.residual[RF, NON_APPROX] == 1
        assert trace.residual.sum() == 1

    def test_vector_op_counts_elements(self):
        ctx = ExecutionContext(SINGLE)
        with ctx.call('f'):
            ctx.op(np.ones(7, dtype=np.float32) * 2)
        assert ctx.finish().counts[0, RF, APPROX] == 7

    def test_truncate_all_bits(self):
        ctx = ExecutionContext(SINGLE, TruncateTransformer([23]))
        with ctx.call('f'):
            result = ctx.op(math.pi)
        assert result == 2.0
        ctx.finish()

    def test_outside_call_not_transformed(self):
        ctx = ExecutionContext(SINGLE, TruncateTransformer([23]))
        value = ctx.op(math.pi)
        with ctx.call('f'):
            pass
        trace = ctx.finish()
        assert value == np.float32(math.pi)
        assert trace.residual[RF, NON_APPROX] == 1

    def test_fault_only_in_target_call(self):
        fault = MantissaFault(22, FaultPolarity.STUCK_AT_1)
        ctx = ExecutionContext(SINGLE, FaultTransformer(fault, target_call=5))
        outputs = []
        for _ in range(6):
            with ctx.call('f'):
                outputs.append(ctx.op(1.0))
        ctx.finish()
        assert outputs[4] == 1.0
        assert outputs[5] == 1.5


class TestMemoryAccess:
    """
    Test suite for tracked loads, stores and overhead
    """

    def test_cold_then_warm_load(self):
        ctx = ExecutionContext(SINGLE)
        buf = ctx.allocate('x', [1.0, 2.0])
        with ctx.call('f'):
            ctx.load(buf, 0)
            ctx.load(buf, 0)
        trace = ctx.finish()
        assert trace.counts[0, MEM_RD, APPROX] == 1
        assert trace.counts[0, L1, APPROX] == 1

    def test_cold_store_counts_mem_wr(self):
        ctx = ExecutionContext(SINGLE)
        buf = ctx.allocate('x', np.zeros(4))
        with ctx.call('f'):
            ctx.store(buf, 2, 5.0)
        assert ctx.finish().counts[0, MEM_WR, APPROX] == 1
        assert buf.data[2] == 5.0

    def test_store_writes_truncated_value(self):
        values = np.float32([0.1, 3.3, -7.77, 1234.567])
        ctx = ExecutionContext(SINGLE, TruncateTransformer([9]))
        buf = ctx.allocate('out', np.zeros(4))
        with ctx.call('f'):
            ctx.store(buf, np.arange(4), values)
        ctx.finish()
        np.testing.assert_array_equal(buf.data, truncate_mantissa(values, SINGLE, 9))

    def test_gather_load_order(self):
        ctx = ExecutionContext(SINGLE)
        buf = ctx.allocate('x', np.arange(64))
        out = ctx.load(buf, [5, 0, 5])
        np.testing.assert_array_equal(out, [5.0, 0.0, 5.0])
        trace = ctx.finish()
        assert trace.residual[MEM_RD, NON_APPROX] == 1
        assert trace.residual[L1, NON_APPROX] == 2

    def test_buffers_do_not_share_lines(self):
        ctx = ExecutionContext(SINGLE)
        a = ctx.allocate('a', np.zeros(3))
        b = ctx.allocate('b', np.zeros(3))
        line = ctx.cache.config.line_size
        assert b.base // line > (a.end - 1) // line

    def test_overhead(self):
        ctx = ExecutionContext(SINGLE)
        ctx.track_overhead(0)
        ctx.track_overhead(10)
        trace = ctx.finish()
        assert trace.residual[RF, NON_APPROX] == 10
        assert trace.total == 10

    def test_overhead_inside_call_is_non_approximable(self):
        ctx = ExecutionContext(SINGLE)
        with ctx.call('f'):
            ctx.track_overhead(4)
        trace = ctx.finish()
        assert trace.counts[0, RF, NON_APPROX] == 4
        assert trace.counts[:, :, APPROX].sum() == 0

    def test_negative_overhead(self):
        with pytest.raises(ValueError):
            ExecutionContext(SINGLE).track_overhead(-1)


class TestTransformers:
    """
    Test suite for schedule-driven transformers
    """

    def test_make_transformer(self):
        assert isinstance(make_transformer(None), IdentityTransformer)
        assert isinstance(make_transformer([1, 2]), TruncateTransformer)

    def test_schedule_too_short(self):
        ctx = ExecutionContext(SINGLE, TruncateTransformer([0]))
        with ctx.call('f'):
            pass
        with pytest.raises(ScheduleMismatchError):
            ctx.begin_call('f')

    def test_schedule_too_long(self):
        ctx = ExecutionContext(SINGLE, TruncateTransformer([0, 0, 0]))
        with ctx.call('f'):
            pass
        with pytest.raises(ScheduleMismatchError):
            ctx.finish()

    def test_negative_omission_rejected(self):
        with pytest.raises(ValueError):
            TruncateTransformer([1, -1])


class TestCallTrace:
    """
    Test suite for CallTrace helpers
    """

    def test_counts_and_totals(self):
        ctx = ExecutionContext(SINGLE)
        buf = ctx.allocate('x', np.ones(8))
        for _ in range(2):
            with ctx.call('f'):
                ctx.op(ctx.load(buf, np.arange(8)) * 2)
        trace = ctx.finish()

        assert [c.index for c in trace.calls] == [0, 1]
        assert trace.counts[0, MEM_RD, APPROX] == 1
        assert trace.counts[1, L1, APPROX] == 8
        assert trace.category_totals()['rf'] == 16
        assert trace.counts[:, :, APPROX].sum() == trace.total

    def test_same_counts(self):
        def run(transformer):
            ctx = ExecutionContext(SINGLE, transformer)
            buf = ctx.allocate('x', np.linspace(0, 1, 32))
            with ctx.call('f'):
                ctx.store(buf, np.arange(32), ctx.op(ctx.load(buf, np.arange(32)) + 1))
            return ctx.finish()

        assert run(IdentityTransformer()).same_counts(run(TruncateTransformer([12])))
