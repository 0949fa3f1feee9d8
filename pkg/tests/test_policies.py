"""
Unit tests for omission schedules and the dps / dps+ / sps / sps+ planners
"""

import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

# Add project root to path
project_root = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(project_root))

from src.kernels import prepare_workload
from src.monitoring.accuracy_loss import mean_relative_error
from src.policies import (
    OmissionSchedule,
    PolicyConfig,
    PolicyKind,
    ScheduleProvenance,
    plan,
    plan_dps,
    plan_dps_plus,
    plan_sps,
    plan_sps_plus,
    tolerated_bits
)
from src.profiling import AccLossMatrices, FaultInjectionProfiler
from src.utils.exceptions import WorkbenchError


def _matrices(s0, s1=None, static_fns=None):
    s0 = np.asarray(s0, dtype=np.float64)
    s1 = s0 if s1 is None else np.asarray(s1, dtype=np.float64)
    return AccLossMatrices(s0=s0, s1=s1, static_fns=static_fns or ['f'] * s0.shape[0])


def _brute_force_dps(worst_row, target):
    best = 0
    for n in range(worst_row.size + 1):
        prefix = worst_row[:n].tolist()
        if any(math.isnan(x) for x in prefix):
            break
        if sum(prefix) < target:
            best = n
        else:
            break
    return best


class TestDps:
    """
    Test suite for basic dynamic precision scaling
    """

    def test_single_row(self):
        m = _matrices([[0.01, 0.02, 0.05]], [[0.02, 0.01, 0.10]])
        assert plan_dps(m, 0.1).omitted == [2]

    def test_zero_target(self):
        m = _matrices(np.zeros((3, 5)))
        assert plan_dps(m, 0.0).omitted == [0, 0, 0]

    def test_invalid_first_bit(self):
        m = _matrices([[np.nan, 0.0, 0.0]], [[0.0, 0.0, 0.0]])
        assert plan_dps(m, 0.5).omitted == [0]

    def test_invalid_bit_stops_prefix(self):
        assert tolerated_bits(np.array([0.0, 0.0, np.nan, 0.0]), 1.0) == 2

    def test_all_free_bits(self):
        m = _matrices(np.zeros((2, 7)))
        assert plan_dps(m, 0.01).omitted == [7, 7]

    def test_negative_target(self):
        with pytest.raises(ValueError):
            plan_dps(_matrices([[0.1]]), -0.1)

    def test_provenance(self):
        m = _matrices([[0.01, 0.2]])
        schedule = plan_dps(m, 0.1)
        assert schedule.provenance.policy is PolicyKind.DPS
        assert schedule.provenance.target == 0.1
        assert schedule.provenance.matrix_fingerprint == m.content_hash()

    def test_matches_brute_force(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            calls, bits = rng.integers(1, 6), rng.integers(1, 24)
            s0 = rng.exponential(0.02, size=(calls, bits))
            s1 = rng.exponential(0.02, size=(calls, bits))
            s0[rng.random((calls, bits)) < 0.05] = np.nan
            target = float(rng.choice([0.0, 0.05, 0.1, 0.15, 0.2, rng.uniform(0, 0.5)]))
            m = _matrices(s0, s1)
            worst = np.maximum(s0, s1)
            expected = [_brute_force_dps(worst[i], target) for i in range(calls)]
            assert plan_dps(m, target).omitted == expected

    def test_monotone_in_target(self):
        rng = np.random.default_rng(9)
        m = _matrices(rng.exponential(0.01, size=(8, 23)))
        previous = [0] * 8
        for target in (0.0, 0.01, 0.05, 0.1, 0.2, 0.5):
            current = plan_dps(m, target).omitted
            assert all(c >= p for c, p in zip(current, previous))
            previous = current


class TestDpsPlus:
    """
    Test suite for dependency-aware scaling
    """

    def test_fragile_successor_caps_call(self):
        s = [[0.001, 0.001, 0.001, 0.001], [0.001, 0.001, 0.5, 0.001]]
        schedule = plan_dps_plus(_matrices(s), 0.1)
        assert schedule.omitted == [2, 2]

    def test_single_call_equals_dps(self):
        m = _matrices([[0.01, 0.03, 0.2]])
        assert plan_dps_plus(m, 0.1).omitted == plan_dps(m, 0.1).omitted

    def test_identical_rows_equal_dps(self):
        m = _matrices(np.tile([0.01, 0.02, 0.03, 0.5], (5, 1)))
        assert plan_dps_plus(m, 0.1).omitted == plan_dps(m, 0.1).omitted

    def test_dominated_by_dps(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            m = _matrices(rng.exponential(0.03, size=(rng.integers(1, 10), 23)))
            target = float(rng.uniform(0, 0.3))
            dps = plan_dps(m, target).omitted
            plus = plan_dps_plus(m, target).omitted
            assert all(p <= d for p, d in zip(plus, dps))
            assert plus[-1] == dps[-1]

    def test_matches_pairwise_brute_force(self):
        rng = np.random.default_rng(31)
        for _ in range(1000):
            calls, bits = rng.integers(1, 7), rng.integers(1, 24)
            s0 = rng.exponential(0.02, size=(calls, bits))
            s1 = rng.exponential(0.02, size=(calls, bits))
            s1[rng.random((calls, bits)) < 0.03] = np.nan
            target = float(rng.uniform(0, 0.3))
            worst = np.maximum(s0, s1)
            own = [_brute_force_dps(worst[i], target) for i in range(calls)]
            expected = [min(own[i], own[i + 1]) for i in range(calls - 1)] + [own[-1]]
            assert plan_dps_plus(_matrices(s0, s1), target).omitted == expected

    def test_static_baselines_bounded_by_dps(self):
        rng = np.random.default_rng(5)
        fns = ['f', 'g', 'h']
        for _ in range(100):
            calls = int(rng.integers(1, 9))
            m = _matrices(rng.exponential(0.02, size=(calls, 23)), static_fns=[fns[i % 3] for i in range(calls)])
            previous = {'dps': [0] * calls, 'dps+': [0] * calls, 'sps+': [0] * calls}
            for target in (0.05, 0.1, 0.15, 0.2):
                current = {
                    'dps': plan_dps(m, target).omitted,
                    'dps+': plan_dps_plus(m, target).omitted,
                    'sps+': plan_sps_plus(m, target).omitted,
                }
                assert all(p <= d <= 23 for p, d in zip(current['dps+'], current['dps']))
                assert all(s <= d for s, d in zip(current['sps+'], current['dps']))
                for kind, omitted in current.items():
                    assert all(c >= p for c, p in zip(omitted, previous[kind]))
                previous = current


class TestSps:
    """
    Test suite for static scaling baselines
    """

    @pytest.mark.parametrize("fraction,expected", [(0.25, 6), (0.5, 12), (0.0, 0), (1.0, 23), (0.05, 2)])
    def test_fraction_to_bits(self, fraction, expected):
        schedule = plan_sps(fraction, 23, 4)
        assert schedule.omitted == [expected] * 4

    def test_exact_decimal_products(self):
        assert plan_sps(0.7, 10, 1).omitted == [7]

    def test_fraction_out_of_range(self):
        with pytest.raises(ValueError):
            plan_sps(1.5, 23, 1)

    def test_sps_plus_takes_function_minimum(self):
        m = _matrices(
            [[0.0] * 5 + [1.0] * 2, [0.0] * 3 + [1.0] * 4, [0.0] * 7],
            static_fns=['f', 'f', 'f']
        )
        assert plan_dps(m, 0.5).omitted == [5, 3, 7]
        assert plan_sps_plus(m, 0.5).omitted == [3, 3, 3]

    def test_sps_plus_zero_excludes_function(self):
        m = _matrices([[0.0, 0.0], [0.9, 0.0]], static_fns=['f', 'f'])
        assert plan_sps_plus(m, 0.5).omitted == [0, 0]

    def test_sps_plus_functions_independent(self):
        rows = [[0.0, 0.0, 1.0], [0.0, 1.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
        m = _matrices(rows, static_fns=['f', 'g', 'f', 'g'])
        assert plan_dps(m, 0.5).omitted == [2, 1, 3, 2]
        assert plan_sps_plus(m, 0.5).omitted == [2, 1, 2, 1]


class TestDispatchAndSchedules:
    """
    Test suite for PolicyConfig, plan() and schedule files
    """

    def test_config_requires_bound(self):
        with pytest.raises(ValidationError):
            PolicyConfig(kind='sps', target=0.1)
        with pytest.raises(ValidationError):
            PolicyConfig(kind='dps+', fraction=0.5)

    def test_plan_dispatch(self):
        m = _matrices([[0.01, 0.02, 0.05]] * 3)
        assert plan(PolicyConfig(kind='dps', target=0.1), m).omitted == [3, 3, 3]
        assert plan(PolicyConfig(kind='sps', fraction=0.25), m).omitted == [1, 1, 1]
        assert plan(PolicyConfig(kind='sps', fraction=0.25), num_bits=23, num_calls=2).omitted == [6, 6]

    def test_plan_needs_matrices(self):
        with pytest.raises(ValueError):
            plan(PolicyConfig(kind='dps', target=0.1))

    def test_schedule_range_checked(self):
        with pytest.raises(ValidationError):
            OmissionSchedule(omitted=[24], provenance=ScheduleProvenance(policy='sps', fraction=1.0, num_bits=23))

    def test_schedule_file_round_trip(self, tmp_path):
        m = _matrices([[0.01, 0.02, 0.05]] * 2, static_fns=['f', 'g'])
        schedule = plan_dps_plus(m, 0.1)
        path = schedule.save(tmp_path / "sched.json")
        payload = json.loads(path.read_text())
        assert payload['static_function_map'] == {'f': [0], 'g': [1]}
        assert OmissionSchedule.load(path) == schedule

    def test_bad_schedule_file(self, tmp_path):
        path = tmp_path / "sched.json"
        path.write_text('{"omitted": "many"}')
        with pytest.raises(WorkbenchError):
            OmissionSchedule.load(path)

    def test_missing_schedule_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            OmissionSchedule.load(tmp_path / "absent.json")


class TestAccuracyGuarantee:
    """
    On the additive workload the realised loss of a dps schedule stays below its target
    """

    @pytest.fixture(scope="class")
    def campaign(self):
        prepared = prepare_workload('synthetic_additive')
        matrices = FaultInjectionProfiler().profile(prepared)
        golden, _ = prepared.run()
        return prepared, matrices, golden

    @pytest.mark.parametrize("target", [0.05, 0.1, 0.15, 0.2])
    def test_dps_meets_target(self, campaign, target):
        prepared, matrices, golden = campaign
        schedule = plan_dps(matrices, target)
        assert schedule.mean_omitted > 0
        approx, _ = prepared.run(schedule.to_transformer())
        assert mean_relative_error(approx, golden).mre < target

    @pytest.mark.parametrize("target", [0.05, 0.1, 0.2])
    def test_dps_plus_meets_target(self, campaign, target):
        prepared, matrices, golden = campaign
        approx, _ = prepared.run(plan_dps_plus(matrices, target).to_transformer())
        assert mean_relative_error(approx, golden).mre < target
