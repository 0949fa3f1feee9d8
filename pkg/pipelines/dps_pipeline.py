"""
Dynamic Precision Scaling Pipeline
Orchestrates profiling, planning, replay, sweeps and report emission
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mlflow
import numpy as np
import pandas as pd

from src.energy.energy_model import energy_of_trace
from src.kernels.base import WorkloadOutput
from src.kernels.registry import PreparedWorkload, prepare_workload
from src.monitoring.accuracy_loss import mean_relative_error
from src.policies.planners import plan
from src.policies.schedule import OmissionSchedule, PolicyConfig, PolicyKind
from src.profiling.acc_loss import AccLossMatrices
from src.profiling.profiler import FaultInjectionProfiler
from src.reporting.report_builder import ReportBuilder
from src.reporting.schemas import AccuracyBlock, CallRecord, RunReport, SweepRow
from src.simulation.cache_simulator import OperandCategory
from src.tracing.call_trace import CallTrace
from src.utils.config import (
    CSV_FLOAT_FORMAT,
    CSV_NA_REP,
    DEFAULT_SPS_FRACTIONS,
    DEFAULT_SWEEP_POLICIES,
    DEFAULT_TARGETS,
    MLFLOW_EXPERIMENT_NAME,
    MLFLOW_TRACKING_URI,
    RANDOM_STATE
)
from src.utils.exceptions import ScheduleMismatchError, WorkloadError
from src.utils.logger import get_logger
from src.utils.settings import WorkbenchSettings

logger = get_logger(__name__)

PathLike = Union[str, Path]
Golden = Tuple[WorkloadOutput, CallTrace]


def memory_hit_rates(trace: CallTrace) -> Dict[str, float]:
    """Share of floating-point memory operands served by each level"""
    totals = trace.category_totals()
    memory = {k: v for k, v in totals.items() if k != OperandCategory.RF.value}
    accesses = sum(memory.values())
    return {k: (v / accesses if accesses else 0.0) for k, v in memory.items()}


def save_table(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep=CSV_NA_REP)
    logger.info(f"Table saved to {path}")
    return path


class DPSPipeline:
    """
    Profile -> plan -> replay workflow over the built-in workloads
    """

    def __init__(
        self,
        settings: Optional[WorkbenchSettings] = None,
        use_mlflow: bool = False,
        experiment_name: str = MLFLOW_EXPERIMENT_NAME
    ):
        """
        Initialize DPS Pipeline

        Args:
            settings: Cache geometry, EPI table, energy scaling and parallelism
            use_mlflow: Whether sweeps are tracked in MLflow
            experiment_name: MLflow experiment name
        """
        self.settings = settings or WorkbenchSettings()
        self.use_mlflow = use_mlflow
        self.experiment_name = experiment_name
        self.runs_executed = 0

    def setup_mlflow(self):
        """Setup MLflow tracking"""
        if self.use_mlflow:
            mlflow.set_tracking_uri(MLFLOW_TRACKING_URI)
            mlflow.set_experiment(self.experiment_name)
            logger.info(f"MLflow tracking URI: {MLFLOW_TRACKING_URI}")
            logger.info(f"MLflow experiment: {self.experiment_name}")

    def prepare(
        self,
        workload: str,
        input_path: Optional[PathLike] = None,
        seed: int = RANDOM_STATE,
        precision: Optional[str] = None
    ) -> PreparedWorkload:
        return prepare_workload(workload, seed=seed, input_path=input_path, precision=precision)

    def golden(self, prepared: PreparedWorkload) -> Golden:
        """
        Raises:
            WorkloadError: If the golden output is not finite
        """
        output, trace = prepared.run(None, self.settings.cache)
        if not output.is_finite():
            raise WorkloadError(f"Golden run of {prepared.name} produced non-finite output")
        return output, trace

    # ------------------------------------------------------------------
    # Stages
    # ------------------------------------------------------------------

    def profile(
        self,
        prepared: PreparedWorkload,
        num_bits: Optional[int] = None,
        jobs: Optional[int] = None,
        out_prefix: Optional[PathLike] = None
    ) -> AccLossMatrices:
        """
        Run the fault-injection campaign, optionally saving the matrices

        Args:
            prepared: Workload bound to its inputs
            num_bits: Bits to profile (default: the whole mantissa)
            jobs: Parallel workers (default: settings.jobs)
            out_prefix: Write <prefix>.s0.csv / .s1.csv / .meta.json when given
        """
        logger.info("=" * 70)
        logger.info(f"PROFILING {prepared.name}")
        logger.info("=" * 70)
        profiler = FaultInjectionProfiler(jobs=jobs or self.settings.jobs, cache_config=self.settings.cache)
        matrices = profiler.profile(prepared, num_bits)
        self.runs_executed += profiler.runs_executed
        if out_prefix is not None:
            matrices.save(out_prefix)
        return matrices

    def plan(
        self,
        config: PolicyConfig,
        matrices: Optional[AccLossMatrices] = None,
        out: Optional[PathLike] = None
    ) -> OmissionSchedule:
        schedule = plan(config, matrices)
        if out is not None:
            schedule.save(out)
        return schedule

    def replay(
        self,
        prepared: PreparedWorkload,
        schedule: OmissionSchedule,
        golden: Optional[Golden] = None,
        thresholds: Sequence[float] = DEFAULT_TARGETS
    ) -> RunReport:
        """
        Run a workload under a schedule and measure accuracy and energy

        Args:
            prepared: Workload bound to its inputs (possibly not the profiled ones)
            schedule: Per-call omitted bits
            golden: Precomputed golden run of the same prepared workload
            thresholds: Error histogram thresholds stored in the report

        Raises:
            ScheduleMismatchError: If the schedule length differs from the workload's call count
        """
        golden_output, golden_trace = golden or self.golden(prepared)
        if schedule.num_calls != golden_trace.num_calls:
            raise ScheduleMismatchError(
                f"Schedule covers {schedule.num_calls} calls but {prepared.name} made "
                f"{golden_trace.num_calls}; it was planned for a different input"
            )
        if schedule.static_fns and schedule.static_fns != golden_trace.static_functions:
            logger.warning("Schedule static functions differ from the replayed call sequence")
        planned_for = schedule.provenance.workload.get('inputs_hash')
        if planned_for and planned_for != prepared.fingerprint()['inputs_hash']:
            logger.info("Replaying a schedule profiled on a different input")

        output, trace = prepared.run(schedule.to_transformer(), self.settings.cache)
        if not trace.same_counts(golden_trace):
            logger.warning("Instruction counts differ between golden and approximate runs")

        accuracy = mean_relative_error(output, golden_output)
        energy = energy_of_trace(trace, schedule, self.settings.epi, self.settings.energy_scaling)
        calls = [
            CallRecord(
                call=call.index,
                static_fn=call.static_fn,
                label=call.label,
                omitted=schedule.omitted[call.index],
                energy_nj=energy.per_call[call.index],
            )
            for call in trace.calls
        ]
        report = RunReport(
            workload=prepared.fingerprint(),
            schedule=schedule,
            accuracy=AccuracyBlock.from_summary(accuracy, list(thresholds)),
            energy=energy,
            calls=calls,
            config=self.settings.model_dump(mode='json', include={'cache', 'epi', 'energy_scaling'}),
            cache_hit_rates=memory_hit_rates(trace),
        )
        logger.info(
            f"{report.name}: MRE {accuracy.mre:.6g}, energy savings {energy.savings:.4%}, "
            f"mean omitted {schedule.mean_omitted:.2f} bits"
        )
        return report

    def run(
        self,
        workload: str,
        schedule_path: PathLike,
        input_path: Optional[PathLike] = None,
        seed: int = RANDOM_STATE,
        precision: Optional[str] = None,
        out: Optional[PathLike] = None
    ) -> RunReport:
        schedule = OmissionSchedule.load(schedule_path)
        prepared = self.prepare(workload, input_path, seed, precision)
        report = self.replay(prepared, schedule)
        if out is not None:
            report.save(out)
            logger.info(f"Run report saved to {out}")
        return report

    # ------------------------------------------------------------------
    # Sweeps and reports
    # ------------------------------------------------------------------

    @staticmethod
    def _sweep_configs(
        policies: Sequence[str],
        targets: Sequence[float],
        fractions: Optional[Sequence[float]]
    ) -> List[PolicyConfig]:
        kinds = [PolicyKind(p) for p in policies]
        if fractions and PolicyKind.SPS not in kinds:
            kinds.append(PolicyKind.SPS)
        configs = []
        for kind in kinds:
            if kind is PolicyKind.SPS:
                configs += [PolicyConfig(kind=kind, fraction=f) for f in (fractions or DEFAULT_SPS_FRACTIONS)]
            else:
                configs += [PolicyConfig(kind=kind, target=t) for t in targets]
        return configs

    def sweep(
        self,
        workload: str,
        input_path: Optional[PathLike] = None,
        profile_input: Optional[PathLike] = None,
        seed: int = RANDOM_STATE,
        num_bits: Optional[int] = None,
        targets: Sequence[float] = DEFAULT_TARGETS,
        policies: Sequence[str] = DEFAULT_SWEEP_POLICIES,
        fractions: Optional[Sequence[float]] = None,
        jobs: Optional[int] = None,
        precision: Optional[str] = None,
        out: Optional[PathLike] = None
    ) -> pd.DataFrame:
        """
        Profile once, then plan and replay every (policy, bound) combination

        Args:
            workload: Registry name
            input_path: Input the schedules are replayed on
            profile_input: Input profiled to build the schedules (default: input_path)
            seed: Seed for embedded inputs
            num_bits: Bits to profile
            targets: Target accuracy losses for dps/dps+/sps+
            policies: Policies to evaluate
            fractions: SPS fractions (adds sps rows)
            jobs: Parallel profiling workers
            precision: Precision override
            out: Write the table as CSV when given

        Returns:
            One row per (policy, target or fraction)
        """
        logger.info("=" * 70)
        logger.info(f"SWEEP {workload}")
        logger.info("=" * 70)
        self.setup_mlflow()

        configs = self._sweep_configs(policies, targets, fractions)
        replayed = self.prepare(workload, input_path, seed, precision)
        profiled = replayed if profile_input is None else self.prepare(workload, profile_input, seed, precision)
        matrices = self.profile(profiled, num_bits, jobs)
        golden = self.golden(replayed)

        rows = []
        for config in configs:
            schedule = self.plan(config, matrices)
            report = self.replay(replayed, schedule, golden=golden, thresholds=targets)
            row = SweepRow(
                workload=workload,
                seed=seed,
                input=str(input_path) if input_path is not None else None,
                profile_input=str(profile_input) if profile_input is not None else None,
                policy=config.kind.value,
                target=config.target,
                fraction=config.fraction,
                mre=report.accuracy.mre,
                max_error=report.accuracy.max_error,
                energy_savings=report.energy.savings,
                savings_upper_bound=report.energy.savings_upper_bound(),
                mean_omitted_bits=schedule.mean_omitted,
                energy_nj=report.energy.total,
                baseline_energy_nj=report.energy.baseline,
            )
            rows.append(row.model_dump())
            if self.use_mlflow:
                self._log_mlflow(row)

        table = pd.DataFrame(rows, columns=list(SweepRow.model_fields))
        self._check_trend(table)
        if out is not None:
            save_table(table, out)
        return table

    def _log_mlflow(self, row: SweepRow) -> None:
        bound = row.fraction if row.target is None else row.target
        with mlflow.start_run(run_name=f"{row.workload}_{row.policy}_{bound:g}"):
            mlflow.log_param("workload", row.workload)
            mlflow.log_param("policy", row.policy)
            mlflow.log_param("target", row.target)
            mlflow.log_param("fraction", row.fraction)
            mlflow.log_param("seed", row.seed)
            mlflow.log_metric("mre", row.mre)
            mlflow.log_metric("energy_savings", row.energy_savings)
            mlflow.log_metric("mean_omitted_bits", row.mean_omitted_bits)

    @staticmethod
    def _check_trend(table: pd.DataFrame) -> None:
        dps = table[table['policy'] == PolicyKind.DPS.value].sort_values('target')
        if len(dps) > 1 and (np.diff(dps['mre'].to_numpy()) < 0).any():
            logger.warning("DPS accuracy loss is not monotone in the target on this input")

    def report(
        self,
        run_reports: Sequence[PathLike],
        out_dir: PathLike,
        matrices_prefix: Optional[PathLike] = None,
        thresholds: Optional[Sequence[float]] = None,
        artifact_format: str = 'csv'
    ) -> Dict[str, Path]:
        reports = [RunReport.load(p) for p in run_reports]
        matrices = AccLossMatrices.load(matrices_prefix) if matrices_prefix is not None else None
        return ReportBuilder(Path(out_dir), artifact_format).build(reports, matrices, thresholds)
