"""
Command-line entry point of the DPS workbench
Profiles workloads, plans omission schedules, replays them and emits reports

Exit codes: 0 success, 1 usage error, 2 data error.

Examples:
    python scripts/dps_workbench.py profile --workload pagerank --out-prefix reports/profiles/pagerank
    python scripts/dps_workbench.py plan --matrices reports/profiles/pagerank --policy dps --target 0.1 \
        --out reports/schedules/pagerank_dps_0.1.json
    python scripts/dps_workbench.py run --workload pagerank --schedule reports/schedules/pagerank_dps_0.1.json \
        --out reports/runs/pagerank_dps_0.1.json
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

# Add project root to path
project_root = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(project_root))

import pandas as pd  # noqa: E402

from pipelines.dps_pipeline import DPSPipeline  # noqa: E402
from src.kernels.registry import list_workloads  # noqa: E402
from src.policies.schedule import PolicyConfig, PolicyKind  # noqa: E402
from src.profiling.acc_loss import AccLossMatrices  # noqa: E402
from src.utils.config import (  # noqa: E402
    PAGERANK_SAMPLE_GRAPH,
    DEFAULT_SWEEP_POLICIES,
    DEFAULT_TARGETS,
    POLICY_NAMES,
    RANDOM_STATE
)
from src.utils.exceptions import WorkbenchError  # noqa: E402
from src.utils.logger import configure_logging, get_logger  # noqa: E402
from src.utils.settings import load_settings  # noqa: E402

logger = get_logger("scripts.dps_workbench")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class WorkbenchArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _policy_list(text: str) -> List[str]:
    policies = [p.strip() for p in text.split(',') if p.strip()]
    unknown = [p for p in policies if p not in POLICY_NAMES]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown policies {unknown}; choose from {POLICY_NAMES}")
    return policies


def _add_workload_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--workload', required=True, help='Workload name (see the list command)')
    parser.add_argument('--input', type=Path, default=None, help='External input file (pagerank edge list)')
    parser.add_argument('--seed', type=int, default=RANDOM_STATE, help=f'Seed of embedded inputs (default: {RANDOM_STATE})')
    parser.add_argument('--precision', choices=['single', 'double'], default=None,
                        help="Precision override (default: the workload's own)")


def build_parser() -> WorkbenchArgumentParser:
    parser = WorkbenchArgumentParser(description='Dynamic precision scaling workbench')
    parser.add_argument('--config', type=Path, default=None, help='YAML configuration file (config/params.yaml schema)')
    parser.add_argument('--log-level', default=None, help='Logging level (default: from settings)')
    parser.add_argument('--log-file', type=Path, default=None, help='Also log to this file')
    commands = parser.add_subparsers(dest='command', required=True)

    profile = commands.add_parser('profile', help='Run the fault-injection campaign')
    _add_workload_args(profile)
    profile.add_argument('--bits', type=int, default=None, help='Mantissa bits to profile (default: all)')
    profile.add_argument('--jobs', type=int, default=None, help='Parallel workers (default: from settings)')
    profile.add_argument('--out-prefix', type=Path, required=True, help='Writes <prefix>.s0.csv and <prefix>.s1.csv')

    plan = commands.add_parser('plan', help='Plan an omission schedule')
    plan.add_argument('--matrices', type=Path, required=True, help='Matrix prefix written by profile')
    plan.add_argument('--policy', choices=POLICY_NAMES, required=True)
    plan.add_argument('--target', type=float, default=None, help='Target accuracy loss (dps, dps+, sps+)')
    plan.add_argument('--fraction', type=float, default=None, help='Omitted mantissa fraction (sps)')
    plan.add_argument('--out', type=Path, required=True, help='Schedule JSON file')

    run = commands.add_parser('run', help='Replay a schedule and report accuracy and energy')
    _add_workload_args(run)
    run.add_argument('--schedule', type=Path, required=True, help='Schedule JSON file')
    run.add_argument('--out', type=Path, required=True, help='Run report JSON file')

    sweep = commands.add_parser('sweep', help='Profile once, then evaluate every policy and target')
    _add_workload_args(sweep)
    sweep.add_argument('--profile-input', type=Path, default=None,
                       help='Input to profile on (default: --input); schedules are replayed on --input')
    sweep.add_argument('--bits', type=int, default=None, help='Mantissa bits to profile (default: all)')
    sweep.add_argument('--targets', type=_float_list, default=list(DEFAULT_TARGETS),
                       help='Comma-separated target accuracy losses (default: 0.05,0.1,0.15,0.2)')
    sweep.add_argument('--policies', type=_policy_list, default=list(DEFAULT_SWEEP_POLICIES),
                       help='Comma-separated policies (default: dps,dps+,sps+)')
    sweep.add_argument('--fractions', type=_float_list, default=None, help='Comma-separated SPS fractions')
    sweep.add_argument('--jobs', type=int, default=None, help='Parallel profiling workers')
    sweep.add_argument('--mlflow', action='store_true', help='Track every row as an MLflow run')
    sweep.add_argument('--out', type=Path, required=True, help='Consolidated CSV')

    report = commands.add_parser('report', help='Emit plot-ready artifacts')
    report.add_argument('--run-reports', type=Path, nargs='*', default=[], help='Run report JSON files')
    report.add_argument('--matrices', type=Path, default=None, help='Matrix prefix for the loss heatmap')
    report.add_argument('--thresholds', type=_float_list, default=None,
                        help="Histogram thresholds (default: the reports' targets)")
    report.add_argument('--format', choices=['csv', 'json'], default='csv')
    report.add_argument('--out-dir', type=Path, required=True)

    commands.add_parser('list', help='List the built-in workloads')
    return parser


def _validate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.command == 'plan':
        if args.policy == PolicyKind.SPS.value and args.fraction is None:
            parser.error("plan --policy sps requires --fraction")
        if args.policy != PolicyKind.SPS.value and args.target is None:
            parser.error(f"plan --policy {args.policy} requires --target")
    targets = [args.target] if getattr(args, 'target', None) is not None else getattr(args, 'targets', [])
    if any(t < 0 for t in targets):
        parser.error("target accuracy losses must be >= 0")
    fractions = [args.fraction] if getattr(args, 'fraction', None) is not None else getattr(args, 'fractions', None)
    if any(not 0 <= f <= 1 for f in fractions or []):
        parser.error("SPS fractions must be in [0, 1]")
    if args.command == 'report' and not args.run_reports and args.matrices is None:
        parser.error("report needs --run-reports and/or --matrices")
    if getattr(args, 'jobs', None) is not None and args.jobs < 1:
        parser.error("--jobs must be >= 1")


def cmd_profile(pipeline: DPSPipeline, args: argparse.Namespace) -> int:
    prepared = pipeline.prepare(args.workload, args.input, args.seed, args.precision)
    matrices = pipeline.profile(prepared, args.bits, args.jobs, args.out_prefix)
    print(f"Profiled {matrices.num_calls} calls x {matrices.num_bits} bits "
          f"({matrices.experiments} runs) -> {args.out_prefix}.s0.csv, {args.out_prefix}.s1.csv")
    return EXIT_OK


def cmd_plan(pipeline: DPSPipeline, args: argparse.Namespace) -> int:
    matrices = AccLossMatrices.load(args.matrices)
    config = PolicyConfig(kind=args.policy, target=args.target, fraction=args.fraction)
    schedule = pipeline.plan(config, matrices, args.out)
    print(f"{config.label}: omitted bits {schedule.omitted} -> {args.out}")
    return EXIT_OK


def cmd_run(pipeline: DPSPipeline, args: argparse.Namespace) -> int:
    report = pipeline.run(args.workload, args.schedule, args.input, args.seed, args.precision, args.out)
    print(f"{report.name}: MRE {report.accuracy.mre:.6g}, energy savings {report.energy.savings:.4%} -> {args.out}")
    return EXIT_OK


def cmd_sweep(pipeline: DPSPipeline, args: argparse.Namespace) -> int:
    table = pipeline.sweep(
        args.workload,
        input_path=args.input,
        profile_input=args.profile_input,
        seed=args.seed,
        num_bits=args.bits,
        targets=args.targets,
        policies=args.policies,
        fractions=args.fractions,
        jobs=args.jobs,
        precision=args.precision,
        out=args.out,
    )
    print(table[['policy', 'target', 'fraction', 'mre', 'energy_savings', 'mean_omitted_bits']].to_string(index=False))
    return EXIT_OK


def cmd_report(pipeline: DPSPipeline, args: argparse.Namespace) -> int:
    written = pipeline.report(args.run_reports, args.out_dir, args.matrices, args.thresholds, args.format)
    for name, path in written.items():
        print(f"{name}: {path}")
    return EXIT_OK


def cmd_list(pipeline: DPSPipeline, args: argparse.Namespace) -> int:
    roster = pd.DataFrame([
        {
            'name': spec.name,
            'static_functions': ','.join(spec.static_functions),
            'precision': spec.precision,
            'input_file': spec.accepts_input_file,
            'sample_input': PAGERANK_SAMPLE_GRAPH.name if spec.name == 'pagerank' else '',
            'description': spec.description,
        }
        for spec in list_workloads()
    ])
    print(roster.to_string(index=False))
    return EXIT_OK


COMMANDS = {
    'profile': cmd_profile,
    'plan': cmd_plan,
    'run': cmd_run,
    'sweep': cmd_sweep,
    'report': cmd_report,
    'list': cmd_list,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main function of the workbench CLI

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(parser, args)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        configure_logging(args.log_level or 'INFO', args.log_file)
    except ValueError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        settings = load_settings(args.config)
        if args.log_level is None:
            configure_logging(settings.log_level, args.log_file)
        pipeline = DPSPipeline(settings, use_mlflow=getattr(args, 'mlflow', False))
        return COMMANDS[args.command](pipeline, args)
    except (WorkbenchError, FileNotFoundError, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
