"""
Plot-ready artifacts from run reports and accuracy-loss matrices
Emits data only: summary table, per-call omitted-bits series, error
histograms and the per-(call, bit) loss heatmap
"""

import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence

import numpy as np
import pandas as pd

from ..profiling.acc_loss import AccLossMatrices
from ..utils.config import CSV_FLOAT_FORMAT, CSV_NA_REP, DEFAULT_TARGETS
from ..utils.logger import get_logger
from .schemas import RunReport

logger = get_logger(__name__)

ArtifactFormat = Literal['csv', 'json']


def _to_builtin(value):
    # NumPy scalars left in object columns
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Not JSON serializable: {type(value).__name__}")


def summary_frame(reports: Sequence[RunReport]) -> pd.DataFrame:
    rows = []
    for report in reports:
        prov = report.schedule.provenance
        rows.append({
            'run': report.name,
            'workload': report.workload.get('workload'),
            'seed': report.workload.get('seed'),
            'policy': prov.policy.value,
            'target': prov.target,
            'fraction': prov.fraction,
            'mre': report.accuracy.mre,
            'max_error': report.accuracy.max_error,
            'energy_savings': report.energy.savings,
            'savings_upper_bound': report.energy.savings_upper_bound(),
            'mean_omitted_bits': report.schedule.mean_omitted,
        })
    return pd.DataFrame(rows)


def omitted_bits_frame(reports: Sequence[RunReport]) -> pd.DataFrame:
    """Long format: one row per (run, dynamic call)"""
    rows = []
    for report in reports:
        for record in report.calls:
            rows.append({'run': report.name, **record.model_dump()})
    return pd.DataFrame(rows, columns=['run', 'call', 'static_fn', 'label', 'omitted', 'energy_nj'])


def histogram_frame(reports: Sequence[RunReport], thresholds: Sequence[float]) -> pd.DataFrame:
    """Bucket fractions [0,t1), [t1,t2), ..., [tn,cap] per run"""
    edges = [float(t) for t in thresholds]
    labels = [f"lt_{edges[0]:g}"] if edges else []
    labels += [f"{lo:g}_{hi:g}" for lo, hi in zip(edges[:-1], edges[1:])]
    labels.append(f"ge_{edges[-1]:g}" if edges else "all")

    rows = []
    for report in reports:
        buckets = report.accuracy.summary().histogram(edges)
        rows.append({'run': report.name, **dict(zip(labels, buckets))})
    return pd.DataFrame(rows, columns=['run'] + labels)


def default_thresholds(reports: Sequence[RunReport]) -> List[float]:
    """Distinct targets of the reports (a zero target included), else the standard targets"""
    targets = {r.schedule.provenance.target for r in reports if r.schedule.provenance.target is not None}
    return sorted(targets) or list(DEFAULT_TARGETS)


class ReportBuilder:
    """
    Writes report artifacts to an output directory
    """

    def __init__(self, out_dir: Path, artifact_format: ArtifactFormat = 'csv'):
        """
        Initialize ReportBuilder

        Args:
            out_dir: Directory receiving the artifacts
            artifact_format: 'csv' or 'json'
        """
        if artifact_format not in ('csv', 'json'):
            raise ValueError(f"Unknown artifact format: {artifact_format}")
        self.out_dir = Path(out_dir)
        self.artifact_format = artifact_format

    def _write(self, frame: pd.DataFrame, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / f"{name}.{self.artifact_format}"
        if self.artifact_format == 'csv':
            frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep=CSV_NA_REP)
        else:
            records = frame.astype(object).where(frame.notna(), None).to_dict(orient='records')
            with open(path, 'w', encoding='utf-8') as fh:
                json.dump(records, fh, indent=2, default=_to_builtin)
        logger.info(f"Wrote {path}")
        return path

    def build(
        self,
        reports: Sequence[RunReport],
        matrices: Optional[AccLossMatrices] = None,
        thresholds: Optional[Sequence[float]] = None
    ) -> Dict[str, Path]:
        """
        Emit every artifact the inputs allow

        Args:
            reports: Run reports to summarise
            matrices: Optional matrices for the loss heatmap
            thresholds: Histogram thresholds (default: the reports' targets, else the standard targets)

        Returns:
            Artifact name -> path written
        """
        if thresholds is None:
            thresholds = default_thresholds(reports)

        written: Dict[str, Path] = {}
        if reports:
            written['summary'] = self._write(summary_frame(reports), 'summary')
            written['omitted_bits'] = self._write(omitted_bits_frame(reports), 'omitted_bits')
            written['error_histogram'] = self._write(histogram_frame(reports, thresholds), 'error_histogram')
        if matrices is not None:
            written['heatmap'] = self._write(matrices.heatmap(), 'heatmap')
        return written

