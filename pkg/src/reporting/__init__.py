"""
Run report schemas and plot-ready artifact builder
"""

from .report_builder import (
    ReportBuilder,
    default_thresholds,
    histogram_frame,
    omitted_bits_frame,
    summary_frame
)
from .schemas import AccuracyBlock, CallRecord, RunReport, SweepRow

__all__ = [
    'AccuracyBlock', 'CallRecord', 'ReportBuilder', 'RunReport', 'SweepRow',
    'default_thresholds', 'histogram_frame', 'omitted_bits_frame', 'summary_frame'
]
