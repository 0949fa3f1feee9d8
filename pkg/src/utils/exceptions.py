"""
Exception hierarchy for the DPS workbench

Argument errors (out-of-range bit counts, bad fractions, vector length
mismatches) are plain ValueError. Everything raised because of the data a
command was fed derives from WorkbenchError, which the CLI maps to exit code 2.
"""


class WorkbenchError(Exception):
    """Base class for data and consistency errors"""


class TraceUsageError(WorkbenchError):
    """Dynamic-call boundaries were used incorrectly (nesting, unclosed call)"""


class WorkloadInputError(WorkbenchError):
    """Unknown workload or malformed external input file"""


class WorkloadError(WorkbenchError):
    """The workload produced an unusable result (non-finite golden run)"""


class ConsistencyError(WorkbenchError):
    """Profiling results are inconsistent (overlapping keys, gaps, bad shapes)"""


class ScheduleMismatchError(WorkbenchError, ValueError):
    """An omission schedule does not fit the trace it is applied to"""
