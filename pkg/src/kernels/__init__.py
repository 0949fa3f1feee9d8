"""
Built-in workloads with designated approximable functions
"""

from .base import Workload, WorkloadOutput, WorkloadSpec
from .registry import PreparedWorkload, get_workload, list_workloads, prepare_workload, run_workload

__all__ = [
    'Workload',
    'WorkloadOutput',
    'WorkloadSpec',
    'PreparedWorkload',
    'get_workload',
    'list_workloads',
    'prepare_workload',
    'run_workload',
]
