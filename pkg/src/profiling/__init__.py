"""
Offline fault-injection profiling
"""

from .acc_loss import AccLossMatrices, matrix_paths
from .profiler import FaultInjectionProfiler, ProfilePartial, fault_loss, merge_results

__all__ = ['AccLossMatrices', 'FaultInjectionProfiler', 'ProfilePartial', 'fault_loss', 'matrix_paths', 'merge_results']
