"""
Monitoring module for accuracy loss against the golden run
"""

from .accuracy_loss import AccuracySummary, error_distribution, mean_relative_error, relative_errors

__all__ = ['AccuracySummary', 'error_distribution', 'mean_relative_error', 'relative_errors']
