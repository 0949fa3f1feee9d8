"""
Simulation module for the data cache hierarchy
"""

from .cache_simulator import CATEGORY_ORDER, CacheConfig, CacheSimulator, OperandCategory

__all__ = ['CATEGORY_ORDER', 'CacheConfig', 'CacheSimulator', 'OperandCategory']
