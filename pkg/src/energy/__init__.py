"""
EPI-based energy accounting
"""

from .energy_model import EnergyReport, EpiTable, ScalingModel, energy_of_trace, epi_scaled, width_ratio

__all__ = ['EnergyReport', 'EpiTable', 'ScalingModel', 'energy_of_trace', 'epi_scaled', 'width_ratio']
