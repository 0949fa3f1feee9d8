"""
Omission-schedule planners and schedule types
"""

from .planners import plan, plan_dps, plan_dps_plus, plan_sps, plan_sps_plus, tolerated_bits
from .schedule import OmissionSchedule, PolicyConfig, PolicyKind, ScheduleProvenance

__all__ = [
    'OmissionSchedule', 'PolicyConfig', 'PolicyKind', 'ScheduleProvenance',
    'plan', 'plan_dps', 'plan_dps_plus', 'plan_sps', 'plan_sps_plus', 'tolerated_bits'
]
