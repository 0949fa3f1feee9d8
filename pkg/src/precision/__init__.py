"""
Precision module for mantissa truncation and fault injection
"""

from .fpbits import (
    DOUBLE,
    SINGLE,
    FaultPolarity,
    MantissaFault,
    PrecisionFormat,
    PrecisionKind,
    inject_fault,
    is_result_valid,
    truncate_mantissa,
)

__all__ = [
    'DOUBLE', 'SINGLE', 'FaultPolarity', 'MantissaFault', 'PrecisionFormat',
    'PrecisionKind', 'inject_fault', 'is_result_valid', 'truncate_mantissa'
]
