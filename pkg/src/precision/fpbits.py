"""
Bit-exact IEEE-754 mantissa manipulation
Implements precision reduction by mantissa-bit omission and stuck-at fault injection

Bits are indexed from 0 at the least-significant mantissa bit. All functions
accept Python floats, NumPy scalars or arrays; scalar inputs return NumPy
scalars of the format's dtype, array inputs return arrays.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Union

import numpy as np

ArrayOrScalar = Union[float, np.floating, np.ndarray]


class PrecisionKind(str, Enum):
    SINGLE = "single"
    DOUBLE = "double"


@dataclass(frozen=True)
class PrecisionFormat:
    """
    Sign/exponent/mantissa layout of a binary floating-point format
    """

    kind: PrecisionKind
    mantissa_bits: int
    exponent_bits: int
    total_bits: int

    def __post_init__(self):
        if self.mantissa_bits + self.exponent_bits + 1 != self.total_bits:
            raise ValueError(
                f"Inconsistent layout: {self.mantissa_bits} + {self.exponent_bits} + 1 "
                f"!= {self.total_bits}"
            )

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float32 if self.kind is PrecisionKind.SINGLE else np.float64)

    @property
    def uint_dtype(self) -> np.dtype:
        return np.dtype(np.uint32 if self.kind is PrecisionKind.SINGLE else np.uint64)

    @property
    def name(self) -> str:
        return self.kind.value

    def cast(self, x: Any) -> ArrayOrScalar:
        """Round a value (or array) to this format"""
        arr = np.asarray(x, dtype=self.dtype)
        return arr[()] if arr.ndim == 0 else arr

    @classmethod
    def from_name(cls, name: Union[str, "PrecisionFormat"]) -> "PrecisionFormat":
        if isinstance(name, PrecisionFormat):
            return name
        try:
            kind = PrecisionKind(str(name).lower())
        except ValueError:
            raise ValueError(f"Unknown precision format: {name}")
        return SINGLE if kind is PrecisionKind.SINGLE else DOUBLE


SINGLE = PrecisionFormat(PrecisionKind.SINGLE, mantissa_bits=23, exponent_bits=8, total_bits=32)
DOUBLE = PrecisionFormat(PrecisionKind.DOUBLE, mantissa_bits=52, exponent_bits=11, total_bits=64)


class FaultPolarity(str, Enum):
    STUCK_AT_0 = "s0"
    STUCK_AT_1 = "s1"


@dataclass(frozen=True)
class MantissaFault:
    """
    A single mantissa bit forced to a fixed value
    """

    bit_index: int
    polarity: FaultPolarity

    def validate(self, fmt: PrecisionFormat) -> None:
        if not 0 <= self.bit_index < fmt.mantissa_bits:
            raise ValueError(
                f"Fault bit {self.bit_index} outside the {fmt.mantissa_bits}-bit "
                f"mantissa of {fmt.name} precision"
            )


def _as_bits(x: ArrayOrScalar, fmt: PrecisionFormat):
    values = np.array(x, dtype=fmt.dtype, copy=True)
    return values, values.view(fmt.uint_dtype)


def _restore(values: np.ndarray, new_bits: np.ndarray, fmt: PrecisionFormat) -> ArrayOrScalar:
    # Non-finite inputs pass through untouched
    out = np.where(np.isfinite(values), np.asarray(new_bits).view(fmt.dtype), values)
    return out[()] if out.ndim == 0 else out


def truncate_mantissa(x: ArrayOrScalar, fmt: PrecisionFormat, k: int) -> ArrayOrScalar:
    """
    Force the k least-significant mantissa bits to zero

    Sign and exponent are untouched, so |result| <= |x|. Subnormals are
    cleared like normals and no rounding takes place.

    Args:
        x: Value or array
        fmt: Precision format the value lives in
        k: Number of omitted bits, 0 <= k <= fmt.mantissa_bits

    Returns:
        Truncated value(s) in fmt's dtype

    Raises:
        ValueError: If k is out of range
    """
    k = int(k)
    if not 0 <= k <= fmt.mantissa_bits:
        raise ValueError(f"Omitted bit count {k} outside [0, {fmt.mantissa_bits}]")

    values, bits = _as_bits(x, fmt)
    if k == 0:
        return values[()] if values.ndim == 0 else values

    width = fmt.total_bits
    mask = fmt.uint_dtype.type(((1 << width) - 1) ^ ((1 << k) - 1))
    return _restore(values, bits & mask, fmt)


def inject_fault(x: ArrayOrScalar, fmt: PrecisionFormat, fault: MantissaFault) -> ArrayOrScalar:
    """
    Force one mantissa bit to 0 or 1 according to the fault polarity

    Args:
        x: Value or array
        fmt: Precision format the value lives in
        fault: Bit position and polarity

    Returns:
        Corrupted value(s) in fmt's dtype

    Raises:
        ValueError: If the fault bit lies outside the mantissa
    """
    fault.validate(fmt)
    values, bits = _as_bits(x, fmt)

    bit = fmt.uint_dtype.type(1 << fault.bit_index)
    if fault.polarity is FaultPolarity.STUCK_AT_1:
        new_bits = bits | bit
    else:
        new_bits = bits & ~bit
    return _restore(values, new_bits, fmt)


def is_result_valid(values: ArrayOrScalar) -> bool:
    """True iff every element is finite (no Inf, no NaN)"""
    return bool(np.all(np.isfinite(np.asarray(values, dtype=np.float64))))
