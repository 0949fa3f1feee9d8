"""
Tracing module: execution harness, transformers and call traces
"""

from .call_trace import CallTrace, DynamicCall
from .execution_context import ExecutionContext, TrackedBuffer
from .transformers import (
    FaultTransformer,
    IdentityTransformer,
    Transformer,
    TruncateTransformer,
    make_transformer,
)

__all__ = [
    'CallTrace', 'DynamicCall', 'ExecutionContext', 'TrackedBuffer',
    'FaultTransformer', 'IdentityTransformer', 'Transformer',
    'TruncateTransformer', 'make_transformer'
]
