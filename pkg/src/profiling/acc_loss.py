"""
Accuracy-loss matrices
Per (dynamic call, mantissa bit) accuracy loss of a stuck-at-0 and a
stuck-at-1 fault, with CSV persistence

Invalid entries (the faulty run produced Inf/NaN) are held as NaN in memory
and written as NA. A Valid entry is a finite non-negative number; anything
else read from disk is treated as Invalid.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import joblib
import numpy as np
import pandas as pd

from ..precision.fpbits import FaultPolarity, PrecisionFormat
from ..utils.config import CSV_FLOAT_FORMAT, CSV_NA_REP, RELATIVE_ERROR_CAP
from ..utils.exceptions import ConsistencyError
from ..utils.logger import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]

ID_COLUMNS = ['call', 'static_fn']


def bit_columns(num_bits: int) -> List[str]:
    return [f"bit{b}" for b in range(num_bits)]


def matrix_paths(prefix: PathLike) -> Dict[str, Path]:
    """Files written for a matrix prefix: one CSV per polarity plus a metadata sidecar"""
    prefix = str(prefix)
    return {
        FaultPolarity.STUCK_AT_0.value: Path(f"{prefix}.s0.csv"),
        FaultPolarity.STUCK_AT_1.value: Path(f"{prefix}.s1.csv"),
        'meta': Path(f"{prefix}.meta.json"),
    }


def _sanitize(matrix: np.ndarray) -> np.ndarray:
    m = np.array(matrix, dtype=np.float64, order="C", copy=True)
    m[~np.isfinite(m) | (m < 0)] = np.nan
    return m


@dataclass
class AccLossMatrices:
    """
    AccLossS0 / AccLossS1 of a profiling campaign

    Attributes:
        s0: float64 [num_calls, num_bits], NaN marks Invalid
        s1: float64 [num_calls, num_bits], NaN marks Invalid
        static_fns: Static function of every dynamic call (execution order)
        precision: Precision format the campaign ran in
        fingerprint: Workload/input/seed identity of the campaign
        experiments: Number of faulty executions behind the matrices
    """

    s0: np.ndarray
    s1: np.ndarray
    static_fns: List[str]
    precision: str = "single"
    fingerprint: Dict[str, Any] = field(default_factory=dict)
    experiments: int = 0

    def __post_init__(self):
        self.s0 = _sanitize(self.s0)
        self.s1 = _sanitize(self.s1)
        self.static_fns = [str(fn) for fn in self.static_fns]
        if self.s0.ndim != 2 or self.s0.shape != self.s1.shape:
            raise ConsistencyError(
                f"AccLossS0 {self.s0.shape} and AccLossS1 {self.s1.shape} must be 2-D with the same shape"
            )
        if self.s0.shape[0] != len(self.static_fns):
            raise ConsistencyError(
                f"{self.s0.shape[0]} matrix rows but {len(self.static_fns)} static function labels"
            )
        fmt = PrecisionFormat.from_name(self.precision)
        if self.num_bits > fmt.mantissa_bits:
            raise ConsistencyError(
                f"{self.num_bits} profiled bits exceed the {fmt.mantissa_bits}-bit {fmt.name} mantissa"
            )

    @property
    def num_calls(self) -> int:
        return int(self.s0.shape[0])

    @property
    def num_bits(self) -> int:
        return int(self.s0.shape[1])

    def valid(self) -> np.ndarray:
        """True where both polarities produced a finite output"""
        return ~(np.isnan(self.s0) | np.isnan(self.s1))

    def max_loss(self) -> np.ndarray:
        """max(s0, s1) per entry, NaN where either polarity is Invalid"""
        return np.maximum(self.s0, self.s1)

    def calls_of(self, static_fn: str) -> List[int]:
        return [i for i, fn in enumerate(self.static_fns) if fn == static_fn]

    def content_hash(self) -> str:
        """Hash of the matrix contents, stamped into schedule provenance"""
        arrays = [np.ascontiguousarray(m, dtype="<f8").tobytes() for m in (self.s0, self.s1)]
        return joblib.hash((arrays, self.static_fns, self.precision))

    def heatmap(self) -> pd.DataFrame:
        """Worst-polarity loss per (call, bit), capped; Invalid stays NaN"""
        frame = pd.DataFrame(
            np.minimum(self.max_loss(), RELATIVE_ERROR_CAP), columns=bit_columns(self.num_bits)
        )
        frame.insert(0, 'static_fn', self.static_fns)
        frame.insert(0, 'call', np.arange(self.num_calls))
        return frame

    def to_frame(self, polarity: Union[str, FaultPolarity]) -> pd.DataFrame:
        polarity = FaultPolarity(polarity)
        matrix = self.s0 if polarity is FaultPolarity.STUCK_AT_0 else self.s1
        frame = pd.DataFrame(matrix, columns=bit_columns(self.num_bits))
        frame.insert(0, 'static_fn', self.static_fns)
        frame.insert(0, 'call', np.arange(self.num_calls))
        return frame

    def metadata(self) -> Dict[str, Any]:
        return {
            'num_calls': self.num_calls,
            'num_bits': self.num_bits,
            'precision': self.precision,
            'experiments': self.experiments,
            'relative_error_cap': RELATIVE_ERROR_CAP,
            'fingerprint': self.fingerprint,
        }

    def save(self, prefix: PathLike) -> Dict[str, Path]:
        """
        Write <prefix>.s0.csv, <prefix>.s1.csv and <prefix>.meta.json

        Returns:
            Paths written, keyed by 's0', 's1' and 'meta'
        """
        paths = matrix_paths(prefix)
        paths['meta'].parent.mkdir(parents=True, exist_ok=True)
        for polarity in FaultPolarity:
            self.to_frame(polarity).to_csv(
                paths[polarity.value], index=False, float_format=CSV_FLOAT_FORMAT, na_rep=CSV_NA_REP
            )
        with open(paths['meta'], 'w', encoding='utf-8') as fh:
            json.dump(self.metadata(), fh, indent=2, sort_keys=True)
        logger.info(f"Matrices saved to {paths['s0']} and {paths['s1']}")
        return paths

    @classmethod
    def load(cls, prefix: PathLike) -> "AccLossMatrices":
        """
        Read matrices written by save(); the metadata sidecar is optional

        Raises:
            FileNotFoundError: If a polarity file is missing
            ConsistencyError: If the files are malformed or disagree
        """
        paths = matrix_paths(prefix)
        s0, fns0 = _read_matrix(paths['s0'])
        s1, fns1 = _read_matrix(paths['s1'])
        if fns0 != fns1 or s0.shape != s1.shape:
            raise ConsistencyError(f"{paths['s0']} and {paths['s1']} describe different campaigns")

        meta: Dict[str, Any] = {}
        if paths['meta'].exists():
            with open(paths['meta'], 'r', encoding='utf-8') as fh:
                meta = json.load(fh)
        else:
            logger.warning(f"No metadata sidecar at {paths['meta']}; assuming single precision")

        return cls(
            s0=s0,
            s1=s1,
            static_fns=fns0,
            precision=meta.get('precision', 'single'),
            fingerprint=meta.get('fingerprint', {}),
            experiments=int(meta.get('experiments', 0)),
        )


def _read_matrix(path: Path) -> Tuple[np.ndarray, List[str]]:
    if not path.exists():
        raise FileNotFoundError(f"Matrix file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype={'static_fn': str}, na_values=[CSV_NA_REP], keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConsistencyError(f"Malformed matrix file {path}: {e}") from e

    columns = list(frame.columns)
    if columns[:2] != ID_COLUMNS or columns[2:] != bit_columns(len(columns) - 2):
        raise ConsistencyError(f"Unexpected header in {path}: expected call,static_fn,bit0..bitN")
    calls = pd.to_numeric(frame['call'], errors='coerce')
    if calls.isna().any() or not np.array_equal(calls.to_numpy(), np.arange(len(frame))):
        raise ConsistencyError(f"Rows of {path} are not calls 0..{len(frame) - 1} in order")

    values = frame[columns[2:]].apply(pd.to_numeric, errors='coerce')
    return values.to_numpy(dtype=np.float64), frame['static_fn'].tolist()
