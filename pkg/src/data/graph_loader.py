"""
Graph loading module for the PageRank workload
Handles loading of edge-list files with proper error handling

Format: whitespace-separated "src dst" pairs, 0-based vertex ids, '#' comments.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from ..utils.exceptions import WorkloadInputError
from ..utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class Graph:
    """
    Directed graph as parallel edge arrays

    Attributes:
        num_vertices: Vertex count (max id + 1 for loaded files)
        src: Edge sources
        dst: Edge destinations
    """

    num_vertices: int
    src: np.ndarray
    dst: np.ndarray

    @property
    def num_edges(self) -> int:
        return int(self.src.size)

    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.num_vertices)

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.num_vertices)

    def incoming_sources(self) -> np.ndarray:
        """Edge sources sorted by destination (stable), i.e. the pull order"""
        order = np.lexsort((self.src, self.dst))
        return self.src[order]

    @classmethod
    def from_edges(cls, src, dst, num_vertices: Optional[int] = None) -> "Graph":
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if num_vertices is None:
            num_vertices = int(max(src.max(initial=-1), dst.max(initial=-1)) + 1)
        return cls(num_vertices=int(num_vertices), src=src, dst=dst)


class EdgeListLoader:
    """
    Loader for edge-list graph files
    """

    def __init__(self, data_path: Path):
        """
        Initialize EdgeListLoader

        Args:
            data_path: Path to the edge-list file
        """
        self.data_path = Path(data_path)
        self.df: Optional[pd.DataFrame] = None

    def load_data(self) -> pd.DataFrame:
        """
        Load and validate the edge list

        Returns:
            DataFrame with integer 'src' and 'dst' columns, self loops and
            duplicate edges removed

        Raises:
            FileNotFoundError: If the file doesn't exist
            WorkloadInputError: If the file is empty or malformed
        """
        logger.info(f"Loading edge list from: {self.data_path}")

        if not self.data_path.exists():
            raise FileNotFoundError(f"Edge list not found: {self.data_path}")

        try:
            raw = pd.read_csv(
                self.data_path, sep=r"\s+", comment="#", header=None, dtype=str, engine="python"
            )
        except pd.errors.EmptyDataError as e:
            raise WorkloadInputError(f"Empty edge list: {self.data_path}") from e
        except pd.errors.ParserError as e:
            raise WorkloadInputError(f"Malformed edge list {self.data_path}: {e}") from e

        if raw.shape[1] != 2:
            raise WorkloadInputError(
                f"Expected 2 columns (src dst) in {self.data_path}, found {raw.shape[1]}"
            )

        raw.columns = ['src', 'dst']
        if raw.isnull().any().any():
            raise WorkloadInputError(f"Incomplete edge in {self.data_path}")

        edges = raw.apply(pd.to_numeric, errors='coerce')
        if edges.isnull().any().any() or (edges % 1 != 0).any().any():
            raise WorkloadInputError(f"Non-integer vertex id in {self.data_path}")
        edges = edges.astype(np.int64)
        if (edges < 0).any().any():
            raise WorkloadInputError(f"Negative vertex id in {self.data_path}")

        n_raw = len(edges)
        edges = edges[edges['src'] != edges['dst']].drop_duplicates().reset_index(drop=True)
        if len(edges) < n_raw:
            logger.warning(f"Dropped {n_raw - len(edges)} self loops / duplicate edges")
        if edges.empty:
            raise WorkloadInputError(f"No usable edges in {self.data_path}")

        self.df = edges
        logger.info(f"Edge list loaded: {len(edges)} edges")
        return self.df

    def load_graph(self) -> Graph:
        """Load the file and build a Graph"""
        df = self.df if self.df is not None else self.load_data()
        return Graph.from_edges(df['src'].to_numpy(), df['dst'].to_numpy())

