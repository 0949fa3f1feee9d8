"""
Configuration file for the DPS workbench
Centralizes project paths, defaults and model constants
"""

from pathlib import Path
from typing import Dict, List

# Project root directory
PROJECT_ROOT = Path(__file__).resolve().parents[2]

# Data directories
DATA_DIR = PROJECT_ROOT / "data"
GRAPHS_DIR = DATA_DIR / "graphs"

# MLflow tracking
MLFLOW_TRACKING_URI = "file:" + str(PROJECT_ROOT / "mlruns")
MLFLOW_EXPERIMENT_NAME = "dynamic_precision_scaling"

# Bundled input files
PAGERANK_SAMPLE_GRAPH = GRAPHS_DIR / "ring_chords_48.edges"

# Random seed for reproducibility
RANDOM_STATE = 42

# Energy per instruction (nJ) per operand-source category, measured values
EPI_DEFAULTS_NJ: Dict[str, float] = {
    'rf': 0.45,
    'l1': 0.88,
    'l2': 7.72,
    'mem_rd': 52.14,
    'mem_wr': 62.14,
}

# EPI scaling model for approximable instructions
DEFAULT_ENERGY_SCALING = 'total_width'

# Data cache hierarchy (capacities are the evaluated core's; the rest is declared)
CACHE_L1_SIZE = 32 * 1024
CACHE_L2_SIZE = 512 * 1024
CACHE_LINE_SIZE = 64
CACHE_L1_ASSOC = 8
CACHE_L2_ASSOC = 16

# Simulated memory layout
MEMORY_BASE_ADDRESS = 0x10000

# Policies and sweeps
POLICY_NAMES: List[str] = ['dps', 'dps+', 'sps', 'sps+']
DEFAULT_SWEEP_POLICIES: List[str] = ['dps', 'dps+', 'sps+']
DEFAULT_TARGETS: List[float] = [0.05, 0.1, 0.15, 0.2]
DEFAULT_SPS_FRACTIONS: List[float] = [0.05, 0.25, 0.5, 0.75]

# Per-point relative error cap ("totally inaccurate result")
RELATIVE_ERROR_CAP = 1.0

# Numeric formatting of CSV artifacts (lossless, well above 9 significant digits)
CSV_FLOAT_FORMAT = '%.17g'
CSV_NA_REP = 'NA'

# Desk-scale workload sizes
BLACKSCHOLES_OPTIONS = 64
HOTSPOT_GRID = 16
HOTSPOT_ITERATIONS = 8
PAGERANK_VERTICES = 32
PAGERANK_ITERATIONS = 10
PAGERANK_DAMPING = 0.85
PARTICLEFILTER_FRAMES = 8
PARTICLEFILTER_PARTICLES = 32
SYNTHETIC_CALLS = 16
