# raagtool/config.py

import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

VERSION = "1.0.0"

# Guards (desk scale; exceeding them is an error, never silent truncation)
DEFAULT_GUARD_DIM = int(os.getenv("RAAG_GUARD_DIM", str(2 ** 24)))
SUPPORT_GUARD = int(os.getenv("RAAG_SUPPORT_GUARD", "5000000"))
RECURSION_GUARD = 200_000

# Worker count for seed / grid parallelism
DEFAULT_THREADS = max(1, int(os.getenv("RAAG_THREADS", "1")))

# Result cache location
if os.getenv("RAAG_CACHE_DIR"):
    CACHE_PATH = Path(os.getenv("RAAG_CACHE_DIR")) / "results.db"
else:
    CACHE_PATH = Path(__file__).parent / "results.db"

# Iterative norm estimation
POWER_TOL = 1e-10
POWER_MAXITER = 10_000
MF_TOL = 1e-8
MF_MAXITER = 2_000
STABLE_TOL = 1e-6
DENSE_NORM_LIMIT = 800
# Above this dimension only probe estimates are attempted
ARPACK_DIM_LIMIT = 1_000_000

# Functional calculus
HERMITIAN_TOL = 1e-10
CIRCLE_TOL = 1e-9

# Random model
DEFAULT_SEED = 20240101

# Largest dense block a composed matrix-free operator may carry
BLOCK_GUARD = 4096

# Toeplitz limit
DEFAULT_LIMIT_DEPTH = 2

# Spectral
QUAD_EPSABS = 1e-10
THRESHOLD_GRID_STEP = 1e-3


def guard_dim(override: int = None) -> int:
    """Resolve the dimension guard for one call"""
    return DEFAULT_GUARD_DIM if override is None else int(override)


def support_guard(override: int = None) -> int:
    """Resolve the support-size guard for one call"""
    return SUPPORT_GUARD if override is None else int(override)
