"""
Toolkit Settings and Configuration

Numerical defaults shared by the library and the CLI. Environment overrides
are read once from the process environment (and a local .env file, if any).
"""

import os

from dotenv import load_dotenv

load_dotenv()

# Output & logging
DEFAULT_OUT_DIR = os.getenv("WNLS_OUT_DIR", "out")
LOG_LEVEL = os.getenv("WNLS_LOG_LEVEL", "INFO").upper()
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

# Grid defaults
DEFAULT_GRID_POINTS = 128
DEFAULT_HALF_WIDTH = 10.0
MIN_GRID_POINTS = 8

# Physics & initial data
DEFAULT_B = 0.5
DEFAULT_AMPLITUDE = 0.5
DEFAULT_WIDTH = 1.0

# Time stepping
DEFAULT_DT = 1e-3
DEFAULT_T_FINAL = 1.0
DEFAULT_SNAPSHOT_STRIDE = 100
DEFAULT_PICARD_ITERS = 6
PROGRESS_EVERY = 250        # steps between INFO progress lines

# Holder seminorm estimator
HOLDER_WINDOW = 8           # Chebyshev radius (cells) of the exhaustive pair window
HOLDER_FAR_PAIRS_PER_N = 10 # far pairs sampled = 10 * n
HOLDER_SEED = 20240917

# Randomized probes
DEFAULT_SEED = 12345
STRICHARTZ_TIME_NODES = 33
STRICHARTZ_BAND_SIGMA = 2.0  # Fourier-space envelope width of random data
DEFAULT_ENSEMBLE_SIZE = 32
DEFAULT_PROBE_T = 1.0

# Localized-mass radii S, S'
DEFAULT_LOCALIZED_S = 2.0
DEFAULT_LOCALIZED_S_PRIME = 4.0

# Snapshot files
SNAPSHOT_MAGIC = b"SNLS"
SNAPSHOT_VERSION = 1

# Moser-Trudinger sweep
MT_RADIAL_N_PARAMS = [2, 4, 16, 64, 256, 1024, 4096, 16384, 65536]
MT_ALPHA_FACTORS = [0.5, 0.8, 1.2, 1.5]
MOSER_SUBSAMPLES = 4        # per-axis subsamples used to mollify grid profiles

# Difference-bound calibration sweep
CALIBRATION_RADII = 201
CALIBRATION_ANGLES = 49
CALIBRATION_MAX_AMPLITUDE = 2.0
