"""
Numerical Thresholds Configuration

Centralized tolerances, guards and calibration margins used by the
classifiers, monitors and probes.
"""

# Criticality trichotomy: H compared with 1 inside this band
CRITICALITY_BAND = 1e-9

# Overflow guard for e^{α|z|²}
MAX_AMPLITUDE = 20.0
MAX_EXPONENT = 700.0        # exp(709) overflows float64

# Series switch for (e^x - 1 - x): below this |x| the Taylor tail is used
EXPM1_MINUS_X_SERIES_CUTOFF = 1e-2

# Existential constants are replaced by observed max * margin
CALIBRATION_MARGIN = 1.05

# Rearrangement checks
HARDY_LITTLEWOOD_SLACK = 1e-12
POLYA_SZEGO_TOLERANCE = 0.05
RADIAL_SYMMETRY_TOLERANCE = 1e-8

# Trajectory monitors
LOCALIZED_MASS_SLACK = 1e-8
COUPLED_BOUND_SLACK = 1e-6
BLOWUP_GRADIENT = 1e3

# Moser-Trudinger divergence heuristic
MT_DIVERGENCE_FACTOR = 10.0

# Picard oracle
PICARD_DIFFERENCE_FLOOR = 1e-11   # relative to ||u0||_{H^1}; below it iteration has converged
PICARD_MAX_T = 0.05
