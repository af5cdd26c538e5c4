# errors.py
"""
Exception hierarchy for the toolkit.

Every error raised on purpose derives from WnlsError so the CLI can map it to
an exit status. Messages always name the offending quantity.
"""

from __future__ import annotations


class WnlsError(Exception):
    """Base class for all toolkit errors."""
    category = "runtime_error"


class GridError(WnlsError, ValueError):
    """Raised for invalid grid parameters or mismatched grids."""
    category = "grid_error"


class ParameterError(WnlsError, ValueError):
    """Raised when a physical or numerical parameter is outside its domain."""
    category = "parameter_error"


class OverflowGuardError(WnlsError, ArithmeticError):
    """Raised when an amplitude would overflow e^{α|z|²}."""
    category = "overflow_guard"

    def __init__(self, amplitude: float, message: str):
        super().__init__(message)
        self.amplitude = amplitude


class EvolutionError(WnlsError):
    """Raised when a trajectory leaves the representable regime (blow-up, NaN)."""
    category = "evolution_error"


class SmallnessGateError(WnlsError):
    """Raised when Picard data violate the ||∇u0|| < 1 hypothesis."""
    category = "smallness_gate"


class PicardContractionError(WnlsError):
    """Raised when Picard iterates fail to contract."""
    category = "picard_contraction"

    def __init__(self, message: str, ratios: list[float]):
        super().__init__(message)
        self.ratios = list(ratios)


class ConfigError(WnlsError):
    """Raised for invalid run configuration; carries the offending key path."""
    category = "config_error"

    def __init__(self, key_path: str, message: str):
        super().__init__(f"{key_path}: {message}")
        self.key_path = key_path


class SnapshotError(WnlsError):
    """Base class for snapshot codec errors."""
    category = "snapshot_error"


class BadMagicError(SnapshotError):
    """Raised when a snapshot does not start with the expected magic."""
    category = "bad_magic"


class VersionMismatchError(SnapshotError):
    """Raised when a snapshot carries an unsupported format version."""
    category = "version_mismatch"


class TruncatedPayloadError(SnapshotError):
    """Raised when a snapshot is shorter than its header announces."""
    category = "truncated_payload"


class OutputError(WnlsError):
    """Raised when an output file or directory cannot be written."""
    category = "io_error"
