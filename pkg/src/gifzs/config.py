"""Runtime configuration for the gifzs command line and tool server."""

import os
from dataclasses import dataclass

from .fuzzification import OPERATORS
from .metrics import DEFAULT_BRUTEFORCE_THRESHOLD

# Default response size limit in KB
DEFAULT_MAX_RESPONSE_SIZE_KB = 64


def _int_env(name: str, default: int | None) -> int | None:
    value = os.environ.get(name)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {value!r}")


def _float_env(name: str, default: float | None) -> float | None:
    value = os.environ.get(name)
    if value is None or value == "":
        return default
    try:
        return float(value)
    except ValueError:
        raise ValueError(f"{name} must be a number, got {value!r}")


@dataclass
class Config:
    """Process-wide settings.

    ``max_iter``, ``tol`` and ``operator`` override the values of a system
    description when set; None leaves the description in charge.
    """

    hausdorff_threshold: int = DEFAULT_BRUTEFORCE_THRESHOLD
    max_iter: int | None = None
    tol: float | None = None
    operator: str | None = None
    max_response_size_kb: int = DEFAULT_MAX_RESPONSE_SIZE_KB

    def __post_init__(self):
        if self.hausdorff_threshold < 0:
            raise ValueError(f"Hausdorff threshold must be nonnegative, got {self.hausdorff_threshold}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError(f"max_iter must be positive, got {self.max_iter}")
        if self.tol is not None and self.tol < 0:
            raise ValueError(f"tol must be nonnegative, got {self.tol}")
        if self.operator is not None and self.operator not in OPERATORS:
            raise ValueError(f"operator must be one of {', '.join(OPERATORS)}, got {self.operator!r}")
        if self.max_response_size_kb < 1:
            raise ValueError(f"max response size must be positive, got {self.max_response_size_kb}")

    @classmethod
    def from_env(cls) -> "Config":
        """Create config from environment variables."""
        return cls.from_args()

    @classmethod
    def from_args(
        cls,
        hausdorff_threshold: int | None = None,
        max_iter: int | None = None,
        tol: float | None = None,
        operator: str | None = None,
        max_response_size_kb: int | None = None,
    ) -> "Config":
        """Create config from CLI arguments, falling back to environment variables."""
        # CLI argument takes precedence, then env var, then default
        if hausdorff_threshold is None:
            hausdorff_threshold = _int_env("GIFZS_HAUSDORFF_THRESHOLD", DEFAULT_BRUTEFORCE_THRESHOLD)
        if max_iter is None:
            max_iter = _int_env("GIFZS_MAX_ITER", None)
        if tol is None:
            tol = _float_env("GIFZS_TOL", None)
        if operator is None:
            operator = os.environ.get("GIFZS_OPERATOR") or None
        if max_response_size_kb is None:
            max_response_size_kb = _int_env("GIFZS_MAX_RESPONSE_SIZE_KB", DEFAULT_MAX_RESPONSE_SIZE_KB)

        return cls(
            hausdorff_threshold=hausdorff_threshold,
            max_iter=max_iter,
            tol=tol,
            operator=operator,
            max_response_size_kb=max_response_size_kb,
        )
