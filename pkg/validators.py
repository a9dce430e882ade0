# -*- coding: utf-8 -*-
"""
Validators Module for the Hashtag Epidemic Pipeline
Error types raised across the pipeline and the guard checks applied at module entry points.
"""

import math
from typing import Any, Dict, Optional

import numpy as np

from config import DEGENERATE_ACCEPTANCE


class PipelineError(Exception):
    """Base class for every domain error raised by the pipeline."""


class EmptyInput(PipelineError):
    """No valid record could be parsed from an input."""


class FormatError(PipelineError):
    """Input does not match its declared format."""


class InvalidWindow(PipelineError):
    """Smoothing window or grid step is unusable."""


class AllZero(PipelineError):
    """Intensity series carries no positive value, so no occurrence exists."""


class IntegrationFailure(PipelineError):
    """ODE integration did not complete."""

    def __init__(self, message: str, params: Any = None):
        super().__init__(message)
        self.params = params


class DegenerateFit(PipelineError):
    """Sampler output is unusable (stuck walkers or collapsed chain)."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ChainTooShort(PipelineError):
    """Too few samples to summarize a posterior."""


class ConfigValidationError(PipelineError):
    """Configuration value missing or out of range."""


def check_positive(value: float, name: str, error=ValueError) -> float:
    """
    Ensure a number is finite and strictly positive.

    Args:
        value (float): Value to check
        name (str): Name used in the error message
        error (type): Exception class to raise

    Returns:
        float: The value as float
    """
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise error(f"{name} must be a number, got {value!r}")
    if not math.isfinite(number) or number <= 0:
        raise error(f"{name} must be positive, got {value!r}")
    return number


def check_fraction(value: float, name: str, error=ValueError) -> float:
    """Ensure a number lies strictly inside (0, 1)."""
    number = check_positive(value, name, error)
    if number >= 1:
        raise error(f"{name} must be in (0, 1), got {value!r}")
    return number


def check_window(window: float, step: float) -> None:
    """
    Validate a smoothing window against its grid step.

    Raises:
        InvalidWindow: If window <= 0, step <= 0 or step > window
    """
    check_positive(window, "window", InvalidWindow)
    check_positive(step, "step", InvalidWindow)
    if step > window:
        raise InvalidWindow(f"step ({step}) must not exceed window ({window})")


def check_walker_count(n_walkers: int, dim: int) -> int:
    """
    Validate an ensemble size.

    Args:
        n_walkers (int): Number of walkers
        dim (int): Parameter-space dimension

    Returns:
        int: The walker count
    """
    if n_walkers % 2 != 0:
        raise ValueError(f"walker count must be even, got {n_walkers}")
    if n_walkers < 2 * dim + 2:
        raise ValueError(f"walker count must be at least {2 * dim + 2} for dim={dim}, got {n_walkers}")
    return n_walkers


def check_fit_health(acceptance_fraction: float, chain: np.ndarray) -> None:
    """
    Reject sampler output that cannot support a posterior summary.

    Args:
        acceptance_fraction (float): Accepted moves over proposed moves
        chain (np.ndarray): Post-burn-in samples, shape (n, dim)

    Raises:
        DegenerateFit: If acceptance < 2% or every sample is identical
    """
    diagnostics = {"accept_frac": float(acceptance_fraction), "n_samples": int(len(chain))}
    if acceptance_fraction < DEGENERATE_ACCEPTANCE:
        raise DegenerateFit(
            f"acceptance fraction {acceptance_fraction:.4f} below {DEGENERATE_ACCEPTANCE}",
            diagnostics,
        )
    if len(chain) > 0 and np.all(chain == chain[0]):
        raise DegenerateFit("all post-burn-in samples are identical", diagnostics)
