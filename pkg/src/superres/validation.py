"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np

__all__ = ["check_sample_coefficients", "check_locations", "check_finite_complex"]


def check_finite_complex(a, name: str = "array") -> np.ndarray:
    out = np.asarray(a, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(out.real)) or not np.all(np.isfinite(out.imag)):
        raise ValueError(f"{name} contains non-finite values")
    return out


def check_sample_coefficients(y, name: str = "samples") -> np.ndarray:
    """Validate a 1-D coefficient vector of odd length 2*fc+1."""
    out = check_finite_complex(y, name)
    if out.size < 3 or out.size % 2 == 0:
        raise ValueError(f"{name} must have odd length 2*fc+1 >= 3")
    return out


def check_locations(t, dim: int = 1, name: str = "locations") -> np.ndarray:
    out = np.asarray(t, dtype=float)
    out = out.reshape(-1) if dim == 1 else out.reshape(-1, 2)
    if out.size and (out.min() < 0.0 or out.max() >= 1.0):
        raise ValueError(f"{name} must lie in [0, 1)")
    return out
