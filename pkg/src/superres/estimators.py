"""Estimator-style front ends so the solvers compose with the sklearn ecosystem.

Both estimators follow the scikit-learn contract: constructor only stores
parameters, ``fit`` validates input and computes, results land in
trailing-underscore attributes, and ``get_params``/``set_params``/``clone``
come from :class:`sklearn.base.BaseEstimator`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .discrete import BPOptions, basis_pursuit, lowpass, noisy_l1
from .model import Geometry, SampleVector
from .sdp import SolverOptions, tv_superresolve
from .validation import check_sample_coefficients

__all__ = ["TVSuperResolver", "GridBasisPursuit"]


class TVSuperResolver(BaseEstimator):
    """Recover an atomic measure from low-frequency Fourier coefficients.

    Parameters
    ----------
    tol : float
        Splitting-solver tolerance for the semidefinite dual.
    max_iter : int
        Iteration budget of the dual solve.
    root_band : float
        Vanishing-polynomial threshold below which a grid minimum counts as
        a support candidate.
    amp_floor : float
        Relative magnitude under which fitted spikes are pruned.

    Attributes
    ----------
    locations_, amplitudes_ : ndarray
        The recovered spike train.
    duality_gap_ : float
        Certified optimality gap of the reconstruction.
    dual_coefficients_ : ndarray
        Dual polynomial coefficients, increasing frequency.
    n_iter_ : int
        Iterations used by the dual solve.
    """

    def __init__(self, tol: float = 1e-9, max_iter: int = 50_000,
                 root_band: float = 1e-6, amp_floor: float = 1e-8):
        self.tol = tol
        self.max_iter = max_iter
        self.root_band = root_band
        self.amp_floor = amp_floor

    def _options(self) -> SolverOptions:
        return SolverOptions(tol=self.tol, max_iter=self.max_iter,
                             root_band=self.root_band, amp_floor=self.amp_floor)

    def fit(self, y, truth=None):
        """Fit to a :class:`SampleVector` or a length-(2fc+1) coefficient array."""
        if not isinstance(y, SampleVector):
            y = SampleVector(1, (np.asarray(y).size - 1) // 2,
                             check_sample_coefficients(y))
        result = tv_superresolve(y, self._options(), truth=truth)
        self.fc_ = y.fc
        self.measure_ = result.measure
        self.locations_ = result.measure.locations
        self.amplitudes_ = result.measure.amplitudes
        self.duality_gap_ = result.duality_gap
        self.residual_ = result.residual
        self.dual_coefficients_ = result.dual.c
        self.n_iter_ = result.dual.iterations
        self.degenerate_ = result.dual.degenerate
        self.support_errors_ = result.support_errors
        return self

    def predict(self, t):
        """Low-pass reconstruction ``sum_k y_k exp(2i pi k t)`` of the fitted measure."""
        if not hasattr(self, "locations_"):
            raise RuntimeError("estimator is not fitted")
        t = np.asarray(t, dtype=float)
        k = np.arange(-self.fc_, self.fc_ + 1)
        yk = np.exp(-2j * np.pi * np.outer(k, self.locations_)) @ self.amplitudes_
        return np.exp(2j * np.pi * np.outer(t, k)) @ yk


class GridBasisPursuit(BaseEstimator):
    """Minimum-l1 recovery of a length-N gridded signal from its low band.

    With ``delta = 0`` solves the equality-constrained basis-pursuit program;
    with ``delta > 0`` the constraint relaxes to an l1 ball of that radius
    around the observed low-pass signal.
    """

    def __init__(self, N: int = 64, fc: int = 8, delta: float = 0.0,
                 tol: float = 1e-10, max_iter: int = 200_000):
        self.N = N
        self.fc = fc
        self.delta = delta
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, y):
        """Fit to length-(2fc+1) samples (increasing k) or a SampleVector."""
        geometry = Geometry(self.N, self.fc)
        opts = BPOptions(tol=self.tol, max_iter=self.max_iter)
        if isinstance(y, SampleVector):
            yv = np.asarray(y.coeffs)
        else:
            yv = check_sample_coefficients(y)
        if self.delta > 0.0:
            from .discrete import adjoint_dft

            s = adjoint_dft(yv, self.N, self.fc) / self.N
            x, info = noisy_l1(s, geometry, self.delta, opts)
        else:
            x, info = basis_pursuit(yv, geometry, opts)
        self.x_ = x
        self.n_iter_ = info["iterations"]
        self.info_ = info
        floor = 1e-8 * float(np.max(np.abs(x))) if np.any(x) else 0.0
        self.support_ = np.nonzero(np.abs(x) > floor)[0]
        self.amplitudes_ = x[self.support_]
        return self

    def predict(self):
        """The recovered length-N signal."""
        if not hasattr(self, "x_"):
            raise RuntimeError("estimator is not fitted")
        return self.x_
