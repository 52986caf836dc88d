"""Discrete-grid solvers and stability quantities.

Signals live on a fine grid of size N but only the lowest n = 2*fc+1 DFT
coefficients are observed (super-resolution factor SRF = N/n).  Included
here: basis pursuit (equality-constrained l1 minimization) by operator
splitting with fast-transform projections, its noise-aware relaxation with
an l1-ball constraint on the low-pass residual, null-space ratio
diagnostics, and the SRF^2 stability bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Geometry, SampleVector

__all__ = [
    "DiscreteProblem",
    "BPOptions",
    "ConvergenceError",
    "basis_pursuit",
    "noisy_l1",
    "nullspace_ratio",
    "stability_bound",
    "lowpass",
    "partial_dft",
    "adjoint_dft",
    "project_l1_ball",
    "NULLSPACE_ALPHA",
    "STABILITY_ALPHA_INV",
    "STABILITY_C0",
]

# Null-space property constant (1 - rho = alpha/SRF^2) and the reciprocal the
# stability bound is stated with; the source reports both and they disagree in
# the fourth digit (1/0.0883 = 11.325).  The bound uses 11.235 as stated.
NULLSPACE_ALPHA = 0.0883
STABILITY_ALPHA_INV = 11.235
STABILITY_C0 = 4.0 * STABILITY_ALPHA_INV
_MIN_SRF = 3.03


class ConvergenceError(RuntimeError):
    def __init__(self, message, residuals=None, iterations=0):
        super().__init__(message)
        self.residuals = residuals or {}
        self.iterations = iterations


@dataclass(frozen=True)
class BPOptions:
    tol: float = 1e-10
    max_iter: int = 200_000
    rho: float = 1.0
    over_relaxation: float = 1.7
    check_every: int = 20
    adapt_every: int = 100


def partial_dft(x: np.ndarray, fc: int) -> np.ndarray:
    """y_k = sum_t x_t exp(-2i pi k t/N) for k in [-fc, fc], increasing k."""
    X = np.fft.fft(x)
    return np.concatenate([X[x.size - fc :], X[: fc + 1]])


def adjoint_dft(yk: np.ndarray, N: int, fc: int) -> np.ndarray:
    """(F* y)_t = sum_k y_k exp(+2i pi k t/N)."""
    spec = np.zeros(N, dtype=complex)
    spec[np.arange(-fc, fc + 1) % N] = yk
    return np.fft.ifft(spec) * N


def lowpass(x: np.ndarray, fc: int) -> np.ndarray:
    """Orthogonal projection P_n x = (1/N) F* F x onto the observed band."""
    X = np.fft.fft(x)
    keep = np.zeros(x.size, dtype=bool)
    keep[np.arange(-fc, fc + 1) % x.size] = True
    X[~keep] = 0.0
    return np.fft.ifft(X)


@dataclass(frozen=True)
class DiscreteProblem:
    """A grid-size-N instance: either raw samples y or a low-pass signal s."""

    geometry: Geometry
    y: np.ndarray | None = None
    s: np.ndarray | None = None
    delta: float = 0.0

    def __post_init__(self):
        if (self.y is None) == (self.s is None):
            raise ValueError("provide exactly one of samples y or low-pass signal s")
        if self.delta < 0.0:
            raise ValueError("noise budget must be nonnegative")
        if self.s is not None:
            s = np.asarray(self.s, dtype=complex).reshape(-1)
            if s.size != self.geometry.N:
                raise ValueError("low-pass signal must have length N")
            hi = s - lowpass(s, self.geometry.fc)
            if np.linalg.norm(hi) > 1e-10 * max(1.0, np.linalg.norm(s)):
                raise ValueError("signal s is not low-pass")
            object.__setattr__(self, "s", s)
        if self.y is not None:
            y = np.asarray(self.y, dtype=complex).reshape(-1)
            if y.size != self.geometry.n:
                raise ValueError("samples must have length n = 2*fc+1")
            object.__setattr__(self, "y", y)


def _soft(w: np.ndarray, kappa: float) -> np.ndarray:
    mag = np.abs(w)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(mag > kappa, 1.0 - kappa / mag, 0.0)
    return w * scale


def basis_pursuit(y, geometry: Geometry, opts: BPOptions | None = None):
    """Minimum-l1 signal consistent with the observed band: min ||x||_1, F x = y.

    Operator splitting alternates complex soft-thresholding with the exact
    affine projection z = v - (1/N) F*(F v - y).  On success also returns the
    subgradient certificate built from the scaled dual variable.
    """
    opts = opts or BPOptions()
    if isinstance(y, SampleVector):
        yv = np.asarray(y.coeffs, dtype=complex)
        if y.fc != geometry.fc:
            raise ValueError("cutoff mismatch between samples and geometry")
    else:
        yv = np.asarray(y, dtype=complex).reshape(-1)
    N, fc = geometry.N, geometry.fc
    if yv.size != geometry.n:
        raise ValueError("samples must have length n = 2*fc+1")

    ynorm = float(np.linalg.norm(yv))
    if ynorm == 0.0:
        return np.zeros(N, dtype=complex), {"iterations": 0, "primal_residual": 0.0,
                                            "dual_residual": 0.0, "certificate": None}
    rho = opts.rho * ynorm / N  # threshold scale commensurate with amplitudes
    omega = opts.over_relaxation
    z = adjoint_dft(yv, N, fc) / N  # least-norm feasible start
    x = z.copy()
    u = np.zeros(N, dtype=complex)
    pr = dr = np.inf
    it = 0
    for it in range(1, opts.max_iter + 1):
        x = _soft(z - u, 1.0 / rho)
        xh = omega * x + (1.0 - omega) * z
        v = xh + u
        z_old = z
        z = v - adjoint_dft(partial_dft(v, fc) - yv, N, fc) / N
        u = u + xh - z
        if it % opts.check_every == 0:
            pr = float(np.linalg.norm(x - z))
            dr = float(rho * np.linalg.norm(z - z_old))
            scale = max(1.0, float(np.linalg.norm(x)))
            if max(pr, dr) <= opts.tol * scale:
                break
            if it % opts.adapt_every == 0:
                if pr > 10.0 * dr:
                    rho *= 2.0
                    u /= 2.0
                elif dr > 10.0 * pr:
                    rho /= 2.0
                    u *= 2.0
    scale = max(1.0, float(np.linalg.norm(x)))
    if max(pr, dr) > opts.tol * scale:
        raise ConvergenceError(
            f"basis pursuit did not converge in {opts.max_iter} iterations",
            residuals={"primal": pr, "dual": dr},
            iterations=it,
        )
    g = -rho * u  # at convergence -rho*u lies in the l1 subdifferential at x
    support = np.abs(x) > 1e-8 * np.max(np.abs(x))
    cert = {
        "offsupport_violation": float(max(0.0, np.max(np.abs(g)) - 1.0)),
        "sign_mismatch": float(
            np.max(np.abs(g[support] - np.sign(x[support]))) if np.any(support) else 0.0
        ),
    }
    info = {"iterations": it, "primal_residual": pr, "dual_residual": dr, "certificate": cert}
    return x, info


def project_l1_ball(v: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto the complex l1 ball of given radius (sorting method)."""
    mag = np.abs(v)
    total = float(mag.sum())
    if total <= radius:
        return v.copy()
    if radius <= 0.0:
        return np.zeros_like(v)
    u = np.sort(mag)[::-1]
    css = np.cumsum(u)
    idx = np.nonzero(u * np.arange(1, v.size + 1) > css - radius)[0][-1]
    theta = (css[idx] - radius) / (idx + 1.0)
    shrunk = np.maximum(mag - theta, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(mag > 0, v * (shrunk / np.where(mag > 0, mag, 1.0)), 0.0)
    return out


def noisy_l1(s, geometry: Geometry, delta: float, opts: BPOptions | None = None):
    """Relaxed recovery: min ||x||_1 subject to ||P_n x - s||_1 <= delta.

    Primal-dual splitting with the l1-ball projection on the residual block;
    at delta = 0 this solves the basis-pursuit constraint set.  The returned
    iterate is cleaned up to satisfy the budget exactly.
    """
    opts = opts or BPOptions()
    prob = DiscreteProblem(geometry, s=np.asarray(s, dtype=complex), delta=delta)
    N, fc = geometry.N, geometry.fc
    unit = float(np.max(np.abs(prob.s)))
    if unit == 0.0:
        return np.zeros(N, dtype=complex), {"iterations": 0, "primal_residual": 0.0,
                                            "dual_residual": 0.0}
    s = prob.s / unit  # solve in normalized amplitude units
    dl = delta / unit
    tau = sigma = 0.99  # tau * sigma * ||P_n||^2 < 1
    x = s.copy()
    xbar = x.copy()
    w = np.zeros(N, dtype=complex)
    pr = dr = np.inf
    it = 0
    for it in range(1, opts.max_iter + 1):
        v = w + sigma * lowpass(xbar, fc)
        w_old = w
        w = v - sigma * (s + project_l1_ball(v / sigma - s, dl))
        x_old = x
        x = _soft(x - tau * lowpass(w, fc), tau)
        xbar = 2.0 * x - x_old
        if it % opts.check_every == 0:
            # standard primal/dual residuals of the splitting
            pr = float(np.linalg.norm((x_old - x) / tau - lowpass(w_old - w, fc)))
            dr = float(np.linalg.norm((w_old - w) / sigma - lowpass(x_old - x, fc)))
            scale = max(1.0, float(np.linalg.norm(x)))
            if max(pr, dr) <= opts.tol * scale:
                break
    scale = max(1.0, float(np.linalg.norm(x)))
    if max(pr, dr) > opts.tol * scale:
        raise ConvergenceError(
            f"noisy l1 solve did not converge in {opts.max_iter} iterations",
            residuals={"primal": pr, "dual": dr},
            iterations=it,
        )
    # exact feasibility cleanup: move the low-pass residual onto the budget ball
    r = lowpass(x, fc) - s
    excess = r - project_l1_ball(r, dl)
    x = (x - excess) * unit
    return x, {"iterations": it, "primal_residual": pr, "dual_residual": dr}


def nullspace_ratio(h: np.ndarray, T, geometry: Geometry):
    """(||h_T||_1, ||h_{T^c}||_1) for a vector annihilated by the partial DFT."""
    h = np.asarray(h, dtype=complex).reshape(-1)
    if h.size != geometry.N:
        raise ValueError("vector must have length N")
    if np.linalg.norm(partial_dft(h, geometry.fc)) > 1e-8 * max(np.linalg.norm(h), 1e-300):
        raise ValueError("vector is not in the null space of the partial DFT")
    T = np.asarray(T, dtype=int).reshape(-1)
    mask = np.zeros(geometry.N, dtype=bool)
    mask[T] = True
    on = float(np.sum(np.abs(h[mask])))
    off = float(np.sum(np.abs(h[~mask])))
    return on, off


def stability_bound(srf: float, delta: float) -> float:
    """Worst-case l1 recovery error ``C0 * SRF^2 * delta`` of the relaxed program."""
    if srf < _MIN_SRF:
        raise ValueError("constant not established for SRF below 3.03")
    return STABILITY_C0 * srf**2 * delta
