"""Squared-Fejer interpolation kernel: closed-form derivatives, decay bounds, tail sums.

The kernel is the fourth power of a normalized Dirichlet ratio,

    K(t) = [ sin(f*pi*t) / (f*sin(pi*t)) ]^4,   f = fc/2 + 1,

a trigonometric polynomial with frequencies |k| <= fc when fc is even.  It is
the interpolation kernel used to build dual certificates: K(0) = 1 and K decays
like t^-4.  This module provides K and its first three derivatives, the
monotone envelope bounds ``B_l``, and the neighbor tail-sum bounds ``F_l`` that
control sums of kernel values over a separated spike configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "KernelSpec",
    "kernel_eval",
    "kernel_bound",
    "kernel_tail_sum",
    "kernel2d_eval",
    "fejer_sq_coeffs",
    "H_INF",
    "KAPPA_TAIL",
]

# Far-field envelope constants of the bounds B_l and the 20-term tail remainder.
H_INF = (1.0, 4.0, 18.0, 77.0)
KAPPA_TAIL = 8.98e-5
_TAIL_TERMS = 20
_BRANCH = np.sqrt(2.0) / np.pi  # switch point between the two envelope branches

# Near-origin branch width (relative to 1/fc); below this the closed forms
# lose precision to 0/0 cancellation and a Taylor expansion is used instead.
# 0.03/fc keeps both branches under 1e-9 relative error at the switch for
# every derivative order (the third derivative is the binding constraint).
_TAYLOR_WIDTH = 0.03
_TAYLOR_TERMS = 6  # powers of (pi*t)^2 kept in the near-origin expansion


@dataclass(frozen=True)
class KernelSpec:
    """Kernel parameters for an even cutoff ``fc >= 4``."""

    fc: int

    def __post_init__(self):
        if self.fc % 2 != 0:
            raise ValueError("kernel requires even cutoff")
        if self.fc < 4:
            raise ValueError("fc must be at least 4")

    @property
    def f(self) -> float:
        return self.fc / 2.0 + 1.0

    @property
    def lambda_c(self) -> float:
        return 1.0 / self.fc

    @property
    def second_derivative_at_zero(self) -> float:
        return -np.pi**2 * self.fc * (self.fc + 4) / 3.0


def _poly_mul(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    return np.convolve(a, b)[: m + 1]


def _taylor_coeffs(fc: int) -> np.ndarray:
    """Coefficients k_m of K(t) = sum_m k_m (pi*t)^(2m), m = 0.._TAYLOR_TERMS."""
    m = _TAYLOR_TERMS
    f2 = (fc / 2.0 + 1.0) ** 2
    # sinc series: sin(x)/x = sum (-1)^j v^j/(2j+1)!, v = x^2
    j = np.arange(m + 1)
    sinc = (-1.0) ** j / np.array([math.factorial(2 * jj + 1) for jj in j], dtype=float)
    num = sinc * f2**j
    den = sinc.copy()
    inv = np.zeros(m + 1)
    inv[0] = 1.0 / den[0]
    for i in range(1, m + 1):  # power-series inversion
        inv[i] = -np.dot(den[1 : i + 1], inv[i - 1 :: -1]) / den[0]
    s = _poly_mul(num, inv, m)
    s2 = _poly_mul(s, s, m)
    return _poly_mul(s2, s2, m)


_TAYLOR_CACHE: dict[int, np.ndarray] = {}


def _eval_taylor(spec: KernelSpec, t: np.ndarray, order: int) -> np.ndarray:
    k = _TAYLOR_CACHE.get(spec.fc)
    if k is None:
        k = _taylor_coeffs(spec.fc)
        _TAYLOR_CACHE[spec.fc] = k
    m = np.arange(k.size)
    p = 2 * m - order
    fac = np.ones_like(k)
    for shift in range(order):  # (2m)(2m-1)...(2m-order+1)
        fac = fac * (2 * m - shift)
    keep = p >= 0
    u = np.pi ** (2 * m[keep]) * fac[keep] * k[keep]
    tt = np.asarray(t)[..., None] ** p[keep]
    return tt @ u


def _eval_closed(spec: KernelSpec, t: np.ndarray, order: int) -> np.ndarray:
    f = spec.f
    st = np.sin(np.pi * t)
    sf = np.sin(f * np.pi * t)
    cf = np.cos(f * np.pi * t)
    ct = np.cos(np.pi * t)
    s = sf / (f * st)
    if order == 0:
        return s**4
    w = cf - sf * ct / (f * st)
    if order == 1:
        return 4.0 * np.pi * s**3 * w / st
    if order == 2:
        return (4.0 * np.pi**2 * sf**2 / (f**2 * st**4)) * (
            3.0 * w**2
            - sf**2
            - np.sin(2.0 * f * np.pi * t) * ct / (f * st)
            + sf**2 * ct**2 / (f**2 * st**2)
            + sf**2 / (f**2 * st**2)
        )
    h1 = w**3
    h2 = w * (
        -sf
        - 2.0 * cf / (f * np.tan(np.pi * t))
        + sf / (f**2 * np.tan(np.pi * t) ** 2)
        + sf / (f**2 * st**2)
    )
    h3 = (
        3.0 * cf * (1.0 + ct**2) / (f**2 * st**2)
        - cf
        + 3.0 * sf * ct / (f * st)
        - sf * ct * (5.0 + ct**2) / (f**3 * st**3)
    )
    return (4.0 * np.pi**3 * sf / (f * st**4)) * (6.0 * h1 + 9.0 * sf * h2 + sf**2 * h3)


def kernel_eval(spec: KernelSpec, t, order: int = 0):
    """Evaluate ``K`` or one of its first three derivatives.

    Arguments are wrapped to the fundamental period; a Taylor branch takes
    over for |t| < 1e-7/fc where the closed forms cancel catastrophically.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be in {0, 1, 2, 3}")
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    tw = t_arr - np.round(t_arr)  # wrap to [-1/2, 1/2]
    out = np.empty_like(tw)
    near = np.abs(tw) < _TAYLOR_WIDTH / spec.fc
    if np.any(near):
        out[near] = _eval_taylor(spec, tw[near], order)
    if np.any(~near):
        out[~near] = _eval_closed(spec, tw[~near], order)
    return float(out[0]) if scalar else out


def _envelope_a(t: np.ndarray) -> np.ndarray:
    return 2.0 / (np.pi * (1.0 - np.pi**2 * t**2 / 6.0))


def _H_near(spec: KernelSpec, t: np.ndarray, order: int) -> np.ndarray:
    a = _envelope_a(t)
    b = a / (spec.fc * t)
    if order == 0:
        return a**4
    if order == 1:
        return a**4 * (2.0 + 2.0 * b)
    if order == 2:
        return a**4 * (4.0 + 7.0 * b + 6.0 * b**2)
    return a**4 * (8.0 + 24.0 * b + 30.0 * b**2 + 15.0 * b**3)


def _B_tilde(spec: KernelSpec, t: np.ndarray, order: int) -> np.ndarray:
    """Near-branch envelope; valid wherever the quadratic sine minorant is positive."""
    return (
        np.pi**order
        * _H_near(spec, t, order)
        / ((spec.fc + 2.0) ** (4 - order) * t**4)
    )


def _B(spec: KernelSpec, t: np.ndarray, order: int) -> np.ndarray:
    far = np.pi**order * H_INF[order] / ((spec.fc + 2.0) ** (4 - order) * t**4)
    return np.where(t <= _BRANCH, _B_tilde(spec, np.minimum(t, _BRANCH), order), far)


def kernel_bound(spec: KernelSpec, t, order: int = 0):
    """Nonincreasing envelope ``B_l(t) >= |K^(l)(t)|`` on [lambda_c/2, 1/2)."""
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be in {0, 1, 2, 3}")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0.5 * spec.lambda_c - 1e-15) or np.any(t_arr >= 0.5):
        raise ValueError("t must lie in [lambda_c/2, 1/2)")
    out = _B(spec, t_arr, order)
    return float(out[0]) if np.asarray(t).ndim == 0 else out


def _scan_max_abs(spec: KernelSpec, order: int, lo: float, hi: float) -> float:
    """Maximum of |K^(l)| on [lo, hi] by dense scan plus golden-section refinement."""
    if hi <= lo:
        return abs(kernel_eval(spec, lo, order))
    grid = np.linspace(lo, hi, 10_000)
    vals = np.abs(kernel_eval(spec, grid, order))
    i = int(np.argmax(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid.size - 1)]
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc_ = abs(kernel_eval(spec, c, order))
    fd = abs(kernel_eval(spec, d, order))
    while b - a > 1e-10:
        if fc_ > fd:
            b, d, fd = d, c, fc_
            c = b - invphi * (b - a)
            fc_ = abs(kernel_eval(spec, c, order))
        else:
            a, c, fc_ = c, d, fd
            d = a + invphi * (b - a)
            fd = abs(kernel_eval(spec, d, order))
    return float(max(vals[i], fc_, fd))


def kernel_tail_sum(spec: KernelSpec, delta: float, t: float, order: int = 0) -> float:
    """Bound ``F_l(delta, t)`` on the neighbor sum ``sum_{t_i != 0} |K^(l)(t - t_i)|``.

    Valid for spike families with minimum separation ``delta`` containing the
    origin, and an evaluation point ``0 <= t <= delta/2``.  The two-sided
    construction adds an explicit 20-term envelope sum and a closed remainder.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be in {0, 1, 2, 3}")
    if spec.fc < 128:
        raise ValueError("tail-sum bound requires fc >= 128")
    lc = spec.lambda_c
    if delta < 1.87 * lc * (1.0 - 1e-12):
        raise ValueError("delta below the supported separation range")
    if t < -1e-15 or t > delta / 2.0 + 1e-15:
        raise ValueError("t must lie in [0, delta/2]")
    if _TAIL_TERMS * delta + t >= np.sqrt(6.0) / np.pi:
        raise ValueError("separation too large for the tail envelope construction")
    t = float(min(max(t, 0.0), delta / 2.0))

    j = np.arange(2, _TAIL_TERMS + 1)
    plus = _scan_max_abs(spec, order, delta - t, 3.0 * delta - t)
    plus = max(plus, float(_B(spec, np.atleast_1d(3.0 * delta - t), order)[0]))
    plus += float(np.sum(_B_tilde(spec, j * delta - t, order)))

    minus = _scan_max_abs(spec, order, delta, 3.0 * delta)
    minus = max(minus, float(_B(spec, np.atleast_1d(3.0 * delta), order)[0]))
    minus += float(np.sum(_B_tilde(spec, j * delta + t, order)))

    remainder = (
        KAPPA_TAIL
        * np.pi**order
        * H_INF[order]
        / ((spec.fc + 2.0) ** (4 - order) * delta**4)
    )
    return plus + minus + remainder


def kernel2d_eval(spec: KernelSpec, r, orders=(0, 0)):
    """Tensor kernel ``K2D(x, y) = K(x) * K(y)`` and its partial derivatives.

    ``orders = (l1, l2)`` takes ``l1`` derivatives in x and ``l2`` in y with
    ``l1 + l2 <= 3``.
    """
    l1, l2 = orders
    if l1 < 0 or l2 < 0 or l1 + l2 > 3:
        raise ValueError("orders must be nonnegative with l1 + l2 <= 3")
    r_arr = np.asarray(r, dtype=float)
    scalar = r_arr.ndim == 1
    r_arr = np.atleast_2d(r_arr)
    out = kernel_eval(spec, r_arr[:, 0], l1) * kernel_eval(spec, r_arr[:, 1], l2)
    return float(out[0]) if scalar else out


def fejer_sq_coeffs(spec: KernelSpec) -> np.ndarray:
    """Fourier coefficients of ``K`` for k in [-fc, fc] (increasing k).

    The normalized Fejer kernel has triangular coefficients; squaring in time
    convolves them, giving the autocorrelation weights of ``K``.
    """
    f = int(spec.f)
    g = (f - np.abs(np.arange(-(f - 1), f))) / f**2
    return np.convolve(g, g)
