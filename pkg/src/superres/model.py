"""Signal model: atomic measures on the torus, low-frequency sampling, separation geometry.

The signal is a finite sum of Dirac spikes with complex amplitudes, living on
[0,1) (or [0,1)^2) with wrap-around topology.  The measurement operator keeps
the Fourier series coefficients up to a cutoff ``fc``, so that ``n = 2*fc + 1``
coefficients are observed per dimension.  All operations here are pure and the
containers are frozen after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AtomicMeasure",
    "SampleVector",
    "Geometry",
    "wrap_distance",
    "min_separation",
    "sample_spikes",
    "sample_discrete",
    "lowpass_project",
    "tv_norm",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def wrap_distance(a, b, dim: int = 1) -> np.ndarray:
    """Wrap-around l-infinity distance between points of the torus.

    Parameters
    ----------
    a, b : array_like
        Points in [0,1)^dim.  Shapes must broadcast; the coordinate axis is
        the last one when ``dim == 2``.
    dim : int
        Torus dimension (1 or 2).

    Returns
    -------
    ndarray or float
        max-coordinate deviation, each coordinate reduced modulo 1 to
        [0, 1/2].
    """
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    d = np.minimum(d, 1.0 - d)
    if dim == 2:
        d = d.max(axis=-1)
    return d


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite spike train ``sum_j a_j * delta(t - t_j)`` on the torus.

    Parameters
    ----------
    dim : int
        1 or 2.
    locations : ndarray
        Shape (m,) for dim 1, (m, 2) for dim 2; coordinates in [0,1).
    amplitudes : ndarray
        Complex amplitudes, shape (m,).
    """

    dim: int
    locations: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        loc = np.atleast_1d(np.asarray(self.locations, dtype=float))
        amp = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex))
        if self.dim == 1:
            loc = loc.reshape(-1)
        else:
            loc = loc.reshape(-1, 2)
        if loc.shape[0] != amp.shape[0]:
            raise ValueError("locations and amplitudes must have equal length")
        if loc.size and (loc.min() < 0.0 or loc.max() >= 1.0):
            raise ValueError("locations must lie in [0, 1)")
        if loc.shape[0] > 1:
            view = loc if self.dim == 2 else loc[:, None]
            uniq = {tuple(row) for row in view}
            if len(uniq) != loc.shape[0]:
                raise ValueError("duplicate spike locations")
        object.__setattr__(self, "locations", _freeze(loc))
        object.__setattr__(self, "amplitudes", _freeze(amp))

    def __len__(self) -> int:
        return self.locations.shape[0]


@dataclass(frozen=True)
class SampleVector:
    """Low-frequency Fourier coefficients ``y`` with cutoff ``fc``.

    Coefficients are stored in increasing-k order: index ``k + fc`` holds the
    coefficient of frequency ``k`` for k in [-fc, fc].  In two dimensions the
    array is (2*fc+1, 2*fc+1) with axes indexed the same way.
    """

    dim: int
    fc: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        if self.fc < 1:
            raise ValueError("fc must be a positive integer")
        n = 2 * self.fc + 1
        c = np.asarray(self.coeffs, dtype=complex)
        want = (n,) if self.dim == 1 else (n, n)
        if c.shape != want:
            raise ValueError(f"coeffs must have shape {want}, got {c.shape}")
        object.__setattr__(self, "coeffs", _freeze(c))

    @property
    def n(self) -> int:
        return 2 * self.fc + 1

    def k_values(self) -> np.ndarray:
        return np.arange(-self.fc, self.fc + 1)

    def __getitem__(self, k):
        if self.dim == 1:
            return self.coeffs[int(k) + self.fc]
        k1, k2 = k
        return self.coeffs[int(k1) + self.fc, int(k2) + self.fc]


@dataclass(frozen=True)
class Geometry:
    """Discrete-grid geometry: fine grid of size N observed up to cutoff fc."""

    N: int
    fc: int

    def __post_init__(self):
        if self.N <= self.n:
            raise ValueError("no super-resolution regime: N must exceed n = 2*fc+1")

    @property
    def n(self) -> int:
        return 2 * self.fc + 1

    @property
    def srf(self) -> float:
        return self.N / self.n

    @property
    def lambda_c(self) -> float:
        return 1.0 / self.fc


def min_separation(T, dim: int = 1) -> float:
    """Minimum wrap-around l-infinity distance between distinct points of T.

    Returns ``inf`` for a single point; raises on an empty family.
    """
    pts = np.asarray(T, dtype=float)
    if dim == 1:
        pts = pts.reshape(-1)
        m = pts.shape[0]
    else:
        pts = pts.reshape(-1, 2)
        m = pts.shape[0]
    if m == 0:
        raise ValueError("empty support")
    if m == 1:
        return np.inf
    if dim == 1:
        d = wrap_distance(pts[:, None], pts[None, :], dim=1)
    else:
        d = wrap_distance(pts[:, None, :], pts[None, :, :], dim=2)
    d = d + np.diag(np.full(m, np.inf))
    return float(d.min())


def sample_spikes(x: AtomicMeasure, fc: int) -> SampleVector:
    """Exact Fourier coefficients ``y_k = sum_j a_j exp(-2i*pi*<k, t_j>)`` for |k| <= fc."""
    if fc < 1:
        raise ValueError("fc must be a positive integer")
    k = np.arange(-fc, fc + 1)
    if x.dim == 1:
        phase = np.exp(-2j * np.pi * np.outer(k, x.locations))
        coeffs = phase @ x.amplitudes if len(x) else np.zeros(2 * fc + 1, dtype=complex)
        return SampleVector(1, fc, coeffs)
    if len(x) == 0:
        return SampleVector(2, fc, np.zeros((2 * fc + 1, 2 * fc + 1), dtype=complex))
    e1 = np.exp(-2j * np.pi * np.outer(k, x.locations[:, 0]))
    e2 = np.exp(-2j * np.pi * np.outer(k, x.locations[:, 1]))
    coeffs = np.einsum("kj,lj,j->kl", e1, e2, x.amplitudes)
    return SampleVector(2, fc, coeffs)


def sample_discrete(xN: np.ndarray, fc: int) -> SampleVector:
    """Partial DFT ``y_k = sum_t x_t exp(-2i*pi*k*t/N)`` for |k| <= fc.

    Equals ``sample_spikes`` applied to the measure supported on the grid
    {t/N}.  Requires the super-resolution regime N > 2*fc + 1.
    """
    x = np.asarray(xN, dtype=complex).reshape(-1)
    N = x.shape[0]
    if N <= 2 * fc + 1:
        raise ValueError("no super-resolution regime: need N > 2*fc+1")
    X = np.fft.fft(x)
    coeffs = np.concatenate([X[N - fc:], X[: fc + 1]])
    return SampleVector(1, fc, coeffs)


def lowpass_project(x, fc: int, grid_size: int):
    """Evaluate the low-pass projection ``(P_n x)(t) = sum_{|k|<=fc} y_k e^{2i*pi*k*t}``.

    ``x`` may be an :class:`AtomicMeasure`, a :class:`SampleVector`, or a
    length-N discrete vector.  Returns ``(t, values)`` on a uniform grid of
    ``grid_size`` points; this is the convolution of the signal with the
    Dirichlet kernel.
    """
    if grid_size < 2 * fc + 2:
        raise ValueError("grid_size must be at least 2*fc+2")
    if isinstance(x, SampleVector):
        y = x
        if y.fc != fc:
            raise ValueError("cutoff mismatch")
    elif isinstance(x, AtomicMeasure):
        y = sample_spikes(x, fc)
    else:
        y = sample_discrete(x, fc)
    t = np.arange(grid_size) / grid_size
    spec = np.zeros(grid_size, dtype=complex)
    k = y.k_values()
    spec[k % grid_size] = y.coeffs
    values = np.fft.ifft(spec) * grid_size
    return t, values


def tv_norm(x: AtomicMeasure) -> float:
    """Total-variation norm of an atomic measure: the l1 norm of its amplitudes."""
    return float(np.sum(np.abs(x.amplitudes)))
