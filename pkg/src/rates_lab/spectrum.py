"""Truncated Mercer kernels with a known spectrum.

A kernel is specified by an orthonormal eigenfunction family ``(e_i)`` of
L2(nu) together with positive, non-increasing eigenvalues ``(mu_i)``,
truncated at index T:

    k(x, y) = sum_{i <= T} mu_i e_i(x) e_i(y).

The initial family is the cosine basis on [0, 1] under the uniform measure,

    e_1(x) = 1,   e_i(x) = sqrt(2) cos((i - 1) pi x)  for i >= 2,

which is orthonormal in L2([0, 1]).  Everything downstream (norms, solver,
rate sweeps, lower bounds) works through :class:`SpectrumModel`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

COSINE_FAMILY = "cosine_uniform_01"
KNOWN_FAMILIES = (COSINE_FAMILY,)

# Grid density for the sup over x in embedding_constant: the summand is a
# trigonometric polynomial of degree < T, so 64*T points resolve its extrema.
_GRID_FACTOR = 64
_CHUNK = 4096


def as_points(x, name: str = "points") -> np.ndarray:
    """Coerce to a float array of evaluation points and enforce the domain.

    Points must be finite and lie in [0, 1]; anything else is a domain error.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim > 1:
        raise ValueError(f"{name} must be scalar or one-dimensional, got shape {arr.shape}")
    flat = np.atleast_1d(arr)
    if flat.size and not np.all(np.isfinite(flat)):
        raise ValueError(f"{name} contains non-finite values")
    if flat.size and (flat.min() < 0.0 or flat.max() > 1.0):
        raise ValueError(f"{name} outside the domain [0, 1]")
    return arr


@dataclass(frozen=True, eq=False)
class SpectrumModel:
    """Eigenfunction family id, eigenvalues and optional decay parameters.

    Parameters
    ----------
    eigenvalues : array_like
        Strictly positive, non-increasing, length T (the truncation level).
    family : str
        Eigenfunction family identifier.  Only ``cosine_uniform_01`` is known.
    decay : tuple (c, p), optional
        Declares the exact power law mu_i = c * i**(-1/p) with c > 0 and
        0 < p <= 1.  Checked against the eigenvalues at construction.
    """

    eigenvalues: np.ndarray
    family: str = COSINE_FAMILY
    decay: tuple[float, float] | None = None
    _embed_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        mu = np.asarray(self.eigenvalues, dtype=float)
        if mu.ndim != 1 or mu.size < 1:
            raise ValueError("eigenvalues must be a non-empty one-dimensional sequence")
        if not np.all(np.isfinite(mu)) or mu.min() <= 0.0:
            raise ValueError("eigenvalues must be finite and strictly positive")
        if np.any(np.diff(mu) > 0.0):
            raise ValueError("eigenvalues must be non-increasing")
        if self.family not in KNOWN_FAMILIES:
            raise ValueError(f"unknown eigenfunction family {self.family!r}")
        if self.decay is not None:
            c, p = self.decay
            if not (c > 0.0 and 0.0 < p <= 1.0):
                raise ValueError("decay parameters require c > 0 and 0 < p <= 1")
            law = c * np.arange(1, mu.size + 1, dtype=float) ** (-1.0 / p)
            if not np.allclose(mu, law, rtol=1e-9, atol=0.0):
                raise ValueError("eigenvalues do not follow the declared power law")
            object.__setattr__(self, "decay", (float(c), float(p)))
        object.__setattr__(self, "eigenvalues", mu)

    @property
    def truncation(self) -> int:
        return int(self.eigenvalues.size)


def power_law_spectrum(c: float = 1.0, p: float = 0.5, truncation: int = 1024) -> SpectrumModel:
    """Model with mu_i = c * i**(-1/p) for i = 1..truncation."""
    if truncation < 1:
        raise ValueError("truncation must be at least 1")
    if not 0.0 < p <= 1.0:
        raise ValueError("decay exponent p must lie in (0, 1]")
    mu = c * np.arange(1, truncation + 1, dtype=float) ** (-1.0 / p)
    return SpectrumModel(eigenvalues=mu, decay=(c, p))


def basis_matrix(model: SpectrumModel, points) -> np.ndarray:
    """Matrix E with E[j, i] = e_{i+1}(points[j]), shape (n, T)."""
    x = np.atleast_1d(as_points(points))
    freqs = np.arange(model.truncation, dtype=float) * math.pi
    e = np.cos(np.outer(x, freqs))
    e[:, 1:] *= math.sqrt(2.0)
    return e


def kernel_eval(model: SpectrumModel, x, y) -> float | np.ndarray:
    """Evaluate k(x, y) = sum_i mu_i e_i(x) e_i(y) elementwise."""
    xa = as_points(x, "x")
    ya = as_points(y, "y")
    bx = basis_matrix(model, xa)
    by = basis_matrix(model, ya)
    if bx.shape[0] == 1 and by.shape[0] > 1:
        bx = np.broadcast_to(bx, by.shape)
    elif by.shape[0] == 1 and bx.shape[0] > 1:
        by = np.broadcast_to(by, bx.shape)
    elif bx.shape[0] != by.shape[0]:
        raise ValueError("x and y must have matching sizes or be scalar")
    vals = np.einsum("ni,i,ni->n", bx, model.eigenvalues, by)
    if xa.ndim == 0 and ya.ndim == 0:
        return float(vals[0])
    return vals


def gram_matrix(model: SpectrumModel, points) -> np.ndarray:
    """Kernel matrix K[i, j] = k(x_i, x_j); symmetric positive semi-definite."""
    e = basis_matrix(model, points)
    if e.shape[0] == 0:
        raise ValueError("gram_matrix needs at least one point")
    k = (e * model.eigenvalues) @ e.T
    return 0.5 * (k + k.T)


def embedding_constant(model: SpectrumModel, gamma: float) -> float:
    """Sup-norm embedding constant of the gamma power space.

    Returns sqrt( sup_x sum_{i <= T} mu_i^gamma e_i(x)^2 ), the operator norm
    of the inclusion of the gamma power space into L-infinity.  The sup is
    taken over a uniform grid of 64*T points plus the endpoint x = 0; for the
    cosine family every summand is maximal at x = 0, so the returned value
    equals sqrt(mu_1^gamma + 2 sum_{i >= 2} mu_i^gamma) exactly.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    key = float(gamma)
    hit = model._embed_cache.get(key)
    if hit is not None:
        return hit
    w = model.eigenvalues ** gamma
    at_zero = w[0] + 2.0 * float(w[1:].sum())
    npts = _GRID_FACTOR * model.truncation + 1
    grid = np.linspace(0.0, 1.0, npts)
    freqs = np.arange(model.truncation, dtype=float) * math.pi
    two_w = 2.0 * w
    best = 0.0
    for start in range(0, npts, _CHUNK):
        sq = np.cos(np.outer(grid[start : start + _CHUNK], freqs)) ** 2
        sums = sq @ two_w - w[0]  # column 0 contributes w[0], not 2*w[0]
        best = max(best, float(sums.max()))
    value = math.sqrt(max(at_zero, best))
    model._embed_cache[key] = value
    return value


def decay_fit(model: SpectrumModel) -> tuple[float, float]:
    """Least-squares power-law fit of the spectrum.

    Fits log mu_i = log c - (1/p) log i over i = 1..T and returns (c, p).
    On an exact power law this recovers the generating parameters to
    floating-point accuracy.
    """
    t = model.truncation
    if t < 4:
        raise ValueError("decay_fit requires at least 4 eigenvalues")
    idx = np.arange(1, t + 1, dtype=float)
    slope, intercept = np.polyfit(np.log(idx), np.log(model.eigenvalues), 1)
    if slope >= 0.0:
        raise ValueError("eigenvalues do not exhibit power-law decay")
    return float(math.exp(intercept)), float(-1.0 / slope)
