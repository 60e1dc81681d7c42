"""Power-space norms for functions in the truncated eigenbasis.

A function f = sum_i a_i e_i with L2(nu) coefficients ``a`` belongs to the
gamma power space when sum_i a_i^2 mu_i^(-gamma) is finite; that sum is the
squared power norm.  gamma = 0 recovers the L2(nu) norm, gamma = 1 the
kernel-space norm, and intermediate gamma interpolate between them.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .spectrum import SpectrumModel, basis_matrix, embedding_constant


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """L2(nu) coefficients of a function in the model's eigenbasis."""

    coefficients: np.ndarray
    model: SpectrumModel

    def __post_init__(self):
        a = np.asarray(self.coefficients, dtype=float)
        if a.ndim != 1 or a.size != self.model.truncation:
            raise ValueError(
                f"coefficient vector must have length {self.model.truncation}, got shape {a.shape}"
            )
        if not np.all(np.isfinite(a)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coefficients", a)

    def _same_model(self, other: "CoefficientVector") -> None:
        if self.model is not other.model and not np.array_equal(
            self.model.eigenvalues, other.model.eigenvalues
        ):
            raise ValueError("coefficient vectors belong to different models")

    def __sub__(self, other: "CoefficientVector") -> "CoefficientVector":
        self._same_model(other)
        return CoefficientVector(self.coefficients - other.coefficients, self.model)

    def __add__(self, other: "CoefficientVector") -> "CoefficientVector":
        self._same_model(other)
        return CoefficientVector(self.coefficients + other.coefficients, self.model)

    def __rmul__(self, scalar: float) -> "CoefficientVector":
        return CoefficientVector(float(scalar) * self.coefficients, self.model)


def power_norm(f: CoefficientVector, gamma: float) -> float:
    """Norm of f in the gamma power space, sqrt(sum_i a_i^2 mu_i^(-gamma))."""
    if not 0.0 <= gamma <= 2.0:
        raise ValueError("gamma must lie in [0, 2]")
    mu = f.model.eigenvalues
    return float(np.sqrt(np.sum(f.coefficients**2 * mu ** (-gamma))))


def linf_bound(f: CoefficientVector, alpha: float) -> float:
    """Sup-norm bound through the alpha power space.

    |f(x)| <= embedding_constant(alpha) * power_norm(f, alpha) for every x,
    valid for 0 < alpha <= 1.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    return embedding_constant(f.model, alpha) * power_norm(f, alpha)


def eval_function(f: CoefficientVector, points) -> float | np.ndarray:
    """Evaluate sum_i a_i e_i at the given points."""
    arr = np.asarray(points, dtype=float)
    vals = basis_matrix(f.model, points) @ f.coefficients
    if arr.ndim == 0:
        return float(vals[0])
    return vals


def coefficients_to_csv(f: CoefficientVector, path) -> None:
    """Write (index, coefficient) rows; index is 1-based."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "coefficient"])
        for i, a in enumerate(f.coefficients, start=1):
            writer.writerow([i, repr(float(a))])


def coefficients_from_csv(path, model: SpectrumModel) -> CoefficientVector:
    """Read a coefficient vector written by :func:`coefficients_to_csv`."""
    a = np.zeros(model.truncation)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["index", "coefficient"]:
            raise ValueError(f"unexpected CSV header {header!r}")
        for row in reader:
            idx = int(row[0])
            if not 1 <= idx <= model.truncation:
                raise ValueError(f"coefficient index {idx} outside 1..{model.truncation}")
            a[idx - 1] = float(row[1])
    return CoefficientVector(a, model)
