"""Scikit-learn style front end for the spectral kernel ridge solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import solver
from .spectrum import SpectrumModel


class SpectralKernelRidge(RegressorMixin, BaseEstimator):
    """Kernel ridge regression over a truncated Mercer expansion.

    Parameters
    ----------
    model : SpectrumModel
        Kernel spectrum (eigenfunction family plus eigenvalues).
    lam : float, default=1.0
        Regularization strength; the dual system is (K + n*lam*I) alpha = y.

    Attributes
    ----------
    dual_weights_ : solver.DualWeights
        Dual solution with solve metadata.
    coefficients_ : power_space.CoefficientVector
        L2 coefficients of the fitted function in the eigenbasis.
    n_features_in_ : int
        Always 1; inputs are points in [0, 1].
    """

    def __init__(self, model: SpectrumModel = None, lam: float = 1.0):
        self.model = model
        self.lam = lam

    def _validate_points(self, X, reset: bool):
        X = check_array(X, ensure_2d=True, dtype=float)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single feature column, got {X.shape[1]}")
        if reset:
            self.n_features_in_ = 1
        return X[:, 0]

    def fit(self, X, y):
        """Fit on points X of shape (n_samples, 1) with values y."""
        if self.model is None:
            raise ValueError("a SpectrumModel is required; pass model= at construction")
        x = self._validate_points(X, reset=True)
        y = check_array(y, ensure_2d=False, dtype=float)
        if y.ndim != 1 or y.shape[0] != x.shape[0]:
            raise ValueError("y must be one-dimensional and aligned with X")
        data = solver.Dataset(xs=x, ys=y)
        self.dual_weights_ = solver.fit(self.model, data, self.lam)
        self.coefficients_ = solver.extract_coefficients(self.dual_weights_)
        return self

    def predict(self, X):
        check_is_fitted(self, "dual_weights_")
        x = self._validate_points(X, reset=False)
        return np.asarray(solver.predict(self.dual_weights_, x))
