"""scikit-learn style wrapper around an extremal pair."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .extremal import KINDS, build_extremal, closed_form_optimal, eval_pair_real, quadrature_optimal


class ExtremalApproximant(TransformerMixin, BaseEstimator):
    """Evaluate the optimal minorant/majorant pair for E_a.

    ``fit`` builds the Laplace and interpolation tables (it ignores its data
    apart from validating it); ``transform`` maps a single column of real
    points x to the two columns [minorant(x), majorant(x)].

    Parameters
    ----------
    a : float
        Vanishing height, a > 0.
    kind : {'heaviside', 'de_branges'}
        Which pair: S_a+- for the Heaviside step or T_a+- for t_a.
    delta : float
        Scaling; the fitted functions are evaluated at delta * x.
    n_grid, t_min, t_max :
        Table resolution and range for g and h.
    """

    def __init__(self, a=1.0, kind="heaviside", delta=1.0, n_grid=8192, t_min=-24.0, t_max=36.0):
        self.a = a
        self.kind = kind
        self.delta = delta
        self.n_grid = n_grid
        self.t_min = t_min
        self.t_max = t_max

    def _validate_params(self):
        if not (isinstance(self.a, (int, float, np.floating)) and self.a > 0):
            raise ValueError(f"a must be a positive number, got {self.a!r}")
        if not (isinstance(self.delta, (int, float, np.floating)) and self.delta > 0):
            raise ValueError(f"delta must be a positive number, got {self.delta!r}")
        if str(self.kind).replace("-", "_") not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if int(self.n_grid) < 128:
            raise ValueError("n_grid must be at least 128")

    def fit(self, X=None, y=None):
        self._validate_params()
        if X is not None:
            check_array(X, ensure_2d=True)
        self.pair_ = build_extremal(
            float(self.a), self.kind, float(self.delta), t_min=self.t_min, t_max=self.t_max, n=int(self.n_grid)
        )
        self.optimal_value_ = closed_form_optimal(self.pair_) if self._has_closed_form() else None
        self.n_features_in_ = 1
        return self

    def _has_closed_form(self):
        return self.pair_.kind == "heaviside" or self.pair_.delta == 1.0

    def transform(self, X):
        check_is_fitted(self, "pair_")
        X = check_array(X, ensure_2d=True, dtype=float)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single column of points, got {X.shape[1]} columns")
        x = X[:, 0]
        return np.column_stack([eval_pair_real(self.pair_, "-", x), eval_pair_real(self.pair_, "+", x)])

    def get_feature_names_out(self, input_features=None):
        return np.array(["minorant", "majorant"], dtype=object)

    def gap_integral(self, X=500.0):
        """Quadrature of majorant minus minorant over [-X, X] with its tail bound."""
        check_is_fitted(self, "pair_")
        return quadrature_optimal(self.pair_, X)
