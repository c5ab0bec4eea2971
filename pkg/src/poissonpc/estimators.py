"""scikit-learn style wrappers around the counting functions.

The library itself is plain functions; these classes let the statistics sit
inside pipelines and parameter searches (``get_params`` / ``set_params``).
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._numeric import fit_exponent
from ._validation import check_values
from .energy import approx_energy
from .lattice.sums import differences
from .paircorr import NEAREST, PairCorrConfig, pair_correlation_curve, ppc_deviation


class PairCorrelation(BaseEstimator):
    """Pair-correlation counts of ``(alpha x_n) mod 1`` on a grid of ``s``."""

    def __init__(self, s_grid=(0.5, 1.0, 1.5, 2.0), alpha=1.0, convention=NEAREST):
        self.s_grid = s_grid
        self.alpha = alpha
        self.convention = convention

    def fit(self, X, y=None):
        x = check_values(X, min_length=2, name="X")
        config = PairCorrConfig(s_grid=tuple(self.s_grid), convention=self.convention,
                                scale_alpha=self.alpha)
        self.curve_ = pair_correlation_curve(x, config)
        self.counts_ = np.asarray(self.curve_.counts, dtype=np.int64)
        self.ratios_ = np.asarray(self.curve_.R)
        self.deviation_ = ppc_deviation(self.curve_)
        return self

    def score(self, X=None, y=None):
        """Negative deviation from the Poisson value ``2s``, so larger is better."""
        check_is_fitted(self, "curve_")
        return -self.deviation_


class DifferenceWeightsTransformer(TransformerMixin, BaseEstimator):
    """Map a window of sequence values to its positive differences ``(x, alpha)``."""

    def __init__(self, N=None, coalesce_eps=0.0):
        self.N = N
        self.coalesce_eps = coalesce_eps

    def fit(self, X, y=None):
        check_values(X, min_length=2, name="X")
        return self

    def transform(self, X):
        x = check_values(X, min_length=2, name="X")
        w = differences(x, self.N, self.coalesce_eps)
        return np.column_stack([w.x, w.alpha.astype(np.float64)])


class ApproxEnergy(BaseEstimator):
    """``E*_{N, gamma}`` of a window."""

    def __init__(self, gamma=1.0, method="auto"):
        self.gamma = gamma
        self.method = method

    def fit(self, X, y=None):
        x = check_values(X, name="X")
        self.result_ = approx_energy(x, gamma=self.gamma, method=self.method)
        self.value_ = self.result_.value
        return self


class EnergyExponent(RegressorMixin, BaseEstimator):
    """Power-law fit ``value ~ 2^intercept * N^slope`` on log2 axes."""

    def __init__(self, offset=0.0):
        self.offset = offset

    def fit(self, X, y):
        ns = check_values(np.ravel(X), min_length=3, name="N")
        vals = check_values(y, min_length=3, name="values")
        self.fit_ = fit_exponent(ns, vals, offset=self.offset)
        self.slope_ = self.fit_.slope
        self.intercept_ = self.fit_.intercept
        self.residual_ = self.fit_.residual
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        return self.fit_.predict(check_values(np.ravel(X), name="N")) - self.offset
