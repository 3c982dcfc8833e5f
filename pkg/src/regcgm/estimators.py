"""scikit-learn style regressors fitted with the CG solvers."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .cgm import SolveOptions
from .harness.bench import canonical_variant, line_search_params, solve_variant
from .problems.ml import GroupLassoInstance, HuberInstance, glasso_problem, huber_problem


class _CGMRegressor(RegressorMixin, BaseEstimator):
    def _options(self):
        return SolveOptions(eps=self.tol, max_iters=self.max_iter, ls=line_search_params(self.line_search))

    def _solve(self, problem):
        rep = solve_variant(problem, canonical_variant(self.variant), self._options())
        self.coef_ = rep.x
        self.n_iter_ = rep.iters
        self.status_ = rep.status.value
        self.objective_ = rep.f_star
        self.n_cubic_ = rep.n_cubic_invocations
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = validate_data(self, X, reset=False)
        return X @ self.coef_


class CGMHuberRegressor(_CGMRegressor):
    """Linear regression under the Huber loss (threshold 1).

    Parameters
    ----------
    variant : {"powell", "nopowell", "hybrid"}
    tol : float, optional
        Absolute gradient-norm tolerance; the solver's relative default if None.
    max_iter : int
    line_search : {"default", "near_exact", "exact"}

    Attributes
    ----------
    coef_ : ndarray of shape (n_features,)
    n_iter_ : int
    status_ : str
    """

    def __init__(self, variant="hybrid", tol=None, max_iter=10000, line_search="default"):
        self.variant = variant
        self.tol = tol
        self.max_iter = max_iter
        self.line_search = line_search

    def fit(self, X, y):
        X, y = validate_data(self, X, y, y_numeric=True)
        return self._solve(huber_problem(HuberInstance(X, y)))


class CGMGroupLassoRegressor(_CGMRegressor):
    """Least squares with a group-l2 penalty ``rho * sum_i ||w_i||``.

    Parameters
    ----------
    groups : sequence of int
        Sizes of consecutive feature groups; must sum to n_features.
    rho : float, optional
        Penalty weight; ``0.001 * ||X'y||_inf`` if None.
    variant, tol, max_iter, line_search
        As for :class:`CGMHuberRegressor`.
    """

    def __init__(self, groups=None, rho=None, variant="hybrid", tol=None, max_iter=10000,
                 line_search="default"):
        self.groups = groups
        self.rho = rho
        self.variant = variant
        self.tol = tol
        self.max_iter = max_iter
        self.line_search = line_search

    def fit(self, X, y):
        X, y = validate_data(self, X, y, y_numeric=True)
        groups = (X.shape[1],) if self.groups is None else tuple(self.groups)
        rho = 1e-3 * float(np.abs(X.T @ y).max()) if self.rho is None else float(self.rho)
        inst = GroupLassoInstance(X, y, groups, rho)
        self.rho_ = rho
        return self._solve(glasso_problem(inst))
