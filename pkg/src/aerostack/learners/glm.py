"""Gaussian identity-link GLM: closed-form ridge regression.

Columns are standardized, the intercept stays unpenalized through column
centering, and coefficients are mapped back to raw feature space.
"""

import numpy as np

from ..errors import DegenerateMatrixError


class RidgeGlmModel:
    __slots__ = ("coef", "intercept", "ridge_lambda")

    def __init__(self, coef, intercept, ridge_lambda):
        self.coef = coef
        self.intercept = intercept
        self.ridge_lambda = ridge_lambda

    def predict_array(self, X):
        return X @ self.coef + self.intercept


def fit_glm(params, X, y, seed):
    n, p = X.shape
    means = X.mean(axis=0)
    sds = X.std(axis=0, ddof=1) if n > 1 else np.zeros(p)
    sds = np.where(sds > 0.0, sds, 1.0)
    Z = (X - means) / sds
    y_bar = float(np.mean(y))

    gram = Z.T @ Z + params.ridge_lambda * np.eye(p)
    rhs = Z.T @ (y - y_bar)
    try:
        w = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        raise DegenerateMatrixError(
            "singular normal equations; add ridge_lambda > 0 or drop collinear columns"
        ) from None

    coef = w / sds
    intercept = y_bar - float(np.dot(coef, means))
    return RidgeGlmModel(coef, intercept, params.ridge_lambda)
