"""Least-squares score and the penalized smooth objective used by the solver."""

import numpy as np

from .acyclicity import acyclicity_expm
from .linalg import check_square


class NumericalOverflowError(FloatingPointError):
    """The objective or its gradient left the representable range."""


def check_data(X):
    """Validate an (n, d) data matrix of i.i.d. observations."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"data matrix must be 2-d, got shape {X.shape}")
    n, d = X.shape
    if n < 1 or d < 2:
        raise ValueError(f"need n >= 1 samples and d >= 2 variables, got {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("data matrix must be finite")
    return X


def _check_dims(W, X):
    if W.shape[0] != X.shape[1]:
        raise ValueError(
            f"W is {W.shape[0]}x{W.shape[0]} but data has d={X.shape[1]} columns"
        )


def ls_loss(W, X):
    """Least-squares reconstruction loss ||X - XW||_F^2 / (2n)."""
    W = check_square(W, "W")
    X = check_data(X)
    _check_dims(W, X)
    R = X - X @ W
    return float((R * R).sum()) / (2.0 * X.shape[0])


def ls_loss_grad(W, X):
    """Gradient X^T (XW - X) / n of :func:`ls_loss` with respect to W."""
    W = check_square(W, "W")
    X = check_data(X)
    _check_dims(W, X)
    return X.T @ (X @ W - X) / X.shape[0]


def penalized_score(W, X, lam):
    """L1-regularized score: least-squares loss plus ``lam * sum |w_ij|``."""
    if lam < 0:
        raise ValueError("lam must be >= 0")
    return ls_loss(W, X) + lam * float(np.abs(W).sum())


def auglag_smooth(W, X, alpha, rho):
    """Smooth part of the augmented Lagrangian and its gradient.

    value    = ls_loss(W, X) + (rho/2) * a(W)^2 + alpha * a(W)
    gradient = ls_loss_grad(W, X) + (rho * a(W) + alpha) * grad a(W)

    where ``a`` is the trace-exponential acyclicity measure.  Raises
    :class:`NumericalOverflowError` when the result is not finite.
    """
    if rho <= 0:
        raise ValueError("rho must be > 0")
    W = check_square(W, "W")
    with np.errstate(over="ignore", invalid="ignore"):
        acyc = acyclicity_expm(W)
        h = np.float64(acyc.value)
        value = np.float64(ls_loss(W, X)) + 0.5 * rho * h * h + alpha * h
        gradient = ls_loss_grad(W, X) + (rho * h + alpha) * acyc.gradient
    if not np.isfinite(value) or not np.isfinite(gradient).all():
        raise NumericalOverflowError("augmented objective overflowed")
    return float(value), gradient


class SmoothObjective:
    """Reusable callback for the smooth augmented objective over vec(W).

    Precomputes the Gram matrix ``X^T X / n`` when ``n > d`` so that each
    evaluation costs O(d^3) regardless of the sample count; for n <= d it
    falls back to the direct residual formula.  Returns ``(inf, 0)`` instead
    of raising when a trial point overflows, so a line search can back off.
    """

    def __init__(self, X):
        X = check_data(X)
        self.n, self.d = X.shape
        self.alpha = 0.0
        self.rho = 1.0
        if self.n > self.d:
            self._gram = X.T @ X / self.n
            self._gram_trace = float(np.trace(self._gram))
            self._X = None
        else:
            self._gram = None
            self._X = X

    def set_multipliers(self, alpha, rho):
        if rho <= 0:
            raise ValueError("rho must be > 0")
        self.alpha = float(alpha)
        self.rho = float(rho)

    def loss_and_grad(self, W):
        if self._gram is not None:
            G = self._gram
            GW = G @ W
            value = 0.5 * (
                self._gram_trace - 2.0 * float((G * W.T).sum()) + float((W * GW).sum())
            )
            grad = GW - G
        else:
            X = self._X
            R = X - X @ W
            value = float((R * R).sum()) / (2.0 * self.n)
            grad = -(X.T @ R) / self.n
        return value, grad

    def __call__(self, w):
        W = np.asarray(w, dtype=float).reshape(self.d, self.d)
        with np.errstate(over="ignore", invalid="ignore"):
            value, grad = self.loss_and_grad(W)
            acyc = acyclicity_expm(W)
            # float64 arithmetic saturates to inf instead of raising on overflow
            h = np.float64(acyc.value)
            total = np.float64(value) + 0.5 * self.rho * h * h + self.alpha * h
            if not np.isfinite(total):
                return np.inf, np.zeros(self.d * self.d)
            full_grad = grad + (self.rho * h + self.alpha) * acyc.gradient
        if not np.isfinite(full_grad).all():
            return np.inf, np.zeros(self.d * self.d)
        return float(total), full_grad.ravel()
