"""Logistic regression by iteratively reweighted least squares.

Shared by the propensity fits, the permutation-submodel nuisances, and
the simulation diagnostics.  Kept minimal on purpose: dense design,
Newton steps with halving, explicit separation detection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, SeparationError
from .families import expit


@dataclass(frozen=True)
class LogisticFit:
    coef: np.ndarray
    cov: np.ndarray          # inverse observed information
    iterations: int
    converged: bool
    separation_flag: bool


def fit_logistic(design: np.ndarray, response: np.ndarray, tol: float = 1e-10,
                 max_iter: int = 100) -> LogisticFit:
    """Maximize the Bernoulli log-likelihood of ``response`` on ``design``."""
    X = np.asarray(design, dtype=float)
    t = np.asarray(response, dtype=float)
    n, p = X.shape
    if n == 0:
        raise NumericalError("empty stratum in logistic fit")
    if np.all(t == t[0]):
        raise SeparationError("response is constant; no finite fit",
                              direction=1 if t[0] == 1 else -1)

    beta = np.zeros(p)
    ll = _loglik(X, t, beta)
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        p_hat = expit(X @ beta)
        grad = X.T @ (t - p_hat)
        w = p_hat * (1.0 - p_hat)
        hess = X.T @ (X * w[:, None])
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError as exc:
            raise SeparationError(f"singular information matrix: {exc}") from exc
        # halve until the likelihood does not decrease
        scale = 1.0
        for _ in range(30):
            cand = beta + scale * step
            ll_new = _loglik(X, t, cand)
            if ll_new >= ll - 1e-12:
                break
            scale *= 0.5
        beta = beta + scale * step
        ll = max(ll, ll_new)
        if np.linalg.norm(grad) <= tol:
            converged = True
            break

    separation = (not converged and np.max(np.abs(beta)) > 30.0)
    p_hat = expit(X @ beta)
    w = p_hat * (1.0 - p_hat)
    hess = X.T @ (X * w[:, None])
    try:
        cov = np.linalg.inv(hess)
    except np.linalg.LinAlgError:
        cov = np.full((p, p), np.nan)
        separation = True
    return LogisticFit(coef=beta, cov=cov, iterations=it, converged=converged,
                       separation_flag=separation)


def _loglik(X, t, beta):
    lin = X @ beta
    return float(np.sum(t * lin - np.logaddexp(0.0, lin)))
