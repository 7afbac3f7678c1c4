"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own code paths:
maximum likelihood by finite-difference Newton on the raw
log-likelihood, weighted least squares by the normal equations, and
the stationary distribution by a dense eigen-solve.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

import tariffglm as tg


@pytest.fixture(scope="session")
def portfolio():
    return tg.load_bundled_portfolio()


def poisson_log_likelihood_raw(beta, x, y, offset):
    """Raw Poisson log-likelihood, written directly from the density."""
    eta = x @ beta + offset
    mu = np.exp(eta)
    return float(np.sum(y * np.log(mu) - mu - [math.lgamma(v + 1.0) for v in y]))


def newton_poisson_mle(x, y, offset=None, max_iter=200):
    """Generic Newton maximizer with finite-difference derivatives.

    Independent of the IRLS fitter: no working weights, no link
    machinery, just the raw log-likelihood surface.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    offset = np.zeros(len(y)) if offset is None else np.asarray(offset, dtype=float)
    p = x.shape[1]

    def nll(beta):
        return -poisson_log_likelihood_raw(beta, x, y, offset)

    def gradient(beta, h=1e-6):
        g = np.zeros(p)
        for j in range(p):
            step = np.zeros(p)
            step[j] = h
            g[j] = (nll(beta + step) - nll(beta - step)) / (2 * h)
        return g

    def hessian(beta, h=1e-4):
        m = np.zeros((p, p))
        for i in range(p):
            for j in range(p):
                ei = np.zeros(p)
                ej = np.zeros(p)
                ei[i] = h
                ej[j] = h
                m[i, j] = (
                    nll(beta + ei + ej)
                    - nll(beta + ei - ej)
                    - nll(beta - ei + ej)
                    + nll(beta - ei - ej)
                ) / (4 * h * h)
        return (m + m.T) / 2
    beta = np.zeros(p)
    value = nll(beta)
    for _ in range(max_iter):
        g = gradient(beta)
        if np.linalg.norm(g) < 1e-9:
            break
        step = np.linalg.solve(hessian(beta), g)
        candidate = beta - step
        for _ in range(40):  # halve until the objective improves
            if nll(candidate) <= value + 1e-12:
                break
            step /= 2
            candidate = beta - step
        if np.linalg.norm(step) < 1e-11:
            beta = candidate
            break
        beta = candidate
        value = nll(beta)
    return beta


def wls_closed_form(x, y, weights):
    """Weighted least squares by the normal equations."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(weights, dtype=float)
    xtw = x.T * w
    return np.linalg.solve(xtw @ x, xtw @ np.asarray(y, dtype=float))


def stationary_by_eigen(matrix):
    """Stationary row vector of a stochastic matrix via a dense solve.

    Solves pi (P - I) = 0 with the normalization sum(pi) = 1 as an
    overdetermined linear system.
    """
    n = matrix.shape[0]
    a = np.vstack([(matrix - np.eye(n)).T, np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    solution, *_ = np.linalg.lstsq(a, b, rcond=None)
    return solution


def make_design(matrix, y, labels=None, offset=None, weights=None, **extra):
    """Hand-built DesignMatrix for fitter-level tests."""
    matrix = np.asarray(matrix, dtype=float)
    n, p = matrix.shape
    return tg.DesignMatrix(
        matrix=matrix,
        column_labels=tuple(labels) if labels else tuple(f"x{i}" for i in range(p)),
        response_vector=np.asarray(y, dtype=float),
        offset_vector=np.zeros(n) if offset is None else np.asarray(offset, dtype=float),
        weight_vector=np.ones(n) if weights is None else np.asarray(weights, dtype=float),
        **extra,
    )


def make_fit_stub(
    *,
    deviance=1.0,
    n_parameters=2,
    df_residual=10,
    aic=None,
    terms=None,
    coefficients=None,
    factor_levels=None,
    fingerprint="stub-data",
    family=None,
    converged=True,
    offset_column=None,
):
    """FitResult with hand-picked headline numbers for inference tests."""
    family = family or tg.POISSON
    if coefficients is None:
        coefficients = {f"b{i}": 0.0 for i in range(n_parameters)}
    labels = tuple(coefficients)
    p = len(coefficients)
    zeros = {label: 0.0 for label in labels}
    n = df_residual + p
    return tg.FitResult(
        coefficients=dict(coefficients),
        covariance=np.eye(p),
        std_errors={label: 1.0 for label in labels},
        z_values=zeros,
        p_values={label: 1.0 for label in labels},
        fitted_means=np.ones(n),
        linear_predictors=np.zeros(n),
        deviance=deviance,
        scaled_deviance=deviance,
        null_deviance=deviance,
        df_residual=df_residual,
        df_null=n - 1,
        log_likelihood=0.0,
        aic=aic if aic is not None else deviance + 2 * p,
        n_iterations=1,
        converged=converged,
        family=family,
        column_labels=labels,
        response_vector=np.ones(n),
        prior_weights=np.ones(n),
        offset_vector=np.zeros(n),
        dispersion=1.0,
        terms=tuple(terms) if terms else (tg.Term("intercept", ()),),
        factor_levels=dict(factor_levels) if factor_levels else {},
        offset_column=offset_column,
        data_fingerprint=fingerprint,
    )
