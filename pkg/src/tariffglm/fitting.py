"""Maximum-likelihood GLM fitting by iteratively reweighted least squares.

Each iteration regresses the working response
``z = eta - offset + (y - mu) * g'(mu)`` on the design columns with
working weights ``w / (V(mu) * g'(mu)^2)``, solving the weighted
least-squares step through an orthogonal decomposition (never by
forming and inverting the normal equations).  Iteration stops when the
relative deviance change ``|D_t - D_{t-1}| / (|D_t| + 0.1)`` drops
below the tolerance; a step that increases the deviance is halved back
toward the previous coefficients a bounded number of times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .design import DesignMatrix, assert_full_column_rank
from .distributions import standard_normal_sf
from .errors import DataError, NonConvergenceError
from .families import FamilySpec
from .formula import Term

__all__ = [
    "FitControls",
    "FitResult",
    "WaldStatistic",
    "fit",
    "log_likelihood",
    "deviance_pair",
    "wald_statistics",
]


@dataclass(frozen=True)
class FitControls:
    """Convergence settings for the iterative fitter."""

    tolerance: float = 1e-8
    max_iterations: int = 25
    max_step_halvings: int = 10
    error_on_nonconvergence: bool = True


@dataclass(frozen=True)
class FitResult:
    """Everything produced by one maximum-likelihood fit.

    Immutable; the arrays are snapshots of the fitting data, so results
    remain self-describing after the design object is gone.
    """

    coefficients: Mapping[str, float]
    covariance: np.ndarray
    std_errors: Mapping[str, float]
    z_values: Mapping[str, float]
    p_values: Mapping[str, float]
    fitted_means: np.ndarray
    linear_predictors: np.ndarray
    deviance: float
    scaled_deviance: float
    null_deviance: float
    df_residual: int
    df_null: int
    log_likelihood: float
    aic: float
    n_iterations: int
    converged: bool
    family: FamilySpec
    column_labels: tuple[str, ...]
    response_vector: np.ndarray
    prior_weights: np.ndarray
    offset_vector: np.ndarray
    dispersion: float
    terms: tuple[Term, ...]
    factor_levels: Mapping[str, tuple[str, ...]]
    offset_column: str | None
    data_fingerprint: str
    deviance_trace: tuple[float, ...] = field(repr=False, default=())

    @property
    def n_parameters(self) -> int:
        return len(self.coefficients)

    @property
    def n_observations(self) -> int:
        return len(self.response_vector)

    @property
    def residuals(self) -> np.ndarray:
        """Response-scale residuals y - mu_hat."""
        return self.response_vector - self.fitted_means

    def coefficient_vector(self) -> np.ndarray:
        return np.array(list(self.coefficients.values()), dtype=float)


@dataclass(frozen=True)
class WaldStatistic:
    label: str
    estimate: float
    std_error: float
    z_value: float
    p_value: float


def _deviance(family: FamilySpec, y, mu, weights) -> float:
    return float(np.sum(weights * family.unit_deviance(y, mu)))


def _total_log_likelihood(family: FamilySpec, y, mu, dispersion, weights) -> float:
    return float(np.sum(family.log_density(y, mu, dispersion, weights)))


def _solve_wls(x: np.ndarray, z: np.ndarray, working_weights: np.ndarray) -> np.ndarray:
    root = np.sqrt(working_weights)
    beta, *_ = np.linalg.lstsq(root[:, None] * x, root * z, rcond=None)
    return beta


def _irls(
    x: np.ndarray,
    y: np.ndarray,
    offset: np.ndarray,
    weights: np.ndarray,
    family: FamilySpec,
    controls: FitControls,
):
    """Core loop.  Returns (beta, mu, eta, deviance trace, converged)."""
    mu = family.initial_mean(y)
    eta = offset + family.canonical_link(mu)
    deviance = _deviance(family, y, mu, weights)
    trace = [deviance]
    beta = None
    converged = False

    for _ in range(controls.max_iterations):
        g_prime = family.link_derivative(mu)
        working_z = (eta - offset) + (y - mu) * g_prime
        working_w = weights / (family.variance_function(mu) * g_prime**2)
        proposal = _solve_wls(x, working_z, working_w)

        def step_state(candidate):
            with np.errstate(over="ignore", invalid="ignore"):
                eta_c = x @ candidate + offset
                mu_c = family.inverse_link(eta_c)
                if np.all(np.isfinite(mu_c)) and np.all(family._valid_mean(mu_c)):
                    return eta_c, mu_c, _deviance(family, y, mu_c, weights)
            return eta_c, mu_c, math.inf

        eta_new, mu_new, dev_new = step_state(proposal)
        halvings = 0
        while (
            (not math.isfinite(dev_new) or dev_new > deviance)
            and beta is not None
            and halvings < controls.max_step_halvings
        ):
            proposal = (proposal + beta) / 2.0
            eta_new, mu_new, dev_new = step_state(proposal)
            halvings += 1
        if not math.isfinite(dev_new):
            raise NonConvergenceError(
                "deviance diverged (possible separation); no valid step found",
                trace=tuple(trace),
            )

        beta, eta, mu = proposal, eta_new, mu_new
        previous, deviance = deviance, dev_new
        trace.append(deviance)
        if abs(deviance - previous) / (abs(deviance) + 0.1) < controls.tolerance:
            converged = True
            break

    # offset stays fixed; eta here includes it
    return beta, mu, eta, trace, converged


def fit(
    design: DesignMatrix, family: FamilySpec, controls: FitControls | None = None
) -> FitResult:
    """Fit a GLM by IRLS and assemble the full result record."""
    controls = controls or FitControls()
    x = np.asarray(design.matrix, dtype=float)
    y = np.asarray(design.response_vector, dtype=float)
    offset = np.asarray(design.offset_vector, dtype=float)
    weights = np.asarray(design.weight_vector, dtype=float)
    n, p = x.shape

    if n < p:
        raise DataError(f"more parameters ({p}) than observations ({n})")
    if np.any(weights <= 0):
        raise DataError("prior weights must all be positive")
    family.check_response(y)
    assert_full_column_rank(x, design.column_labels)

    beta, mu, eta, trace, converged = _irls(x, y, offset, weights, family, controls)
    if not converged and controls.error_on_nonconvergence:
        raise NonConvergenceError(
            f"IRLS did not converge in {controls.max_iterations} iterations",
            trace=tuple(trace),
        )

    dispersion = family.dispersion_fixed if family.dispersion_fixed is not None else 1.0
    deviance = trace[-1]
    scaled_deviance = deviance / dispersion

    # covariance = (X' W X)^-1 from the R factor of the weighted design
    working_w = weights / (family.variance_function(mu) * family.link_derivative(mu) ** 2)
    _, r = np.linalg.qr(np.sqrt(working_w)[:, None] * x)
    r_inv = np.linalg.solve(r, np.eye(p))
    covariance = dispersion * (r_inv @ r_inv.T)
    covariance = (covariance + covariance.T) / 2.0

    std_errors = np.sqrt(np.diag(covariance))
    with np.errstate(invalid="ignore", divide="ignore"):
        z_values = np.where(std_errors > 0, beta / std_errors, 0.0)
    p_values = np.array([2.0 * standard_normal_sf(abs(z)) for z in z_values])

    loglik = _total_log_likelihood(family, y, mu, dispersion, weights)
    aic = -2.0 * loglik + 2.0 * p

    if p == 1 and np.allclose(x, 1.0):
        null_deviance = deviance
    else:
        # reporting quantity only: fitted with the default settings even
        # when the caller tightened the main iteration budget
        _, null_mu, _, null_trace, null_ok = _irls(
            np.ones((n, 1)), y, offset, weights, family, FitControls()
        )
        if not null_ok and controls.error_on_nonconvergence:
            raise NonConvergenceError(
                "intercept-only fit for the null deviance did not converge",
                trace=tuple(null_trace),
            )
        null_deviance = _deviance(family, y, null_mu, weights)

    labels = design.column_labels
    return FitResult(
        coefficients=dict(zip(labels, (float(b) for b in beta))),
        covariance=covariance,
        std_errors=dict(zip(labels, (float(s) for s in std_errors))),
        z_values=dict(zip(labels, (float(z) for z in z_values))),
        p_values=dict(zip(labels, (float(q) for q in p_values))),
        fitted_means=mu,
        linear_predictors=eta,
        deviance=deviance,
        scaled_deviance=scaled_deviance,
        null_deviance=null_deviance,
        df_residual=n - p,
        df_null=n - 1,
        log_likelihood=loglik,
        aic=aic,
        n_iterations=len(trace) - 1,
        converged=converged,
        family=family,
        column_labels=labels,
        response_vector=y,
        prior_weights=weights,
        offset_vector=offset,
        dispersion=dispersion,
        terms=design.terms,
        factor_levels=dict(design.factor_levels),
        offset_column=design.offset_column,
        data_fingerprint=design.data_fingerprint(),
        deviance_trace=tuple(trace),
    )


def log_likelihood(fit_result: FitResult, design: DesignMatrix, family: FamilySpec) -> float:
    """Full log-likelihood at the fitted means, including the c(y, phi/w) term."""
    return _total_log_likelihood(
        family,
        np.asarray(design.response_vector, dtype=float),
        fit_result.fitted_means,
        fit_result.dispersion,
        np.asarray(design.weight_vector, dtype=float),
    )


def deviance_pair(fit_result: FitResult, family: FamilySpec | None = None) -> tuple[float, float]:
    """(deviance, scaled deviance) recomputed from the stored fit data.

    The deviance is twice the dispersion-scaled log-likelihood gap to
    the saturated model, which for these families reduces to the summed
    unit deviances; a zero count contributes no y*log(y/mu) term.
    """
    family = family or fit_result.family
    deviance = _deviance(
        family,
        fit_result.response_vector,
        fit_result.fitted_means,
        fit_result.prior_weights,
    )
    return deviance, deviance / fit_result.dispersion


def wald_statistics(fit_result: FitResult) -> tuple[WaldStatistic, ...]:
    """Per-coefficient (estimate, standard error, z, two-sided p)."""
    rows = []
    for label, estimate in fit_result.coefficients.items():
        se = fit_result.std_errors[label]
        z = estimate / se if se > 0 else 0.0
        rows.append(
            WaldStatistic(
                label=label,
                estimate=estimate,
                std_error=se,
                z_value=z,
                p_value=2.0 * standard_normal_sf(abs(z)),
            )
        )
    return tuple(rows)
