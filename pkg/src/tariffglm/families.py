"""Exponential-family response distributions.

A family bundles the ingredients of the density
``exp((y*theta - b(theta)) / (phi/w) + c(y, phi/w))``: the cumulant
``b`` with its first two derivatives, the variance function ``V(mu)``,
the canonical link pair, and the theta-free remainder ``c``.

Two members are provided.  ``POISSON`` (log link, dispersion pinned at
1) is the production family for claim counts.  ``NORMAL`` (identity
link) has a closed-form maximum-likelihood solution and exists so the
iterative fitter can be checked against ordinary least squares.

All functions accept scalars or numpy arrays; the scalar API raises
instead of returning non-finite values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

__all__ = ["FamilySpec", "POISSON", "NORMAL", "family_by_name"]


@dataclass(frozen=True)
class FamilySpec:
    """One exponential-family member with its canonical link.

    Instances are immutable and stateless; every operation is a pure
    function of its arguments, so a single instance can be shared
    freely across threads.
    """

    name: str
    #: dispersion value when the family pins it (Poisson: 1.0), else None
    dispersion_fixed: float | None
    cumulant: Callable                 # b(theta)
    mean_function: Callable            # b'(theta)
    cumulant_curvature: Callable       # b''(theta)
    variance_function: Callable        # V(mu)
    canonical_link: Callable           # g(mu) = theta
    inverse_link: Callable             # g^-1(eta) = mu
    link_derivative: Callable          # g'(mu)
    log_density_extra: Callable        # c(y, phi/w)
    unit_deviance: Callable            # d(y, mu), summed into the deviance
    initial_mean: Callable             # starting mu for the iterative fitter
    _valid_mean: Callable
    _valid_response: Callable

    def check_mean(self, mu) -> None:
        """Raise DomainError unless ``mu`` lies in the family's mean domain."""
        if not np.all(self._valid_mean(np.asarray(mu, dtype=float))):
            raise DomainError(f"mean {mu!r} outside the {self.name} mean domain")

    def check_response(self, y) -> None:
        """Raise DomainError unless ``y`` is a valid response value."""
        if not np.all(self._valid_response(np.asarray(y, dtype=float))):
            raise DomainError(f"response {y!r} invalid for the {self.name} family")

    def log_density(self, y, mu, dispersion: float = 1.0, weight: float = 1.0):
        """Log-likelihood contribution of one observation.

        ``weight`` is the number of i.i.d. observations that ``y``
        averages, entering through the dispersion as phi/weight.
        """
        if np.any(np.asarray(weight) <= 0):
            raise DomainError(f"weight must be positive, got {weight!r}")
        if dispersion <= 0:
            raise DomainError(f"dispersion must be positive, got {dispersion!r}")
        self.check_mean(mu)
        self.check_response(y)
        psi = dispersion / weight
        theta = self.canonical_link(mu)
        return (y * theta - self.cumulant(theta)) / psi + self.log_density_extra(y, psi)

    def mean_from_theta(self, theta):
        """Mean implied by the natural parameter, b'(theta).

        Overflow surfaces as OverflowError rather than as infinity.
        """
        with np.errstate(over="ignore"):
            mean = self.mean_function(theta)
        if not np.all(np.isfinite(mean)):
            raise OverflowError(
                f"b'(theta) overflows for theta={theta!r} in the {self.name} family"
            )
        return mean

    def variance_of_observation(self, mu, dispersion: float = 1.0, weight: float = 1.0):
        """Observation variance V(mu) * dispersion / weight."""
        if np.any(np.asarray(weight) <= 0):
            raise DomainError(f"weight must be positive, got {weight!r}")
        self.check_mean(mu)
        return self.variance_function(mu) * dispersion / weight


_lgamma = np.vectorize(math.lgamma, otypes=[float])


def _poisson_extra(y, psi):
    # Exact remainder for an average of 1/psi unit-exposure counts:
    # w*y ~ Poisson(w*mu) with w = 1/psi.  Reduces to -log(y!) at w = 1.
    w = 1.0 / np.asarray(psi, dtype=float)
    wy = np.asarray(w * y, dtype=float)
    return wy * np.log(w) - _lgamma(wy + 1.0)


def _poisson_unit_deviance(y, mu):
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ylog = np.where(y > 0, y * np.log(np.where(y > 0, y, 1.0) / mu), 0.0)
    return 2.0 * (ylog - (y - mu))


def _normal_extra(y, psi):
    psi = np.asarray(psi, dtype=float)
    return -np.asarray(y, dtype=float) ** 2 / (2.0 * psi) - 0.5 * np.log(2.0 * math.pi * psi)


POISSON = FamilySpec(
    name="poisson",
    dispersion_fixed=1.0,
    cumulant=np.exp,
    mean_function=np.exp,
    cumulant_curvature=np.exp,
    variance_function=lambda mu: np.asarray(mu, dtype=float),
    canonical_link=np.log,
    inverse_link=np.exp,
    link_derivative=lambda mu: 1.0 / np.asarray(mu, dtype=float),
    log_density_extra=_poisson_extra,
    unit_deviance=_poisson_unit_deviance,
    initial_mean=lambda y: np.asarray(y, dtype=float) + 0.5,
    _valid_mean=lambda mu: (mu > 0) & np.isfinite(mu),
    _valid_response=lambda y: (y >= 0) & np.isfinite(y),
)

NORMAL = FamilySpec(
    name="normal",
    dispersion_fixed=None,
    cumulant=lambda theta: np.asarray(theta, dtype=float) ** 2 / 2.0,
    mean_function=lambda theta: np.asarray(theta, dtype=float),
    cumulant_curvature=lambda theta: np.ones_like(np.asarray(theta, dtype=float)),
    variance_function=lambda mu: np.ones_like(np.asarray(mu, dtype=float)),
    canonical_link=lambda mu: np.asarray(mu, dtype=float),
    inverse_link=lambda eta: np.asarray(eta, dtype=float),
    link_derivative=lambda mu: np.ones_like(np.asarray(mu, dtype=float)),
    log_density_extra=_normal_extra,
    unit_deviance=lambda y, mu: (np.asarray(y, dtype=float) - np.asarray(mu, dtype=float)) ** 2,
    initial_mean=lambda y: np.asarray(y, dtype=float),
    _valid_mean=np.isfinite,
    _valid_response=np.isfinite,
)

_FAMILIES = {"poisson": POISSON, "normal": NORMAL}


def family_by_name(name: str) -> FamilySpec:
    """Look up a family by its lowercase name."""
    try:
        return _FAMILIES[name.lower()]
    except KeyError:
        raise DomainError(
            f"unknown family {name!r}; available: {sorted(_FAMILIES)}"
        ) from None
