"""Model assessment: residual-deviance test, nested comparison, AIC choice.

All decisions use the same operational rule: reject the null hypothesis
exactly when the upper-tail probability of the observed statistic falls
below the significance level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .distributions import chi_square_sf
from .errors import DataError, NestingError
from .fitting import FitResult

__all__ = ["TestReport", "goodness_of_fit", "compare_nested", "select_by_aic"]

REJECT = "reject"
FAIL_TO_REJECT = "fail-to-reject"


@dataclass(frozen=True)
class TestReport:
    """Outcome of one chi-square hypothesis test."""

    statistic: float
    df: int
    p_value: float
    alpha: float
    decision: str
    narrative: str

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value!r} outside [0, 1]")
        expected = REJECT if self.p_value < self.alpha else FAIL_TO_REJECT
        if self.decision != expected:
            raise ValueError(
                f"decision {self.decision!r} inconsistent with p={self.p_value} "
                f"at alpha={self.alpha}"
            )


def _report(statistic: float, df: int, alpha: float, narrative: str) -> TestReport:
    p_value = chi_square_sf(statistic, df)
    decision = REJECT if p_value < alpha else FAIL_TO_REJECT
    return TestReport(
        statistic=statistic,
        df=df,
        p_value=p_value,
        alpha=alpha,
        decision=decision,
        narrative=narrative,
    )


def goodness_of_fit(fit_result: FitResult, alpha: float = 0.05) -> TestReport:
    """Residual-deviance adequacy test.

    H0: the residual deviance is small enough to be explained by
    chi-square variation on n - p degrees of freedom (the model fits).
    Rejected when the upper-tail probability of the scaled deviance
    falls below alpha.
    """
    if fit_result.df_residual <= 0:
        raise DataError(
            "saturated model has no residual degrees of freedom to test"
        )
    return _report(
        statistic=fit_result.scaled_deviance,
        df=fit_result.df_residual,
        alpha=alpha,
        narrative="H0: residual deviance is not significantly large "
        "(model adequate)",
    )


def compare_nested(
    reduced: FitResult, full: FitResult, alpha: float = 0.05
) -> TestReport:
    """Change-in-scaled-deviance test of a reduced model against a full one.

    The statistic is the drop in scaled deviance; under H0 (the reduced
    model suffices) it is chi-square with q = p_full - p_reduced
    degrees of freedom.  ``reject`` means the reduced model is rejected
    in favour of the full one.
    """
    if reduced.data_fingerprint != full.data_fingerprint:
        raise NestingError("models were fitted to different data")
    if reduced.family.name != full.family.name:
        raise NestingError(
            f"models use different families "
            f"({reduced.family.name!r} vs {full.family.name!r})"
        )
    if reduced.offset_column != full.offset_column:
        raise NestingError("models declare different offsets")
    reduced_terms = {t.canonical() for t in reduced.terms}
    full_terms = {t.canonical() for t in full.terms}
    if not (reduced_terms < full_terms):
        raise NestingError(
            "models are not strictly nested: the reduced model's terms "
            "must be a proper subset of the full model's"
        )
    q = full.n_parameters - reduced.n_parameters
    if q <= 0:
        raise NestingError(
            "full model must have more parameters than the reduced model"
        )
    statistic = reduced.scaled_deviance - full.scaled_deviance
    if statistic < 0:
        if statistic < -1e-8:
            raise NestingError(
                f"scaled deviance increased by {-statistic} from reduced to "
                "full model; fits are inconsistent"
            )
        statistic = 0.0
    return _report(
        statistic=statistic,
        df=q,
        alpha=alpha,
        narrative="H0: the reduced model is adequate "
        "(extra terms not needed)",
    )


def select_by_aic(fits: Sequence[FitResult]) -> int:
    """Index of the fit with the smallest AIC.

    Ties go to the fit with fewer parameters, then to the earlier index.
    All fits must share a data fingerprint.
    """
    if not fits:
        raise DataError("cannot select among zero fits")
    fingerprint = fits[0].data_fingerprint
    for candidate in fits[1:]:
        if candidate.data_fingerprint != fingerprint:
            raise DataError("fits were not all made against the same data")
    best = 0
    for i in range(1, len(fits)):
        if fits[i].aic < fits[best].aic or (
            fits[i].aic == fits[best].aic
            and fits[i].n_parameters < fits[best].n_parameters
        ):
            best = i
    return best
