"""Rating output from a fitted model.

A tariff assigns each combination of risk-factor levels an annual
claim rate (per unit exposure), the expected number of years until one
claim, and a relativity: the multiplicative factor against the base
cell, which is the cell holding every factor at its reference level.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from typing import IO, Mapping

from .design import interaction_label, main_effect_label
from .errors import DataError, DomainError
from .fitting import FitResult

__all__ = ["TariffCell", "TariffTable", "predict_rate", "years_to_one_claim", "build_tariff_table"]


@dataclass(frozen=True)
class TariffCell:
    annual_rate: float
    years_to_one_claim: float
    relativity: float


@dataclass(frozen=True)
class TariffTable:
    """Rates over the full factor grid of a fitted model.

    ``dimensions`` lists (factor, levels) in model declaration order;
    ``cells`` maps each level combination (same order) to its rates.
    """

    dimensions: tuple[tuple[str, tuple[str, ...]], ...]
    cells: Mapping[tuple[str, ...], TariffCell]

    @property
    def base_combination(self) -> tuple[str, ...]:
        return tuple(levels[0] for _, levels in self.dimensions)

    def write_csv(self, stream: IO[str]) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(
            [name for name, _ in self.dimensions]
            + ["annual_rate", "years_to_one_claim", "relativity"]
        )
        for combo, cell in self.cells.items():
            writer.writerow(
                list(combo)
                + [repr(cell.annual_rate), repr(cell.years_to_one_claim), repr(cell.relativity)]
            )

    def to_json_obj(self) -> dict:
        return {
            "dimensions": [
                {"factor": name, "levels": list(levels)}
                for name, levels in self.dimensions
            ],
            "cells": [
                {
                    "levels": dict(zip((n for n, _ in self.dimensions), combo)),
                    "annual_rate": cell.annual_rate,
                    "years_to_one_claim": cell.years_to_one_claim,
                    "relativity": cell.relativity,
                }
                for combo, cell in self.cells.items()
            ],
        }


def _active_sum(fit_result: FitResult, cell: Mapping[str, str], include_intercept: bool) -> float:
    """Sum of the fitted coefficients active for this level combination."""
    coefficients = fit_result.coefficients
    total = 0.0
    for term in fit_result.terms:
        if term.kind == "intercept":
            if include_intercept:
                total += next(iter(coefficients.values()))
        elif term.kind == "main":
            (factor,) = term.factors
            levels = fit_result.factor_levels[factor]
            level = cell[factor]
            if level != levels[0]:
                total += coefficients[main_effect_label(factor, level)]
        else:
            factor_a, factor_b = term.factors
            level_a, level_b = cell[factor_a], cell[factor_b]
            if (
                level_a != fit_result.factor_levels[factor_a][0]
                and level_b != fit_result.factor_levels[factor_b][0]
            ):
                total += coefficients[
                    interaction_label(factor_a, level_a, factor_b, level_b)
                ]
    return total


def _check_cell(fit_result: FitResult, cell: Mapping[str, str]) -> None:
    if not fit_result.converged:
        raise DataError("cannot predict from a fit that did not converge")
    for factor in cell:
        if factor not in fit_result.factor_levels:
            raise DataError(f"factor {factor!r} is not part of the fitted model")
    for factor, levels in fit_result.factor_levels.items():
        if factor not in cell:
            raise DataError(f"cell does not specify a level for factor {factor!r}")
        if cell[factor] not in levels:
            raise DataError(
                f"unknown level {cell[factor]!r} for factor {factor!r} "
                f"(levels: {', '.join(levels)})"
            )


def predict_rate(fit_result: FitResult, cell: Mapping[str, str]) -> float:
    """Expected claims per unit exposure for one level combination.

    The offset is taken as zero, so the result is a pure rate rather
    than a fitted count.
    """
    _check_cell(fit_result, cell)
    return float(
        fit_result.family.inverse_link(_active_sum(fit_result, cell, include_intercept=True))
    )


def years_to_one_claim(rate: float) -> float:
    """Expected years of exposure until a policyholder's first claim."""
    if not rate > 0:
        raise DomainError(f"annual rate must be positive, got {rate!r}")
    return 1.0 / rate


def build_tariff_table(fit_result: FitResult) -> TariffTable:
    """Rates, waiting times, and relativities over the whole factor grid.

    Relativity is the cell rate divided by the base-cell rate; the base
    cell itself therefore carries a relativity of exactly 1.
    """
    if not fit_result.factor_levels:
        base_rate = predict_rate(fit_result, {})
        return TariffTable(
            dimensions=(),
            cells={(): TariffCell(base_rate, years_to_one_claim(base_rate), 1.0)},
        )
    dimensions = tuple(
        (factor, levels) for factor, levels in fit_result.factor_levels.items()
    )
    names = tuple(name for name, _ in dimensions)
    base_rate = predict_rate(
        fit_result, dict(zip(names, (levels[0] for _, levels in dimensions)))
    )
    cells = {}
    for combo in itertools.product(*(levels for _, levels in dimensions)):
        rate = predict_rate(fit_result, dict(zip(names, combo)))
        cells[combo] = TariffCell(
            annual_rate=rate,
            years_to_one_claim=years_to_one_claim(rate),
            relativity=rate / base_rate,
        )
    return TariffTable(dimensions=dimensions, cells=cells)
