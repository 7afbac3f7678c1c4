"""Portfolio data handling and design-matrix construction.

A portfolio is a list of aggregated cells: categorical risk-factor
levels, an observed claim count, and a positive exposure (policy-years
at risk).  Factors are encoded by treatment contrasts: the first
declared level of each factor is the reference and is dropped, so a
model with an intercept never carries a redundant column.  Genuine
redundancy (the dummy trap) is detected and reported by column name
rather than silently absorbed by a pseudo-inverse.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from typing import IO, Mapping

import numpy as np

from .errors import DataError, RankDeficiencyError
from .formula import ModelFormula, Term

__all__ = [
    "FactorSchema",
    "Observation",
    "PortfolioDataset",
    "DesignMatrix",
    "load_portfolio",
    "infer_schema",
    "encode_design",
    "main_effect_label",
    "interaction_label",
    "INTERCEPT_LABEL",
]

INTERCEPT_LABEL = "(Intercept)"


@dataclass(frozen=True)
class FactorSchema:
    """Declared risk factors with their ordered level lists.

    The first level of each factor is its reference level.  ``claims``
    and ``exposure`` name the response and exposure CSV columns.
    """

    factors: Mapping[str, tuple[str, ...]]
    claims_column: str = "claims"
    exposure_column: str = "exposure"

    def __post_init__(self):
        for name, levels in self.factors.items():
            if len(levels) < 1:
                raise DataError(f"factor {name!r} declares no levels")
            if len(set(levels)) != len(levels):
                raise DataError(f"factor {name!r} has duplicate levels")
            if name in (self.claims_column, self.exposure_column):
                raise DataError(
                    f"factor {name!r} collides with a reserved column name"
                )


@dataclass(frozen=True)
class Observation:
    """One aggregated cell: factor levels, claim count, exposure."""

    levels: Mapping[str, str]
    claims: int
    exposure: float


@dataclass(frozen=True)
class PortfolioDataset:
    """Observations plus the schema they conform to.

    ``exposure_defaulted`` is set when the source file had no exposure
    column and every exposure was filled with 1.0.
    """

    rows: tuple[Observation, ...]
    schema: FactorSchema
    exposure_defaulted: bool = False

    def __len__(self) -> int:
        return len(self.rows)

    def claims_vector(self) -> np.ndarray:
        return np.array([row.claims for row in self.rows], dtype=float)

    def exposure_vector(self) -> np.ndarray:
        return np.array([row.exposure for row in self.rows], dtype=float)


@dataclass(frozen=True)
class DesignMatrix:
    """Numeric encoding of a formula against a dataset.

    ``offset_vector`` is the known additive part of the linear
    predictor (log exposure when declared, zeros otherwise), and
    ``weight_vector`` holds prior weights (all ones for count data;
    exposure enters through the offset instead).
    """

    matrix: np.ndarray
    column_labels: tuple[str, ...]
    response_vector: np.ndarray
    offset_vector: np.ndarray
    weight_vector: np.ndarray
    terms: tuple[Term, ...] = ()
    factor_levels: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    offset_column: str | None = None
    response_name: str = "y"

    @property
    def n_observations(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_parameters(self) -> int:
        return self.matrix.shape[1]

    def data_fingerprint(self) -> str:
        """Hash identifying the modelled data (response, weights, size)."""
        digest = hashlib.sha256()
        digest.update(self.response_name.encode())
        digest.update(str(self.n_observations).encode())
        digest.update(np.ascontiguousarray(self.response_vector, dtype=float).tobytes())
        digest.update(np.ascontiguousarray(self.weight_vector, dtype=float).tobytes())
        return digest.hexdigest()


def main_effect_label(factor: str, level: str) -> str:
    """Column label for a non-reference main-effect level, e.g. ``region2``."""
    return f"{factor}{level}"


def interaction_label(factor_a: str, level_a: str, factor_b: str, level_b: str) -> str:
    """Column label for an interaction cell, e.g. ``region2:type3``."""
    return f"{factor_a}{level_a}:{factor_b}{level_b}"


def load_portfolio(source: IO[bytes] | IO[str] | str, schema: FactorSchema) -> PortfolioDataset:
    """Read a portfolio CSV into a validated dataset.

    ``source`` may be a path, a text stream, or a binary (UTF-8)
    stream.  The header must contain every declared factor and the
    claims column; a missing exposure column is filled with 1.0 and
    flagged on the returned dataset.
    """
    if isinstance(source, str):
        with open(source, "rb") as fh:
            return load_portfolio(fh, schema)
    raw = source.read()
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DataError(f"portfolio CSV is not valid UTF-8: {exc}") from exc
    else:
        text = raw

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("portfolio CSV is empty (no header row)") from None
    header = [h.strip() for h in header]
    positions = {name: i for i, name in enumerate(header)}

    for factor in schema.factors:
        if factor not in positions:
            raise DataError(f"missing factor column {factor!r} in CSV header")
    if schema.claims_column not in positions:
        raise DataError(f"missing claims column {schema.claims_column!r} in CSV header")
    has_exposure = schema.exposure_column in positions

    rows: list[Observation] = []
    for lineno, record in enumerate(reader, start=2):
        if not record or (len(record) == 1 and not record[0].strip()):
            continue  # blank line
        if len(record) < len(header):
            raise DataError(
                f"row {lineno}: expected {len(header)} cells, found {len(record)}"
            )
        levels = {}
        for factor, declared in schema.factors.items():
            value = record[positions[factor]].strip()
            if value not in declared:
                raise DataError(
                    f"row {lineno}, column {factor!r}: unknown level {value!r} "
                    f"(declared: {', '.join(declared)})"
                )
            levels[factor] = value
        claims_text = record[positions[schema.claims_column]].strip()
        try:
            claims = int(claims_text)
        except ValueError:
            raise DataError(
                f"row {lineno}, column {schema.claims_column!r}: "
                f"claim count {claims_text!r} is not an integer"
            ) from None
        if claims < 0:
            raise DataError(
                f"row {lineno}, column {schema.claims_column!r}: "
                f"claim count must be nonnegative, got {claims}"
            )
        if has_exposure:
            exposure_text = record[positions[schema.exposure_column]].strip()
            try:
                exposure = float(exposure_text)
            except ValueError:
                raise DataError(
                    f"row {lineno}, column {schema.exposure_column!r}: "
                    f"exposure {exposure_text!r} is not a number"
                ) from None
            if not exposure > 0:
                raise DataError(
                    f"row {lineno}, column {schema.exposure_column!r}: "
                    f"exposure must be positive, got {exposure_text}"
                )
        else:
            exposure = 1.0
        rows.append(Observation(levels=levels, claims=claims, exposure=exposure))

    return PortfolioDataset(
        rows=tuple(rows), schema=schema, exposure_defaulted=not has_exposure
    )


def infer_schema(
    source: IO[bytes] | IO[str] | str,
    claims_column: str = "claims",
    exposure_column: str = "exposure",
) -> FactorSchema:
    """Derive a factor schema from a CSV file.

    Every column other than the claims and exposure columns is treated
    as a factor.  Levels are sorted numerically when they all parse as
    integers (so "10" follows "2"), lexicographically otherwise; the
    first sorted level becomes the reference.
    """
    if isinstance(source, str):
        with open(source, "rb") as fh:
            return infer_schema(fh, claims_column, exposure_column)
    raw = source.read()
    text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError("portfolio CSV is empty (no header row)") from None
    if claims_column not in header:
        raise DataError(f"missing claims column {claims_column!r} in CSV header")
    factor_names = [h for h in header if h not in (claims_column, exposure_column)]
    seen: dict[str, set] = {name: set() for name in factor_names}
    positions = {name: header.index(name) for name in factor_names}
    for record in reader:
        if not record or (len(record) == 1 and not record[0].strip()):
            continue
        for name in factor_names:
            if positions[name] < len(record):
                seen[name].add(record[positions[name]].strip())

    def sort_levels(values: set) -> tuple[str, ...]:
        try:
            return tuple(sorted(values, key=int))
        except ValueError:
            return tuple(sorted(values))

    factors = {name: sort_levels(seen[name]) for name in factor_names}
    for name, levels in factors.items():
        if not levels:
            raise DataError(f"factor column {name!r} has no values to infer levels from")
    return FactorSchema(
        factors=factors, claims_column=claims_column, exposure_column=exposure_column
    )


def encode_design(data: PortfolioDataset, formula: ModelFormula) -> DesignMatrix:
    """Build the design matrix for ``formula`` over ``data``.

    Treatment coding: the first declared level of every factor is
    dropped, interactions are products of the retained main-effect
    indicator columns, and rank deficiency raises RankDeficiencyError
    naming the dependent columns.
    """
    schema = data.schema
    if len(data) == 0:
        raise DataError("cannot encode a design matrix over an empty dataset")
    if formula.response != schema.claims_column:
        raise DataError(
            f"formula response {formula.response!r} does not match the "
            f"dataset's claims column {schema.claims_column!r}"
        )
    for term in formula.terms:
        for factor in term.factors:
            if factor not in schema.factors:
                raise DataError(f"unknown factor {factor!r} in formula")

    n = len(data)
    indicator_cache: dict[tuple[str, str], np.ndarray] = {}

    def indicator(factor: str, level: str) -> np.ndarray:
        key = (factor, level)
        if key not in indicator_cache:
            column = np.fromiter(
                (1.0 if row.levels[factor] == level else 0.0 for row in data.rows),
                dtype=float,
                count=n,
            )
            indicator_cache[key] = column
        return indicator_cache[key]

    columns: list[np.ndarray] = []
    labels: list[str] = []
    for term in formula.terms:
        if term.kind == "intercept":
            columns.append(np.ones(n))
            labels.append(INTERCEPT_LABEL)
        elif term.kind == "main":
            (factor,) = term.factors
            for level in schema.factors[factor][1:]:
                columns.append(indicator(factor, level))
                labels.append(main_effect_label(factor, level))
        else:
            factor_a, factor_b = term.factors
            # second factor's level varies slowest, matching the usual
            # treatment-contrast column ordering
            for level_b in schema.factors[factor_b][1:]:
                for level_a in schema.factors[factor_a][1:]:
                    columns.append(indicator(factor_a, level_a) * indicator(factor_b, level_b))
                    labels.append(
                        interaction_label(factor_a, level_a, factor_b, level_b)
                    )

    matrix = np.column_stack(columns)
    assert_full_column_rank(matrix, tuple(labels))

    if formula.offset_column is not None:
        if formula.offset_column != schema.exposure_column:
            raise DataError(
                f"offset column {formula.offset_column!r} is not the exposure "
                f"column {schema.exposure_column!r}"
            )
        offset = np.log(data.exposure_vector())
    else:
        offset = np.zeros(n)

    factor_levels = {}
    for term in formula.terms:
        for factor in term.factors:
            if factor not in factor_levels:
                factor_levels[factor] = schema.factors[factor]

    return DesignMatrix(
        matrix=matrix,
        column_labels=tuple(labels),
        response_vector=data.claims_vector(),
        offset_vector=offset,
        weight_vector=np.ones(n),
        terms=formula.terms,
        factor_levels=factor_levels,
        offset_column=formula.offset_column,
        response_name=formula.response,
    )


def assert_full_column_rank(matrix: np.ndarray, labels: tuple[str, ...]) -> None:
    """Raise RankDeficiencyError naming columns dependent on earlier ones.

    Greedy left-to-right test: a column whose projection residual on
    the preceding independent columns is (numerically) zero adds no new
    direction and is reported as dependent.
    """
    n, p = matrix.shape
    kept: list[int] = []
    dependent: list[str] = []
    for j in range(p):
        column = matrix[:, j]
        scale = np.linalg.norm(column)
        if scale == 0.0:
            dependent.append(labels[j])
            continue
        if kept:
            basis = matrix[:, kept]
            coef, *_ = np.linalg.lstsq(basis, column, rcond=None)
            residual = np.linalg.norm(column - basis @ coef)
        else:
            residual = scale
        if residual <= 1e-8 * max(1.0, scale):
            dependent.append(labels[j])
        else:
            kept.append(j)
    if dependent:
        raise RankDeficiencyError(
            "design matrix is rank deficient; dependent columns: "
            + ", ".join(dependent),
            dependent_columns=tuple(dependent),
        )
