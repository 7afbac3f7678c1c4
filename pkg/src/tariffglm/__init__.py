"""Claim-frequency GLM fitting and actuarial rating toolkit.

Fits generalized linear models (Poisson counts with a log link and
exposure offsets; Normal as a least-squares cross-check) by iteratively
reweighted least squares, assesses them through deviance tests and AIC,
turns the chosen model into a multiplicative tariff, and analyses a
bonus-malus premium ladder as a Markov chain.
"""

from .bonusmalus import (
    DEFAULT_TABLE,
    BonusMalusTable,
    TrajectoryYear,
    expected_premium,
    load_table_json,
    stationary_distribution,
    transition_matrix,
)
from .datasets import PORTFOLIO_SCHEMA, bundled_portfolio_path, load_bundled_portfolio
from .design import (
    DesignMatrix,
    FactorSchema,
    Observation,
    PortfolioDataset,
    encode_design,
    infer_schema,
    load_portfolio,
)
from .distributions import chi_square_quantile, chi_square_sf, standard_normal_sf
from .errors import (
    DataError,
    DomainError,
    FormulaError,
    NestingError,
    NonConvergenceError,
    RankDeficiencyError,
    TariffGLMError,
)
from .families import NORMAL, POISSON, FamilySpec, family_by_name
from .fitting import (
    FitControls,
    FitResult,
    WaldStatistic,
    deviance_pair,
    fit,
    log_likelihood,
    wald_statistics,
)
from .formula import ModelFormula, Term, parse_formula
from .inference import TestReport, compare_nested, goodness_of_fit, select_by_aic
from .tariff import (
    TariffCell,
    TariffTable,
    build_tariff_table,
    predict_rate,
    years_to_one_claim,
)

__version__ = "0.1.0"

__all__ = [
    "BonusMalusTable",
    "DEFAULT_TABLE",
    "DataError",
    "DesignMatrix",
    "DomainError",
    "FactorSchema",
    "FamilySpec",
    "FitControls",
    "FitResult",
    "FormulaError",
    "ModelFormula",
    "NORMAL",
    "NestingError",
    "NonConvergenceError",
    "Observation",
    "PORTFOLIO_SCHEMA",
    "PortfolioDataset",
    "RankDeficiencyError",
    "TariffCell",
    "TariffGLMError",
    "TariffTable",
    "Term",
    "TestReport",
    "TrajectoryYear",
    "WaldStatistic",
    "POISSON",
    "bundled_portfolio_path",
    "build_tariff_table",
    "chi_square_quantile",
    "chi_square_sf",
    "compare_nested",
    "deviance_pair",
    "encode_design",
    "expected_premium",
    "family_by_name",
    "fit",
    "goodness_of_fit",
    "infer_schema",
    "load_bundled_portfolio",
    "load_portfolio",
    "load_table_json",
    "log_likelihood",
    "parse_formula",
    "predict_rate",
    "select_by_aic",
    "standard_normal_sf",
    "stationary_distribution",
    "transition_matrix",
    "wald_statistics",
    "years_to_one_claim",
]
