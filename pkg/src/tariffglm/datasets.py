"""Access to the bundled motor-portfolio dataset.

The bundled file aggregates a fictional motor portfolio into 54 cells
over four risk factors (sex: 2 levels; region, car type, job class: 3
levels each) with the observed claim count per cell.

Caveat: the original per-cell exposures are not available, so every
exposure in the bundled file is 1.0.  Fitted rates from this file are
therefore per cell rather than per policy-year; factor structure,
model comparisons, and all diagnostics remain meaningful.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .design import FactorSchema, PortfolioDataset, load_portfolio

__all__ = ["PORTFOLIO_SCHEMA", "bundled_portfolio_path", "load_bundled_portfolio"]

PORTFOLIO_SCHEMA = FactorSchema(
    factors={
        "sex": ("1", "2"),
        "region": ("1", "2", "3"),
        "type": ("1", "2", "3"),
        "job": ("1", "2", "3"),
    }
)


def bundled_portfolio_path() -> Path:
    """Filesystem path of the bundled portfolio CSV."""
    return Path(resources.files("tariffglm").joinpath("data/portfolio.csv"))


def load_bundled_portfolio() -> PortfolioDataset:
    """Load the bundled 54-cell motor portfolio."""
    return load_portfolio(str(bundled_portfolio_path()), PORTFOLIO_SCHEMA)
