"""Bonus-malus premium ladder: transitions, simulation, long-run behaviour.

The default table has 14 steps.  Step 1 is the only surcharge class
(120% of the base premium); a new policyholder enters at step 2 (100%);
claim-free years climb one step per year up to the cap, while claims
knock the policyholder down according to the per-step transition rows.
Years with three or more claims all use the three-claims row.

The premium convention is: each year is charged at the step held when
the year begins, and the step then moves according to that year's
claim count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "BonusMalusTable",
    "DEFAULT_TABLE",
    "TrajectoryYear",
    "load_table_json",
    "transition_matrix",
    "stationary_distribution",
    "expected_premium",
]

#: claim-count categories distinguished by the transition rows
_CATEGORIES = 4  # 0, 1, 2, >=3 claims


@dataclass(frozen=True)
class BonusMalusTable:
    """Premium percentages and claim-driven step transitions.

    ``transitions[c][s-1]`` is the next step after a year at step ``s``
    with ``c`` claims (``c`` capped at 3).
    """

    percentages: tuple[float, ...]
    transitions: tuple[tuple[int, ...], ...]
    entry_step: int = 2

    def __post_init__(self):
        n = len(self.percentages)
        if n < 1:
            raise ValueError("a bonus-malus table needs at least one step")
        if len(self.transitions) != _CATEGORIES:
            raise ValueError(
                f"expected {_CATEGORIES} transition rows (0, 1, 2, >=3 claims), "
                f"got {len(self.transitions)}"
            )
        for claims, row in enumerate(self.transitions):
            if len(row) != n:
                raise ValueError(
                    f"transition row for {claims} claims has {len(row)} entries, "
                    f"expected {n}"
                )
            for step, target in enumerate(row, start=1):
                if not 1 <= target <= n:
                    raise ValueError(
                        f"transition ({step}, {claims} claims) -> {target} "
                        f"is outside 1..{n}"
                    )
        zero_row = self.transitions[0]
        if zero_row[-1] != n:
            raise ValueError("a claim-free year at the top step must stay at the top")
        if any(b < a for a, b in zip(zero_row, zero_row[1:])):
            raise ValueError("claim-free transitions must be nondecreasing in step")
        if any(t != 1 for t in self.transitions[-1]):
            raise ValueError("three or more claims must always lead to step 1")
        if any(b >= a for a, b in zip(self.percentages, self.percentages[1:])):
            raise ValueError("premium percentages must be strictly decreasing")
        if not 1 <= self.entry_step <= n:
            raise ValueError(f"entry step {self.entry_step} outside 1..{n}")

    @property
    def n_steps(self) -> int:
        return len(self.percentages)

    def check_step(self, step: int) -> None:
        if not 1 <= step <= self.n_steps:
            raise DomainError(f"step {step} outside 1..{self.n_steps}")

    def next_step(self, step: int, claims: int) -> int:
        """Step after a year spent at ``step`` with ``claims`` claims."""
        self.check_step(step)
        if claims < 0:
            raise DomainError(f"claim count must be nonnegative, got {claims}")
        return self.transitions[min(claims, _CATEGORIES - 1)][step - 1]

    def premium(self, step: int, base_premium: float) -> float:
        """Premium charged at ``step`` given the base (100%) premium."""
        self.check_step(step)
        if not base_premium > 0:
            raise DomainError(f"base premium must be positive, got {base_premium!r}")
        return base_premium * self.percentages[step - 1] / 100.0

    def simulate_trajectory(
        self, start: int, yearly_claims: Sequence[int], base_premium: float
    ) -> list["TrajectoryYear"]:
        """Year-by-year premiums and steps for a claims history."""
        self.check_step(start)
        step = start
        out = []
        for year, claims in enumerate(yearly_claims, start=1):
            paid = self.premium(step, base_premium)
            step = self.next_step(step, claims)
            out.append(TrajectoryYear(year=year, step_after=step, premium_paid=paid))
        return out


@dataclass(frozen=True)
class TrajectoryYear:
    year: int
    step_after: int
    premium_paid: float


DEFAULT_TABLE = BonusMalusTable(
    percentages=(120, 100, 90, 80, 70, 60, 55, 50, 45, 40, 37.5, 35, 32.5, 30),
    transitions=(
        (2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 14),
        (1, 1, 1, 1, 2, 3, 4, 5, 6, 7, 7, 8, 8, 9),
        (1, 1, 1, 1, 1, 1, 1, 1, 2, 3, 3, 4, 4, 5),
        (1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1),
    ),
    entry_step=2,
)


def load_table_json(source: IO[str] | str) -> BonusMalusTable:
    """Load a table override from JSON.

    Expected keys: ``percentages`` (list of numbers, one per step),
    ``transitions`` (object with rows "0", "1", "2", "3"), and
    optionally ``entry_step``.  The table invariants are validated and
    violations raise ValueError.
    """
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    else:
        obj = json.load(source)
    if not isinstance(obj, dict):
        raise ValueError("bonus-malus JSON must be an object")
    try:
        percentages = tuple(float(p) for p in obj["percentages"])
        rows = obj["transitions"]
        transitions = tuple(
            tuple(int(t) for t in rows[str(claims)]) for claims in range(_CATEGORIES)
        )
    except KeyError as exc:
        raise ValueError(f"bonus-malus JSON missing key {exc}") from None
    entry = int(obj.get("entry_step", 2))
    return BonusMalusTable(
        percentages=percentages, transitions=transitions, entry_step=entry
    )


def transition_matrix(table: BonusMalusTable, lam: float) -> np.ndarray:
    """Step-to-step transition matrix under Poisson(lam) annual claims."""
    if lam < 0:
        raise DomainError(f"mean claim frequency must be nonnegative, got {lam!r}")
    p0 = np.exp(-lam)
    probs = [p0, lam * p0, lam * lam * p0 / 2.0]
    probs.append(max(0.0, 1.0 - sum(probs)))  # P(>= 3 claims)
    n = table.n_steps
    matrix = np.zeros((n, n))
    for category, p in enumerate(probs):
        for step in range(1, n + 1):
            matrix[step - 1, table.transitions[category][step - 1] - 1] += p
    return matrix


def stationary_distribution(table: BonusMalusTable, lam: float) -> np.ndarray:
    """Long-run step occupancy under Poisson(lam) annual claim counts.

    Power iteration on the induced chain until the L1 change drops
    below 1e-12; entry i is the probability of step i+1.
    """
    matrix = transition_matrix(table, lam)
    n = table.n_steps
    pi = np.full(n, 1.0 / n)
    for _ in range(1_000_000):
        nxt = pi @ matrix
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() < 1e-12:
            return nxt
        pi = nxt
    return pi


def expected_premium(
    table: BonusMalusTable, distribution: np.ndarray, base_premium: float
) -> float:
    """Mean premium paid per year under a step-occupancy distribution."""
    per_step = np.array(
        [table.premium(s, base_premium) for s in range(1, table.n_steps + 1)]
    )
    return float(distribution @ per_step)
