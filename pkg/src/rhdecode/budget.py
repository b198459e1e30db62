"""Enumeration budgets.

Every exhaustive routine in the package takes an optional ``budget``.  When
omitted, :func:`default_budget` is used, which honours the ``RHDECODE_BUDGET``
environment variable and otherwise falls back to ``2**24``.
"""

from __future__ import annotations

import os

from .errors import BudgetExceeded

DEFAULT_BUDGET = 1 << 24
ENV_VAR = "RHDECODE_BUDGET"


def default_budget() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_BUDGET
    value = int(raw)
    if value < 1:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return value


def check_budget(quantity: str, size: int, budget: int | None = None) -> int:
    """Raise :class:`BudgetExceeded` if ``size`` is over budget; return the budget used."""
    limit = default_budget() if budget is None else budget
    if size > limit:
        raise BudgetExceeded(quantity, size, limit)
    return limit
