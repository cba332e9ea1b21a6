"""Enumeration caps shared by the brute-force routines."""

from __future__ import annotations

import os

DEFAULT_BUDGET = 46080  # |W_BC(6)|
ENV_VAR = "FISSION_LAB_BUDGET"


class BudgetExceeded(RuntimeError):
    pass


def default_budget() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw == "":
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValueError(f"{ENV_VAR} must be positive")
    return value


def check_budget(size: int, budget: int | None, what: str) -> None:
    cap = default_budget() if budget is None else budget
    if size > cap:
        raise BudgetExceeded(f"{what} needs {size} elements, budget is {cap}")
