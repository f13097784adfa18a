"""Worst-case ATE bounds over inverse-propensity weights."""

from ._core import (
    CausalBoundsError,
    Dataset,
    analyze,
    bootstrap,
    fit_mar_propensity,
    ipw,
    ladder_terms,
    load_csv,
    simulate_study,
    simulate_table,
    sipw,
    solve_lp,
    true_ate,
)

__all__ = [
    "CausalBoundsError",
    "Dataset",
    "analyze",
    "bootstrap",
    "fit_mar_propensity",
    "ipw",
    "ladder_terms",
    "load_csv",
    "simulate_study",
    "simulate_table",
    "sipw",
    "solve_lp",
    "true_ate",
]
