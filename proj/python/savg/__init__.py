"""Stochastic attribute-value grammars: ERF estimation, random fields,
field induction and Metropolis-Hastings sampling."""

from ._savg import (
    Field,
    Grammar,
    InputError,
    erf_estimate,
    fixtures,
    induce,
    oracle_check,
)

__all__ = [
    "Field",
    "Grammar",
    "InputError",
    "erf_estimate",
    "fixtures",
    "induce",
    "oracle_check",
]
