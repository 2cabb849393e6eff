"""Backbone guided local search for weighted MAX-SAT, with exact oracles for small instances."""
from .backbone import PseudoBackboneFrequencies
from .bgls import BglsParams, RunReport, run_bgls
from .formula import (
    ContractError,
    Literal,
    ParseError,
    WeightedClause,
    WeightedInstance,
    evaluate,
    parse_wcnf,
    serialize_wcnf,
    unsatisfied_clauses,
)
from .walksat import WalksatParams, run_try

__all__ = [
    "BglsParams",
    "ContractError",
    "Literal",
    "ParseError",
    "PseudoBackboneFrequencies",
    "RunReport",
    "WalksatParams",
    "WeightedClause",
    "WeightedInstance",
    "evaluate",
    "parse_wcnf",
    "run_bgls",
    "run_try",
    "serialize_wcnf",
    "unsatisfied_clauses",
]
