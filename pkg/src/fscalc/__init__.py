"""Finite-state calculus with parallel replacement rules."""

from .apply import ApplyResult, apply_down, apply_up, enumerate_words
from .errors import FscError
from .fsm import Network, equivalent, from_att, minimize, to_att
from .regex import Environment, compile, parse

__all__ = [
    "ApplyResult", "Environment", "FscError", "Network", "apply_down", "apply_up",
    "compile", "enumerate_words", "equivalent", "from_att", "minimize", "parse", "to_att",
]
