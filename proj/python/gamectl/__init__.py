"""Pole-placement control of population games."""

import json

from ._core import (
    GamectlError,
    PayoffMatrix,
    angular_momenta,
    design_gains,
    eig,
    equilibria,
    jacobian,
    load_game,
    paper_game,
    parse_game,
    payoffs,
    simulate_abm,
    simulate_ode,
    spectrum,
)
from . import _core


def analyze(game):
    """Equilibria, Jacobians, spectra and eigencycles as a dict."""
    return json.loads(_core._analyze_json(game))


def evaluate(summary_csv_text, game=None):
    """Re-evaluate the text of a summary.csv."""
    return json.loads(_core._evaluate_json(summary_csv_text, game if game is not None else paper_game()))


__all__ = [
    "GamectlError",
    "PayoffMatrix",
    "analyze",
    "angular_momenta",
    "design_gains",
    "eig",
    "equilibria",
    "evaluate",
    "jacobian",
    "load_game",
    "paper_game",
    "parse_game",
    "payoffs",
    "simulate_abm",
    "simulate_ode",
    "spectrum",
]
