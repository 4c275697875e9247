"""Computability-logic workbench.

Parses choice/parallel/blind formulas, builds and adjudicates the games
they denote over finite universes, decides CL1/CL2 and proves CL4,
extracts winning machine strategies from proofs, and plays them
interactively (CLI and HTTP service).
"""

from .formula import Formula, parse, print_formula
from .game import B, ConstantGame, LabeledMove, Player, T, parse_run
from .proof import Proof, check_proof, decide_cl4_blindfree, prove_cl1, prove_cl2, prove_cl4
from .semantics import Interpretation, Valuation, adjudicate, interpret, winnable
from .strategy import Agent, compose_mp, extract, play_match, verify_agent

__all__ = [
    "Agent", "B", "ConstantGame", "Formula", "Interpretation", "LabeledMove",
    "Player", "Proof", "T", "Valuation", "adjudicate", "check_proof",
    "compose_mp", "decide_cl4_blindfree", "extract", "interpret", "parse",
    "parse_run", "play_match", "print_formula", "prove_cl1", "prove_cl2",
    "prove_cl4", "verify_agent", "winnable",
]
