import random

import pytest

from clogic.game import B, ExplicitGame, LabeledMove, T, mv
from clogic.semantics import Interpretation, TRUTH_FNS, make_template


def random_explicit(rng: random.Random, depth: int = 3, alphabet: str = "ab",
                    density: float = 0.45) -> ExplicitGame:
    """Random prefix-closed explicit game with winners at every position."""
    table = {}

    def grow(pos, d):
        table[pos] = rng.choice((T, B))
        if d == 0:
            return
        for p in (T, B):
            for m in alphabet:
                if rng.random() < density:
                    grow(pos + (mv(p, m),), d - 1)

    grow((), depth)
    return ExplicitGame(table)


def const_interp(label: str = "", **values) -> Interpretation:
    """Elementary 0-ary letters fixed to the given truth values."""
    star = Interpretation(label=label or ",".join(f"{k}={v}" for k, v in values.items()))
    for name, value in values.items():
        star.elementary[(name, 0)] = (lambda v: lambda args: v)(value)
    return star


def odd_interp(*names, label: str = "odd") -> Interpretation:
    star = Interpretation(label=label)
    for name in names:
        star.elementary[(name, 1)] = TRUTH_FNS["odd"]
    return star


def general_interp(label: str, **specs) -> Interpretation:
    """specs: name=(arity, shape, params)"""
    star = Interpretation(label=label)
    for name, (arity, shape, params) in specs.items():
        star.general[(name, arity)] = make_template(shape, params)
    return star


@pytest.fixture
def rng():
    return random.Random(20260809)
