import itertools
import random

import pytest

from clogic.classical import (
    classical_fo_valid, classical_taut, find_fo_countermodel, taut_hash,
)
from clogic.formula import Atom, Bin, FormulaError, IMP, Neg, PAND, POR, parse
from clogic.proof import is_stable


def test_taut_examples():
    assert classical_taut(parse("p \\/ ~p"))
    assert not classical_taut(parse("true /\\ true -> false"))
    assert classical_taut(parse("(p -> q) /\\ (q -> r) -> (p -> r)"))


def test_taut_rejects_nonelementary():
    with pytest.raises(FormulaError):
        classical_taut(parse("p & q"))
    with pytest.raises(FormulaError):
        classical_taut(parse("P"))
    with pytest.raises(FormulaError):
        classical_taut(parse("all x. p(x)"))


def test_atom_instances_are_distinct_letters():
    # p(x) and p(y) are different letters; p(x) twice is one letter
    assert classical_taut(parse("p(x) -> p(x)"))
    assert not classical_taut(parse("p(x) -> p(y)"))


def _random_elementary(rng, atoms=("p", "q", "r", "s"), depth=4):
    if depth == 0 or rng.random() < 0.3:
        return parse(rng.choice(atoms))
    op = rng.choice(["neg", PAND, POR, IMP])
    if op == "neg":
        return Neg(_random_elementary(rng, atoms, depth - 1))
    return Bin(op, _random_elementary(rng, atoms, depth - 1),
               _random_elementary(rng, atoms, depth - 1))


def _truth_table_oracle(f, atoms):
    # independent structural evaluator
    def ev(g, env):
        if isinstance(g, Atom):
            return env[g.sym.name]
        if isinstance(g, Neg):
            return not ev(g.body, env)
        op = g.op
        a, b = ev(g.left, env), ev(g.right, env)
        return {PAND: a and b, POR: a or b, IMP: (not a) or b}[op]

    return all(ev(f, dict(zip(atoms, bits)))
               for bits in itertools.product((False, True), repeat=len(atoms)))


def test_taut_agrees_with_enumeration(rng):
    atoms = ("p", "q", "r", "s")
    for _ in range(150):
        f = _random_elementary(rng, atoms)
        assert classical_taut(f) == _truth_table_oracle(f, atoms)


def test_taut_hash_stable():
    f = parse("p \\/ ~p")
    assert taut_hash(f) == taut_hash(parse("p \\/ ~p"))


def test_fo_valid_examples():
    assert classical_fo_valid(parse("ex y. all x. (p(x) -> p(y))")) == "valid"
    assert classical_fo_valid(parse("(all x. p(x)) -> p(y)")) == "valid"
    assert classical_fo_valid(parse("p(1) -> all x. p(x)")) == "unknown"


def test_fo_countermodel():
    cm = find_fo_countermodel(parse("p(1) -> all x. p(x)"), 3)
    assert cm is not None and len(cm["domain"]) == 2
    assert find_fo_countermodel(parse("ex y. all x. (p(x) -> p(y))"), 3) is None
    assert find_fo_countermodel(parse("p(z) -> p(y)"), 2) is not None


def test_fo_budget_is_sound_not_complete():
    # the drinker-style formula needs two universal rounds
    f = parse("ex y. all x. (p(x) -> p(y))")
    assert classical_fo_valid(f, budget=1) == "unknown"
    assert classical_fo_valid(f, budget=3) == "valid"


def test_is_stable_examples():
    assert is_stable(parse("((p->q)&(p->r))->(p->(q&r))"), "cl1") == "stable"
    assert is_stable(parse("P -> P /\\ P"), "cl2") == "instable"
    assert is_stable(parse("P /\\ P -> P"), "cl2") == "instable"
    assert is_stable(parse("!x.?y.(P(x) -> P(y))"), "cl4") == "stable"


def test_is_stable_elementary_matches_taut(rng):
    for _ in range(60):
        f = _random_elementary(rng, ("p", "q", "r"))
        expected = "stable" if classical_taut(f) else "instable"
        assert is_stable(f, "cl1") == expected


def test_is_stable_unknown_on_budget():
    # valid but beyond a one-round tableau, and with no finite countermodel
    g = parse("ex y. all x. (p(x) -> p(y))")
    assert is_stable(g, "cl4", budget=1) == "unknown"
    assert is_stable(g, "cl4", budget=3) == "stable"
