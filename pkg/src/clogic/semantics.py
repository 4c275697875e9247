"""Interpretations, formula-to-game compilation and run adjudication.

An interpretation sends elementary letters to truth functions over the
finite universe and general letters to game templates.  `interpret`
extends it to formulas by commuting with the operations; `adjudicate`
and `trace` evaluate runs; `winnable` solves finite games by backward
induction; `find_uniform_countermodel` refutes uniform winnability over
explicit interpretation families.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from . import game as G
from .formula import (
    Atom, AtomSym, BALL, BEX, Bin, CALL, CAND, CEX, COR, Const, Formula,
    FormulaError, IMP, Neg, PALL, PAND, PEX, POR, Quant, Rec, Truth, Var,
    free_vars, print_formula, subformulas, substitute,
)
from .game import B, ConstantGame, LabeledMove, Player, Run, T


class AdmissibilityError(Exception):
    """An interpretation violates condition (i) or (ii) for the formula."""


@dataclass(frozen=True)
class Valuation:
    """Total map from variables into the universe; unmentioned variables
    default to 1."""

    assignment: tuple = ()
    universe: int = 3

    def __call__(self, name: str) -> int:
        return dict(self.assignment).get(name, 1)

    def set(self, name: str, value: int) -> "Valuation":
        items = tuple((k, v) for k, v in self.assignment if k != name)
        return Valuation(items + ((name, value),), self.universe)

    def term(self, t) -> int:
        return t.value if isinstance(t, Const) else self(t.name)

    @classmethod
    def parse(cls, text: str, universe: int = 3) -> "Valuation":
        items = []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            name, _, value = part.partition("=")
            items.append((name.strip(), int(value)))
        return cls(tuple(items), universe)


@dataclass
class GameFn:
    """A game proper: valuation -> constant game, with its dependence set."""

    fn: Callable[[Valuation], ConstantGame]
    vars: frozenset = frozenset()

    def __call__(self, e: Valuation) -> ConstantGame:
        return self.fn(e)


# ---------------------------------------------------------------------------
# Interpretations

TRUTH_FNS = {
    "true": lambda args: True,
    "false": lambda args: False,
    "odd": lambda args: args[0] % 2 == 1,
    "even": lambda args: args[0] % 2 == 0,
    "eq1": lambda args: args[0] == 1,
    "sum_even": lambda args: sum(args) % 2 == 0,
}


@dataclass
class Interpretation:
    """Per-letter meanings.

    elementary: (name, arity) -> truth function over argument tuples.
    general: (name, arity) -> template building a ConstantGame from the
    argument tuple and universe size.
    """

    elementary: dict = field(default_factory=dict)
    general: dict = field(default_factory=dict)
    label: str = ""

    def truth(self, sym: AtomSym, args: tuple) -> bool:
        fn = self.elementary.get((sym.name, sym.arity))
        if fn is None:
            raise AdmissibilityError(f"no interpretation for elementary {sym.name}/{sym.arity}")
        return bool(fn(args))

    def template(self, sym: AtomSym, args: tuple, universe: int) -> ConstantGame:
        fn = self.general.get((sym.name, sym.arity))
        if fn is None:
            raise AdmissibilityError(f"no interpretation for general {sym.name}/{sym.arity}")
        return fn(args, universe)

    def is_unistructural_in(self, sym: AtomSym, i: int) -> bool:
        """Whether the letter's game structure ignores argument i.

        Built-in templates are structure-constant, so this is true unless a
        custom template registered itself as structure-varying."""
        fn = self.general.get((sym.name, sym.arity))
        return not getattr(fn, "structure_varying", False)


def check_admissible(f: Formula, star: Interpretation) -> None:
    """Admissibility for f: every letter interpreted (condition (i) holds by
    construction: templates depend only on their argument tuple) and blind
    binders see unistructural letters (condition (ii))."""
    for _, sub in subformulas(f):
        if not isinstance(sub, Atom):
            continue
        sym = sub.sym
        if sym.general:
            if (sym.name, sym.arity) not in star.general:
                raise AdmissibilityError(f"no interpretation for general {sym.name}/{sym.arity}")
        else:
            if (sym.name, sym.arity) not in star.elementary:
                raise AdmissibilityError(f"no interpretation for elementary {sym.name}/{sym.arity}")
    # condition (ii): L(t1..tn) under a blind binder on t_i demands
    # unistructurality in argument i
    def walk(g: Formula, blind: frozenset):
        if isinstance(g, Atom):
            if g.sym.general:
                for i, t in enumerate(g.args):
                    if isinstance(t, Var) and t.name in blind:
                        if not star.is_unistructural_in(g.sym, i):
                            raise AdmissibilityError(
                                f"condition (ii): {g.sym.name} must be unistructural "
                                f"in argument {i + 1} under a blind binder on {t.name}")
            return
        if isinstance(g, Neg):
            walk(g.body, blind)
        elif isinstance(g, Bin):
            walk(g.left, blind)
            walk(g.right, blind)
        elif isinstance(g, Quant):
            inner = blind | {g.var} if g.op in (BALL, BEX) else blind - {g.var}
            walk(g.body, inner)
        elif isinstance(g, Rec):
            walk(g.body, blind)

    walk(f, frozenset())


# -- file format -------------------------------------------------------------

def make_template(shape: str, params: dict):
    """Named game-shape templates for general letters.

    elem:   elementary game, truth via `fn` (name) or `value`.
    or2 / and2: choice disjunction/conjunction of two elementary games
            given by truth entries a, b.
    mix2:   (a or b) cand (b or a), the depth-2 mix.
    """

    def truth_entry(entry):
        if isinstance(entry, bool):
            return lambda args: entry
        if isinstance(entry, str):
            return TRUTH_FNS[entry]
        raise FormulaError(f"bad truth entry {entry!r}")

    if shape == "elem":
        fn = truth_entry(params.get("fn", params.get("value", True)))
        return lambda args, universe: G.Elem(fn(args))
    a = truth_entry(params.get("a", True))
    b = truth_entry(params.get("b", False))
    if shape == "or2":
        return lambda args, universe: G.cor(G.Elem(a(args)), G.Elem(b(args)))
    if shape == "and2":
        return lambda args, universe: G.cand(G.Elem(a(args)), G.Elem(b(args)))
    if shape == "mix2":
        return lambda args, universe: G.cand(
            G.cor(G.Elem(a(args)), G.Elem(b(args))),
            G.cor(G.Elem(b(args)), G.Elem(a(args))))
    raise FormulaError(f"unknown template shape {shape!r}")


def interpretation_from_dict(data: dict) -> Interpretation:
    star = Interpretation(label=data.get("label", ""))
    for name, spec in data.get("elementary", {}).items():
        arity = spec.get("arity", 0)
        if "fn" in spec:
            star.elementary[(name, arity)] = TRUTH_FNS[spec["fn"]]
        elif "table" in spec:
            table = spec["table"]
            if isinstance(table, bool):
                star.elementary[(name, arity)] = (lambda v: lambda args: v)(table)
            else:
                rows = {tuple(int(x) for x in k.split(",") if x): bool(v)
                        for k, v in table.items()}
                star.elementary[(name, arity)] = (lambda r: lambda args: r.get(args, False))(rows)
        else:
            raise FormulaError(f"elementary {name}: need fn or table")
    for name, spec in data.get("general", {}).items():
        arity = spec.get("arity", 0)
        star.general[(name, arity)] = make_template(spec["template"], spec.get("params", {}))
    return star


def load_interpretation(path: str) -> Interpretation:
    with open(path) as fh:
        return interpretation_from_dict(json.load(fh))


def default_interpretation(f: Formula) -> Interpretation:
    """Every elementary letter true, every general letter the (true or2
    false) coin game; enough to make any formula playable."""
    star = Interpretation(label="default")
    for sym in {s.sym for _, s in subformulas(f) if isinstance(s, Atom)}:
        if sym.general:
            star.general[(sym.name, sym.arity)] = make_template("or2", {"a": True, "b": False})
        else:
            star.elementary[(sym.name, sym.arity)] = TRUTH_FNS["true"]
    return star


# ---------------------------------------------------------------------------
# Compilation

def interpret(f: Formula, star: Interpretation, universe: int = 3) -> GameFn:
    """Extend the interpretation to f by structural recursion."""
    check_admissible(f, star)

    def build(g: Formula, e: Valuation) -> ConstantGame:
        if isinstance(g, Truth):
            return G.WIN_T if g.value else G.WIN_B
        if isinstance(g, Atom):
            args = tuple(e.term(t) for t in g.args)
            if g.sym.general:
                return star.template(g.sym, args, universe)
            return G.Elem(star.truth(g.sym, args))
        if isinstance(g, Neg):
            return G.neg(build(g.body, e))
        if isinstance(g, Bin):
            left, right = build(g.left, e), build(g.right, e)
            return {PAND: G.pand, POR: G.por, IMP: G.implies,
                    CAND: G.cand, COR: G.cor}[g.op](left, right)
        if isinstance(g, Quant):
            instances = {c: build(g.body, e.set(g.var, c))
                         for c in range(1, universe + 1)}
            return {CALL: G.choice_all, CEX: G.choice_ex,
                    PALL: G.par_all, PEX: G.par_ex,
                    BALL: G.blind_all, BEX: G.blind_ex}[g.op](instances)
        if isinstance(g, Rec):
            body = build(g.body, e)
            n = max(2, universe)
            return {"brc": G.br_rec_bounded, "bcr": G.br_corec_bounded,
                    "prc": G.pr_rec_bounded, "pcr": G.pr_corec_bounded}[g.op](body, n)
        raise TypeError(f"not a formula: {g!r}")

    return GameFn(lambda e: build(f, e), frozenset(free_vars(f)))


# ---------------------------------------------------------------------------
# Adjudication and bring-down traces

@dataclass
class Verdict:
    legal: bool
    blame: Optional[Player] = None
    winner: Optional[Player] = None

    def __str__(self):
        if self.legal:
            return f"legal, winner={self.winner.value}"
        return f"illegal, blame={self.blame.value}"


def adjudicate(f: Formula, star: Interpretation, e: Valuation, run: Run,
               universe: Optional[int] = None) -> Verdict:
    g = interpret(f, star, universe or e.universe)(e)
    i = g.first_offender(run)
    if i is not None:
        return Verdict(False, blame=run[i].label)
    return Verdict(True, winner=g.winner(run))


@dataclass
class TraceStep:
    move: Optional[LabeledMove]
    formula: Formula
    note: str = ""

    @property
    def text(self) -> str:
        return print_formula(self.formula)


def _choice_collapse(f: Formula, addr: str, payload: str) -> Optional[Formula]:
    """Apply a single choice move at dotted address `addr` with `payload`
    to the formula; None when the move is not a formula-level choice.
    Formula-level collapse stops at parallel quantifiers and recurrences;
    moves inside those (and inside interpreted atoms) are annotated."""
    if isinstance(f, Neg):
        inner = _choice_collapse(f.body, addr, payload)
        return None if inner is None else Neg(inner)
    if isinstance(f, Quant) and f.op in (BALL, BEX):
        inner = _choice_collapse(f.body, addr, payload)
        return None if inner is None else Quant(f.op, f.var, inner)
    if isinstance(f, Bin) and f.op in (PAND, POR, IMP):
        if addr.startswith("1."):
            inner = _choice_collapse(f.left, addr[2:], payload)
            return None if inner is None else Bin(f.op, inner, f.right)
        if addr.startswith("2."):
            inner = _choice_collapse(f.right, addr[2:], payload)
            return None if inner is None else Bin(f.op, f.left, inner)
        return None
    if addr:
        return None
    if isinstance(f, Bin) and f.op in (CAND, COR):
        if payload == "1":
            return f.left
        if payload == "2":
            return f.right
        return None
    if isinstance(f, Quant) and f.op in (CALL, CEX) and payload.isdigit():
        return substitute(f.body, f.var, Const(int(payload)), check_capture=False)
    return None


def apply_move_to_formula(f: Formula, move: str) -> Optional[Formula]:
    """Collapse one choice move (address + payload) at formula level."""
    head, sep, payload = move.rpartition(".")
    return _choice_collapse(f, head + sep if sep else "", payload if sep else move)


def trace(f: Formula, star: Interpretation, e: Valuation, run: Run,
          universe: Optional[int] = None) -> list:
    """Bring-down trace: stepwise prefixation snapshots, collapsing choice
    nodes at formula level and annotating other moves."""
    uni = universe or e.universe
    g = interpret(f, star, uni)(e)
    i = g.first_offender(run)
    if i is not None:
        raise ValueError(f"illegal run, blame={run[i].label.value} at move {i}")
    steps = [TraceStep(None, f)]
    current = f
    for m in run:
        new = apply_move_to_formula(current, m.move)
        if new is not None:
            current = new
            steps.append(TraceStep(m, current))
        else:
            steps.append(TraceStep(m, current, note="no formula-level change"))
    return steps


# ---------------------------------------------------------------------------
# Finite-game solving

def winnable(g: ConstantGame, ceiling: int = 200_000):
    """Backward induction for free static games.

    WIN(pos) holds iff the machine has a winning move, or the position
    already adjudicates to the machine and every environment move keeps it
    winnable.  Returns (win, positional strategy) where the strategy maps
    positions to the machine move to make (None = wait)."""
    memo: dict = {}
    strategy: dict = {}
    count = [0]

    def win(pos: Run) -> bool:
        if pos in memo:
            return memo[pos]
        count[0] += 1
        if count[0] > ceiling:
            raise G.CeilingExceeded("winnable ceiling")
        memo[pos] = False  # positions form a tree; no cycles
        moves = g.legal_moves(pos)
        for m in moves:
            if m.label is T and win(pos + (m,)):
                memo[pos] = True
                strategy[pos] = m.move
                break
        else:
            here = g.winner(pos) is T
            if here and all(win(pos + (m,)) for m in moves if m.label is B):
                memo[pos] = True
                strategy[pos] = None
        return memo[pos]

    ok = win(())
    return ok, (strategy if ok else None)


def is_unistructural(gfn: GameFn, x: str, universe: int = 3,
                     ceiling: int = 50_000) -> bool:
    """True iff instances across x-values share one legal-run set, for
    every assignment of the other variables it depends on."""
    others = sorted(gfn.vars - {x})

    def positions_of(e: Valuation):
        return frozenset(gfn(e).positions(ceiling))

    def assignments(rest, acc):
        if not rest:
            yield acc
            return
        for c in range(1, universe + 1):
            yield from assignments(rest[1:], acc.set(rest[0], c))

    for e in assignments(others, Valuation(universe=universe)):
        base = positions_of(e.set(x, 1))
        for c in range(2, universe + 1):
            if positions_of(e.set(x, c)) != base:
                return False
    return True


def count_strategies(g: ConstantGame, ceiling: int = 10_000_000) -> int:
    """Number of normalized machine strategies (decisions only at positions
    reachable under the strategy itself)."""
    memo: dict = {}

    def count(pos: Run) -> int:
        if pos in memo:
            return memo[pos]
        total = 1  # wait here ...
        for m in g.legal_moves(pos, B):
            total *= count(pos + (m,))
            if total > ceiling:
                raise G.CeilingExceeded("strategy-count ceiling")
        for m in g.legal_moves(pos, T):  # ... or make a move now
            total += count(pos + (m,))
            if total > ceiling:
                raise G.CeilingExceeded("strategy-count ceiling")
        memo[pos] = total
        return total

    return count(())


def enumerate_strategies(g: ConstantGame, ceiling: int = 1_000_000):
    """All normalized machine strategies, as dicts position -> machine move
    or None (wait), defined on the positions the strategy can reach.
    Independent play-everything oracle for the backward-induction solver."""
    count_strategies(g, ceiling)

    def trees(pos: Run):
        wait_branches = []
        env_moves = g.legal_moves(pos, B)
        for sub in itertools.product(*(trees(pos + (m,)) for m in env_moves)):
            merged = {pos: None}
            for d in sub:
                merged.update(d)
            wait_branches.append(merged)
        for m in g.legal_moves(pos, T):
            for sub in trees(pos + (m,)):
                wait_branches.append({pos: m.move, **sub})
        return wait_branches

    yield from trees(())


def strategy_wins(g: ConstantGame, strategy: dict) -> bool:
    """Play a positional strategy out against every environment behavior."""

    def beats(pos: Run) -> bool:
        move = strategy.get(pos)
        if move is not None:
            lm = LabeledMove(T, move)
            if lm not in g.moves(pos):
                return False  # strategy prescribes an illegal move
            return beats(pos + (lm,))
        if g.winner(pos) is not T:
            return False  # environment may stop here
        return all(beats(pos + (m,)) for m in g.legal_moves(pos, B))

    return beats(())


# ---------------------------------------------------------------------------
# Uniform countermodels

@dataclass
class UniformRefutation:
    """Evidence that no single machine strategy wins across the family."""

    subfamily: list          # member labels jointly defeating every strategy
    witnesses: list          # (strategy, failing member label), when enumerable

    def __bool__(self):
        return True


def find_uniform_countermodel(f: Formula, family: Iterable[Interpretation],
                              universe: int = 3, ceiling: int = 200_000,
                              witness_cap: int = 4096) -> Optional[UniformRefutation]:
    """Refute uniform winnability of f over the family, or return None when
    one strategy wins every member (desk-scale uniform winnability only,
    never a validity claim).

    Decision: family members share one game shape, so a uniform strategy is
    exactly a winning strategy of the all-members-must-win product game
    (same structure, win = every member won).  Witnesses: when the strategy
    space is small enough, each enumerated strategy is paired with a member
    it loses."""
    members = list(family)
    e = Valuation(universe=universe)
    games = [interpret(f, star, universe)(e) for star in members]
    shapes = [sorted((len(p), G.format_run(p)) for p in g.positions(ceiling))
              for g in games]
    if any(s != shapes[0] for s in shapes):
        raise AdmissibilityError("family members disagree on game shape")
    product = G.BlindG(dict(enumerate(games)), forall=True)
    win, _ = winnable(product, ceiling)
    if win:
        return None
    witnesses = []
    subfamily: list = []
    try:
        for strategy in enumerate_strategies(games[0], witness_cap):
            for star, g in zip(members, games):
                if not strategy_wins(g, strategy):
                    label = star.label or f"member {members.index(star)}"
                    witnesses.append((strategy, label))
                    if label not in subfamily:
                        subfamily.append(label)
                    break
            else:  # pragma: no cover - contradicts the product decision
                raise AssertionError("strategy wins every member but product lost")
    except G.CeilingExceeded:
        subfamily = [star.label or f"member {i}" for i, star in enumerate(members)]
    return UniformRefutation(subfamily, witnesses)
