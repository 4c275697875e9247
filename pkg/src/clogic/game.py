"""Constant games as playable values.

A constant game exposes its structure through `moves(position)`, the
labeled moves legal at a legal position, and its content through
`winner(run)`, total on legal runs.  Compositional nodes implement the
game operations (negation, parallel and choice connectives, quantifier
forms over a finite universe, prefixation, bounded recurrences); explicit
table-backed games host adversarial test cases.

Move addressing: parallel components use dotted prefixes `1.`/`2.`
(or `c.` for quantifier components), choice moves are bare payloads
`1`/`2`/constants.  Bounded branching recurrence uses `s(b)` for the
splitting move and `b#move` for an ordinary move in branch b.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional


class CeilingExceeded(Exception):
    """An exhaustive enumeration outgrew its configured ceiling."""


class Player(Enum):
    MACHINE = "T"
    ENVIRONMENT = "B"

    @property
    def opponent(self) -> "Player":
        return B if self is T else T

    def __repr__(self):
        return self.value


T = Player.MACHINE
B = Player.ENVIRONMENT


@dataclass(frozen=True)
class LabeledMove:
    label: Player
    move: str

    def __str__(self):
        return f"{self.label.value}:{self.move}"

    @property
    def flipped(self) -> "LabeledMove":
        return LabeledMove(self.label.opponent, self.move)


Run = tuple  # tuple[LabeledMove, ...]


def mv(label: Player, move: str) -> LabeledMove:
    return LabeledMove(label, move)


def parse_run(text: str) -> Run:
    """Whitespace-separated `T:<move>` / `B:<move>` tokens."""
    out = []
    for tok in text.split():
        if len(tok) < 3 or tok[1] != ":" or tok[0] not in "TB":
            raise ValueError(f"bad labeled move {tok!r}")
        out.append(LabeledMove(T if tok[0] == "T" else B, tok[2:]))
    return tuple(out)


def format_run(run: Run) -> str:
    return " ".join(str(m) for m in run)


def flip_run(run: Run) -> Run:
    return tuple(m.flipped for m in run)


def project(run: Run, prefix: str) -> Run:
    """Keep moves starting with `prefix` and strip it (label preserved)."""
    return tuple(LabeledMove(m.label, m.move[len(prefix):])
                 for m in run if m.move.startswith(prefix))


# ---------------------------------------------------------------------------
# Base class

class ConstantGame:
    """Legal-move structure plus win assignment; immutable after creation."""

    depth_bound: int = 0

    def moves(self, pos: Run) -> frozenset:
        """Labeled moves legal at the (assumed legal) position `pos`."""
        raise NotImplementedError

    def winner(self, run: Run) -> Player:
        """Winner of the legal run `run`; total on legal runs."""
        raise NotImplementedError

    # -- derived queries ----------------------------------------------------

    def legal_moves(self, pos: Run, player: Optional[Player] = None) -> list:
        ms = sorted(self.moves(pos), key=lambda m: (m.label.value, m.move))
        if player is None:
            return ms
        return [m for m in ms if m.label is player]

    def first_offender(self, run: Run) -> Optional[int]:
        """Index of the first illegal move in `run`, None if legal."""
        pos: Run = ()
        for i, m in enumerate(run):
            if m not in self.moves(pos):
                return i
            pos = pos + (m,)
        return None

    def is_legal(self, run: Run) -> bool:
        return self.first_offender(run) is None

    def positions(self, ceiling: int = 200_000) -> Iterator[Run]:
        """All legal positions, breadth first."""
        queue = [()]
        seen = 0
        while queue:
            pos = queue.pop(0)
            yield pos
            seen += 1
            if seen > ceiling:
                raise CeilingExceeded(f"more than {ceiling} legal positions")
            for m in self.legal_moves(pos):
                queue.append(pos + (m,))

    def alphabet(self, ceiling: int = 200_000) -> set:
        """Move strings appearing in some legal position."""
        out = set()
        for pos in self.positions(ceiling):
            out.update(m.move for m in self.moves(pos))
        return out


def x_legal(run: Run, game: ConstantGame, player: Player) -> bool:
    """True iff `run` is legal or its first offending move is not player's."""
    i = game.first_offender(run)
    return i is None or run[i].label is not player


def won_by(game: ConstantGame, run: Run, player: Player) -> bool:
    """player-won: legal and adjudicated to player."""
    return game.is_legal(run) and game.winner(run) is player


def won_extended(game: ConstantGame, run: Run, player: Player) -> bool:
    """Win assignment extended to illegal runs: the first offender loses."""
    i = game.first_offender(run)
    if i is None:
        return game.winner(run) is player
    return run[i].label is not player


# ---------------------------------------------------------------------------
# Elementary games and the operation nodes

class Elem(ConstantGame):
    """Moveless game equal to a truth value."""

    def __init__(self, value: bool):
        self.value = value
        self.depth_bound = 0

    def moves(self, pos: Run) -> frozenset:
        return frozenset()

    def winner(self, run: Run) -> Player:
        return T if self.value else B

    def __repr__(self):
        return "WIN_T" if self.value else "WIN_B"


WIN_T = Elem(True)
WIN_B = Elem(False)


class NegG(ConstantGame):
    def __init__(self, a: ConstantGame):
        self.a = a
        self.depth_bound = a.depth_bound

    def moves(self, pos: Run) -> frozenset:
        return frozenset(m.flipped for m in self.a.moves(flip_run(pos)))

    def winner(self, run: Run) -> Player:
        return self.a.winner(flip_run(run)).opponent


class ParG(ConstantGame):
    """Parallel combination; components addressed by `<tag>.` prefixes."""

    def __init__(self, parts: dict, conj: bool):
        self.parts = dict(parts)  # tag (str) -> game
        self.conj = conj
        self.depth_bound = sum(g.depth_bound for g in parts.values())

    def moves(self, pos: Run) -> frozenset:
        out = set()
        for tag, g in self.parts.items():
            sub = project(pos, tag + ".")
            out.update(LabeledMove(m.label, f"{tag}.{m.move}") for m in g.moves(sub))
        return frozenset(out)

    def winner(self, run: Run) -> Player:
        owners = [g.winner(project(run, tag + ".")) for tag, g in self.parts.items()]
        if self.conj:
            return T if all(o is T for o in owners) else B
        return B if all(o is B for o in owners) else T


class ChoiceG(ConstantGame):
    """One initial choice by `chooser` among payload-keyed components."""

    def __init__(self, options: dict, chooser: Player):
        self.options = dict(options)  # payload (str) -> game
        self.chooser = chooser
        self.depth_bound = 1 + max((g.depth_bound for g in options.values()), default=0)

    def moves(self, pos: Run) -> frozenset:
        if not pos:
            return frozenset(LabeledMove(self.chooser, p) for p in self.options)
        head, rest = pos[0], pos[1:]
        return self.options[head.move].moves(rest)

    def winner(self, run: Run) -> Player:
        # unresolved choice goes against the chooser
        if not run:
            return self.chooser.opponent
        return self.options[run[0].move].winner(run[1:])


class BlindG(ConstantGame):
    """Blind quantifier over a family of same-structure instances."""

    def __init__(self, instances: dict, forall: bool):
        self.instances = dict(instances)  # constant (int) -> game
        self.forall = forall
        any_inst = next(iter(instances.values()))
        self.depth_bound = any_inst.depth_bound

    def moves(self, pos: Run) -> frozenset:
        return next(iter(self.instances.values())).moves(pos)

    def winner(self, run: Run) -> Player:
        owners = (g.winner(run) for g in self.instances.values())
        if self.forall:
            return T if all(o is T for o in owners) else B
        return B if all(o is B for o in owners) else T


class PrefixG(ConstantGame):
    """The game continued from a position (Definition of prefixation)."""

    def __init__(self, a: ConstantGame, phi: Run):
        if not a.is_legal(phi):
            raise ValueError(f"prefixation by an illegal position: {format_run(phi)}")
        self.a = a
        self.phi = tuple(phi)
        self.depth_bound = max(0, a.depth_bound - len(phi))

    def moves(self, pos: Run) -> frozenset:
        return self.a.moves(self.phi + pos)

    def winner(self, run: Run) -> Player:
        return self.a.winner(self.phi + run)


class BranchRecG(ConstantGame):
    """Bounded branching (co)recurrence over at most n branches.

    The splitter may fork a live branch b with `s(b)`, copying its current
    position into the lowest unused branch id; ordinary moves are `b#move`.
    The splitter is the environment for recurrence (who also needs every
    branch won against it ... i.e. the machine wins iff all branches won)
    and the machine for corecurrence (one winning branch suffices).
    """

    def __init__(self, a: ConstantGame, n: int, corec: bool):
        if n < 1:
            raise ValueError("bounded recurrence needs n >= 1")
        self.a = a
        self.n = n
        self.corec = corec
        self.splitter = T if corec else B
        self.depth_bound = n * a.depth_bound + (n - 1)

    def _branches(self, pos: Run) -> Optional[dict]:
        """branch id -> A-run; None when pos is structurally bad."""
        branches = {1: ()}
        for m in pos:
            if m.move.startswith("s(") and m.move.endswith(")"):
                if m.label is not self.splitter:
                    return None
                try:
                    b = int(m.move[2:-1])
                except ValueError:
                    return None
                if b not in branches or len(branches) >= self.n:
                    return None
                branches[min(set(range(1, self.n + 1)) - set(branches))] = branches[b]
            elif "#" in m.move:
                head, sub = m.move.split("#", 1)
                try:
                    b = int(head)
                except ValueError:
                    return None
                if b not in branches:
                    return None
                branches[b] = branches[b] + (LabeledMove(m.label, sub),)
            else:
                return None
        return branches

    def moves(self, pos: Run) -> frozenset:
        branches = self._branches(pos)
        out = set()
        if branches is None:
            return frozenset()
        if len(branches) < self.n:
            out.update(LabeledMove(self.splitter, f"s({b})") for b in branches)
        for b, sub in branches.items():
            out.update(LabeledMove(m.label, f"{b}#{m.move}")
                       for m in self.a.moves(sub))
        return frozenset(out)

    def winner(self, run: Run) -> Player:
        branches = self._branches(run)
        owners = [self.a.winner(sub) for sub in branches.values()]
        if self.corec:
            return T if any(o is T for o in owners) else B
        return T if all(o is T for o in owners) else B


class ExplicitGame(ConstantGame):
    """Table-backed game: a prefix-closed map position -> winner."""

    def __init__(self, table: dict):
        self.table = {tuple(k): v for k, v in table.items()}
        if () not in self.table:
            raise ValueError("explicit game must adjudicate the empty run")
        for pos in self.table:
            if pos and pos[:-1] not in self.table:
                raise ValueError(f"table is not prefix-closed at {format_run(pos)}")
        self.depth_bound = max(len(p) for p in self.table)

    def moves(self, pos: Run) -> frozenset:
        return frozenset(k[-1] for k in self.table
                         if len(k) == len(pos) + 1 and k[:-1] == tuple(pos))

    def winner(self, run: Run) -> Player:
        return self.table[tuple(run)]

    # -- flat record list serialization --------------------------------------

    def to_records(self) -> list:
        recs = []
        for pos in sorted(self.table, key=lambda p: (len(p), format_run(p))):
            recs.append({
                "position": format_run(pos),
                "winner": self.table[pos].value,
                "children": sorted(str(m) for m in self.moves(pos)),
            })
        return recs

    @classmethod
    def from_records(cls, records: Iterable[dict]) -> "ExplicitGame":
        table = {}
        for rec in records:
            table[parse_run(rec["position"])] = T if rec["winner"] == "T" else B
        return cls(table)

    def dump(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump({"format": "explicit-game", "version": 1,
                       "records": self.to_records()}, fh, indent=1)

    @classmethod
    def load(cls, path: str) -> "ExplicitGame":
        with open(path) as fh:
            data = json.load(fh)
        return cls.from_records(data["records"])


# ---------------------------------------------------------------------------
# The operation vocabulary

def neg(a: ConstantGame) -> ConstantGame:
    return NegG(a)


def pand(a: ConstantGame, b: ConstantGame) -> ConstantGame:
    return ParG({"1": a, "2": b}, conj=True)


def por(a: ConstantGame, b: ConstantGame) -> ConstantGame:
    return ParG({"1": a, "2": b}, conj=False)


def implies(a: ConstantGame, b: ConstantGame) -> ConstantGame:
    return por(neg(a), b)


def cand(a: ConstantGame, b: ConstantGame) -> ConstantGame:
    return ChoiceG({"1": a, "2": b}, chooser=B)


def cor(a: ConstantGame, b: ConstantGame) -> ConstantGame:
    return ChoiceG({"1": a, "2": b}, chooser=T)


def choice_all(instances: dict) -> ConstantGame:
    return ChoiceG({str(c): g for c, g in instances.items()}, chooser=B)


def choice_ex(instances: dict) -> ConstantGame:
    return ChoiceG({str(c): g for c, g in instances.items()}, chooser=T)


def par_all(instances: dict) -> ConstantGame:
    return ParG({str(c): g for c, g in instances.items()}, conj=True)


def par_ex(instances: dict) -> ConstantGame:
    return ParG({str(c): g for c, g in instances.items()}, conj=False)


def blind_all(instances: dict) -> ConstantGame:
    _check_unistructural_instances(instances)
    return BlindG(instances, forall=True)


def blind_ex(instances: dict) -> ConstantGame:
    _check_unistructural_instances(instances)
    return BlindG(instances, forall=False)


def _check_unistructural_instances(instances: dict, ceiling: int = 50_000) -> None:
    games = list(instances.values())
    base = {pos for pos in games[0].positions(ceiling)}
    for g in games[1:]:
        if {pos for pos in g.positions(ceiling)} != base:
            raise ValueError("blind quantifier over a non-unistructural family")


def prefix(a: ConstantGame, phi: Run) -> ConstantGame:
    return PrefixG(a, phi) if phi else a


def br_rec_bounded(a: ConstantGame, n: int) -> ConstantGame:
    return BranchRecG(a, n, corec=False)


def br_corec_bounded(a: ConstantGame, n: int) -> ConstantGame:
    return BranchRecG(a, n, corec=True)


def pr_rec_bounded(a: ConstantGame, n: int) -> ConstantGame:
    if n == 1:
        return a
    return ParG({str(i): a for i in range(1, n + 1)}, conj=True)


def pr_corec_bounded(a: ConstantGame, n: int) -> ConstantGame:
    if n == 1:
        return a
    return ParG({str(i): a for i in range(1, n + 1)}, conj=False)


# ---------------------------------------------------------------------------
# Extensional equality

def game_eq(a: ConstantGame, b: ConstantGame, ceiling: int = 200_000) -> bool:
    """Equality of legal-run sets and win assignments."""
    queue = [()]
    seen = 0
    while queue:
        pos = queue.pop(0)
        seen += 1
        if seen > ceiling:
            raise CeilingExceeded("game_eq ceiling")
        ma, mb = a.moves(pos), b.moves(pos)
        if ma != mb:
            return False
        if a.winner(pos) is not b.winner(pos):
            return False
        queue.extend(pos + (m,) for m in ma)
    return True


# ---------------------------------------------------------------------------
# Delays and the static property

def is_delay(upsilon: Run, gamma: Run, p: Player) -> bool:
    """True iff `upsilon` is a p-delay of `gamma`: same per-player
    subsequences, and every p-move that came after a non-p move in gamma
    still does in upsilon."""
    for player in (T, B):
        if tuple(m for m in upsilon if m.label is player) != \
           tuple(m for m in gamma if m.label is player):
            return False

    def indexed(run: Run):
        # (player ordinal within its subsequence) for each move
        counts = {T: 0, B: 0}
        out = []
        for m in run:
            counts[m.label] += 1
            out.append((m.label, counts[m.label]))
        return out

    gi, ui = indexed(gamma), indexed(upsilon)

    def position(seq, label, ordinal):
        return next(i for i, (l, n) in enumerate(seq) if l is label and n == ordinal)

    for (l1, n1) in gi:
        if l1 is not p:
            continue
        for (l2, n2) in gi:
            if l2 is p:
                continue
            if position(gi, l1, n1) > position(gi, l2, n2):
                if not position(ui, l1, n1) > position(ui, l2, n2):
                    return False
    return True


def delays_of(gamma: Run, p: Player) -> Iterator[Run]:
    """All p-delays of gamma (interleavings of its per-player subsequences
    that satisfy the delay conditions)."""
    mine = [m for m in gamma if m.label is p]
    theirs = [m for m in gamma if m.label is not p]

    def shuffles(xs, ys):
        if not xs:
            yield tuple(ys)
            return
        if not ys:
            yield tuple(xs)
            return
        for rest in shuffles(xs[1:], ys):
            yield (xs[0],) + rest
        for rest in shuffles(xs, ys[1:]):
            yield (ys[0],) + rest

    for cand_run in shuffles(mine, theirs):
        if is_delay(cand_run, gamma, p):
            yield cand_run


def all_runs(alphabet: Iterable[str], max_len: int) -> Iterator[Run]:
    labeled = [LabeledMove(p, m) for p in (T, B) for m in sorted(alphabet)]
    for n in range(max_len + 1):
        for combo in itertools.product(labeled, repeat=n):
            yield combo


def is_static(game: ConstantGame, ceiling: int = 400_000,
              extra_moves: Iterable[str] = ("zz",)) -> bool:
    """Brute-force check of the two static-game clauses over all runs on
    the game's move alphabet (plus junk probes) up to depth_bound."""
    alphabet = game.alphabet(ceiling) | set(extra_moves)
    n_runs = sum((2 * len(alphabet)) ** k for k in range(game.depth_bound + 1))
    if n_runs > ceiling:
        raise CeilingExceeded(f"{n_runs} runs exceed the static-check ceiling")
    runs = list(all_runs(alphabet, game.depth_bound))
    for gamma in runs:
        for p in (T, B):
            g_xlegal = x_legal(gamma, game, p)
            g_won = won_extended(game, gamma, p)
            if not (g_xlegal or g_won):
                continue
            for ups in delays_of(gamma, p):
                if g_xlegal and not x_legal(ups, game, p):
                    return False
                if g_won and not won_extended(game, ups, p):
                    return False
    return True


def first_mover_wins(alphabet: Iterable[str] = ("a", "b")) -> ExplicitGame:
    """The classic non-static game: every run of length <= 2 is legal and
    the first mover wins (environment wins the empty run)."""
    labeled = [LabeledMove(p, m) for p in (T, B) for m in alphabet]
    table = {(): B}
    for m1 in labeled:
        table[(m1,)] = m1.label
        for m2 in labeled:
            table[(m1, m2)] = m1.label
    return ExplicitGame(table)
