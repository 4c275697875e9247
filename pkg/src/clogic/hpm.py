"""Transcript-faithful machine model: configurations, cycles, spelled runs.

A machine owns a read/write work tape, a read-only valuation tape and a
read-only, append-only run tape; it makes a move by filling its buffer
and entering a move state, which appends the machine-labeled buffer to
the run tape.  The environment may inject any finite burst of moves at
any cycle boundary.

Raw transition-table machines are supported for tiny demos; agents are
hosted by a machine whose transition consults the agent as its oracle
(the work tape abstracted into the agent's internal state) and emits one
pending move per cycle.  Cell granularity: one labeled move per run-tape
cell, one constant per valuation-tape cell (variables in name order).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional

from .formula import Formula, free_vars
from .game import B, CeilingExceeded, LabeledMove, Run, T, won_by, x_legal
from .semantics import Interpretation, Valuation, interpret
from .strategy import Agent

BLANK = "_"


@dataclass(frozen=True)
class Configuration:
    """Current state of a machine, excluding the (conceptually infinite)
    valuation-tape content."""

    state: str
    work: tuple = ()          # (cell index, symbol) pairs
    work_head: int = 0
    run_tape: Run = ()
    run_cursor: int = 0
    val_cursor: int = 0
    buffer: str = ""

    def work_symbol(self) -> str:
        return dict(self.work).get(self.work_head, BLANK)


@dataclass
class Step:
    """Result of one transition: new state plus tape actions."""

    state: str
    write: Optional[str] = None
    work_dir: int = 0
    run_dir: int = 0
    val_dir: int = 0
    buffer_append: str = ""


@dataclass
class HPMachine:
    """Raw machine: deterministic transition table over the three scanned
    symbols.  transition(state, work, run, valuation) -> Step or None to
    halt in place."""

    start: str
    move_states: frozenset
    transition: Callable[[str, str, str, str], Optional[Step]]
    name: str = "hpm"
    var_order: tuple = ()

    def initial(self) -> Configuration:
        return Configuration(state=self.start)

    def step(self, c: Configuration, e: Valuation, injected: Iterable[str] = ()) -> Configuration:
        run_sym = str(c.run_tape[c.run_cursor]) if c.run_cursor < len(c.run_tape) else BLANK
        if c.val_cursor < len(self.var_order):
            val_sym = str(e(self.var_order[c.val_cursor]))
        else:
            val_sym = "1"  # unmentioned variables default to 1
        out = self.transition(c.state, c.work_symbol(), run_sym, val_sym)
        if out is None:
            new = c
        else:
            work = dict(c.work)
            if out.write is not None:
                work[c.work_head] = out.write
            new = Configuration(
                state=out.state,
                work=tuple(sorted(work.items())),
                work_head=c.work_head + out.work_dir,
                run_tape=c.run_tape,
                run_cursor=max(0, c.run_cursor + out.run_dir),
                val_cursor=max(0, c.val_cursor + out.val_dir),
                buffer=c.buffer + out.buffer_append,
            )
            if out.state in self.move_states:
                new = replace(new, run_tape=new.run_tape + (LabeledMove(T, new.buffer),),
                              buffer="")
        burst = tuple(LabeledMove(B, m) for m in injected)
        if burst:
            new = replace(new, run_tape=new.run_tape + burst)
        return new

    def quiescent(self, c: Configuration, e: Valuation) -> bool:
        """No move forthcoming: probe a bounded lookahead of quiet cycles."""
        probe = c
        for _ in range(50):
            before = len(probe.run_tape)
            probe = self.step(probe, e)
            if len(probe.run_tape) > before:
                return False
            if probe == c:
                return True
            c = probe
        return True


class HostedMachine:
    """Agent-backed machine: the work tape is the agent's internal state;
    each cycle emits at most one pending agent move via the move state."""

    def __init__(self, agent: Agent, name: Optional[str] = None):
        self.agent = agent
        self.name = name or f"host[{agent.name}]"
        self.move_states = frozenset({"move"})

    def initial(self) -> Configuration:
        return Configuration(state="idle")

    def step(self, c: Configuration, e: Valuation, injected: Iterable[str] = ()) -> Configuration:
        pending = self.agent.respond(e, c.run_tape)
        if pending:
            new = Configuration(state="move",
                                run_tape=c.run_tape + (LabeledMove(T, pending[0]),))
        else:
            new = replace(c, state="idle")
        burst = tuple(LabeledMove(B, m) for m in injected)
        if burst:
            new = replace(new, run_tape=new.run_tape + burst)
        return new

    def quiescent(self, c: Configuration, e: Valuation) -> bool:
        return not self.agent.respond(e, c.run_tape)


def host(agent: Agent) -> HostedMachine:
    return HostedMachine(agent)


# ---------------------------------------------------------------------------
# Branches

def run_branch(machine, e: Valuation, schedule: Optional[dict] = None,
               fuel: int = 1000, log: Optional[list] = None) -> Run:
    """Spell the run of the computation branch driven by the cycle-indexed
    environment schedule, for `fuel` cycles (early exit once the machine is
    quiescent and no injections remain)."""
    schedule = schedule or {}
    last = max(schedule) if schedule else -1
    c = machine.initial()
    for cycle in range(fuel):
        before = c
        c = machine.step(c, e, schedule.get(cycle, []))
        if log is not None:
            log.append((cycle, c))
        assert before.run_tape == c.run_tape[: len(before.run_tape)], \
            "run tape must be append-only"
        if cycle >= last and c.run_tape == before.run_tape and machine.quiescent(c, e):
            break
    return c.run_tape


def parse_schedule(text: str) -> dict:
    """Schedule file: lines `cycle: move [move ...]`."""
    out: dict = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(":")
        out[int(head)] = rest.split()
    return out


# ---------------------------------------------------------------------------
# Def-of-computing check at desk scale

def wins(machine, f: Formula, star: Interpretation, universe: int = 3,
         max_depth: Optional[int] = None, cycle_ceiling: int = 2000,
         junk: str = "zz") -> bool:
    """True iff for every valuation over the universe and every environment
    burst schedule within the ceilings, the spelled run is machine-won and
    legal whenever it is environment-legal."""
    vars_ = sorted(free_vars(f))

    def valuations():
        def assign(rest, acc):
            if not rest:
                yield acc
                return
            for c in range(1, universe + 1):
                yield from assign(rest[1:], acc.set(rest[0], c))
        yield from assign(vars_, Valuation(universe=universe))

    for e in valuations():
        game = interpret(f, star, universe)(e)

        def settle(c: Configuration) -> Optional[Configuration]:
            for _ in range(cycle_ceiling):
                if machine.quiescent(c, e):
                    return c
                c = machine.step(c, e)
            return None

        def beats(c: Configuration) -> bool:
            c = settle(c)
            if c is None:
                raise CeilingExceeded("machine did not quiesce within the cycle ceiling")
            run = c.run_tape
            if x_legal(run, game, B) and not won_by(game, run, T):
                return False
            if game.first_offender(run) is not None:
                return True  # environment offended first
            for m in game.legal_moves(run, B):
                if not beats(machine.step(c, e, [m.move])):
                    return False
            probe = settle(machine.step(c, e, [junk]))
            if probe is None:
                raise CeilingExceeded("machine did not quiesce within the cycle ceiling")
            if not x_legal(probe.run_tape, game, T):
                return False
            return True

        if not beats(machine.initial()):
            return False
    return True
