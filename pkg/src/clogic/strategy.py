"""Interactive agents and strategy extraction from proofs.

An agent is a deterministic step contract: given (valuation, visible run)
it returns the machine moves to emit now (empty = wait).  Agents are
replayable: the returned moves depend only on those two inputs.

Extraction walks the proof from the conclusion toward the leaves:
machine-choice rules (B1)/(B2) emit the addressed choice move and
continue as the premise; (C) installs a copy-cat link between the two
replaced general-atom occurrences; waiting rules (a)/(A) dispatch on the
environment's choice moves, binding the premise's fresh variable for
quantifier occurrences.  Moves inside linked atoms are mirrored.

Illegal environment moves are ignored: once the environment has moved
illegally, the run is no longer environment-legal and the machine cannot
be blamed, so blind mirroring stays safe.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .formula import Bin, Const, Formula, IMP, Neg, PAND, POR, Quant, print_formula
from .game import B, ConstantGame, LabeledMove, Run, T, won_by, x_legal
from .proof import Proof, check_proof
from .semantics import Interpretation, Valuation, interpret


class Agent:
    """Deterministic strategy: respond(valuation, visible run) -> moves."""

    name = "agent"

    def respond(self, e: Valuation, run: Run) -> list:
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.name}>"


class DoNothing(Agent):
    name = "do-nothing"

    def respond(self, e: Valuation, run: Run) -> list:
        return []


class FixedMoves(Agent):
    """Emits a fixed move sequence once, ignoring the environment."""

    def __init__(self, moves: Iterable[str], name: str = "fixed"):
        self.moves = list(moves)
        self.name = name

    def respond(self, e: Valuation, run: Run) -> list:
        mine = [m.move for m in run if m.label is T]
        if mine == self.moves[: len(mine)]:
            return self.moves[len(mine):]
        return []


class SolverAgent(Agent):
    """Plays a positional strategy computed by backward induction for one
    concrete interpreted game (not uniform across interpretations)."""

    name = "solver"

    def __init__(self, strategy: dict):
        self.strategy = strategy

    def respond(self, e: Valuation, run: Run) -> list:
        out = []
        pos = tuple(run)
        while True:
            move = self.strategy.get(pos)
            if move is None:
                return out
            out.append(move)
            pos = pos + (LabeledMove(T, move),)


class CopycatAgent(Agent):
    """Mirrors environment moves between two role-opposite addresses."""

    name = "copycat"

    def __init__(self, addr_a: str = "1.", addr_b: str = "2."):
        self.links = [(addr_a, addr_b)]

    def respond(self, e: Valuation, run: Run) -> list:
        pending: deque = deque()
        for m in run:
            if m.label is T:
                if pending and pending[0] == m.move:
                    pending.popleft()
                continue
            mirrored = mirror_move(self.links, m.move)
            if mirrored is not None:
                pending.append(mirrored)
        return list(pending)


def mirror_move(links: list, move: str) -> Optional[str]:
    best = None
    for a, b in links:
        for src, dst in ((a, b), (b, a)):
            if move.startswith(src) and (best is None or len(src) > best[0]):
                best = (len(src), dst + move[len(src):])
    return best[1] if best else None


# ---------------------------------------------------------------------------
# Extraction

def move_address(f: Formula, path: tuple) -> str:
    """Dotted move prefix of the subformula occurrence: parallel binary
    steps contribute `1.`/`2.`, negation and blind binders contribute
    nothing; choice nodes never lie on a surface path."""
    addr = ""
    g = f
    for sel in path:
        if isinstance(g, Bin) and g.op in (PAND, POR, IMP):
            addr += f"{sel}."
            g = g.left if sel == 1 else g.right
        elif isinstance(g, Neg):
            g = g.body
        elif isinstance(g, Quant):
            g = g.body
        elif isinstance(g, Bin):  # choice connective: component keeps the address
            g = g.left if sel == 1 else g.right
        else:
            raise ValueError(f"no address through {g!r}")
    return addr


@dataclass
class _Waiting:
    """Expected environment choice moves at an (a)/(A) node."""

    exact: dict          # move string -> premise node id
    prefixes: list       # (address, fresh var or None, premise node id)


class ExtractedAgent(Agent):
    """Rule-directed strategy read off a checked proof."""

    def __init__(self, proof: Proof, log: bool = False):
        verdict = check_proof(proof)
        if verdict != "ok":
            raise ValueError(f"extraction needs an unconditional proof, got {verdict}")
        self.proof = proof
        self.name = f"extract[{print_formula(proof.conclusion)}]"
        self.nodes = {n.id: n for n in proof.nodes}
        self.log_enabled = log
        self.log: list = []

    # -- state transitions ----------------------------------------------------

    def _descend(self, nid: int, e: Valuation, env: dict, links: list,
                 pending: deque) -> int:
        """Perform all machine-initiated steps at and below node `nid`."""
        node = self.nodes[nid]
        while node.rule in ("B1", "B2", "C"):
            addr = None
            if node.rule == "B1":
                addr = move_address(node.formula, tuple(node.data["path"]))
                pending.append(addr + str(node.data["i"]))
            elif node.rule == "B2":
                addr = move_address(node.formula, tuple(node.data["path"]))
                t = node.data["term"]
                if isinstance(t, Const):
                    value = t.value
                else:  # running variable environment, else the valuation
                    value = env[t.name] if t.name in env else e(t.name)
                pending.append(addr + str(value))
            else:  # C: install the copy-cat link
                pos_addr = move_address(node.formula, tuple(node.data["pos_path"]))
                neg_addr = move_address(node.formula, tuple(node.data["neg_path"]))
                links.append((pos_addr, neg_addr))
            if self.log_enabled:
                self.log.append(("descend", node.id, node.rule, addr))
            node = self.nodes[node.premises[0]]
        return node.id

    def _waiting(self, nid: int) -> _Waiting:
        node = self.nodes[nid]
        exact: dict = {}
        prefixes: list = []
        for entry in node.data.get("premise_map", []):
            path = tuple(entry["path"])
            addr = move_address(node.formula, path)
            if "i" in entry:
                exact[addr + str(entry["i"])] = entry["premise"]
            else:
                prefixes.append((addr, entry.get("fresh"), entry["premise"]))
        return _Waiting(exact, prefixes)

    # -- the step contract ----------------------------------------------------

    def respond(self, e: Valuation, run: Run) -> list:
        env: dict = {}
        links: list = []
        pending: deque = deque()
        unmatched: list = []

        def catch_up():
            # newly installed links may mirror environment moves that
            # arrived earlier (speed-irrelevance: delays must not matter)
            rest = []
            for move in unmatched:
                mirrored = mirror_move(links, move)
                if mirrored is None:
                    rest.append(move)
                else:
                    if self.log_enabled:
                        self.log.append(("mirror", None, move, mirrored))
                    pending.append(mirrored)
            unmatched[:] = rest

        nid = self._descend(self.proof.root, e, env, links, pending)
        waiting = self._waiting(nid)
        for m in run:
            if m.label is T:
                if pending and pending[0] == m.move:
                    pending.popleft()
                continue
            premise = waiting.exact.get(m.move)
            bound = None
            if premise is None:
                for addr, fresh, pid in waiting.prefixes:
                    payload = m.move[len(addr):] if m.move.startswith(addr) else ""
                    if payload.isdigit():
                        premise, bound = pid, (fresh, int(payload))
                        break
            if premise is not None:
                if bound and bound[0]:
                    env[bound[0]] = bound[1]
                if self.log_enabled:
                    self.log.append(("dispatch", nid, m.move, premise))
                nid = self._descend(premise, e, env, links, pending)
                waiting = self._waiting(nid)
                catch_up()
                continue
            mirrored = mirror_move(links, m.move)
            if mirrored is not None:
                if self.log_enabled:
                    self.log.append(("mirror", nid, m.move, mirrored))
                pending.append(mirrored)
            else:
                unmatched.append(m.move)
        return list(pending)


def extract(proof: Proof, dialect: Optional[str] = None, log: bool = False) -> Agent:
    """Turn a checked proof into a winning machine strategy."""
    if dialect is not None and dialect != proof.dialect:
        raise ValueError(f"proof is in dialect {proof.dialect}, not {dialect}")
    return ExtractedAgent(proof, log=log)


# ---------------------------------------------------------------------------
# Exhaustive verification

@dataclass
class Loss:
    transcript: Run
    reason: str
    interpretation: str = ""


@dataclass
class Report:
    formula: str
    interpretation: str
    losses: list = field(default_factory=list)
    lines: int = 0

    @property
    def ok(self) -> bool:
        return not self.losses


def _flush(agent: Agent, e: Valuation, game: ConstantGame, run: Run,
           losses: list, label: str, fuel: int = 200) -> Run:
    for _ in range(fuel):
        new = agent.respond(e, run)
        if not new:
            return run
        for move in new:
            legal_so_far = game.first_offender(run) is None
            run = run + (LabeledMove(T, move),)
            if legal_so_far and not game.is_legal(run):
                losses.append(Loss(run, "machine made the first illegal move", label))
                return run
    losses.append(Loss(run, "machine emission did not quiesce", label))
    return run


def verify_agent(agent: Agent, f: Formula, star: Interpretation,
                 universe: int = 3, e: Optional[Valuation] = None,
                 illegal_probes: bool = True, junk: str = "zz") -> Report:
    """Play the agent against every environment behavior: every legal
    environment move sequence (stopping anywhere), canonical scheduling
    (machine flushes first), plus illegal-first probes."""
    e = e or Valuation(universe=universe)
    game = interpret(f, star, universe)(e)
    return verify_on_game(agent, game, e, label=star.label or "",
                          formula=print_formula(f), illegal_probes=illegal_probes,
                          junk=junk)


def verify_on_game(agent: Agent, game: ConstantGame, e: Optional[Valuation] = None,
                   label: str = "", formula: str = "", illegal_probes: bool = True,
                   junk: str = "zz") -> Report:
    """Exhaustive adversary check directly on a constant game."""
    e = e or Valuation()
    report = Report(formula, label)

    def probe_illegal(run: Run, move: str):
        # after an illegal environment move the machine may do anything
        # except become the first offender itself
        probe = run + (LabeledMove(B, move),)
        losses: list = []
        probe = _flush(agent, e, game, probe, losses, label)
        if not x_legal(probe, game, T):
            report.losses.append(Loss(probe, "machine blamed after illegal environment move", label))

    def dfs(run: Run):
        report.lines += 1
        before = len(report.losses)
        run = _flush(agent, e, game, run, report.losses, label)
        if len(report.losses) > before:
            return
        if x_legal(run, game, B) and not won_by(game, run, T):
            report.losses.append(Loss(run, "environment-legal transcript not won", label))
            return
        if game.first_offender(run) is not None:
            return  # environment already offended; machine cannot be blamed
        for m in game.legal_moves(run, B):
            dfs(run + (m,))
        if illegal_probes:
            probe_illegal(run, junk)
            if run and run[-1].label is B:
                probe_illegal(run, run[-1].move)  # duplicate of the last choice

    dfs(())
    return report


def verify_uniform(agent: Agent, f: Formula, family: Iterable[Interpretation],
                   universe: int = 3) -> list:
    """One agent, unchanged, against every member; list of Reports."""
    return [verify_agent(agent, f, star, universe) for star in family]


# ---------------------------------------------------------------------------
# Matches

EnvBehavior = Union[dict, Agent, None]


def play_match(machine: Agent, env: EnvBehavior, f: Formula,
               star: Interpretation, e: Optional[Valuation] = None,
               universe: int = 3, fuel: int = 10_000):
    """Cycle-driven match: each cycle the machine emits at most one move
    (one per clock cycle), then the environment's moves for that cycle
    land.  The environment is a schedule {cycle: [move, ...]}, an Agent
    playing the environment role, or None.  Returns (transcript, verdict);
    verdict is None on fuel exhaustion (timeout reported, not adjudicated)."""
    from .semantics import adjudicate

    e = e or Valuation(universe=universe)
    schedule = env if isinstance(env, dict) else {}
    last_scheduled = max(schedule) if schedule else -1
    transcript: Run = ()
    cycle = 0
    while cycle < fuel:
        acted = False
        mine = machine.respond(e, transcript)
        if mine:
            transcript = transcript + (LabeledMove(T, mine[0]),)
            acted = True
        for move in schedule.get(cycle, []):
            transcript = transcript + (LabeledMove(B, move),)
            acted = True
        if isinstance(env, Agent):
            for move in env.respond(e, flip_view(transcript)):
                transcript = transcript + (LabeledMove(B, move),)
                acted = True
        cycle += 1
        if not acted and cycle > last_scheduled:
            return transcript, adjudicate(f, star, e, transcript, universe)
    return transcript, None


def flip_view(run: Run) -> Run:
    """The run as seen by an agent playing the environment role."""
    return tuple(m.flipped for m in run)


# ---------------------------------------------------------------------------
# The modus-ponens combinator

class ComposeMP(Agent):
    """Plays B given an agent M for A and an agent N for A -> B.

    Internally simulates N over A -> B: real environment moves on B reach
    N prefixed `2.`, N's `1.` moves (its play in the negated A) reach M
    role-flipped, and M's moves return to N as `1.` environment moves;
    N's `2.` moves are emitted for real."""

    def __init__(self, m_agent: Agent, n_agent: Agent, fuel: int = 10_000):
        self.m_agent = m_agent
        self.n_agent = n_agent
        self.fuel = fuel
        self.name = f"mp({m_agent.name},{n_agent.name})"

    def respond(self, e: Valuation, run: Run) -> list:
        run_n: Run = ()   # N's view of A -> B
        run_a: Run = ()   # M's view of A
        out: deque = deque()

        def flush_internal():
            nonlocal run_n, run_a
            for _ in range(self.fuel):
                progressed = False
                for move in self.n_agent.respond(e, run_n):
                    run_n = run_n + (LabeledMove(T, move),)
                    if move.startswith("2."):
                        out.append(move[2:])      # N's consequent move is real
                    elif move.startswith("1."):   # N plays in the negated A
                        run_a = run_a + (LabeledMove(B, move[2:]),)
                    progressed = True
                for move in self.m_agent.respond(e, run_a):
                    run_a = run_a + (LabeledMove(T, move),)
                    run_n = run_n + (LabeledMove(B, "1." + move),)
                    progressed = True
                if not progressed:
                    return
            raise RuntimeError("modus-ponens composite did not quiesce")

        flush_internal()
        for m in run:
            if m.label is T:
                if out and out[0] == m.move:
                    out.popleft()
                continue
            run_n = run_n + (LabeledMove(B, "2." + m.move),)
            flush_internal()
        return list(out)


def compose_mp(m_agent: Agent, n_agent: Agent) -> Agent:
    return ComposeMP(m_agent, n_agent)
