import random

import pytest

from clogic.formula import parse
from clogic.game import B, T, format_run, parse_run
from clogic.hpm import (
    Configuration, HPMachine, HostedMachine, Step, host, parse_schedule,
    run_branch, wins,
)
from clogic.proof import prove_cl1
from clogic.semantics import Interpretation, Valuation
from clogic.strategy import CopycatAgent, DoNothing, FixedMoves, extract, play_match
from conftest import const_interp, general_interp

E3 = Valuation(universe=3)


def emit_once(move):
    def tr(state, w, r, v):
        if state == "start":
            return Step("move", buffer_append=move)
        return None

    return HPMachine(start="start", move_states=frozenset({"move"}),
                     transition=tr, name=f"emit-{move}")


def test_step_non_move_state():
    def tr(state, w, r, v):
        if state == "start":
            return Step("scan", write="x", work_dir=1)
        return None

    m = HPMachine(start="start", move_states=frozenset(), transition=tr)
    c = m.step(m.initial(), E3)
    assert c.run_tape == () and c.state == "scan" and c.work_symbol() == "_"
    assert dict(c.work)[0] == "x"


def test_step_move_state_flushes_buffer():
    m = emit_once("2")
    c = m.step(m.initial(), E3)
    assert format_run(c.run_tape) == "T:2"
    assert c.buffer == ""


def test_injected_moves_order_preserved():
    m = HPMachine(start="s", move_states=frozenset(), transition=lambda *a: None)
    c = m.step(m.initial(), E3, ["a", "b"])
    assert format_run(c.run_tape) == "B:a B:b"


def test_run_branch_examples():
    assert run_branch(host(DoNothing()), E3, {}) == ()
    assert format_run(run_branch(host(FixedMoves(["2"])), E3, {})) == "T:2"
    run = run_branch(host(CopycatAgent("1.", "2.")), E3, {0: ["1.1"]})
    assert format_run(run) == "B:1.1 T:2.1"


def test_run_branch_append_only_and_deterministic():
    log1, log2 = [], []
    sched = {0: ["1.1"], 2: ["1.2"]}
    r1 = run_branch(host(CopycatAgent("1.", "2.")), E3, sched, log=log1)
    r2 = run_branch(host(CopycatAgent("1.", "2.")), E3, sched, log=log2)
    assert r1 == r2
    for (c1, conf1), (c2, conf2) in zip(log1, log2):
        assert conf1.run_tape == conf2.run_tape
    # prefix property along the branch
    prev = ()
    for _, conf in log1:
        assert conf.run_tape[: len(prev)] == prev
        prev = conf.run_tape


def test_schedule_file():
    sched = parse_schedule("0: 1.1\n# comment\n3: 2.2 zz\n")
    assert sched == {0: ["1.1"], 3: ["2.2", "zz"]}


def test_wins_examples():
    star = Interpretation()
    assert not wins(host(FixedMoves(["1"])), parse("false | true"), star)
    assert wins(host(FixedMoves(["2"])), parse("false | true"), star)
    assert wins(host(DoNothing()), parse("true"), star)
    assert wins(emit_once("2"), parse("false | true"), star)
    assert not wins(emit_once("1"), parse("false | true"), star)


def test_wins_copycat_over_family():
    f = parse("A \\/ ~A")
    for shape, params in (("and2", {"a": True, "b": False}),
                          ("or2", {"a": False, "b": True}),
                          ("mix2", {"a": True, "b": False})):
        star = general_interp(shape, A=(0, shape, params))
        assert wins(host(CopycatAgent("1.", "2.")), f, star), shape


def test_wins_quantified_with_valuations():
    f = parse("!x.(odd(x) | ~odd(x))")
    star = Interpretation()
    star.elementary[("odd", 1)] = lambda args: args[0] % 2 == 1
    win, strat = None, None
    from clogic.semantics import interpret, winnable
    from clogic.strategy import SolverAgent

    game = interpret(f, star, 3)(E3)
    win, strat = winnable(game)
    assert win
    assert wins(host(SolverAgent(strat)), f, star)


def test_host_play_match_transcript_equality():
    rng = random.Random(99)
    f63 = parse("((p->q)&(p->r))->(p->(q&r))")
    _, proof = prove_cl1(f63)
    corpus_agents = [
        (CopycatAgent("1.", "2."), parse("A \\/ ~A"),
         general_interp("and2", A=(0, "and2", {"a": True, "b": False})),
         ["1.1", "1.2", "2.1", "2.2", "zz"]),
        (extract(proof), f63, const_interp(p=True, q=True, r=True),
         ["2.2.1", "2.2.2", "1.1", "1.2", "zz"]),
    ]
    for agent, f, star, moves in corpus_agents:
        for i in range(100):
            sched = {}
            for _ in range(rng.randint(0, 4)):
                sched.setdefault(rng.randint(0, 6), []).append(rng.choice(moves))
            spelled = run_branch(host(agent), E3, sched)
            direct, _ = play_match(agent, sched, f, star, E3)
            assert spelled == direct, (i, format_run(spelled), format_run(direct))


def test_burst_insensitivity_on_static_targets():
    # splitting a burst across two cycles never flips the verdict
    f = parse("((p->q)&(p->r))->(p->(q&r))")
    _, proof = prove_cl1(f)
    agent = extract(proof)
    star = const_interp(p=True, q=False, r=True)
    one_burst = {0: ["2.2.2"], 1: []}
    split = {0: [], 2: ["2.2.2"]}
    for sched_a, sched_b in ((one_burst, split),):
        _, va = play_match(agent, sched_a, f, star, E3)
        _, vb = play_match(agent, sched_b, f, star, E3)
        assert va.winner == vb.winner
