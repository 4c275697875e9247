"""Batch entry point: one subcommand per engine operation family.

Exit codes: 64 usage errors, 65 engine errors; `prove` and
`decide-blindfree` exit 0 provable, 1 not provable, 2 unknown.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import formula as F
from . import game as G
from . import hpm as H
from . import proof as P
from . import semantics as S
from . import strategy as St

EX_USAGE, EX_ENGINE = 64, 65


def _out(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=1))
    else:
        print(text)


def _load_interp(args, f):
    if getattr(args, "interp", None):
        return S.load_interpretation(args.interp)
    return S.default_interpretation(f)


def _valuation(args) -> S.Valuation:
    text = getattr(args, "valuation", "") or ""
    return S.Valuation.parse(text, args.universe)


def cmd_parse(args) -> int:
    f = F.parse(args.formula)
    dialects = {d: F.dialect_ok(f, d) for d in ("cl1", "cl2", "cl4", "game")}
    _out(args, {"ok": True, "canonical": F.print_formula(f), "dialects": dialects},
         f"{F.print_formula(f)}\n dialects: " +
         " ".join(d for d, ok in dialects.items() if ok))
    return 0


def _prover_for(dialect: str):
    return {"cl1": lambda f, b: P.prove_cl1(f),
            "cl2": lambda f, b: P.prove_cl2(f),
            "cl4": P.prove_cl4}[dialect]


def cmd_prove(args) -> int:
    f = F.parse(args.formula)
    status, proof = _prover_for(args.dialect)(f, args.budget)
    payload = {"status": status}
    text = status
    if proof is not None:
        payload["proof"] = proof.to_dict()
        payload["rows"] = proof.rows()
        text = "\n".join(r["line"] for r in proof.rows())
        if args.out:
            proof.dump(args.out)
    _out(args, payload, text)
    return {"provable": 0, "not_provable": 1, "unknown": 2}[status]


def cmd_check(args) -> int:
    proof = P.Proof.load(args.proof)
    try:
        verdict = P.check_proof(proof)
    except P.CheckError as err:
        _out(args, {"ok": False, "error": str(err)}, f"error: {err}")
        return EX_ENGINE
    _out(args, {"ok": True, "verdict": verdict,
                "conclusion": F.print_formula(proof.conclusion)},
         f"{verdict}: {F.print_formula(proof.conclusion)}")
    return 0


def cmd_decide_blindfree(args) -> int:
    f = F.parse(args.formula)
    status, proof = P.decide_cl4_blindfree(f)
    text = status if proof is None else "\n".join(r["line"] for r in proof.rows())
    _out(args, {"status": status, "rows": proof.rows() if proof else None}, text)
    return 0 if status == "provable" else 1


def cmd_eval(args) -> int:
    f = F.parse(args.formula)
    star = _load_interp(args, f)
    run = G.parse_run(args.run)
    verdict = S.adjudicate(f, star, _valuation(args), run, args.universe)
    _out(args, {"legal": verdict.legal,
                "winner": verdict.winner.value if verdict.winner else None,
                "blame": verdict.blame.value if verdict.blame else None},
         str(verdict))
    return 0


def cmd_trace(args) -> int:
    f = F.parse(args.formula)
    star = _load_interp(args, f)
    steps = S.trace(f, star, _valuation(args), G.parse_run(args.run), args.universe)
    rows = [{"move": str(s.move) if s.move else None, "formula": s.text, "note": s.note}
            for s in steps]
    text = "\n".join(
        (f"{s.move}  ->  " if s.move else "G0: ") + s.text + (f"   [{s.note}]" if s.note else "")
        for s in steps)
    _out(args, {"steps": rows}, text)
    return 0


def cmd_static_check(args) -> int:
    if args.game:
        g = G.ExplicitGame.load(args.game)
    else:
        f = F.parse(args.formula)
        star = _load_interp(args, f)
        g = S.interpret(f, star, args.universe)(_valuation(args))
    verdict = G.is_static(g, ceiling=args.ceiling)
    _out(args, {"static": verdict}, "static" if verdict else "not static")
    return 0


def cmd_extract(args) -> int:
    proof = P.Proof.load(args.proof)
    St.extract(proof)  # validates extractability
    with open(args.out, "w") as fh:
        json.dump({"format": "clogic-agent", "version": 1,
                   "proof": proof.to_dict()}, fh, indent=1)
    _out(args, {"ok": True, "out": args.out},
         f"agent written to {args.out} (proof of {F.print_formula(proof.conclusion)})")
    return 0


def load_agent(path: str) -> St.Agent:
    with open(path) as fh:
        data = json.load(fh)
    return St.extract(P.Proof.from_dict(data["proof"]))


def cmd_verify(args) -> int:
    agent = load_agent(args.agent)
    f = agent.proof.conclusion
    with open(args.interp_family) as fh:
        family = [S.interpretation_from_dict(d) for d in json.load(fh)["members"]]
    reports = St.verify_uniform(agent, f, family, args.universe)
    losses = sum(len(r.losses) for r in reports)
    rows = [{"member": r.interpretation, "lines": r.lines, "losses": len(r.losses)}
            for r in reports]
    _out(args, {"losses": losses, "reports": rows},
         "\n".join(f"{r['member'] or '(unlabeled)'}: {r['lines']} lines, "
                   f"{r['losses']} losses" for r in rows))
    return 0 if losses == 0 else EX_ENGINE


def cmd_play(args) -> int:
    proof = P.Proof.load(args.proof)
    f = proof.conclusion
    agent = St.extract(proof)
    star = _load_interp(args, f)
    e = _valuation(args)
    game = S.interpret(f, star, args.universe)(e)
    run: tuple = ()
    current = f
    print(f"you are the environment; machine plays {F.print_formula(f)}")
    while True:
        for move in agent.respond(e, run):
            run = run + (G.LabeledMove(G.T, move),)
            print(f"machine: {move}")
            nxt = S.apply_move_to_formula(current, move)
            current = nxt if nxt is not None else current
        print(f"position: {F.print_formula(current)}")
        legal = [m.move for m in game.legal_moves(run, G.B)]
        if not legal:
            break
        try:
            entered = input(f"your move {legal} (empty to stop): ").strip()
        except EOFError:
            entered = ""
        if not entered:
            break
        run = run + (G.LabeledMove(G.B, entered),)
        nxt = S.apply_move_to_formula(current, entered)
        current = nxt if nxt is not None else current
    verdict = S.adjudicate(f, star, e, run, args.universe)
    print(f"transcript: {G.format_run(run) or '(empty)'}")
    print(str(verdict))
    return 0


def cmd_hpm_run(args) -> int:
    agent = load_agent(args.agent)
    with open(args.schedule) as fh:
        schedule = H.parse_schedule(fh.read())
    e = _valuation(args)
    log: list = []
    run = H.run_branch(H.host(agent), e, schedule, fuel=args.fuel, log=log)
    payload = {"run": G.format_run(run)}
    if args.dump:
        payload["branch"] = [{"cycle": c, "state": conf.state,
                              "run": G.format_run(conf.run_tape)} for c, conf in log]
    _out(args, payload, G.format_run(run) or "(empty run)")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="clogic",
                                  description="computability-logic workbench")
    top.add_argument("--json", action="store_true", help="machine-readable output")
    sub = top.add_subparsers(dest="verb", required=True)

    def common(p, formula=True):
        p.add_argument("--universe", type=int, default=3)
        p.add_argument("--valuation", default="", help="e.g. 'x=1,y=2'")
        p.add_argument("--interp", help="interpretation file (JSON)")
        if formula:
            p.add_argument("--formula", required=True)

    p = sub.add_parser("parse");  p.add_argument("formula");  p.set_defaults(fn=cmd_parse)
    p = sub.add_parser("prove")
    p.add_argument("formula")
    p.add_argument("--dialect", choices=("cl1", "cl2", "cl4"), required=True)
    p.add_argument("--budget", type=int, default=3)
    p.add_argument("--out", help="write the proof file here")
    p.set_defaults(fn=cmd_prove)
    p = sub.add_parser("check");  p.add_argument("--proof", required=True)
    p.set_defaults(fn=cmd_check)
    p = sub.add_parser("decide-blindfree");  p.add_argument("formula")
    p.set_defaults(fn=cmd_decide_blindfree)
    p = sub.add_parser("eval");  common(p);  p.add_argument("--run", required=True)
    p.set_defaults(fn=cmd_eval)
    p = sub.add_parser("trace");  common(p);  p.add_argument("--run", required=True)
    p.set_defaults(fn=cmd_trace)
    p = sub.add_parser("static-check");  common(p, formula=False)
    p.add_argument("--formula");  p.add_argument("--game", help="explicit-game file")
    p.add_argument("--ceiling", type=int, default=400_000)
    p.set_defaults(fn=cmd_static_check)
    p = sub.add_parser("extract");  p.add_argument("--proof", required=True)
    p.add_argument("--out", required=True);  p.set_defaults(fn=cmd_extract)
    p = sub.add_parser("verify");  p.add_argument("--agent", required=True)
    p.add_argument("--interp-family", required=True)
    p.add_argument("--universe", type=int, default=3)
    p.set_defaults(fn=cmd_verify)
    p = sub.add_parser("play");  common(p, formula=False)
    p.add_argument("--proof", required=True);  p.set_defaults(fn=cmd_play)
    p = sub.add_parser("hpm-run");  p.add_argument("--agent", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--universe", type=int, default=3)
    p.add_argument("--valuation", default="")
    p.add_argument("--fuel", type=int, default=100_000)
    p.add_argument("--dump", action="store_true", help="cycle-stamped branch log")
    p.set_defaults(fn=cmd_hpm_run)
    p = sub.add_parser("serve")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(fn=cmd_serve)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return EX_USAGE if ex.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (F.FormulaError, P.CheckError, S.AdmissibilityError, G.CeilingExceeded,
            ValueError, OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EX_ENGINE


if __name__ == "__main__":
    sys.exit(main())
