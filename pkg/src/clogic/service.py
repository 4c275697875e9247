"""Session-oriented API: parse/prove plus live play against an extracted
machine strategy.

Sessions are event-sourced: the transcript is the state; every view is
recomputed from it.  Wire messages carry a version tag ("v1").  Live
updates go over the per-session websocket; GET is the polling fallback.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from . import formula as F
from . import game as G
from . import proof as P
from . import semantics as S
from . import strategy as St

SCHEMA = "v1"


class ParseRequest(BaseModel):
    schema_: str = SCHEMA
    formula: str

    model_config = {"populate_by_name": True}


class ProveRequest(BaseModel):
    formula: str
    dialect: str = "cl2"
    budget: int = 3


class SessionRequest(BaseModel):
    formula: str
    dialect: Optional[str] = None       # autodetected when omitted
    universe: int = 3
    valuation: str = ""
    interpretation: Optional[dict] = None
    opponent: str = "extracted"         # "extracted" | "none"


class MoveRequest(BaseModel):
    move: str


@dataclass
class Session:
    id: str
    formula: F.Formula
    dialect: str
    star: S.Interpretation
    valuation: S.Valuation
    universe: int
    game: G.ConstantGame
    agent: Optional[St.Agent]
    proof: Optional[P.Proof]
    run: tuple = ()
    status: str = "open"                # open | finished | aborted
    winner: Optional[str] = None
    blame: Optional[str] = None
    events: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)


def _autodetect_dialect(f: F.Formula) -> str:
    for d in ("cl1", "cl2", "cl4"):
        if F.dialect_ok(f, d):
            return d
    return "game"


def _move_label(f: F.Formula, move: str) -> str:
    after = S.apply_move_to_formula(f, move)
    if after is None:
        return f"move {move}"
    return f"{move}: bring down to {F.print_formula(after)}"


def _view(s: Session) -> dict:
    legal = []
    if s.status == "open":
        current = _current_formula(s)
        legal = [{"move": m.move, "label": _move_label(current, m.move)}
                 for m in s.game.legal_moves(s.run, G.B)]
    return {
        "schema": SCHEMA,
        "id": s.id,
        "formula": F.print_formula(s.formula),
        "dialect": s.dialect,
        "universe": s.universe,
        "snapshot": F.print_formula(_current_formula(s)),
        "snapshots": s.snapshots,
        "legalMoves": legal,
        "run": G.format_run(s.run),
        "status": s.status,
        "winner": s.winner,
        "blame": s.blame,
    }


def _current_formula(s: Session) -> F.Formula:
    current = s.formula
    for m in s.run:
        nxt = S.apply_move_to_formula(current, m.move)
        if nxt is not None:
            current = nxt
    return current


def _machine_turn(s: Session) -> None:
    if s.agent is None or s.status != "open":
        return
    for move in s.agent.respond(s.valuation, s.run):
        s.run = s.run + (G.LabeledMove(G.T, move),)
        s.events.append({"kind": "move", "move": str(s.run[-1])})
        s.snapshots.append({"move": str(s.run[-1]),
                            "formula": F.print_formula(_current_formula(s))})


def _adjudicate_if_over(s: Session) -> None:
    offender = s.game.first_offender(s.run)
    if offender is not None:
        s.status = "aborted"
        s.blame = s.run[offender].label.value
        s.events.append({"kind": "aborted", "blame": s.blame})
        return
    if not s.game.legal_moves(s.run, G.B):
        if s.agent is None:
            over = not s.game.legal_moves(s.run, G.T)  # two-human play
        else:
            over = not s.agent.respond(s.valuation, s.run)
        if over:
            s.status = "finished"
            s.winner = s.game.winner(s.run).value
            s.events.append({"kind": "finished", "winner": s.winner})


def create_app() -> FastAPI:
    app = FastAPI(title="clogic service")
    sessions: dict = {}

    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    @app.post("/parse")
    def do_parse(req: ParseRequest):
        try:
            f = F.parse(req.formula)
        except F.FormulaError as err:
            raise HTTPException(status_code=422, detail=str(err))
        return {"schema": SCHEMA, "ok": True, "canonical": F.print_formula(f),
                "dialects": {d: F.dialect_ok(f, d)
                             for d in ("cl1", "cl2", "cl4", "game")}}

    @app.post("/prove")
    def do_prove(req: ProveRequest):
        try:
            f = F.parse(req.formula)
            prover = {"cl1": lambda g: P.prove_cl1(g),
                      "cl2": lambda g: P.prove_cl2(g),
                      "cl4": lambda g: P.prove_cl4(g, req.budget)}[req.dialect]
            status, proof = prover(f)
        except (F.FormulaError, KeyError) as err:
            raise HTTPException(status_code=422, detail=str(err))
        body = {"schema": SCHEMA, "status": status}
        if proof is not None:
            body["rows"] = proof.rows()
            body["proof"] = proof.to_dict()
        return body

    @app.post("/sessions")
    def create_session(req: SessionRequest):
        try:
            f = F.parse(req.formula)
        except F.FormulaError as err:
            raise HTTPException(status_code=422, detail=f"parse error: {err}")
        dialect = req.dialect or _autodetect_dialect(f)
        star = (S.interpretation_from_dict(req.interpretation)
                if req.interpretation else S.default_interpretation(f))
        e = S.Valuation.parse(req.valuation, req.universe)
        try:
            S.check_admissible(f, star)
            game = S.interpret(f, star, req.universe)(e)
        except S.AdmissibilityError as err:
            raise HTTPException(status_code=422, detail=f"admissibility: {err}")
        agent = proof = None
        if req.opponent in ("extracted", "auto"):
            status = "not_provable"
            if dialect in ("cl1", "cl2", "cl4"):
                try:
                    prover = {"cl1": lambda g: P.prove_cl1(g),
                              "cl2": lambda g: P.prove_cl2(g),
                              "cl4": lambda g: P.prove_cl4(g)}[dialect]
                    status, proof = prover(f)
                except F.FormulaError as err:
                    raise HTTPException(status_code=422, detail=f"prover: {err}")
            if status == "provable":
                agent = St.extract(proof)
            elif req.opponent == "extracted":
                raise HTTPException(status_code=422,
                                    detail=f"prover failure: formula is {status} in {dialect}")
        if req.opponent == "solver" or (req.opponent == "auto" and agent is None):
            # interpretation-specific strategy: the formula need not be valid
            win, strat = S.winnable(game)
            if not win:
                raise HTTPException(status_code=422,
                                    detail="the machine cannot win this game under "
                                           "the session interpretation")
            agent = St.SolverAgent(strat)
        s = Session(id=uuid.uuid4().hex[:12], formula=f, dialect=dialect, star=star,
                    valuation=e, universe=req.universe, game=game, agent=agent,
                    proof=proof)
        s.snapshots.append({"move": None, "formula": F.print_formula(f)})
        sessions[s.id] = s
        _machine_turn(s)
        _adjudicate_if_over(s)
        return _view(s)

    @app.get("/sessions/{sid}")
    def get_state(sid: str):
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(status_code=404, detail="no such session")
        return _view(s)

    @app.post("/sessions/{sid}/moves")
    def post_move(sid: str, req: MoveRequest):
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(status_code=404, detail="no such session")
        if s.status != "open":
            raise HTTPException(status_code=409, detail=f"session is {s.status}")
        # bare moves are the human-as-environment's; a T:/B: prefix selects
        # the side explicitly (machine side only in agentless sessions)
        label, text = G.B, req.move
        if req.move[:2] in ("T:", "B:"):
            label = G.T if req.move[0] == "T" else G.B
            text = req.move[2:]
        if label is G.T and s.agent is not None:
            raise HTTPException(status_code=422,
                                detail="the machine side is played by the agent")
        lm = G.LabeledMove(label, text)
        legal_now = lm in s.game.moves(s.run)
        s.run = s.run + (lm,)
        s.events.append({"kind": "move", "move": str(lm)})
        s.snapshots.append({"move": str(lm),
                            "formula": F.print_formula(_current_formula(s))})
        if not legal_now:
            s.status = "aborted"
            s.blame = "B"
            s.events.append({"kind": "aborted", "blame": "B"})
            return _view(s)
        _machine_turn(s)
        _adjudicate_if_over(s)
        return _view(s)

    @app.websocket("/sessions/{sid}/live")
    async def live(ws: WebSocket, sid: str):
        await ws.accept()
        s = sessions.get(sid)
        if s is None:
            await ws.send_json({"schema": SCHEMA, "error": "no such session"})
            await ws.close()
            return
        await ws.send_json(_view(s))
        try:
            while True:
                msg = await ws.receive_json()
                if msg.get("kind") == "move" and s.status == "open":
                    post_move(sid, MoveRequest(move=msg["move"]))
                await ws.send_json(_view(s))
        except WebSocketDisconnect:
            return

    _mount_playground(app)
    return app


def _mount_playground(app: FastAPI) -> None:
    """Host the built frontend at /playground when it exists."""
    import pathlib

    from fastapi.responses import FileResponse
    from fastapi.staticfiles import StaticFiles

    root = pathlib.Path(__file__).resolve().parents[2] / "frontend"
    if not (root / "dist").is_dir():
        return

    @app.get("/playground/")
    def playground_index():
        return FileResponse(root / "index.html")

    app.mount("/playground/dist", StaticFiles(directory=root / "dist"), name="playground-js")


app = create_app()
