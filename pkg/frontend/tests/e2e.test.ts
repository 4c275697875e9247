/**
 * Scripted browser-session test against the real Python service.
 *
 * Spawns `clogic serve` on a free port, then drives the same client and
 * view-model modules the page uses (polling transport; node lacks a
 * browser WebSocket). Plays the corpus games to completion and renders
 * the proof browser rows.
 */

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ServiceClient, ServiceError } from "../src/client.js";
import { bannerText, boardModel, proofModel } from "../src/model.js";
import type { SessionView } from "../src/protocol.js";

const PORT = 8765 + Math.floor(Math.random() * 200);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
const client = new ServiceClient(BASE);

beforeAll(async () => {
  server = spawn("python3", ["-m", "clogic.cli", "serve", "--port", String(PORT)],
                 { stdio: "ignore" });
  for (let i = 0; i < 100; i++) {
    try {
      await client.parse("p");
      return;
    } catch {
      await new Promise((r) => setTimeout(r, 200));
    }
  }
  throw new Error("service did not come up");
}, 30_000);

afterAll(() => {
  server?.kill();
});

async function playToCompletion(view: SessionView,
                                pick: (moves: string[]) => string): Promise<SessionView> {
  const channel = client.live(view.id, (v) => { view = v; });
  for (let turn = 0; turn < 20 && view.status === "open"; turn++) {
    const moves = view.legalMoves.map((m) => m.move);
    if (moves.length === 0) break;
    await channel.sendMove(pick(moves));
  }
  channel.close();
  return view;
}

describe("playground end to end", () => {
  it("plays the mirrored-choice game to a machine win", async () => {
    let view = await client.createSession({
      formula: "((p->q)&(p->r))->(p->(q&r))",
      opponent: "auto",
    });
    expect(view.status).toBe("open");
    const model = boardModel(view);
    expect(model.controls.map((c) => c.move)).toEqual(["2.2.1", "2.2.2"]);

    view = await playToCompletion(view, (moves) => moves[0]);
    expect(view.status).toBe("finished");
    expect(view.run).toBe("B:2.2.1 T:1.1");
    expect(bannerText(view)).toBe("Machine wins");
  });

  it("plays the parity-decision game to a machine win", async () => {
    let view = await client.createSession({
      formula: "!x.(odd(x) | ~odd(x))",
      dialect: "cl4",
      opponent: "auto",
      interpretation: { elementary: { odd: { arity: 1, fn: "odd" } } },
    });
    expect(boardModel(view).controls.map((c) => c.move)).toEqual(["1", "2", "3"]);

    view = await playToCompletion(view, (moves) => moves[moves.length - 1]); // pick 3
    expect(view.run).toBe("B:3 T:1"); // odd(3) holds, the machine answers left
    expect(view.status).toBe("finished");
    expect(bannerText(view)).toBe("Machine wins");
    expect(boardModel(view).snapshotChain.at(-1)).toContain("odd(3)");
  });

  it("renders the five-row and four-row proofs verbatim", async () => {
    const res5 = await client.prove("((p->q)&(p->r))->(p->(q&r))", "cl1");
    const model5 = proofModel(res5);
    expect(model5.verdict).toBe("Provable");
    expect(model5.rows).toEqual([
      "1. (p -> q) -> p -> q   (from {} by Rule (a))",
      "2. (p -> q) & (p -> r) -> p -> q   (from 1 by Rule (b))",
      "3. (p -> r) -> p -> r   (from {} by Rule (a))",
      "4. (p -> q) & (p -> r) -> p -> r   (from 3 by Rule (b))",
      "5. (p -> q) & (p -> r) -> p -> q & r   (from {2,4} by Rule (a))",
    ]);

    const res4 = await client.prove("!x.?y.(P(x) -> P(y))", "cl4");
    const model4 = proofModel(res4);
    expect(model4.rows).toEqual([
      "1. p(z) -> p(z)   (from {} by Rule (A))",
      "2. P(z) -> P(z)   (from 1 by Rule (C))",
      "3. ?y. (P(z) -> P(y))   (from 2 by Rule (B2))",
      "4. !x. ?y. (P(x) -> P(y))   (from {3} by Rule (A))",
    ]);
  });

  it("shows the unprovable verdict", async () => {
    const res = await client.prove("P -> (P /\\ P)", "cl2");
    expect(proofModel(res)).toEqual({ verdict: "Not provable", rows: [] });
  });

  it("surfaces prover failures when asking for an extracted opponent", async () => {
    await expect(client.createSession({
      formula: "P -> (P /\\ P)",
      dialect: "cl2",
      opponent: "extracted",
    })).rejects.toThrowError(ServiceError);
  });
});
