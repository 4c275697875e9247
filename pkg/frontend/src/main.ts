/**
 * Playground wiring: one live session panel plus a proof browser.
 * On connection loss the client reconnects by re-reading the session
 * state (the transcript is the state, so nothing is lost).
 */

import { ServiceClient, ServiceError, type LiveChannel } from "./client.js";
import { boardModel, proofModel } from "./model.js";
import { renderBoard, renderError, renderProof } from "./dom.js";
import type { SessionView } from "./protocol.js";

const client = new ServiceClient(window.location.origin);

function input(id: string): HTMLInputElement {
  return document.getElementById(id) as HTMLInputElement;
}

let channel: LiveChannel | null = null;
let sessionId: string | null = null;

async function startSession(): Promise<void> {
  const board = document.getElementById("board")!;
  const formula = input("formula").value;
  const dialect = input("dialect").value || undefined;
  const interpText = input("interp").value.trim();
  channel?.close();
  try {
    const view = await client.createSession({
      formula,
      dialect,
      opponent: "auto",
      universe: Number(input("universe").value) || 3,
      interpretation: interpText ? JSON.parse(interpText) : undefined,
    });
    sessionId = view.id;
    show(view);
    channel = client.live(view.id, show);
  } catch (err) {
    renderError(board, err instanceof ServiceError ? err.message : String(err));
  }
}

function show(view: SessionView): void {
  const board = document.getElementById("board")!;
  renderBoard(board, boardModel(view), (move) => {
    channel?.sendMove(move).catch(async () => {
      // reconnect with transcript replay via the polling view
      if (sessionId) show(await client.getSession(sessionId));
    });
  });
}

async function browseProof(): Promise<void> {
  const panel = document.getElementById("proof")!;
  try {
    const res = await client.prove(input("formula").value,
                                   input("dialect").value || "cl2");
    renderProof(panel, proofModel(res));
  } catch (err) {
    renderError(panel, err instanceof ServiceError ? err.message : String(err));
  }
}

document.getElementById("play")!.addEventListener("click", () => void startSession());
document.getElementById("browse")!.addEventListener("click", () => void browseProof());
