/** Thin DOM layer: renders models, forwards clicks; no game logic. */

import { prettify, type BoardModel, type ProofModel } from "./model.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, cls?: string, text?: string): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderBoard(root: HTMLElement, model: BoardModel,
                            onMove: (move: string) => void): void {
  root.replaceChildren();
  const banner = el("div", model.finished ? "banner done" : "banner", model.banner);
  root.appendChild(banner);
  root.appendChild(el("div", "formula", prettify(model.snapshot)));

  const controls = el("div", "controls");
  for (const c of model.controls) {
    const btn = el("button", "move", prettify(c.label));
    btn.addEventListener("click", () => onMove(c.move));
    controls.appendChild(btn);
  }
  root.appendChild(controls);

  const history = el("div", "history");
  history.appendChild(el("h3", undefined, "Bring-down"));
  for (const line of model.snapshotChain) {
    history.appendChild(el("div", "snapshot", prettify(line)));
  }
  root.appendChild(history);

  const transcript = el("div", "transcript");
  transcript.appendChild(el("h3", undefined, "Transcript"));
  transcript.appendChild(el("div", undefined, model.transcript.join("  ") || "(empty)"));
  root.appendChild(transcript);
}

export function renderProof(root: HTMLElement, model: ProofModel): void {
  root.replaceChildren();
  root.appendChild(el("div", "verdict", model.verdict));
  for (const line of model.rows) {
    root.appendChild(el("div", "proof-row", line));
  }
}

export function renderError(root: HTMLElement, message: string): void {
  root.replaceChildren();
  root.appendChild(el("div", "error", message));
}
