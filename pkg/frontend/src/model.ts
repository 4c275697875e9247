/**
 * Pure view-model: everything the page shows is computed here from the
 * server's messages, with no game logic of its own.  Clickable controls
 * are exactly the service's legal-move list.
 */

import type { ProofRow, ProveResponse, SessionView } from "./protocol.js";

export interface Control {
  move: string;
  label: string;
}

export interface BoardModel {
  formula: string;
  snapshot: string;
  snapshotChain: string[];
  transcript: string[];
  controls: Control[];
  banner: string;
  finished: boolean;
}

export function bannerText(view: SessionView): string {
  switch (view.status) {
    case "open":
      return view.legalMoves.length > 0
        ? "Your move (you are the environment)"
        : "Waiting for the machine";
    case "finished":
      return view.winner === "T" ? "Machine wins" : "Environment wins";
    case "aborted":
      return view.blame === "B"
        ? "Aborted: environment moved illegally"
        : "Aborted: machine moved illegally";
  }
}

export function boardModel(view: SessionView): BoardModel {
  return {
    formula: view.formula,
    snapshot: view.snapshot,
    snapshotChain: view.snapshots.map((s) =>
      s.move === null ? s.formula : `${s.move}  ⇒  ${s.formula}`),
    transcript: view.run === "" ? [] : view.run.split(" "),
    controls: view.legalMoves.map((m) => ({ move: m.move, label: m.label })),
    banner: bannerText(view),
    finished: view.status !== "open",
  };
}

/**
 * Display-only Unicode prettification of the ASCII grammar; the wire
 * format and all inputs stay ASCII.
 */
export function prettify(text: string): string {
  return text
    .replace(/\/\\/g, "∧")        // parallel and
    .replace(/\\\//g, "∨")        // parallel or
    .replace(/->/g, "→")
    .replace(/~/g, "¬")
    .replace(/&/g, "⊓")           // choice and
    .replace(/\|/g, "⊔")          // choice or
    .replace(/!([A-Za-z_]\w*)\. /g, "⊓$1.")
    .replace(/\?([A-Za-z_]\w*)\. /g, "⊔$1.")
    .replace(/\ball ([A-Za-z_]\w*)\. /g, "∀$1.")
    .replace(/\bex ([A-Za-z_]\w*)\. /g, "∃$1.")
    .replace(/\bpall ([A-Za-z_]\w*)\. /g, "⋀$1.")
    .replace(/\bpex ([A-Za-z_]\w*)\. /g, "⋁$1.");
}

export interface ProofModel {
  verdict: string;
  rows: string[];
}

export function proofModel(res: ProveResponse): ProofModel {
  if (res.status !== "provable" || !res.rows) {
    return { verdict: res.status === "unknown" ? "Unknown (budget exhausted)" : "Not provable",
             rows: [] };
  }
  return { verdict: "Provable", rows: res.rows.map(renderProofRow) };
}

/** One derivation row in the classic tabular style. */
export function renderProofRow(row: ProofRow): string {
  const src = row.rule.startsWith("(A") || row.rule === "(a)"
    ? `{${row.premises.join(",")}}`
    : `${row.premises.join(",")}`;
  return `${row.id}. ${row.formula}   (from ${src} by Rule ${row.rule})`;
}
