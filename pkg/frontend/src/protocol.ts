/**
 * Wire types for the clogic service, schema "v1".
 * The server is authoritative; the client renders what it is told.
 */

export const SCHEMA = "v1";

export interface LegalMove {
  move: string;
  label: string;
}

export interface Snapshot {
  move: string | null;
  formula: string;
}

export type SessionStatus = "open" | "finished" | "aborted";

export interface SessionView {
  schema: string;
  id: string;
  formula: string;
  dialect: string;
  universe: number;
  snapshot: string;
  snapshots: Snapshot[];
  legalMoves: LegalMove[];
  run: string;
  status: SessionStatus;
  winner: "T" | "B" | null;
  blame: "T" | "B" | null;
}

export interface ParseResponse {
  schema: string;
  ok: boolean;
  canonical: string;
  dialects: Record<string, boolean>;
}

export interface ProofRow {
  id: number;
  formula: string;
  rule: string;
  premises: number[];
  line: string;
}

export interface ProveResponse {
  schema: string;
  status: "provable" | "not_provable" | "unknown";
  rows?: ProofRow[];
}

export interface SessionRequest {
  formula: string;
  dialect?: string;
  universe?: number;
  valuation?: string;
  interpretation?: unknown;
  opponent?: "extracted" | "solver" | "auto" | "none";
}
