"""Proof objects, the independent checker, and the backward-search provers.

The deductive machinery: CL1 has rules (a) and (b) over choice-connective
formulas with elementary atoms; CL2 adds general atoms and the
match-and-rename rule (c); CL4 is the first-order extension with rules
(A), (B1), (B2), (C).  Proofs are DAGs of nodes (formula, rule, rule
data, premises); the checker is the single source of truth and prover
output always round-trips through it.

Rule tags are stored uppercase; display maps them to the lowercase names
for the propositional systems.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .classical import classical_fo_valid, classical_taut, find_fo_countermodel, taut_hash
from .formula import (
    Atom, AtomSym, BALL, BEX, Bin, CALL, CAND, CEX, COR, Const, Formula,
    FormulaError, Neg, Occurrence, Quant, Rec, Term, Truth, Var,
    canonical_key, check_dialect, elementarize, fresh_constant,
    fresh_elementary, fresh_var, free_vars, names_of, occurrences, parse,
    print_formula, prover_ok, replace_at, subformulas, substitute,
    surface_occurrences,
)

PROVABLE, NOT_PROVABLE, UNKNOWN = "provable", "not_provable", "unknown"
STABLE, INSTABLE = "stable", "instable"


@dataclass
class Budget:
    """Bounds for the three-valued classical oracle in full CL4."""

    fo_rounds: int = 3
    model_size: int = 3


@dataclass
class ProofNode:
    id: int
    formula: Formula
    rule: str                 # "A" | "B1" | "B2" | "C"
    data: dict
    premises: list

    def display_rule(self, dialect: str) -> str:
        if dialect in ("cl1", "cl2"):
            return {"A": "(a)", "B1": "(b)", "C": "(c)"}[self.rule]
        return f"({self.rule})"


@dataclass
class Proof:
    dialect: str
    nodes: list               # topologically sorted, premises first
    root: int

    def node(self, nid: int) -> ProofNode:
        return next(n for n in self.nodes if n.id == nid)

    @property
    def conclusion(self) -> Formula:
        return self.node(self.root).formula

    # -- display --------------------------------------------------------------

    def rows(self) -> list:
        out = []
        for n in self.nodes:
            if n.rule == "A":
                src = "{" + ",".join(str(p) for p in sorted(n.premises)) + "}"
            else:
                src = str(n.premises[0])
            out.append({
                "id": n.id,
                "formula": print_formula(n.formula),
                "rule": n.display_rule(self.dialect),
                "premises": sorted(n.premises),
                "line": f"{n.id}. {print_formula(n.formula)}   (from {src} by Rule {n.display_rule(self.dialect)})",
            })
        return out

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        def data_out(d: dict) -> dict:
            out = dict(d)
            if "term" in out:
                out["term"] = str(out["term"])
            if "fresh_sym" in out:
                sym = out.pop("fresh_sym")
                out["fresh"] = sym.name
            return out

        return {
            "format": "clogic-proof",
            "version": 1,
            "dialect": self.dialect,
            "root": self.root,
            "nodes": [
                {"id": n.id, "formula": print_formula(n.formula), "rule": n.rule,
                 "data": data_out(n.data), "premises": list(n.premises)}
                for n in self.nodes
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Proof":
        nodes = []
        for nd in data["nodes"]:
            formula = parse(nd["formula"])
            d = dict(nd["data"])
            if "term" in d:
                t = d["term"]
                d["term"] = Const(int(t)) if t.isdigit() else Var(t)
            if "path" in d:
                d["path"] = tuple(d["path"])
            for key in ("pos_path", "neg_path"):
                if key in d:
                    d[key] = tuple(d[key])
            if "premise_map" in d:
                d["premise_map"] = [
                    {**pm, "path": tuple(pm["path"])} for pm in d["premise_map"]
                ]
            nodes.append(ProofNode(nd["id"], formula, nd["rule"], d, list(nd["premises"])))
        return cls(data["dialect"], nodes, data["root"])

    def dump(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path: str) -> "Proof":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Stability

def stability(f: Formula, dialect: str, budget: Budget) -> str:
    """stable | instable | unknown, per the dialect's classical oracle."""
    elem = elementarize(f, dialect)
    if not any(isinstance(s, Quant) for _, s in subformulas(elem)):
        return STABLE if classical_taut(elem) else INSTABLE
    if classical_fo_valid(elem, budget.fo_rounds) == "valid":
        return STABLE
    if find_fo_countermodel(elem, budget.model_size) is not None:
        return INSTABLE
    return UNKNOWN


def is_stable(f: Formula, dialect: str = "cl4", budget: int = 3) -> str:
    check_dialect(f, dialect)
    prover_ok(f)
    return stability(f, dialect, Budget(fo_rounds=budget, model_size=budget))


# ---------------------------------------------------------------------------
# Rule mechanics shared by the prover and the checker

def _kind(node: Formula) -> Optional[str]:
    if isinstance(node, Bin) and node.op in (CAND, COR):
        return node.op
    if isinstance(node, Quant) and node.op in (CALL, CEX):
        return node.op
    if isinstance(node, Atom) and node.sym.general:
        return "gen"
    return None


def _choice_surface(f: Formula) -> list:
    return [occ for occ in surface_occurrences(f, "cl4") if _kind(occ.node) != "gen"]


def _waiting_occurrences(f: Formula) -> list:
    """Occurrences Rule (A) owes premises for: positive cand/call,
    negative cor/cex (the environment's choices)."""
    out = []
    for occ in _choice_surface(f):
        k = _kind(occ.node)
        if (occ.polarity > 0 and k in (CAND, CALL)) or \
           (occ.polarity < 0 and k in (COR, CEX)):
            out.append(occ)
    return out


def _acting_occurrences(f: Formula) -> list:
    """Occurrences rules (B1)/(B2) may act on: negative cand/call,
    positive cor/cex (the machine's choices)."""
    out = []
    for occ in _choice_surface(f):
        k = _kind(occ.node)
        if (occ.polarity < 0 and k in (CAND, CALL)) or \
           (occ.polarity > 0 and k in (COR, CEX)):
            out.append(occ)
    return out


def _component(node: Formula, i: int) -> Formula:
    return node.left if i == 1 else node.right


def _quant_premise(f: Formula, occ: Occurrence, y: str) -> Formula:
    """Replace the quantifier occurrence by its body with the bound
    variable renamed to y."""
    body = substitute(occ.node.body, occ.node.var, Var(y), check_capture=False)
    return replace_at(f, occ.path, body)


def _b2_capture_ok(f: Formula, occ: Occurrence, t: Term) -> bool:
    """Side condition of Rule (B2): when t is a variable, neither the
    quantifier occurrence nor any free occurrence of the bound variable in
    its body may be in the scope of a binder on t."""
    if not isinstance(t, Var):
        return True
    binders_above = []
    g = f
    for sel in occ.path:
        if isinstance(g, Quant):
            binders_above.append(g.var)
        g = dict((s, c) for s, c in
                 [(1, getattr(g, "left", None)), (2, getattr(g, "right", None)),
                  (0, getattr(g, "body", None))])[sel]
    if t.name in binders_above:
        return False
    # free occurrences of the bound variable within the body under a binder on t
    node = occ.node
    x = node.var

    def bad(h: Formula, scopes: frozenset, tbound: bool) -> bool:
        if isinstance(h, Atom):
            return tbound and any(isinstance(a, Var) and a.name == x for a in h.args) \
                and x not in scopes
        if isinstance(h, (Truth,)):
            return False
        if isinstance(h, Neg):
            return bad(h.body, scopes, tbound)
        if isinstance(h, Bin):
            return bad(h.left, scopes, tbound) or bad(h.right, scopes, tbound)
        if isinstance(h, Quant):
            return bad(h.body, scopes | {h.var}, tbound or h.var == t.name)
        if isinstance(h, Rec):
            return bad(h.body, scopes, tbound)
        return False

    return not bad(node.body, frozenset(), False)


def _general_pairs(f: Formula) -> list:
    """(positive occurrence, negative occurrence) pairs of the same general
    letter, both surface."""
    gens = [occ for occ in surface_occurrences(f, "cl4") if _kind(occ.node) == "gen"]
    pairs = []
    for p in gens:
        if p.polarity <= 0:
            continue
        for n in gens:
            if n.polarity < 0 and n.node.sym == p.node.sym:
                pairs.append((p, n))
    return pairs


def _c_premise(f: Formula, pos: Occurrence, neg_occ: Occurrence, sym: AtomSym) -> Formula:
    g = replace_at(f, pos.path, Atom(sym, pos.node.args))
    return replace_at(g, neg_occ.path, Atom(sym, neg_occ.node.args))


def _b2_term_pool(f: Formula) -> list:
    """Backward Rule-(B2) instantiation pool: terms occurring in f plus one
    fresh constant."""
    pool: list = []
    for _, sub in subformulas(f):
        if isinstance(sub, Atom):
            for t in sub.args:
                if t not in pool:
                    pool.append(t)
    pool.append(Const(fresh_constant(f)))
    return pool


def _measure(f: Formula) -> tuple:
    gen = sum(1 for _, s in subformulas(f) if isinstance(s, Atom) and s.sym.general)
    choice = sum(1 for _, s in subformulas(f)
                 if (isinstance(s, Bin) and s.op in (CAND, COR))
                 or (isinstance(s, Quant) and s.op in (CALL, CEX)))
    size = sum(1 for _ in subformulas(f))
    return (gen, choice, size)


# ---------------------------------------------------------------------------
# Checker

@dataclass
class CheckError(Exception):
    node_id: Optional[int]
    reason: str

    def __str__(self):
        return f"node {self.node_id}: {self.reason}"


def check_proof(proof: Proof, dialect: Optional[str] = None) -> str:
    """Verify every node against its rule; returns 'ok' or
    'ok (conditional)' when some stability certificate is Assumed.
    Raises CheckError with per-node diagnostics otherwise."""
    dialect = dialect or proof.dialect
    budget = Budget()
    ids = {n.id for n in proof.nodes}
    if proof.root not in ids:
        raise CheckError(None, "root id does not resolve")
    conditional = False
    seen: set = set()
    for n in proof.nodes:
        for p in n.premises:
            if p not in seen:
                raise CheckError(n.id, f"premise {p} does not precede the node")
        seen.add(n.id)
        conditional |= _check_node(proof, n, dialect, budget)
    return "ok (conditional)" if conditional else "ok"


def _check_node(proof: Proof, n: ProofNode, dialect: str, budget: Budget) -> bool:
    f = n.formula
    check_dialect(f, dialect)
    prover_ok(f)
    premise_formulas = {pid: proof.node(pid).formula for pid in n.premises}
    conditional = False

    if n.rule == "A":
        cert = n.data.get("stability", {"kind": "assumed"})
        if cert["kind"] == "assumed":
            conditional = True
        else:
            bud = Budget(fo_rounds=max(cert.get("budget", 0), budget.fo_rounds),
                         model_size=budget.model_size)
            st = stability(f, dialect, bud)
            if st != STABLE:
                raise CheckError(n.id, f"stability not certified: oracle says {st}")
            if cert["kind"] == "taut" and "hash" in cert:
                if taut_hash(elementarize(f, dialect)) != cert["hash"]:
                    raise CheckError(n.id, "tautology certificate hash mismatch")
        # premise coverage: every waiting occurrence, every component
        pmap = {(tuple(pm["path"]), pm.get("i"), pm.get("fresh")): pm["premise"]
                for pm in n.data.get("premise_map", [])}
        for occ in _waiting_occurrences(f):
            k = _kind(occ.node)
            if k in (CAND, COR):
                for i in (1, 2):
                    expected = replace_at(f, occ.path, _component(occ.node, i))
                    if not _covered(expected, premise_formulas):
                        raise CheckError(
                            n.id, f"missing premise for {k} at {occ.path} component {i}")
            else:
                hits = [pf for pf in premise_formulas.values()
                        if _is_quant_premise(f, occ, pf)]
                if not hits:
                    raise CheckError(
                        n.id, f"missing quantifier premise for {k} at {occ.path}")
        return conditional

    if len(n.premises) != 1:
        raise CheckError(n.id, f"rule {n.rule} needs exactly one premise")
    premise = premise_formulas[n.premises[0]]

    if n.rule == "B1":
        path, i = tuple(n.data["path"]), n.data["i"]
        occ = _occurrence_at(f, path, n.id)
        k = _kind(occ.node)
        if k not in (CAND, COR) or not occ.surface:
            raise CheckError(n.id, "B1 needs a surface choice connective")
        if not ((occ.polarity < 0 and k == CAND) or (occ.polarity > 0 and k == COR)):
            raise CheckError(n.id, "B1 polarity: negative cand or positive cor required")
        if i not in (1, 2):
            raise CheckError(n.id, f"bad component index {i}")
        if premise != replace_at(f, path, _component(occ.node, i)):
            raise CheckError(n.id, "premise is not the stated replacement")
        return conditional

    if n.rule == "B2":
        path, t = tuple(n.data["path"]), n.data["term"]
        occ = _occurrence_at(f, path, n.id)
        k = _kind(occ.node)
        if k not in (CALL, CEX) or not occ.surface:
            raise CheckError(n.id, "B2 needs a surface choice quantifier")
        if not ((occ.polarity < 0 and k == CALL) or (occ.polarity > 0 and k == CEX)):
            raise CheckError(n.id, "B2 polarity: negative call or positive cex required")
        if not _b2_capture_ok(f, occ, t):
            raise CheckError(n.id, f"term {t} is captured (side condition)")
        expected = replace_at(f, path,
                              substitute(occ.node.body, occ.node.var, t,
                                         check_capture=False))
        if premise != expected:
            raise CheckError(n.id, "premise is not the stated instantiation")
        return conditional

    if n.rule == "C":
        pos_path = tuple(n.data["pos_path"])
        neg_path = tuple(n.data["neg_path"])
        fresh_name = n.data.get("fresh") or n.data["fresh_sym"].name
        pos = _occurrence_at(f, pos_path, n.id)
        neg_occ = _occurrence_at(f, neg_path, n.id)
        for occ, want in ((pos, 1), (neg_occ, -1)):
            if _kind(occ.node) != "gen" or not occ.surface:
                raise CheckError(n.id, "C needs surface general-atom occurrences")
            if occ.polarity != want:
                raise CheckError(n.id, "C needs one positive and one negative occurrence")
        if pos.node.sym != neg_occ.node.sym:
            raise CheckError(n.id, "C occurrences must share one general letter")
        if fresh_name in names_of(f):
            raise CheckError(n.id, f"symbol {fresh_name} is not fresh")
        sym = AtomSym(fresh_name, pos.node.sym.arity, False)
        if premise != _c_premise(f, pos, neg_occ, sym):
            raise CheckError(n.id, "premise is not the stated renaming")
        return conditional

    raise CheckError(n.id, f"unknown rule {n.rule!r}")


def _occurrence_at(f: Formula, path: tuple, nid: int) -> Occurrence:
    for occ in occurrences(f):
        if occ.path == path:
            return occ
    raise CheckError(nid, f"path {path} does not resolve")


def _covered(expected: Formula, premises: dict) -> bool:
    return any(pf == expected for pf in premises.values())


def _is_quant_premise(f: Formula, occ: Occurrence, pf: Formula) -> bool:
    """pf == f with the quantifier occurrence replaced by body(x/y) for
    some y not occurring in f."""
    for y in sorted(names_of(pf) - names_of(f)):
        if pf == _quant_premise(f, occ, y):
            return True
    # also allow the degenerate case where x does not occur free in the body
    return pf == replace_at(f, occ.path, occ.node.body) and \
        occ.node.var not in free_vars(occ.node.body)


# ---------------------------------------------------------------------------
# Backward proof search

class _Prover:
    def __init__(self, dialect: str, budget: Budget):
        self.dialect = dialect
        self.budget = budget
        self.status: dict = {}     # canonical key -> status
        self.stab: dict = {}       # canonical key -> stability

    def stability_of(self, f: Formula) -> str:
        key = canonical_key(f)
        if key not in self.stab:
            self.stab[key] = stability(f, self.dialect, self.budget)
        return self.stab[key]

    # candidate premise generators, deterministic order ----------------------

    def a_premises(self, f: Formula) -> list:
        out = []
        for occ in _waiting_occurrences(f):
            k = _kind(occ.node)
            if k in (CAND, COR):
                for i in (1, 2):
                    out.append((occ, i, replace_at(f, occ.path, _component(occ.node, i))))
            else:
                y = fresh_var(f)
                out.append((occ, y, _quant_premise(f, occ, y)))
        return out

    def b1_moves(self, f: Formula) -> list:
        out = []
        for occ in _acting_occurrences(f):
            if _kind(occ.node) in (CAND, COR):
                for i in (1, 2):
                    out.append((occ, i, replace_at(f, occ.path, _component(occ.node, i))))
        return out

    def b2_moves(self, f: Formula) -> list:
        out = []
        for occ in _acting_occurrences(f):
            if _kind(occ.node) in (CALL, CEX):
                for t in _b2_term_pool(f):
                    if _b2_capture_ok(f, occ, t):
                        body = substitute(occ.node.body, occ.node.var, t,
                                          check_capture=False)
                        out.append((occ, t, replace_at(f, occ.path, body)))
        return out

    def c_moves(self, f: Formula) -> list:
        if self.dialect == "cl1":
            return []
        out = []
        for pos, neg_occ in _general_pairs(f):
            sym = fresh_elementary(f, pos.node.sym)
            out.append((pos, neg_occ, sym, _c_premise(f, pos, neg_occ, sym)))
        return out

    # three-valued backward search -------------------------------------------

    def search(self, f: Formula) -> str:
        key = canonical_key(f)
        hit = self.status.get(key)
        if hit is not None:
            return hit
        base = _measure(f)
        result = NOT_PROVABLE
        st = self.stability_of(f)
        if st == STABLE:
            sub = PROVABLE
            for _, _, premise in self.a_premises(f):
                assert _measure(premise) < base
                got = self.search(premise)
                if got == NOT_PROVABLE:
                    sub = NOT_PROVABLE
                    break
                if got == UNKNOWN:
                    sub = UNKNOWN
            result = sub
        elif st == UNKNOWN:
            result = UNKNOWN
        if result != PROVABLE:
            for _, _, premise in self.b1_moves(f) + self.b2_moves(f):
                assert _measure(premise) < base
                got = self.search(premise)
                if got == PROVABLE:
                    result = PROVABLE
                    break
                if got == UNKNOWN:
                    result = UNKNOWN
        if result != PROVABLE:
            for _, _, _, premise in self.c_moves(f):
                assert _measure(premise) < base
                got = self.search(premise)
                if got == PROVABLE:
                    result = PROVABLE
                    break
                if got == UNKNOWN:
                    result = UNKNOWN
        self.status[key] = result
        return result

    # deterministic proof reconstruction (statuses are all memoized) ----------

    def build(self, f: Formula, nodes: list, cache: dict) -> int:
        if f in cache:
            return cache[f]
        st = self.stability_of(f)
        if st == STABLE:
            prems = self.a_premises(f)
            if all(self.status.get(canonical_key(p)) == PROVABLE or
                   self.search(p) == PROVABLE for _, _, p in prems):
                pmap = []
                ids = []
                for occ, extra, premise in prems:
                    pid = self.build(premise, nodes, cache)
                    ids.append(pid)
                    entry = {"path": list(occ.path), "premise": pid}
                    if isinstance(extra, int):
                        entry["i"] = extra
                    else:
                        entry["fresh"] = extra
                    pmap.append(entry)
                elem = elementarize(f, self.dialect)
                if any(isinstance(s, Quant) for _, s in subformulas(elem)):
                    cert = {"kind": "fo", "budget": self.budget.fo_rounds}
                else:
                    cert = {"kind": "taut", "hash": taut_hash(elem)}
                nid = len(nodes) + 1
                nodes.append(ProofNode(nid, f, "A",
                                       {"stability": cert, "premise_map": pmap},
                                       sorted(set(ids))))
                cache[f] = nid
                return nid
        for occ, i, premise in self.b1_moves(f):
            if self.search(premise) == PROVABLE:
                pid = self.build(premise, nodes, cache)
                nid = len(nodes) + 1
                nodes.append(ProofNode(nid, f, "B1",
                                       {"path": list(occ.path), "i": i}, [pid]))
                cache[f] = nid
                return nid
        for occ, t, premise in self.b2_moves(f):
            if self.search(premise) == PROVABLE:
                pid = self.build(premise, nodes, cache)
                nid = len(nodes) + 1
                nodes.append(ProofNode(nid, f, "B2",
                                       {"path": list(occ.path), "term": t}, [pid]))
                cache[f] = nid
                return nid
        for pos, neg_occ, sym, premise in self.c_moves(f):
            if self.search(premise) == PROVABLE:
                pid = self.build(premise, nodes, cache)
                nid = len(nodes) + 1
                nodes.append(ProofNode(nid, f, "C",
                                       {"pos_path": list(pos.path),
                                        "neg_path": list(neg_occ.path),
                                        "fresh": sym.name}, [pid]))
                cache[f] = nid
                return nid
        raise AssertionError(f"build called on unprovable formula {print_formula(f)}")


def _prove(f: Formula, dialect: str, budget: Budget):
    check_dialect(f, dialect)
    prover_ok(f)
    prover = _Prover(dialect, budget)
    status = prover.search(f)
    if status != PROVABLE:
        return status, None
    nodes: list = []
    prover.build(f, nodes, {})
    proof = Proof(dialect, nodes, nodes[-1].id)
    assert check_proof(proof) == "ok"
    return PROVABLE, proof


def prove_cl1(f: Formula):
    """Complete decision for CL1-formulas: (provable|not_provable, proof?)."""
    return _prove(f, "cl1", Budget())


def prove_cl2(f: Formula):
    """Complete decision for CL2-formulas."""
    return _prove(f, "cl2", Budget())


def decide_cl4_blindfree(f: Formula):
    """Decision for blind-quantifier-free CL4-formulas (stability is
    propositional there, so no third verdict arises)."""
    for _, sub in subformulas(f):
        if isinstance(sub, Quant) and sub.op in (BALL, BEX):
            raise FormulaError("decide_cl4_blindfree: formula contains blind quantifiers")
    status, proof = _prove(f, "cl4", Budget())
    assert status != UNKNOWN
    return status, proof


def prove_cl4(f: Formula, budget: int = 3):
    """Budgeted prover for full CL4: (provable|not_provable|unknown, proof?).
    not_provable only when the search closes with every stability question
    settled; unknown is the honest third verdict."""
    return _prove(f, "cl4", Budget(fo_rounds=budget, model_size=budget))
