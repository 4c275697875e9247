"""Classical-logic oracles backing stability checks.

`classical_taut` is a complete truth-table decision for quantifier-free
elementary formulas (distinct symbol+argument tuples are distinct
propositional letters).  `classical_fo_valid` is a sound, incomplete
bounded tableau for first-order validity, three-valued via a separate
finite-countermodel search.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from typing import Optional

from .formula import (
    Atom, BALL, Bin, CAND, CEX, CALL, COR, Const, FormulaError, Formula,
    IMP, Neg, PAND, PALL, POR, Quant, Rec, Truth, Var, free_vars,
    is_elementary, subformulas,
)

MAX_TAUT_LETTERS = 20


def _letters(f: Formula, out: list) -> None:
    if isinstance(f, Atom):
        key = (f.sym.name, f.args)
        if key not in out:
            out.append(key)
    elif isinstance(f, Neg):
        _letters(f.body, out)
    elif isinstance(f, Bin):
        _letters(f.left, out)
        _letters(f.right, out)
    elif isinstance(f, Truth):
        pass
    else:
        raise FormulaError("classical_taut needs a quantifier-free elementary formula")


def _eval_prop(f: Formula, env: dict) -> bool:
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Atom):
        return env[(f.sym.name, f.args)]
    if isinstance(f, Neg):
        return not _eval_prop(f.body, env)
    if isinstance(f, Bin):
        a, b = _eval_prop(f.left, env), _eval_prop(f.right, env)
        if f.op in (PAND, CAND):
            return a and b
        if f.op in (POR, COR):
            return a or b
        if f.op == IMP:
            return (not a) or b
    raise FormulaError(f"not propositional: {f!r}")


def classical_taut(f: Formula) -> bool:
    """Truth-table tautology check; choice connectives are rejected."""
    for _, sub in subformulas(f):
        if isinstance(sub, (Quant, Rec)):
            raise FormulaError("classical_taut cannot handle quantifiers")
        if isinstance(sub, Bin) and sub.op in (CAND, COR):
            raise FormulaError("classical_taut needs an elementary formula")
        if isinstance(sub, Atom) and sub.sym.general:
            raise FormulaError("classical_taut needs an elementary formula")
    letters: list = []
    _letters(f, letters)
    if len(letters) > MAX_TAUT_LETTERS:
        raise FormulaError(f"too many letters for truth tables: {len(letters)}")
    for bits in itertools.product((False, True), repeat=len(letters)):
        if not _eval_prop(f, dict(zip(letters, bits))):
            return False
    return True


def taut_hash(f: Formula) -> str:
    """Stable fingerprint of the (satisfied) truth table, for certificates."""
    letters: list = []
    _letters(f, letters)
    rows = []
    for bits in itertools.product((False, True), repeat=len(letters)):
        rows.append("1" if _eval_prop(f, dict(zip(letters, bits))) else "0")
    return hashlib.sha256("".join(rows).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# First-order: NNF over literals, bounded tableau, finite countermodels.
# The only terms are variables and constants, so branches without enough
# gamma expansions saturate quickly.

@dataclass(frozen=True)
class _Lit:
    sign: bool
    name: str
    args: tuple  # ground terms: ints


@dataclass(frozen=True)
class _And:
    parts: tuple


@dataclass(frozen=True)
class _Or:
    parts: tuple


@dataclass(frozen=True)
class _All:
    var: str
    body: object


@dataclass(frozen=True)
class _Ex:
    var: str
    body: object


_TRUE_ = _And(())
_FALSE_ = _Or(())


def _nnf(f: Formula, pol: bool):
    """Negation normal form of f (pol=True) or ~f (pol=False); parallel
    quantifiers are read classically."""
    if isinstance(f, Truth):
        return _TRUE_ if f.value == pol else _FALSE_
    if isinstance(f, Atom):
        if f.sym.general:
            raise FormulaError("general atoms have no classical reading")
        return _Lit(pol, f.sym.name, f.args)
    if isinstance(f, Neg):
        return _nnf(f.body, not pol)
    if isinstance(f, Bin):
        if f.op == IMP:
            l, r = _nnf(f.left, not pol), _nnf(f.right, pol)
            return _Or((l, r)) if pol else _And((l, r))
        if f.op in (PAND, CAND):
            l, r = _nnf(f.left, pol), _nnf(f.right, pol)
            return _And((l, r)) if pol else _Or((l, r))
        if f.op in (POR, COR):
            l, r = _nnf(f.left, pol), _nnf(f.right, pol)
            return _Or((l, r)) if pol else _And((l, r))
    if isinstance(f, Quant):
        if f.op in (CALL, CEX):
            raise FormulaError("choice quantifiers have no classical reading")
        body = _nnf(f.body, pol)
        forall = f.op in (BALL, PALL)
        if pol == forall:
            return _All(f.var, body)
        return _Ex(f.var, body)
    raise FormulaError(f"no classical reading for {f!r}")


def _subst(node, var: str, value: int):
    if isinstance(node, _Lit):
        args = tuple(value if isinstance(a, Var) and a.name == var else a
                     for a in node.args)
        return _Lit(node.sign, node.name, args)
    if isinstance(node, _And):
        return _And(tuple(_subst(p, var, value) for p in node.parts))
    if isinstance(node, _Or):
        return _Or(tuple(_subst(p, var, value) for p in node.parts))
    if isinstance(node, _All):
        if node.var == var:
            return node
        return _All(node.var, _subst(node.body, var, value))
    if isinstance(node, _Ex):
        if node.var == var:
            return node
        return _Ex(node.var, _subst(node.body, var, value))
    raise TypeError(node)


def _closure(f: Formula):
    """NNF of the universal closure of ~f, with constants renamed to ints."""
    g = f
    for v in sorted(free_vars(f)):
        g = Quant(BALL, v, g)
    nnf = _nnf(g, False)

    # ground the original constants: Const(c) participates as the int c
    def ground(node):
        if isinstance(node, _Lit):
            return _Lit(node.sign, node.name,
                        tuple(a.value if isinstance(a, Const) else a for a in node.args))
        if isinstance(node, _And):
            return _And(tuple(ground(p) for p in node.parts))
        if isinstance(node, _Or):
            return _Or(tuple(ground(p) for p in node.parts))
        if isinstance(node, _All):
            return _All(node.var, ground(node.body))
        if isinstance(node, _Ex):
            return _Ex(node.var, ground(node.body))
        raise TypeError(node)

    return ground(nnf)


def _formula_consts(f: Formula) -> set:
    out = set()
    for _, sub in subformulas(f):
        if isinstance(sub, Atom):
            out.update(a.value for a in sub.args if isinstance(a, Const))
    return out


def classical_fo_valid(f: Formula, budget: int = 3) -> str:
    """'valid' if a closed tableau for ~f is found within `budget` rounds of
    universal re-instantiation; 'unknown' otherwise.  Sound, incomplete."""
    try:
        root = _closure(f)
    except FormulaError:
        return "unknown"
    limit = max(1, budget)
    fuel = [50000 * limit]

    def closes(branch: frozenset, todo: tuple, gammas: tuple, consts: tuple) -> bool:
        if fuel[0] <= 0:
            return False
        fuel[0] -= 1
        while todo:
            node, todo = todo[0], todo[1:]
            if isinstance(node, _Lit):
                if _Lit(not node.sign, node.name, node.args) in branch:
                    return True
                branch = branch | {node}
            elif isinstance(node, _And):
                todo = node.parts + todo
            elif isinstance(node, _Or):
                if not node.parts:
                    return True  # empty disjunction is false: branch closes
                return all(closes(branch, (p,) + todo, gammas, consts)
                           for p in node.parts)
            elif isinstance(node, _Ex):
                c = (max(consts) + 1) if consts else 1
                todo = (_subst(node.body, node.var, c),) + todo
                consts = consts + (c,)
            else:  # _All: queue for round-based expansion
                gammas = gammas + ((node, 0),)
        # expand the least-used universal formula over all known constants
        usable = [i for i, (_, n) in enumerate(gammas) if n < limit]
        if not usable:
            return False
        i = min(usable, key=lambda j: gammas[j][1])
        g, n = gammas[i]
        if not consts:
            consts = (1,)
        new = tuple(_subst(g.body, g.var, c) for c in consts)
        rest = gammas[:i] + ((g, n + 1),) + gammas[i + 1:]
        return closes(branch, new, rest, consts)

    start = tuple(sorted(_formula_consts(f)))
    return "valid" if closes(frozenset(), (root,), (), start) else "unknown"


def _predicates(f: Formula) -> dict:
    out = {}
    for _, sub in subformulas(f):
        if isinstance(sub, Atom) and not isinstance(sub, Truth):
            out[sub.sym.name] = sub.sym.arity
    return out


def _eval_fo(f: Formula, dom: tuple, ext: dict, env: dict) -> bool:
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Atom):
        args = tuple(env[a.name] if isinstance(a, Var) else ext["#const"][a.value]
                     for a in f.args)
        return args in ext[f.sym.name]
    if isinstance(f, Neg):
        return not _eval_fo(f.body, dom, ext, env)
    if isinstance(f, Bin):
        a = _eval_fo(f.left, dom, ext, env)
        b = _eval_fo(f.right, dom, ext, env)
        if f.op in (PAND, CAND):
            return a and b
        if f.op in (POR, COR):
            return a or b
        return (not a) or b
    if isinstance(f, Quant):
        forall = f.op in (BALL, PALL)
        vals = (_eval_fo(f.body, dom, ext, {**env, f.var: d}) for d in dom)
        return all(vals) if forall else any(vals)
    raise FormulaError(f"cannot evaluate {f!r}")


def find_fo_countermodel(f: Formula, max_size: int = 3) -> Optional[dict]:
    """Search finite models of ~f by brute force over domains {1..k}."""
    if not is_elementary(f):
        raise FormulaError("countermodel search needs an elementary formula")
    preds = _predicates(f)
    consts = sorted(_formula_consts(f))
    fvs = sorted(free_vars(f))
    for k in range(1, max_size + 1):
        dom = tuple(range(1, k + 1))
        tuple_space = {name: list(itertools.product(dom, repeat=ar))
                       for name, ar in preds.items()}
        ext_choices = [
            [frozenset(s) for r in range(len(tuple_space[name]) + 1)
             for s in itertools.combinations(tuple_space[name], r)]
            for name in preds
        ]
        for const_map in itertools.product(dom, repeat=len(consts)):
            cmap = dict(zip(consts, const_map))
            for assign in itertools.product(dom, repeat=len(fvs)):
                env = dict(zip(fvs, assign))
                for exts in itertools.product(*ext_choices):
                    ext = dict(zip(preds, exts))
                    ext["#const"] = cmap
                    if not _eval_fo(f, dom, ext, env):
                        return {"domain": dom, "extensions": {n: sorted(ext[n]) for n in preds},
                                "constants": cmap, "assignment": env}
    return None
