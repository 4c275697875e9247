"""Formula front end: concrete syntax, AST, occurrence analysis, substitution.

The ASCII grammar (loosest to tightest, prefixes bind tightest):

    ->              implication (right associative)
    \\/  |          parallel / choice disjunction (left associative)
    /\\  &          parallel / choice conjunction (left associative)
    ~F              negation
    !x.F  ?x.F      choice quantifiers (universal / existential)
    all x.F  ex x.F blind quantifiers
    pall x.F pex x.F parallel quantifiers
    brc F bcr F     branching recurrence / corecurrence (bounded at game level)
    prc F pcr F     parallel recurrence / corecurrence

Atoms are `name` or `name(t1,...,tn)`.  Identifiers in term positions are
variables, digit strings are constants, `true`/`false` are the logical
atoms.  In formula positions a lowercase-initial name is an elementary
atom and an uppercase-initial name is a general atom.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union


class FormulaError(Exception):
    """Syntax or well-formedness error, with source position when known."""

    def __init__(self, message: str, pos: Optional[int] = None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} (at column {pos})")


class CaptureError(FormulaError):
    """Substitution would capture a variable; carries the binder's path."""

    def __init__(self, message: str, binder_path: tuple):
        self.binder_path = binder_path
        super().__init__(message)


# ---------------------------------------------------------------------------
# Terms and atoms

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    value: int

    def __str__(self):
        return str(self.value)


Term = Union[Var, Const]


@dataclass(frozen=True)
class AtomSym:
    """A predicate letter: name + arity + sort (elementary or general)."""

    name: str
    arity: int
    general: bool

    def __str__(self):
        return self.name


# ---------------------------------------------------------------------------
# Formulas

@dataclass(frozen=True)
class Truth:
    """Logical atom: `true` or `false`."""

    value: bool


@dataclass(frozen=True)
class Atom:
    sym: AtomSym
    args: tuple = ()


@dataclass(frozen=True)
class Neg:
    body: "Formula"


#: binary operator tags
PAND, POR, IMP, CAND, COR = "pand", "por", "imp", "cand", "cor"
#: quantifier tags: choice, blind, parallel
CALL, CEX, BALL, BEX, PALL, PEX = "call", "cex", "ball", "bex", "pall", "pex"
#: recurrence tags
BRC, BCR, PRC, PCR = "brc", "bcr", "prc", "pcr"

BIN_OPS = (PAND, POR, IMP, CAND, COR)
QUANT_OPS = (CALL, CEX, BALL, BEX, PALL, PEX)
REC_OPS = (BRC, BCR, PRC, PCR)
CHOICE_BIN = (CAND, COR)
CHOICE_QUANT = (CALL, CEX)
BLIND_QUANT = (BALL, BEX)
PAR_QUANT = (PALL, PEX)


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Quant:
    op: str
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Rec:
    op: str
    body: "Formula"


Formula = Union[Truth, Atom, Neg, Bin, Quant, Rec]

TRUE = Truth(True)
FALSE = Truth(False)


# ---------------------------------------------------------------------------
# Tokenizer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:(->)|(/\\)|(\\/)|([&|~().,])|(!)|(\?)|(\d+)|([A-Za-z_][A-Za-z0-9_]*))"
)

_KEYWORDS = {"true", "false", "all", "ex", "pall", "pex", "brc", "bcr", "prc", "pcr"}


def _tokenize(text: str) -> list:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m or m.end() == i:
            if not text[i:].strip():
                break
            raise FormulaError(f"unexpected character {text[i:].lstrip()[0]!r}", i + 1)
        tok = next(g for g in m.groups() if g is not None)
        tokens.append((tok, m.end() - len(tok) + 1))  # 1-based start column
        i = m.end()
    tokens.append((None, len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k][0]

    def pos(self):
        return self.tokens[self.k][1]

    def next(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok[0]

    def expect(self, tok: str):
        if self.peek() != tok:
            raise FormulaError(f"expected {tok!r}, found {self.peek()!r}", self.pos())
        return self.next()

    # precedence climbing: imp < (por, cor) < (pand, cand) < unary
    def formula(self) -> Formula:
        f = self.disj()
        if self.peek() == "->":
            self.next()
            return Bin(IMP, f, self.formula())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() in ("\\/", "|"):
            op = POR if self.next() == "\\/" else COR
            f = Bin(op, f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() in ("/\\", "&"):
            op = PAND if self.next() == "/\\" else CAND
            f = Bin(op, f, self.unary())
        return f

    def _quantifier(self, op: str) -> Formula:
        name = self.next()
        if name is None or not name[0].isalpha() and name[0] != "_":
            raise FormulaError("expected a variable after quantifier", self.pos())
        if name in _KEYWORDS:
            raise FormulaError(f"reserved word {name!r} cannot be a variable", self.pos())
        if name.isdigit():
            raise FormulaError("quantified variable cannot be a constant", self.pos())
        self.expect(".")
        return Quant(op, name, self.unary())

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.next()
            return Neg(self.unary())
        if tok == "!":
            self.next()
            return self._quantifier(CALL)
        if tok == "?":
            self.next()
            return self._quantifier(CEX)
        if tok in ("all", "ex", "pall", "pex"):
            self.next()
            return self._quantifier({"all": BALL, "ex": BEX, "pall": PALL, "pex": PEX}[tok])
        if tok in ("brc", "bcr", "prc", "pcr"):
            self.next()
            return Rec(tok, self.unary())
        if tok == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if tok in ("true", "false"):
            self.next()
            if self.peek() == "(":
                raise FormulaError(f"reserved atom {tok!r} takes no arguments", self.pos())
            return TRUE if tok == "true" else FALSE
        if tok is not None and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
            return self.atom()
        raise FormulaError(f"expected a formula, found {tok!r}", self.pos())

    def atom(self) -> Formula:
        pos = self.pos()
        name = self.next()
        if name in _KEYWORDS:
            raise FormulaError(f"reserved word {name!r} misused as an atom", pos)
        args = []
        if self.peek() == "(":
            self.next()
            args.append(self.term())
            while self.peek() == ",":
                self.next()
                args.append(self.term())
            self.expect(")")
        general = name[0].isupper()
        return Atom(AtomSym(name, len(args), general), tuple(args))

    def term(self) -> Term:
        tok = self.next()
        if tok is None:
            raise FormulaError("expected a term", self.pos())
        if tok.isdigit():
            value = int(tok)
            if value < 1:
                raise FormulaError("constants are positive integers", self.pos())
            return Const(value)
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
            if tok in _KEYWORDS:
                raise FormulaError(f"reserved word {tok!r} cannot be a term", self.pos())
            return Var(tok)
        raise FormulaError(f"expected a term, found {tok!r}", self.pos())


def parse(text: str) -> Formula:
    """Parse ASCII concrete syntax into a Formula; inverse of print_formula."""
    p = _Parser(text)
    f = p.formula()
    if p.peek() is not None:
        raise FormulaError(f"trailing input {p.peek()!r}", p.pos())
    _check_arities(f, {})
    return f


def _check_arities(f: Formula, seen: dict) -> None:
    for _, sub in subformulas(f):
        if isinstance(sub, Atom):
            key = sub.sym.name
            prev = seen.get(key)
            if prev is not None and prev != (sub.sym.arity, sub.sym.general):
                raise FormulaError(
                    f"atom {key!r} used with arity {sub.sym.arity}, previously {prev[0]}"
                )
            seen[key] = (sub.sym.arity, sub.sym.general)


# ---------------------------------------------------------------------------
# Printing

_BIN_TEXT = {PAND: "/\\", POR: "\\/", IMP: "->", CAND: "&", COR: "|"}
_QUANT_TEXT = {CALL: "!{v}. ", CEX: "?{v}. ", BALL: "all {v}. ",
               BEX: "ex {v}. ", PALL: "pall {v}. ", PEX: "pex {v}. "}
_PREC = {IMP: 1, POR: 2, COR: 2, PAND: 3, CAND: 3}


def print_formula(f: Formula) -> str:
    """Canonical text; parse(print_formula(f)) is structurally equal to f."""
    return _pr(f, 0)


def _pr(f: Formula, ctx: int) -> str:
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        if f.args:
            return f"{f.sym.name}({', '.join(map(str, f.args))})"
        return f.sym.name
    if isinstance(f, Neg):
        return "~" + _pr(f.body, 4)
    if isinstance(f, Quant):
        return _QUANT_TEXT[f.op].format(v=f.var) + _pr(f.body, 4)
    if isinstance(f, Rec):
        return f.op + " " + _pr(f.body, 4)
    if isinstance(f, Bin):
        prec = _PREC[f.op]
        if f.op == IMP:  # right associative
            left = _pr(f.left, prec + 1)
            right = _pr(f.right, prec)
        else:  # left associative
            left = _pr(f.left, prec)
            right = _pr(f.right, prec + 1)
        s = f"{left} {_BIN_TEXT[f.op]} {right}"
        return f"({s})" if prec < ctx else s
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Structural walks

def children(f: Formula) -> tuple:
    """(selector, child) pairs: 1/2 for binary nodes, 0 for unary bodies."""
    if isinstance(f, Bin):
        return ((1, f.left), (2, f.right))
    if isinstance(f, Neg):
        return ((0, f.body),)
    if isinstance(f, (Quant, Rec)):
        return ((0, f.body),)
    return ()


def subformulas(f: Formula, path: tuple = ()) -> Iterator[tuple]:
    """Yield (path, subformula) in preorder."""
    yield path, f
    for sel, child in children(f):
        yield from subformulas(child, path + (sel,))


def subformula_at(f: Formula, path: tuple) -> Formula:
    for sel in path:
        kids = dict(children(f))
        if sel not in kids:
            raise FormulaError(f"path {path} does not resolve in formula")
        f = kids[sel]
    return f


def replace_at(f: Formula, path: tuple, new: Formula) -> Formula:
    if not path:
        return new
    sel, rest = path[0], path[1:]
    if isinstance(f, Bin):
        if sel == 1:
            return Bin(f.op, replace_at(f.left, rest, new), f.right)
        if sel == 2:
            return Bin(f.op, f.left, replace_at(f.right, rest, new))
    elif isinstance(f, Neg) and sel == 0:
        return Neg(replace_at(f.body, rest, new))
    elif isinstance(f, Quant) and sel == 0:
        return Quant(f.op, f.var, replace_at(f.body, rest, new))
    elif isinstance(f, Rec) and sel == 0:
        return Rec(f.op, replace_at(f.body, rest, new))
    raise FormulaError(f"path {path} does not resolve in formula")


def atoms_of(f: Formula) -> set:
    return {sub.sym for _, sub in subformulas(f) if isinstance(sub, Atom)}


def names_of(f: Formula) -> set:
    """All identifiers occurring in f: atom names plus variable names."""
    out = set()
    for _, sub in subformulas(f):
        if isinstance(sub, Atom):
            out.add(sub.sym.name)
            out.update(t.name for t in sub.args if isinstance(t, Var))
        elif isinstance(sub, Quant):
            out.add(sub.var)
    return out


def constants_of(f: Formula) -> set:
    out = set()
    for _, sub in subformulas(f):
        if isinstance(sub, Atom):
            out.update(t.value for t in sub.args if isinstance(t, Const))
    return out


def free_vars(f: Formula, bound: frozenset = frozenset()) -> set:
    if isinstance(f, Atom):
        return {t.name for t in f.args if isinstance(t, Var) and t.name not in bound}
    if isinstance(f, Truth):
        return set()
    if isinstance(f, Neg):
        return free_vars(f.body, bound)
    if isinstance(f, Bin):
        return free_vars(f.left, bound) | free_vars(f.right, bound)
    if isinstance(f, Quant):
        return free_vars(f.body, bound | {f.var})
    if isinstance(f, Rec):
        return free_vars(f.body, bound)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Occurrences: polarity and surface flags

@dataclass(frozen=True)
class Occurrence:
    """A subformula occurrence with its derived attributes.

    polarity is +1 (positive) or -1 (negative), counting negation
    crossings with `->` read as its not-or expansion.  surface means not
    in the scope of any choice operator.
    """

    path: tuple
    node: Formula
    polarity: int
    surface: bool


def occurrences(f: Formula) -> Iterator[Occurrence]:
    def walk(g: Formula, path: tuple, pol: int, surface: bool):
        yield Occurrence(path, g, pol, surface)
        if isinstance(g, Neg):
            yield from walk(g.body, path + (0,), -pol, surface)
        elif isinstance(g, Bin):
            lpol = -pol if g.op == IMP else pol
            inner = surface and g.op not in CHOICE_BIN
            yield from walk(g.left, path + (1,), lpol, inner)
            yield from walk(g.right, path + (2,), pol, inner)
        elif isinstance(g, Quant):
            inner = surface and g.op not in CHOICE_QUANT
            yield from walk(g.body, path + (0,), pol, inner)
        elif isinstance(g, Rec):
            yield from walk(g.body, path + (0,), pol, surface)

    yield from walk(f, (), 1, True)


def surface_occurrences(f: Formula, dialect: str = "cl4") -> list:
    """Surface occurrences of choice operators and (cl2/cl4) general atoms."""
    out = []
    for occ in occurrences(f):
        if not occ.surface:
            continue
        node = occ.node
        if isinstance(node, Bin) and node.op in CHOICE_BIN:
            out.append(occ)
        elif isinstance(node, Quant) and node.op in CHOICE_QUANT:
            out.append(occ)
        elif dialect in ("cl2", "cl4") and isinstance(node, Atom) and node.sym.general:
            out.append(occ)
    return out


# ---------------------------------------------------------------------------
# Dialects

def dialect_ok(f: Formula, dialect: str) -> bool:
    """Dialect membership: cl1, cl2, cl4, or the full game language."""
    for _, sub in subformulas(f):
        if isinstance(sub, Rec) and dialect != "game":
            return False
        if isinstance(sub, Quant):
            if dialect in ("cl1", "cl2"):
                return False
        if isinstance(sub, Atom):
            if dialect == "cl1" and (sub.sym.general or sub.sym.arity):
                return False
            if dialect == "cl2" and sub.sym.arity:
                return False
    return True


def check_dialect(f: Formula, dialect: str) -> None:
    if dialect not in ("cl1", "cl2", "cl4", "game"):
        raise FormulaError(f"unknown dialect {dialect!r}")
    if not dialect_ok(f, dialect):
        raise FormulaError(f"formula is not in the {dialect} dialect: {print_formula(f)}")


def prover_ok(f: Formula) -> None:
    """Reject connectives the deductive systems have no rules for."""
    for _, sub in subformulas(f):
        if isinstance(sub, Rec):
            raise FormulaError("recurrence operators are not supported by the provers")
        if isinstance(sub, Quant) and sub.op in PAR_QUANT:
            raise FormulaError("parallel quantifiers are not supported by the provers")


# ---------------------------------------------------------------------------
# Substitution

def substitute(f: Formula, x: str, t: Term, check_capture: bool = True) -> Formula:
    """Replace all free occurrences of x by t.

    When t is a variable, refuses (with the binder's path) if any replaced
    occurrence would land in the scope of a binder on t.
    """

    def sub_term(u: Term) -> Term:
        return t if isinstance(u, Var) and u.name == x else u

    def walk(g: Formula, path: tuple, captured: Optional[tuple]):
        if isinstance(g, Atom):
            if any(isinstance(u, Var) and u.name == x for u in g.args):
                if captured is not None:
                    raise CaptureError(
                        f"substituting {t} for {x} is captured by the binder at {captured}",
                        captured,
                    )
                return Atom(g.sym, tuple(sub_term(u) for u in g.args))
            return g
        if isinstance(g, Truth):
            return g
        if isinstance(g, Neg):
            return Neg(walk(g.body, path + (0,), captured))
        if isinstance(g, Bin):
            return Bin(g.op, walk(g.left, path + (1,), captured),
                       walk(g.right, path + (2,), captured))
        if isinstance(g, Quant):
            if g.var == x:  # x no longer free below
                return g
            inner = captured
            if (check_capture and inner is None and isinstance(t, Var)
                    and g.var == t.name):
                inner = path
            return Quant(g.op, g.var, walk(g.body, path + (0,), inner))
        if isinstance(g, Rec):
            return Rec(g.op, walk(g.body, path + (0,), captured))
        raise TypeError(f"not a formula: {g!r}")

    return walk(f, (), None)


# ---------------------------------------------------------------------------
# Elementarization

def elementarize(f: Formula, dialect: str = "cl4") -> Formula:
    """Classical shadow: surface choice nodes become true/false constants,
    surface general atoms become false (positive) / true (negative)."""

    def walk(g: Formula, pol: int) -> Formula:
        if isinstance(g, Bin) and g.op in CHOICE_BIN:
            return TRUE if g.op == CAND else FALSE
        if isinstance(g, Quant) and g.op in CHOICE_QUANT:
            return TRUE if g.op == CALL else FALSE
        if isinstance(g, Atom) and g.sym.general:
            return FALSE if pol > 0 else TRUE
        if isinstance(g, (Atom, Truth)):
            return g
        if isinstance(g, Neg):
            return Neg(walk(g.body, -pol))
        if isinstance(g, Bin):
            lpol = -pol if g.op == IMP else pol
            return Bin(g.op, walk(g.left, lpol), walk(g.right, pol))
        if isinstance(g, Quant):
            return Quant(g.op, g.var, walk(g.body, pol))
        if isinstance(g, Rec):
            raise FormulaError("recurrence operators have no elementarization")
        raise TypeError(f"not a formula: {g!r}")

    return walk(f, 1)


def is_elementary(f: Formula) -> bool:
    """No choice operators and no general atoms."""
    for _, sub in subformulas(f):
        if isinstance(sub, Bin) and sub.op in CHOICE_BIN:
            return False
        if isinstance(sub, Quant) and sub.op in CHOICE_QUANT:
            return False
        if isinstance(sub, Atom) and sub.sym.general:
            return False
        if isinstance(sub, Rec):
            return False
    return True


# ---------------------------------------------------------------------------
# Canonical forms and fresh names

def canonical_key(f: Formula) -> str:
    """Structure key invariant under renaming of variables and of
    nonlogical letters (per sort and arity); used for memoization."""
    vmap: dict = {}
    smap: dict = {}

    def term_key(t: Term, bound: dict) -> str:
        if isinstance(t, Const):
            return str(t.value)
        if t.name in bound:
            return bound[t.name]
        if t.name not in vmap:
            vmap[t.name] = f"v{len(vmap)}"
        return vmap[t.name]

    def walk(g: Formula, bound: dict) -> str:
        if isinstance(g, Truth):
            return "T" if g.value else "F"
        if isinstance(g, Atom):
            skey = (g.sym.name, g.sym.arity, g.sym.general)
            if skey not in smap:
                sort = "G" if g.sym.general else "e"
                smap[skey] = f"{sort}{len(smap)}_{g.sym.arity}"
            args = ",".join(term_key(t, bound) for t in g.args)
            return f"{smap[skey]}({args})"
        if isinstance(g, Neg):
            return f"~{walk(g.body, bound)}"
        if isinstance(g, Bin):
            return f"({walk(g.left, bound)}{g.op}{walk(g.right, bound)})"
        if isinstance(g, Quant):
            name = f"b{len(bound)}"
            inner = dict(bound)
            inner[g.var] = name
            return f"{g.op}{name}.{walk(g.body, inner)}"
        if isinstance(g, Rec):
            return f"{g.op}.{walk(g.body, bound)}"
        raise TypeError(f"not a formula: {g!r}")

    return walk(f, {})


_FRESH_VARS = ("z", "w", "v", "u", "s", "t")


def fresh_var(f: Formula, avoid: set = frozenset()) -> str:
    used = names_of(f) | set(avoid)
    for name in _FRESH_VARS:
        if name not in used:
            return name
    i = 1
    while f"z{i}" in used:
        i += 1
    return f"z{i}"


def fresh_elementary(f: Formula, like: AtomSym, avoid: set = frozenset()) -> AtomSym:
    """Fresh elementary letter of the same arity, preferring the lowercase
    of the general letter's name."""
    used = names_of(f) | set(avoid) | _KEYWORDS
    base = like.name.lower()
    if base not in used and base[0].islower():
        return AtomSym(base, like.arity, False)
    i = 1
    while f"{base}{i}" in used or not f"{base}{i}"[0].islower():
        i += 1
    return AtomSym(f"{base}{i}", like.arity, False)


def fresh_constant(f: Formula) -> int:
    used = constants_of(f)
    return max(used, default=0) + 1
