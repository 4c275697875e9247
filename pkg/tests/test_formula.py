import pytest
from hypothesis import given, settings, strategies as st

from clogic.formula import (
    Atom, AtomSym, BALL, Bin, CALL, CAND, CaptureError, CEX, Const, COR,
    FormulaError, IMP, Neg, PAND, POR, Quant, TRUE, FALSE, Truth, Var,
    dialect_ok, elementarize, fresh_elementary, fresh_var, free_vars,
    is_elementary, occurrences, parse, print_formula, replace_at,
    subformula_at, subformulas, substitute, surface_occurrences,
)


def sym(name, arity=0):
    return AtomSym(name, arity, name[0].isupper())


def test_parse_two_board_reduction_shape():
    f = parse("(true | false) -> ((false | true) /\\ true)")
    assert f == Bin(IMP, Bin(COR, TRUE, FALSE), Bin(PAND, Bin(COR, FALSE, TRUE), TRUE))


def test_parse_atomic():
    assert parse("p") == Atom(sym("p"))


def test_parse_choice_quantifiers():
    f = parse("!x.?y.(P(x) -> P(y))")
    P = sym("P", 1)
    assert f == Quant(CALL, "x", Quant(CEX, "y",
                      Bin(IMP, Atom(P, (Var("x"),)), Atom(P, (Var("y"),)))))


def test_print_examples():
    assert print_formula(parse("p -> q")) == "p -> q"
    assert print_formula(Bin(CAND, parse("p"), parse("q"))) == "p & q"
    assert print_formula(parse("pall x. Odd(x)")) == "pall x. Odd(x)"


def test_parse_errors_have_positions():
    with pytest.raises(FormulaError):
        parse("p ->")
    with pytest.raises(FormulaError):
        parse("p @ q")
    with pytest.raises(FormulaError, match="reserved"):
        parse("true(x)")
    with pytest.raises(FormulaError, match="arity"):
        parse("p(x) /\\ p(x,y)")


# -- round trip ---------------------------------------------------------------

# fixed arity per letter so generated formulas are well formed
LETTERS = {"p": 0, "q": 0, "r": 0, "odd": 1, "less": 2, "P": 1, "Q": 0}
variables = st.sampled_from(["x", "y", "z"])


def term_st():
    return st.one_of(variables.map(Var), st.integers(1, 9).map(Const))


def atom_st():
    def build(name, args):
        return Atom(AtomSym(name, LETTERS[name], name[0].isupper()), tuple(args))

    def for_name(name):
        return st.builds(build, st.just(name),
                         st.lists(term_st(), min_size=LETTERS[name],
                                  max_size=LETTERS[name]))

    return st.one_of(*[for_name(n) for n in LETTERS],
                     st.sampled_from([TRUE, FALSE]))


formula_st = st.recursive(
    atom_st(),
    lambda children: st.one_of(
        st.builds(Neg, children),
        st.builds(Bin, st.sampled_from([PAND, POR, IMP, CAND, COR]), children, children),
        st.builds(lambda op, v, b: Quant(op, v, b),
                  st.sampled_from(["call", "cex", "ball", "bex", "pall", "pex"]),
                  variables, children),
    ),
    max_leaves=12,
)


@given(formula_st)
@settings(max_examples=200, deadline=None)
def test_roundtrip(f):
    assert parse(print_formula(f)) == f


@given(formula_st)
@settings(max_examples=100, deadline=None)
def test_polarity_flips_under_negation(f):
    inner = {occ.path: occ.polarity for occ in occurrences(f)}
    outer = {occ.path: occ.polarity for occ in occurrences(Neg(f)) if occ.path}
    for path, pol in inner.items():
        assert outer[(0,) + path] == -pol


@given(formula_st)
@settings(max_examples=100, deadline=None)
def test_elementarize_output_is_elementary(f):
    assert is_elementary(elementarize(f, "cl4"))


# -- substitution -------------------------------------------------------------

def test_substitute_constant():
    f = parse("less(x, y)")
    assert print_formula(substitute(f, "x", Const(3))) == "less(3, y)"


def test_substitute_identity():
    f = parse("!y.(P(x) -> P(y))")
    assert substitute(f, "x", Var("x")) == f


def test_substitute_capture_reports_binder():
    with pytest.raises(CaptureError) as err:
        substitute(parse("all t. P(x)"), "x", Var("t"))
    assert err.value.binder_path == ()


def test_substitute_bound_occurrences_stay():
    f = parse("P(x) /\\ !x.P(x)")
    out = substitute(f, "x", Const(2))
    assert print_formula(out) == "P(2) /\\ !x. P(x)"


# -- occurrences --------------------------------------------------------------

def test_surface_occurrences_general_atoms():
    f = parse("P /\\ P -> P")
    occs = surface_occurrences(f, "cl2")
    pols = sorted((occ.path, occ.polarity) for occ in occs)
    assert pols == [((1, 1), -1), ((1, 2), -1), ((2,), 1)]
    assert all(occ.surface for occ in occs)


def test_surface_positive_cand():
    occs = surface_occurrences(parse("p & q"), "cl1")
    assert len(occs) == 1 and occs[0].polarity == 1


def test_nested_choice_not_surface():
    f = parse("(p & q) | r")
    occs = surface_occurrences(f, "cl1")
    assert [occ.path for occ in occs] == [()]  # only the cor; the cand is inside it


def test_polarity_through_implication():
    f = parse("p -> q")
    pol = {occ.path: occ.polarity for occ in occurrences(f)}
    assert pol[(1,)] == -1 and pol[(2,)] == 1


# -- elementarization ---------------------------------------------------------

def test_elementarize_choice_clauses():
    f = parse("((p & q) /\\ (p & q)) -> (p & q)")
    assert print_formula(elementarize(f, "cl1")) == "true /\\ true -> true"


def test_elementarize_general_atoms_by_polarity():
    f = parse("P /\\ P -> P")
    assert print_formula(elementarize(f, "cl2")) == "true /\\ true -> false"


def test_elementarize_choice_quantifier():
    assert elementarize(parse("!x.?y.(P(x) -> P(y))"), "cl4") == TRUE


# -- dialects -----------------------------------------------------------------

def test_dialects():
    assert dialect_ok(parse("p & q"), "cl1")
    assert not dialect_ok(parse("P & q"), "cl1")
    assert dialect_ok(parse("P & q"), "cl2")
    assert not dialect_ok(parse("P(x)"), "cl2")
    assert dialect_ok(parse("!x.(P(x) | ~P(x))"), "cl4")
    assert dialect_ok(parse("pall x. p(x)"), "cl4")
    assert not dialect_ok(parse("brc p"), "cl4")
    assert dialect_ok(parse("brc p"), "game")


# -- fresh names --------------------------------------------------------------

def test_fresh_var_avoids_names():
    f = parse("!z.(P(z) -> P(w))")
    assert fresh_var(f) == "v"


def test_fresh_elementary_prefers_lowercase():
    f = parse("P /\\ P -> P")
    assert fresh_elementary(f, AtomSym("P", 0, True)).name == "p"
    g = parse("P /\\ p -> P")
    assert fresh_elementary(g, AtomSym("P", 0, True)).name == "p1"


def test_paths():
    f = parse("p -> (q & r)")
    assert subformula_at(f, (2, 1)) == parse("q")
    assert print_formula(replace_at(f, (2,), parse("s"))) == "p -> s"
    assert free_vars(parse("!x.(P(x) -> P(y))")) == {"y"}
