import pytest
from hypothesis import given, strategies as st

from ltlfmc.formula import (
    FALSE, TRUE, And, Atom, FormulaSyntaxError, Iff, Lasso, Next, Not, Release, Trace,
    UndeclaredAtomError, Until, WeakNext, WeakUntil, enumerate_traces, evaluate,
    evaluate_ltl_on_lasso, evaluate_prefixes, is_nnf, parse_formula, random_formula,
    render_formula, size, subformulas, to_nnf,
)

P = ["a", "b"]
TRACES = enumerate_traces(P, 3)
seeds = st.integers(0, 2 ** 32 - 1)


def T(*letters):
    return Trace([set(x) for x in letters], P)


def test_precedence_and_associativity():
    assert parse_formula("a U b U c") == Until(Atom("a"), Until(Atom("b"), Atom("c")))
    assert parse_formula("a & b | c") == parse_formula("(a & b) | c")
    assert parse_formula("!X a & b") == And(Not(Next(Atom("a"))), Atom("b"))
    assert parse_formula("a -> b -> c") == parse_formula("a -> (b -> c)")


def test_syntax_error_reports_position():
    with pytest.raises(FormulaSyntaxError) as e:
        parse_formula("a &\n  ) b")
    assert (e.value.line, e.value.column) == (2, 3)


def test_weak_next_is_not_ltl():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("N a", dialect="ltl")


@given(seeds, st.integers(1, 9))
def test_render_round_trips(seed, n):
    f = random_formula(seed, n, P)
    assert parse_formula(render_formula(f)) == f


def test_next_is_strong_and_weak_next_is_weak():
    assert not evaluate(parse_formula("X true"), T("a"))
    assert evaluate(parse_formula("N false"), T("a"))
    assert evaluate(parse_formula("X true"), T("a", ""))
    assert not evaluate(parse_formula("!X true"), T("a", ""))


def test_concrete_evaluations():
    assert evaluate(parse_formula("a U b"), T("a", "a", "b"))
    assert not evaluate(parse_formula("a U b"), T("a", "a"))
    assert evaluate(parse_formula("a W b"), T("a", "a"))
    assert evaluate(parse_formula("G a"), T("a", "ab"))
    assert not evaluate(parse_formula("F b"), T("a", "a"))
    assert evaluate(parse_formula("b R a"), T("a", "a"))


def test_undeclared_atom():
    with pytest.raises(UndeclaredAtomError):
        evaluate(parse_formula("c"), T("a"))


def test_nnf_duals():
    assert to_nnf(parse_formula("!(a U b)")) == Release(Not(Atom("a")), Not(Atom("b")))
    assert to_nnf(parse_formula("!X a")) == WeakNext(Not(Atom("a")))
    assert to_nnf(parse_formula("!N a")) == Next(Not(Atom("a")))
    assert to_nnf(Not(TRUE)) == FALSE


@given(seeds, st.integers(1, 7))
def test_nnf_preserves_semantics(seed, n):
    f = random_formula(seed, n, P)
    g = to_nnf(f)
    assert is_nnf(g)
    assert all(evaluate(f, t) == evaluate(g, t) for t in TRACES)


@given(seeds, st.integers(1, 7))
def test_nnf_is_linear_without_iff_and_weak_until(seed, n):
    f = random_formula(seed, n, P)
    if any(isinstance(g, (Iff, WeakUntil)) for g in subformulas(f)):
        return
    assert size(to_nnf(f)) <= 2 * size(f) + 1


@given(seeds, st.integers(1, 7), st.lists(st.sets(st.sampled_from(P)), min_size=1, max_size=6))
def test_prefix_evaluation_matches_direct(seed, n, word):
    f = random_formula(seed, n, P)
    out = evaluate_prefixes(f, word, P)
    assert [bool(x) for x in out] == [evaluate(f, Trace(word[:m], P)) for m in range(1, len(word) + 1)]


def test_lasso_semantics():
    w = Lasso([{"a"}, {"b"}], [set()], P)
    assert evaluate_ltl_on_lasso(parse_formula("a & X b", "ltl"), w)
    assert evaluate_ltl_on_lasso(parse_formula("F G !a", "ltl"), w)
    assert not evaluate_ltl_on_lasso(parse_formula("G F b", "ltl"), w)
    assert evaluate_ltl_on_lasso(parse_formula("G F a", "ltl"), Lasso([], [{"a"}, set()], P))
    assert evaluate_ltl_on_lasso(parse_formula("a U b", "ltl"), w)


def test_enumerate_traces_counts():
    assert len(enumerate_traces(P, 3)) == 4 + 16 + 64
    assert len(enumerate_traces([], 2)) == 2


@given(seeds, st.integers(1, 7))
def test_random_formula_is_deterministic_and_bounded(seed, n):
    f = random_formula(seed, n, P)
    assert f == random_formula(seed, n, P)
    assert size(f) <= n
