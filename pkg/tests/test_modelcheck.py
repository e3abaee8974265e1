from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from ltlfmc.cli import agree
from ltlfmc.formula import parse_formula, random_formula
from ltlfmc.modelcheck import (
    FinitePath, LassoPath, ModelCheckError, bounded_oracle_check, certify_counterexample, check,
    check_nonterminating, check_terminating, dump_cex, parse_cex,
)
from ltlfmc.systems import NONTERMINATING, TERMINATING, parse_ts, random_ts

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
WORD = parse_ts((SAMPLES / "word.ts").read_text())
TWO = parse_ts((SAMPLES / "two_step.ts").read_text())
P = ["a", "b"]


def test_terminating_examples():
    assert check_terminating(TWO, parse_formula("a & X b")).holds
    v = check_terminating(TWO, parse_formula("F (a & b)"))
    assert v.counterexample == FinitePath(("s0", "s1"))
    assert certify_counterexample(TWO, parse_formula("F (a & b)"), v.counterexample)


def test_nonterminating_examples():
    # some prefix of every path must satisfy the formula
    assert check_nonterminating(WORD, parse_formula("F b")).holds
    assert check_nonterminating(WORD, parse_formula("a & N (b & N !a)")).holds
    v = check_nonterminating(WORD, parse_formula("F (a & b)"))
    assert not v.holds
    assert v.counterexample == LassoPath(("s0", "s1"), ("s2",))
    assert set(v.stats) >= {"explored", "peak_frontier", "prefix_tokens"}


def test_mode_mismatch():
    with pytest.raises(ModelCheckError):
        check_terminating(WORD, parse_formula("a"))


def test_vacuous_terminating_system_warns():
    m = parse_ts("system terminating\nprops a\nstate s0 { }\nstate t { }\ninit s0\nedge s0 s0\nterminal t\n")
    v = check_terminating(m, parse_formula("a"))
    assert v.holds and v.warnings


def test_tampered_lasso_fails_structurally():
    f = parse_formula("F (a & b)")
    good = check_nonterminating(WORD, f).counterexample
    bad = LassoPath(good.stem, ("s1",))
    c = certify_counterexample(WORD, f, bad)
    assert not c and not c.structural


def test_satisfying_path_fails_semantically():
    c = certify_counterexample(TWO, parse_formula("a"), FinitePath(("s0", "s1")))
    assert not c and c.structural


def test_non_terminal_end_fails():
    c = certify_counterexample(TWO, parse_formula("b"), FinitePath(("s0",)))
    assert not c and not c.structural


def test_cex_round_trip():
    for c in (FinitePath(("s0", "s1")), LassoPath(("s0",), ("s1", "s2")), LassoPath((), ("s2",))):
        assert parse_cex(dump_cex(c)) == c
    with pytest.raises(ModelCheckError):
        parse_cex("cex lasso\nstate s0\n")


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 7), st.sampled_from([TERMINATING, NONTERMINATING]))
def test_agrees_with_bounded_oracle(seed, n, mode):
    f = random_formula(seed, n, P)
    m = random_ts(seed, 5, P, mode)
    v = check(m, f)
    bound = 6 if mode == TERMINATING else 5
    assert agree(v, bounded_oracle_check(m, f, mode, bound), bound)
    if not v.holds:
        assert certify_counterexample(m, f, v.counterexample)
