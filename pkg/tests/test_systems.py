from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from ltlfmc.systems import (
    NONTERMINATING, TERMINATING, SystemFormatError, TransitionSystem, moore_to_ts, pair_id,
    parse_moore, parse_ts, random_ts, render_moore, render_ts,
)

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def test_parse_sample_word():
    m = parse_ts((SAMPLES / "word.ts").read_text())
    assert m.kind == NONTERMINATING
    assert m.initial == ("s0",)
    assert m.labels["s0"] == {"a"}
    assert m.succ["s2"] == ("s2",)


@given(st.integers(0, 10 ** 6), st.sampled_from([TERMINATING, NONTERMINATING]))
def test_ts_round_trip(seed, kind):
    m = random_ts(seed, 6, ["a", "b"], kind)
    assert parse_ts(render_ts(m)) == m


@pytest.mark.parametrize("text,line", [
    ("system nonterminating\nprops a\nstate s0 { a }\ninit s0\n", None),  # sink state
    ("system terminating\nprops a\nstate s0 { }\ninit s0\nedge s0 s0\n", None),  # no terminal
    ("system nonterminating\nprops a\nstate s0 { b }\ninit s0\nedge s0 s0\n", None),
    ("system nonterminating\nprops a\nstate s0 { }\ninit s0\nedge s0 s1\n", 5),
    ("system nonterminating\nprops a\nstate s0 { }\nstate s0 { }\n", 4),
    ("system nonterminating\nfrobnicate\n", 2),
    ("systemx\n", 1),
])
def test_ts_errors(text, line):
    with pytest.raises(SystemFormatError) as e:
        parse_ts(text)
    if line is not None:
        assert e.value.line == line


def test_nonterminating_rejects_terminal_set():
    with pytest.raises(SystemFormatError):
        TransitionSystem(NONTERMINATING, ("a",), ("s",), {"s": frozenset()}, {"s": ("s",)}, ("s",), frozenset({"s"}))


def test_moore_defaults_and_round_trip():
    m = parse_moore((SAMPLES / "toggle.moore").read_text())
    assert m.delta[("idle", frozenset())] == "idle"
    assert m.delta[("busy", frozenset({"req"}))] == "busy"
    assert parse_moore(render_moore(m)) == m


def test_moore_overlapping_rows():
    text = "moore\ninputs r\noutputs g\nstate q outputs { }\ninit q\ndelta q { r } q\ndelta q { r } q\ndelta q { } q\n"
    with pytest.raises(SystemFormatError) as e:
        parse_moore(text)
    assert e.value.line == 7


def test_moore_missing_row():
    with pytest.raises(SystemFormatError):
        parse_moore("moore\ninputs r\noutputs g\nstate q outputs { }\ninit q\ndelta q { r } q\n")


def test_moore_io_overlap():
    with pytest.raises(SystemFormatError):
        parse_moore("moore\ninputs r\noutputs r\nstate q outputs { }\ninit q\ndelta q default q\n")


def test_moore_to_ts_pairs():
    m = moore_to_ts(parse_moore((SAMPLES / "toggle.moore").read_text()))
    assert m.kind == NONTERMINATING
    assert set(m.initial) == {"idle@-", "idle@req"}
    assert m.labels["idle@req"] == {"req"}
    assert m.labels["busy@-"] == {"grant"}
    assert set(m.succ["idle@req"]) == {"busy@-", "busy@req"}
    assert set(m.succ["busy@-"]) == {"idle@-", "idle@req"}
    assert len(m.states) == 4


TERM = """moore terminating
inputs go
outputs done
state q0 outputs { }
state q1 outputs { done }
init q0
delta q0 { go } q1
delta q0 default q0
delta q1 default q1
terminal q1
"""


def test_terminating_moore_pairs_end_on_terminal_transition():
    m = moore_to_ts(parse_moore(TERM))
    assert m.terminal == {"q0@go"}
    assert m.succ["q0@go"] == ()
    kept = moore_to_ts(parse_moore(TERM), terminal_continue=True)
    assert set(kept.succ["q0@go"]) == {"q1@-", "q1@go"}


def test_pair_id():
    assert pair_id("q", {"b", "a"}) == "q@a+b"
    assert pair_id("q", set()) == "q@-"
