"""Lower-bound constructions.

* A reduction from space-bounded Turing machine acceptance to model checking
  non-terminating systems: the system emits arbitrary cell encodings and the
  formula ``!cons | acc`` rejects every execution that is not the machine's
  run, unless the run accepts.
* The formula family ``phi_n`` over the one-hot alphabet ``{0, 1, #, &}``
  whose prefix automata are doubly exponential, with definitional membership
  checks for its finite language and the prefix language.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .formula import (
    TRUE, And, Atom, Eventually, Formula, Globally, Iff, Implies, Lasso, Next, Not, Or,
    Trace, Until, WeakUntil, conj, disj, nexts, size,
)
from .systems import NONTERMINATING, TransitionSystem

BLANK = "_"
LEFT, RIGHT = "L", "R"
MAX_CN = 6

_NAME = re.compile(r"^[A-Za-z0-9]+$")


class MachineError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Turing machines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TuringMachineSpec:
    states: tuple[str, ...]
    start: str
    accepting: frozenset[str]
    alphabet: tuple[str, ...]
    delta: Mapping[tuple[str, str], tuple[str, str, str]]
    c: int = 1

    def __post_init__(self):
        if BLANK not in self.alphabet:
            raise MachineError("the tape alphabet must contain the blank '_'")
        if len(set(self.states)) != len(self.states) or len(set(self.alphabet)) != len(self.alphabet):
            raise MachineError("duplicate state or symbol")
        for q in self.states:
            if not _NAME.match(q):
                raise MachineError(f"state names must be alphanumeric: {q!r}")
        for g in self.alphabet:
            if g != BLANK and not _NAME.match(g):
                raise MachineError(f"symbols must be alphanumeric or '_': {g!r}")
        if self.start not in self.states:
            raise MachineError(f"start state {self.start!r} is not declared")
        if not self.accepting <= set(self.states):
            raise MachineError("accepting states must be declared")
        if self.c < 1:
            raise MachineError("space constant c must be >= 1")
        for q in self.states:
            for g in self.alphabet:
                rule = self.delta.get((q, g))
                if q in self.accepting:
                    if rule is not None:
                        raise MachineError(f"accepting state {q!r} has a rule; accepting states halt")
                    continue
                if rule is None:
                    raise MachineError(f"missing rule for ({q}, {g})")
                q2, g2, d = rule
                if q2 not in self.states or g2 not in self.alphabet or d not in (LEFT, RIGHT):
                    raise MachineError(f"bad rule for ({q}, {g}): {rule}")


def parse_tm(text: str) -> TuringMachineSpec:
    states: list[str] = []
    accepting: list[str] = []
    alphabet: list[str] = []
    start = None
    c = 1
    delta: dict[tuple[str, str], tuple[str, str, str]] = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        head, args = line[0], line[1:]
        if head == "states":
            states += args
        elif head == "accept":
            accepting += args
        elif head == "alphabet":
            alphabet += args
        elif head == "start" and len(args) == 1:
            start = args[0]
        elif head == "c" and len(args) == 1 and args[0].isdigit():
            c = int(args[0])
        elif head == "rule" and len(args) == 5:
            key = (args[0], args[1])
            if key in delta:
                raise MachineError(f"line {no}: second rule for ({args[0]}, {args[1]})")
            delta[key] = (args[2], args[3], args[4])
        else:
            raise MachineError(f"line {no}: cannot parse {raw.strip()!r}")
    if start is None:
        raise MachineError("missing 'start' line")
    return TuringMachineSpec(tuple(states), start, frozenset(accepting), tuple(alphabet), delta, c)


def render_tm(tm: TuringMachineSpec) -> str:
    out = ["states " + " ".join(tm.states), "accept " + " ".join(q for q in tm.states if q in tm.accepting),
           "alphabet " + " ".join(tm.alphabet), f"start {tm.start}"]
    for q in tm.states:
        for g in tm.alphabet:
            if (q, g) in tm.delta:
                out.append("rule {} {} {} {} {}".format(q, g, *tm.delta[(q, g)]))
    out.append(f"c {tm.c}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class SimulationResult:
    outcome: str  # "accept", "reject" or "loop"
    steps: int
    reason: str
    configurations: tuple[tuple[str, int, tuple[str, ...]], ...] = ()


def _check_input(tm: TuringMachineSpec, word: Sequence[str]) -> None:
    for x in word:
        if x == BLANK or x not in tm.alphabet:
            raise MachineError(f"input symbol {x!r} is not a non-blank tape symbol")


def simulate_tm(tm: TuringMachineSpec, word: Sequence[str], max_steps: int = 10_000,
                c: int | None = None) -> SimulationResult:
    """Run on a tape of ``2**(c*n)`` cells: cell 0 blank under the head, input from cell 1."""
    word = list(word)
    _check_input(tm, word)
    cells = 2 ** ((tm.c if c is None else c) * len(word))
    if len(word) + 1 > cells:
        raise MachineError("input does not fit on the tape")
    tape = [BLANK] + word + [BLANK] * (cells - len(word) - 1)
    q, head = tm.start, 0
    seen: set[tuple[str, int, tuple[str, ...]]] = set()
    trace = []
    for step in range(max_steps + 1):
        config = (q, head, tuple(tape))
        trace.append(config)
        if q in tm.accepting:
            return SimulationResult("accept", step, f"reached accepting state {q}", tuple(trace))
        if config in seen:
            return SimulationResult("reject", step, "configuration repeated", tuple(trace))
        seen.add(config)
        if step == max_steps:
            break
        q, tape[head], d = tm.delta[(q, tape[head])]
        head += 1 if d == RIGHT else -1
        if not 0 <= head < cells:
            return SimulationResult("reject", step + 1, "head left the tape", tuple(trace))
    return SimulationResult("loop", max_steps, "step budget exhausted", tuple(trace))


# ---------------------------------------------------------------------------
# The reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TmInstance:
    system: TransitionSystem
    formula: Formula
    cn: int
    props: tuple[str, ...]
    contents: tuple[tuple[str, str | None], ...]  # (symbol, head state or None)


def _sym(g: str) -> str:
    return "blank" if g == BLANK else g


def cell_atom(g: str, q: str | None = None) -> str:
    return f"cell_{_sym(g)}" if q is None else f"cell_{q}_{_sym(g)}"


def _state_id(g: str, q: str | None = None) -> str:
    return "c_" + (_sym(g) if q is None else f"{q}_{_sym(g)}")


def gen_tm_instance(tm: TuringMachineSpec, word: Sequence[str], c: int | None = None) -> TmInstance:
    word = list(word)
    _check_input(tm, word)
    if not word:
        raise MachineError("the reduction needs a non-empty input")
    cn = (tm.c if c is None else c) * len(word)
    if cn > MAX_CN:
        raise MachineError(f"c*n = {cn} exceeds the desk-scale guard {MAX_CN}")
    contents = [(g, None) for g in tm.alphabet] + [(g, q) for q in tm.states for g in tm.alphabet]
    cell_props = [cell_atom(g, q) for g, q in contents]
    parts = [f"part_{i}" for i in range(cn + 1)]
    props = tuple(parts + ["bit"] + cell_props)
    if len(set(props)) != len(props):
        raise MachineError("state and symbol names collide in the proposition encoding")

    states: list[str] = []
    labels: dict[str, frozenset[str]] = {}
    succ: dict[str, tuple[str, ...]] = {}
    bit_states = [[f"p{i}_{b}" for b in (0, 1)] for i in range(1, cn + 1)]
    content_states = [_state_id(g, q) for g, q in contents]
    for (g, q), sid in zip(contents, content_states):
        states.append(sid)
        labels[sid] = frozenset({"part_0", cell_atom(g, q)})
        succ[sid] = tuple(bit_states[0])
    for i, layer in enumerate(bit_states, 1):
        for b, sid in enumerate(layer):
            states.append(sid)
            labels[sid] = frozenset({f"part_{i}"} | ({"bit"} if b else set()))
            succ[sid] = tuple(bit_states[i]) if i < cn else tuple(content_states)
    initial = (_state_id(BLANK, tm.start),)
    system = TransitionSystem(NONTERMINATING, props, tuple(states), labels, succ, initial)

    phi = Or(Not(consistency_formula(tm, word, cn)), acceptance_formula(tm))
    bound = 64 * (len(tm.states) + len(tm.alphabet)) ** 3 * (cn + 1) ** 2
    if size(phi) > bound:  # pragma: no cover - guards the polynomial size claim
        raise AssertionError(f"formula size {size(phi)} exceeds {bound}")
    return TmInstance(system, phi, cn, props, tuple(contents))


def _a(name: str) -> Formula:
    return Atom(name)


def from_end(k: int, f: Formula) -> Formula:
    """``f`` holds ``k`` positions before the end: ``F(f & X^(k-1) !X true)``."""
    return Eventually(And(f, nexts(Not(Next(TRUE)), k - 1)))


def succ_formula(b: Sequence[Formula], b2: Sequence[Formula]) -> Formula:
    """``b2`` encodes ``b + 1`` mod ``2**len(b)``; index 0 is least significant."""
    parts = [Iff(b2[0], Not(b[0]))]
    for i in range(1, len(b)):
        parts.append(Iff(b2[i], Not(Iff(b[i], And(b[i - 1], Not(b2[i - 1]))))))
    return conj(*parts)


def consistency_formula(tm: TuringMachineSpec, word: Sequence[str], cn: int) -> Formula:
    k = cn + 1  # positions per cell
    n = len(word)
    bit = _a("bit")
    part0 = _a("part_0")
    bits_at = lambda offset: [nexts(bit, offset + i) for i in range(1, cn + 1)]

    # positions within a configuration
    first_zero = Implies(nexts(TRUE, cn), conj(*(nexts(Not(bit), i) for i in range(1, cn + 1))))
    increment = Globally(Implies(And(part0, nexts(TRUE, 2 * cn + 1)),
                                 succ_formula(bits_at(0), bits_at(cn + 1))))

    # the first configuration
    on_input = Implies(nexts(TRUE, k * n), conj(*(nexts(_a(cell_atom(x)), k * i)
                                                   for i, x in enumerate(word, 1))))
    weak_zero = And(part0, conj(*(nexts(Not(bit), i, weak=True) for i in range(1, cn + 1))))
    blanks = Implies(nexts(TRUE, k * (n + 1)),
                     nexts(WeakUntil(Implies(part0, _a(cell_atom(BLANK))), weak_zero), k * (n + 1)))

    # successive configurations
    new_config = And(part0, conj(*(nexts(Not(bit), i) for i in range(1, cn + 1))))
    match_last = conj(
        part0,
        from_end(k, part0),
        conj(*(Iff(nexts(bit, i), from_end(k, nexts(bit, i))) for i in range(1, cn + 1))),
        Next(Until(Not(new_config), And(new_config, Next(Globally(Not(new_config)))))),
    )
    def last(atom: str) -> Formula:
        return from_end(k, _a(atom))

    here = []
    for q in tm.states:
        for g in tm.alphabet:
            if (q, g) not in tm.delta:
                continue
            q2, g2, d = tm.delta[(q, g)]
            here.append(Implies(_a(cell_atom(g, q)), last(cell_atom(g2))))
    moves_left, moves_right, unchanged = [], [], []
    for q in tm.states:
        for g1 in tm.alphabet:
            for g2 in tm.alphabet:
                rule = tm.delta.get((q, g2))
                if rule and rule[2] == LEFT:
                    moves_left.append(Implies(And(_a(cell_atom(g1)), nexts(_a(cell_atom(g2, q)), k)),
                                              last(cell_atom(g1, rule[0]))))
                rule = tm.delta.get((q, g1))
                if rule and rule[2] == RIGHT:
                    moves_right.append(Implies(And(_a(cell_atom(g1, q)), nexts(_a(cell_atom(g2)), k)),
                                               last(cell_atom(g2, rule[0]))))
    for g1 in tm.alphabet:
        for g2 in tm.alphabet:
            for g3 in tm.alphabet:
                guard = conj(_a(cell_atom(g1)), nexts(_a(cell_atom(g2)), k),
                             nexts(_a(cell_atom(g3)), 2 * k))
                unchanged.append(Implies(guard, last(cell_atom(g2))))
    shifted = nexts(match_last, k)
    transitions = conj(
        Globally(Implies(match_last, conj(*here))),
        Globally(Implies(match_last, conj(*moves_left))),
        Globally(Implies(shifted, conj(*moves_right))),
        Globally(Implies(shifted, conj(*unchanged))),
    )
    return conj(first_zero, increment, on_input, blanks, transitions)


def acceptance_formula(tm: TuringMachineSpec) -> Formula:
    return disj(*(Eventually(_a(cell_atom(g, q)))
                  for q in tm.states if q in tm.accepting for g in tm.alphabet))


def decode_cells(inst: TmInstance, labels: Iterable[frozenset[str]]) -> list[tuple[str, str | None, int]]:
    """Read complete cells off a label sequence as (symbol, head state, position)."""
    by_atom = {cell_atom(g, q): (g, q) for g, q in inst.contents}
    labels = list(labels)
    out = []
    k = inst.cn + 1
    for start in range(0, len(labels) - k + 1, k):
        head = labels[start]
        (atom,) = [p for p in head if p.startswith("cell_")]
        pos = sum(1 << (i - 1) for i in range(1, k) if "bit" in labels[start + i])
        out.append((*by_atom[atom], pos))
    return out


# ---------------------------------------------------------------------------
# phi_n over the one-hot alphabet {0, 1, #, &}
# ---------------------------------------------------------------------------

SYMBOL_ATOM = {"0": "zero", "1": "one", "#": "hash", "&": "amp"}
ATOM_SYMBOL = {v: k for k, v in SYMBOL_ATOM.items()}
ONE_HOT_PROPS = tuple(sorted(SYMBOL_ATOM.values()))


def one_hot(symbols: str) -> list[frozenset[str]]:
    try:
        return [frozenset({SYMBOL_ATOM[s]}) for s in symbols]
    except KeyError as e:
        raise MachineError(f"symbol {e.args[0]!r} is not in {{0, 1, #, &}}") from None


def one_hot_trace(symbols: str) -> Trace:
    return Trace(one_hot(symbols), ONE_HOT_PROPS)


def one_hot_lasso(stem: str, cycle: str) -> Lasso:
    return Lasso(one_hot(stem), one_hot(cycle), ONE_HOT_PROPS)


def _decode(letters: Iterable[frozenset[str]]) -> str:
    out = []
    for x in letters:
        if len(x) != 1 or next(iter(x)) not in ATOM_SYMBOL:
            raise MachineError(f"letter {sorted(x)} is not one-hot over {list(ONE_HOT_PROPS)}")
        out.append(ATOM_SYMBOL[next(iter(x))])
    return "".join(out)


def gen_phi_n(n: int) -> Formula:
    if not 1 <= n <= 4:
        raise MachineError("phi_n is generated for 1 <= n <= 4")
    z, o, h, a = (_a(SYMBOL_ATOM[s]) for s in "01#&")
    syms = [z, o, h, a]
    only_one = conj(*(Globally(Implies(s, conj(*(Not(t) for t in syms if t is not s))))
                      for s in syms), Globally(disj(*syms)))
    exact_one = Until(Not(a), And(a, Or(Not(Next(TRUE)), Next(Globally(Not(a))))))
    ends = nexts(Not(Next(TRUE)), n + 1)
    appear = conj(h, nexts(h, n + 1), *(nexts(Or(z, o), i) for i in range(1, n + 1)))
    # the window must exist: a trace shorter than n + 2 does not end with #w#
    end_with = Eventually(And(ends, appear))
    same = conj(*(Or(And(nexts(z, i), Globally(Implies(ends, nexts(z, i)))),
                     And(nexts(o, i), Globally(Implies(ends, nexts(o, i)))))
                  for i in range(1, n + 1)))
    before_amp = Eventually(conj(appear, Eventually(a), same))
    return And(only_one, Implies(Eventually(a), And(exact_one, Implies(end_with, before_amp))))


def _blocks(s: str, n: int) -> set[str]:
    out = set()
    for i in range(len(s) - n - 1):
        w = s[i:i + n + 2]
        if w[0] == "#" and w[-1] == "#" and set(w[1:-1]) <= {"0", "1"}:
            out.add(w)
    return out


def fn_member(t: Trace, n: int) -> bool:
    """Finite words with no ``&``, or ``u & v`` whose trailing ``#w#`` in ``v`` occurs in ``u``."""
    s = _decode(t.letters)
    if s.count("&") == 0:
        return True
    if s.count("&") > 1:
        return False
    u, v = s.split("&")
    tail = v[-(n + 2):]
    if len(v) < n + 2 or not _blocks(tail, n):
        return True
    return tail in _blocks(u, n)


def ln_member(w: Lasso, n: int) -> bool:
    """Infinite words with no ``&``, or ``u & v`` whose ``#w#`` blocks in ``v`` all occur in ``u``."""
    stem, cycle = _decode(w.stem), _decode(w.cycle)
    if "&" in cycle:
        return False
    if stem.count("&") == 0:
        return True
    if stem.count("&") > 1:
        return False
    u, rest = stem.split("&")
    reps = 2 + (n + 2) // len(cycle)
    v = rest + cycle * reps
    return _blocks(v, n) <= _blocks(u, n)
