"""Transition systems and Moore machines, with their text formats."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from .formula import all_letters

TERMINATING = "terminating"
NONTERMINATING = "nonterminating"
MAX_INPUTS = 8

_ID = re.compile(r"^[A-Za-z0-9_.@+\-]+$")


class SystemFormatError(ValueError):
    """Malformed or invalid system description."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass(frozen=True)
class TransitionSystem:
    kind: str
    props: tuple[str, ...]
    states: tuple[str, ...]
    labels: Mapping[str, frozenset[str]]
    succ: Mapping[str, tuple[str, ...]]
    initial: tuple[str, ...]
    terminal: frozenset[str] = frozenset()

    def __post_init__(self):
        validate_ts(self)

    @property
    def terminating(self) -> bool:
        return self.kind == TERMINATING

    def edges(self) -> list[tuple[str, str]]:
        return [(s, t) for s in self.states for t in self.succ[s]]


def validate_ts(m: TransitionSystem) -> None:
    if m.kind not in (TERMINATING, NONTERMINATING):
        raise SystemFormatError(f"unknown system kind {m.kind!r}")
    known = set(m.states)
    if len(known) != len(m.states):
        raise SystemFormatError("duplicate state")
    if not m.initial:
        raise SystemFormatError("no initial state")
    for s in m.initial:
        if s not in known:
            raise SystemFormatError(f"initial state {s!r} is not declared")
    props = set(m.props)
    for s in m.states:
        extra = m.labels[s] - props
        if extra:
            raise SystemFormatError(f"state {s!r} uses undeclared props {sorted(extra)}")
        for t in m.succ[s]:
            if t not in known:
                raise SystemFormatError(f"edge {s} -> {t} reaches an undeclared state")
    for s in m.terminal:
        if s not in known:
            raise SystemFormatError(f"terminal state {s!r} is not declared")
    if m.kind == TERMINATING:
        if not m.terminal:
            raise SystemFormatError("terminating system needs a non-empty terminal set")
        sinks = [s for s in m.states if not m.succ[s] and s not in m.terminal]
        if sinks:
            raise SystemFormatError(f"non-terminal sink state {sinks[0]!r}")
    else:
        if m.terminal:
            raise SystemFormatError("non-terminating system cannot declare terminal states")
        sinks = [s for s in m.states if not m.succ[s]]
        if sinks:
            raise SystemFormatError(f"sink state {sinks[0]!r} in a non-terminating system")


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _braced(rest: str, no: int) -> tuple[list[str], str]:
    """Split ``{ a b } tail`` into (["a", "b"], "tail")."""
    rest = rest.strip()
    if not rest.startswith("{") or "}" not in rest:
        raise SystemFormatError("expected a braced set { ... }", no)
    inner, _, tail = rest[1:].partition("}")
    return inner.split(), tail.strip()


def _check_id(x: str, no: int) -> str:
    if not _ID.match(x):
        raise SystemFormatError(f"bad identifier {x!r}", no)
    return x


def parse_ts(text: str) -> TransitionSystem:
    it = _lines(text)
    first = next(it, None)
    if first is None or first[1].split()[:1] != ["system"]:
        raise SystemFormatError("first line must be 'system terminating|nonterminating'", first and first[0])
    head = first[1].split()
    if len(head) != 2 or head[1] not in (TERMINATING, NONTERMINATING):
        raise SystemFormatError("system kind must be terminating or nonterminating", first[0])
    props: list[str] = []
    states: list[str] = []
    labels: dict[str, frozenset[str]] = {}
    succ: dict[str, list[str]] = {}
    initial: list[str] = []
    terminal: list[str] = []
    edges: list[tuple[int, str, str]] = []
    for no, line in it:
        word, _, rest = line.partition(" ")
        if word == "props":
            props += [_check_id(p, no) for p in rest.split()]
        elif word == "state":
            sid, _, rest = rest.strip().partition(" ")
            _check_id(sid, no)
            if sid in labels:
                raise SystemFormatError(f"state {sid!r} declared twice", no)
            label, tail = _braced(rest, no) if rest.strip() else ([], "")
            if tail:
                raise SystemFormatError(f"trailing text {tail!r}", no)
            states.append(sid)
            labels[sid] = frozenset(label)
            succ[sid] = []
        elif word == "init":
            initial += rest.split()
        elif word == "edge":
            parts = rest.split()
            if len(parts) != 2:
                raise SystemFormatError("edge needs a source and a target", no)
            edges.append((no, parts[0], parts[1]))
        elif word == "terminal":
            terminal += rest.split()
        else:
            raise SystemFormatError(f"unknown directive {word!r}", no)
    for no, s, t in edges:
        if s not in succ or t not in succ:
            raise SystemFormatError(f"dangling edge {s} -> {t}", no)
        if t not in succ[s]:
            succ[s].append(t)
    if head[1] == NONTERMINATING and terminal:
        raise SystemFormatError("terminal states are only allowed in terminating systems")
    return TransitionSystem(head[1], tuple(dict.fromkeys(props)), tuple(states), labels,
                            {s: tuple(v) for s, v in succ.items()},
                            tuple(dict.fromkeys(initial)), frozenset(terminal))


def _set(xs: Iterable[str]) -> str:
    xs = sorted(xs)
    return "{ " + " ".join(xs) + " }" if xs else "{ }"


def render_ts(m: TransitionSystem) -> str:
    out = [f"system {m.kind}", "props " + " ".join(m.props)]
    out += [f"state {s} {_set(m.labels[s])}" for s in m.states]
    out.append("init " + " ".join(m.initial))
    out += [f"edge {s} {t}" for s, t in m.edges()]
    if m.terminal:
        out.append("terminal " + " ".join(s for s in m.states if s in m.terminal))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Moore machines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MooreMachine:
    kind: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    delta: Mapping[tuple[str, frozenset[str]], str]
    output: Mapping[str, frozenset[str]]
    terminal: frozenset[str] = frozenset()

    def __post_init__(self):
        if set(self.inputs) & set(self.outputs):
            raise SystemFormatError("inputs and outputs must be disjoint")
        if len(self.inputs) > MAX_INPUTS:
            raise SystemFormatError(f"at most {MAX_INPUTS} inputs are supported")
        known = set(self.states)
        if self.initial not in known:
            raise SystemFormatError(f"initial state {self.initial!r} is not declared")
        for q in self.states:
            if not self.output[q] <= set(self.outputs):
                raise SystemFormatError(f"state {q!r} emits undeclared outputs")
            for i in self.input_letters():
                if self.delta.get((q, i)) not in known:
                    raise SystemFormatError(f"no transition for state {q!r} on input {_set(i)}")
        if self.kind == TERMINATING:
            if not self.terminal:
                raise SystemFormatError("terminating machine needs a non-empty terminal set")
            bad = self.terminal - known
            if bad:
                raise SystemFormatError(f"terminal state {sorted(bad)[0]!r} is not declared")
        elif self.kind != NONTERMINATING:
            raise SystemFormatError(f"unknown machine kind {self.kind!r}")
        elif self.terminal:
            raise SystemFormatError("terminal states need 'moore terminating'")

    def input_letters(self) -> list[frozenset[str]]:
        return all_letters(tuple(sorted(self.inputs)))


def parse_moore(text: str) -> MooreMachine:
    it = _lines(text)
    first = next(it, None)
    head = first[1].split() if first else []
    if head not in (["moore"], ["moore", TERMINATING]):
        raise SystemFormatError("first line must be 'moore' or 'moore terminating'", first and first[0])
    kind = TERMINATING if len(head) == 2 else NONTERMINATING
    inputs: list[str] = []
    outputs: list[str] = []
    states: list[str] = []
    output: dict[str, frozenset[str]] = {}
    initial: list[str] = []
    rows: dict[tuple[str, frozenset[str]], str] = {}
    defaults: dict[str, str] = {}
    terminal: list[str] = []
    for no, line in it:
        word, _, rest = line.partition(" ")
        if word == "inputs":
            inputs += [_check_id(p, no) for p in rest.split()]
        elif word == "outputs":
            outputs += [_check_id(p, no) for p in rest.split()]
        elif word == "state":
            parts = rest.strip().split(None, 2)
            if len(parts) < 1:
                raise SystemFormatError("state needs an identifier", no)
            q = _check_id(parts[0], no)
            if q in output:
                raise SystemFormatError(f"state {q!r} declared twice", no)
            emitted: list[str] = []
            if len(parts) > 1:
                if parts[1] != "outputs":
                    raise SystemFormatError("expected 'outputs { ... }'", no)
                emitted, tail = _braced(parts[2] if len(parts) > 2 else "", no)
                if tail:
                    raise SystemFormatError(f"trailing text {tail!r}", no)
            states.append(q)
            output[q] = frozenset(emitted)
        elif word == "init":
            initial += rest.split()
        elif word == "delta":
            src, _, rest = rest.strip().partition(" ")
            rest = rest.strip()
            if rest.startswith("default"):
                dst = rest[len("default"):].split()
                if len(dst) != 1:
                    raise SystemFormatError("delta default needs one target", no)
                if src in defaults:
                    raise SystemFormatError(f"two default rows for {src!r}", no)
                defaults[src] = dst[0]
                continue
            letter, tail = _braced(rest, no)
            dst = tail.split()
            if len(dst) != 1:
                raise SystemFormatError("delta row needs one target", no)
            key = (src, frozenset(letter))
            if key in rows:
                raise SystemFormatError(f"overlapping rows for {src!r} on {_set(letter)}", no)
            rows[key] = dst[0]
        elif word == "terminal":
            terminal += rest.split()
        else:
            raise SystemFormatError(f"unknown directive {word!r}", no)
    if len(initial) != 1:
        raise SystemFormatError("a Moore machine has exactly one initial state")
    if len(inputs) > MAX_INPUTS:
        raise SystemFormatError(f"at most {MAX_INPUTS} inputs are supported")
    known = set(states)
    for (q, letter), dst in rows.items():
        if q not in known or dst not in known:
            raise SystemFormatError(f"delta row {q} -> {dst} mentions an undeclared state")
        if not letter <= set(inputs):
            raise SystemFormatError(f"delta row for {q!r} uses undeclared inputs")
    for q, dst in defaults.items():
        if q not in known or dst not in known:
            raise SystemFormatError(f"default row {q} -> {dst} mentions an undeclared state")
    delta = dict(rows)
    for q in states:
        for i in all_letters(tuple(sorted(set(inputs)))):
            if (q, i) not in delta:
                if q not in defaults:
                    raise SystemFormatError(f"missing row for state {q!r} on input {_set(i)}")
                delta[(q, i)] = defaults[q]
    return MooreMachine(kind, tuple(dict.fromkeys(inputs)), tuple(dict.fromkeys(outputs)),
                        tuple(states), initial[0], delta, output, frozenset(terminal))


def render_moore(m: MooreMachine) -> str:
    out = ["moore terminating" if m.kind == TERMINATING else "moore",
           "inputs " + " ".join(m.inputs), "outputs " + " ".join(m.outputs)]
    out += [f"state {q} outputs {_set(m.output[q])}" for q in m.states]
    out.append(f"init {m.initial}")
    for q in m.states:
        for i in m.input_letters():
            out.append(f"delta {q} {_set(i)} {m.delta[(q, i)]}")
    if m.terminal:
        out.append("terminal " + " ".join(q for q in m.states if q in m.terminal))
    return "\n".join(out) + "\n"


def pair_id(q: str, i: Iterable[str]) -> str:
    return f"{q}@{'+'.join(sorted(i)) or '-'}"


def moore_to_ts(m: MooreMachine, terminal_continue: bool = False) -> TransitionSystem:
    """Pair states ``(q, i)`` labelled ``i | G(q)``; the input of a pair is the one read in ``q``.

    For terminating machines a pair is terminal when ``delta(q, i)`` is a
    machine-terminal state; such pairs lose their outgoing edges unless
    ``terminal_continue`` is set.
    """
    letters = m.input_letters()
    roots = [(m.initial, i) for i in letters]
    seen = set(roots)
    order = list(roots)
    queue = deque(roots)
    succ: dict[tuple[str, frozenset[str]], list[tuple[str, frozenset[str]]]] = {}
    terminal: set[tuple[str, frozenset[str]]] = set()
    while queue:
        q, i = node = queue.popleft()
        nxt = m.delta[(q, i)]
        if m.kind == TERMINATING and nxt in m.terminal:
            terminal.add(node)
            if not terminal_continue:
                succ[node] = []
                continue
        succ[node] = [(nxt, j) for j in letters]
        for t in succ[node]:
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    name = {n: pair_id(*n) for n in order}
    states = tuple(name[n] for n in order)
    labels = {name[n]: n[1] | m.output[n[0]] for n in order}
    props = tuple(sorted(set(m.inputs) | set(m.outputs)))
    kind = m.kind
    if kind == TERMINATING and not terminal:
        raise SystemFormatError("no machine-terminal state is reachable, so the system has no executions "
                           "and the terminating system would have no terminal states")
    return TransitionSystem(kind, props, states, labels,
                            {name[n]: tuple(name[t] for t in succ[n]) for n in order},
                            tuple(name[n] for n in roots), frozenset(name[n] for n in terminal))


def random_ts(seed: int, max_states: int, props: Iterable[str], kind: str) -> TransitionSystem:
    """Small random system for oracle comparisons; every state gets 1 or 2 successors."""
    import random

    rng = random.Random(seed)
    props = tuple(sorted(set(props)))
    n = rng.randint(1, max_states)
    states = tuple(f"s{i}" for i in range(n))
    labels = {s: frozenset(p for p in props if rng.random() < 0.5) for s in states}
    succ = {s: tuple(sorted({rng.choice(states) for _ in range(rng.randint(1, 2))})) for s in states}
    initial = tuple(sorted(rng.sample(states, rng.randint(1, min(2, n)))))
    terminal: frozenset[str] = frozenset()
    if kind == TERMINATING:
        terminal = frozenset(rng.sample(states, rng.randint(1, max(1, n // 2))))
        if rng.random() < 0.5:
            succ.update({s: () for s in terminal})
    return TransitionSystem(kind, props, states, labels, succ, initial, terminal)
