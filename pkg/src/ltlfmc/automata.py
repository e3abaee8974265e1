"""Explicit automata over valuation alphabets.

Letters are subsets of ``props``; internally they are indexed by bitmask
(bit ``i`` set iff ``props[i]`` holds). ``Nfa`` and ``Dfa`` read finite
words; ``SafetyDba`` reads infinite words with Buchi acceptance.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .formula import Lasso, Trace, all_letters

MAX_PROPS = 8


class AutomatonError(ValueError):
    pass


class AlphabetError(AutomatonError):
    pass


def _props(props: Iterable[str]) -> tuple[str, ...]:
    props = tuple(sorted(set(props)))
    if len(props) > MAX_PROPS:
        raise AlphabetError(f"explicit alphabets are limited to {MAX_PROPS} propositions")
    return props


def letter_mask(letter: Iterable[str], props: Sequence[str]) -> int:
    index = {p: i for i, p in enumerate(props)}
    mask = 0
    for a in letter:
        if a not in index:
            raise AlphabetError(f"proposition {a!r} is not in the alphabet {list(props)}")
        mask |= 1 << index[a]
    return mask


def _fmt_letter(letter: Iterable[str]) -> str:
    inner = " ".join(sorted(letter))
    return "{" + inner + "}" if inner else "{}"


@dataclass(frozen=True, eq=False)
class Nfa:
    props: tuple[str, ...]
    num_states: int
    initial: frozenset[int]
    delta: Mapping[tuple[int, int], frozenset[int]]
    accepting: frozenset[int]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "props", _props(self.props))
        for (s, a), targets in self.delta.items():
            if not (0 <= s < self.num_states and 0 <= a < 1 << len(self.props)):
                raise AutomatonError(f"bad transition source ({s}, {a})")
            if any(not 0 <= t < self.num_states for t in targets):
                raise AutomatonError(f"transition from {s} leaves the state set")
        if any(not 0 <= s < self.num_states for s in self.initial | self.accepting):
            raise AutomatonError("initial/accepting states out of range")

    @property
    def num_letters(self) -> int:
        return 1 << len(self.props)

    def successors(self, states: Iterable[int], mask: int) -> frozenset[int]:
        out: set[int] = set()
        for s in states:
            out |= self.delta.get((s, mask), frozenset())
        return frozenset(out)


@dataclass(frozen=True, eq=False)
class Dfa:
    """Complete deterministic automaton: ``delta[s][mask]`` is the successor."""

    props: tuple[str, ...]
    num_states: int
    initial: int
    delta: tuple[tuple[int, ...], ...]
    accepting: frozenset[int]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "props", _props(self.props))
        if len(self.delta) != self.num_states:
            raise AutomatonError("transition table must have one row per state")
        width = 1 << len(self.props)
        for s, row in enumerate(self.delta):
            if len(row) != width:
                raise AutomatonError(f"state {s} is not complete")
            if any(not 0 <= t < self.num_states for t in row):
                raise AutomatonError(f"transition from {s} leaves the state set")
        if not 0 <= self.initial < self.num_states:
            raise AutomatonError("initial state out of range")

    @property
    def num_letters(self) -> int:
        return 1 << len(self.props)

    def run(self, word: Iterable[Iterable[str]]) -> int:
        s = self.initial
        for letter in word:
            s = self.delta[s][letter_mask(letter, self.props)]
        return s

    def accepts(self, t: Trace) -> bool:
        return self.run(t.letters) in self.accepting

    def is_sink(self, s: int) -> bool:
        return all(t == s for t in self.delta[s])


class SafetyDba(Dfa):
    """Deterministic complete Buchi automaton.

    The shape produced by the prefix construction has every rejecting
    state a sink (``is_safety_shaped``); the intermediate automaton has every
    accepting state a sink (``is_cosafety_shaped``).
    """

    def is_safety_shaped(self) -> bool:
        return all(self.is_sink(s) for s in range(self.num_states) if s not in self.accepting)

    def is_cosafety_shaped(self) -> bool:
        return all(self.is_sink(s) for s in self.accepting)

    @property
    def rejecting(self) -> frozenset[int]:
        return frozenset(range(self.num_states)) - self.accepting


# ---------------------------------------------------------------------------
# Finite-word operations
# ---------------------------------------------------------------------------


def nfa_accepts(a: Nfa, t: Trace) -> bool:
    current = a.initial
    for letter in t.letters:
        current = a.successors(current, letter_mask(letter, a.props))
        if not current:
            return False
    return bool(current & a.accepting)


def determinize(a: Nfa) -> Dfa:
    """Subset construction; the empty subset becomes an explicit rejecting sink."""
    start = frozenset(a.initial)
    index = {start: 0}
    order = [start]
    rows: list[tuple[int, ...]] = []
    i = 0
    while i < len(order):
        subset = order[i]
        row = []
        for mask in range(a.num_letters):
            target = a.successors(subset, mask)
            if target not in index:
                index[target] = len(order)
                order.append(target)
            row.append(index[target])
        rows.append(tuple(row))
        i += 1
    accepting = frozenset(k for k, subset in enumerate(order) if subset & a.accepting)
    names = tuple("{" + ",".join(str(s) for s in sorted(subset)) + "}" for subset in order)
    return Dfa(a.props, len(order), 0, tuple(rows), accepting, names)


def minimize(d: Dfa) -> Dfa:
    """Moore partition refinement over the reachable part."""
    reach = _reachable(d)
    block = {s: int(s in d.accepting) for s in reach}
    while True:
        signature = {s: (block[s], tuple(block[t] for t in d.delta[s])) for s in reach}
        ids: dict[tuple, int] = {}
        new_block = {}
        for s in reach:  # reach is in BFS order, so numbering is canonical
            new_block[s] = ids.setdefault(signature[s], len(ids))
        if len(ids) == len(set(block.values())):
            block = new_block
            break
        block = new_block
    n = len(set(block.values()))
    rows = [None] * n
    for s in reach:
        if rows[block[s]] is None:
            rows[block[s]] = tuple(block[t] for t in d.delta[s])
    accepting = frozenset(block[s] for s in reach if s in d.accepting)
    return type(d)(d.props, n, block[d.initial], tuple(rows), accepting)


def _reachable(d: Dfa) -> list[int]:
    seen = {d.initial}
    order = [d.initial]
    for s in order:
        for t in d.delta[s]:
            if t not in seen:
                seen.add(t)
                order.append(t)
    return order


# ---------------------------------------------------------------------------
# Prefix-automaton transforms
# ---------------------------------------------------------------------------


def make_accepting_sinks(d: Dfa) -> SafetyDba:
    """Every accepting state keeps only self-loops; other rows are unchanged."""
    rows = tuple((s,) * d.num_letters if s in d.accepting else row
                 for s, row in enumerate(d.delta))
    return SafetyDba(d.props, d.num_states, d.initial, rows, d.accepting, d.names)


def swap_acceptance(c: SafetyDba) -> SafetyDba:
    if not c.is_cosafety_shaped():
        raise AutomatonError("swap_acceptance expects accepting states to be sinks")
    flipped = frozenset(range(c.num_states)) - c.accepting
    return SafetyDba(c.props, c.num_states, c.initial, c.delta, flipped, c.names)


def dba_accepts_lasso(b: Dfa, w: Lasso) -> bool:
    """Buchi acceptance of ``stem . cycle^omega`` by the unique run."""
    if not w.props <= set(b.props):
        raise AlphabetError(f"lasso uses propositions outside {list(b.props)}")
    s = b.run(w.stem)
    masks = [letter_mask(x, b.props) for x in w.cycle]
    seen: dict[tuple[int, int], int] = {}
    visited: list[int] = []
    k = 0
    while (k % len(masks), s) not in seen:
        seen[(k % len(masks), s)] = k
        visited.append(s)
        s = b.delta[s][masks[k % len(masks)]]
        k += 1
    loop = visited[seen[(k % len(masks), s)]:]
    return any(q in b.accepting for q in loop)


def safety_tighten(b: SafetyDba) -> SafetyDba:
    """Re-mark states from which every run reaches a rejecting sink."""
    if not b.is_safety_shaped():
        raise AutomatonError("safety_tighten expects rejecting states to be sinks")
    alive = set(b.accepting)
    changed = True
    while changed:
        changed = False
        for s in sorted(alive):
            if not any(t in alive for t in b.delta[s]):
                alive.discard(s)
                changed = True
    rows = tuple(row if s in alive else (s,) * b.num_letters for s, row in enumerate(b.delta))
    return SafetyDba(b.props, b.num_states, b.initial, rows, frozenset(alive), b.names)


@dataclass(frozen=True)
class Equivalence:
    equivalent: bool
    witness: Lasso | None = None

    def __bool__(self) -> bool:
        return self.equivalent


def safety_equiv(x: SafetyDba, y: SafetyDba) -> Equivalence:
    """Language equality of two safety-shaped automata over the same props.

    After tightening, two states agree on their languages only if they agree
    on the rejecting flag, so a product search for a flag mismatch decides
    equality; a mismatch yields a lasso accepted by exactly one side.
    """
    if x.props != y.props:
        raise AlphabetError("safety_equiv needs identical alphabets")
    x, y = safety_tighten(x), safety_tighten(y)
    letters = all_letters(x.props)
    start = (x.initial, y.initial)
    parent: dict[tuple[int, int], tuple[tuple[int, int], int] | None] = {start: None}
    queue = deque([start])
    while queue:
        p, q = node = queue.popleft()
        ap, aq = p in x.accepting, q in y.accepting
        if ap != aq:
            stem = _path(parent, node)
            live, s = (x, p) if ap else (y, q)
            extra, cycle = _survive(live, s)
            word = [letters[m] for m in stem + extra]
            return Equivalence(False, Lasso(word, [letters[m] for m in cycle], x.props))
        if not ap:
            continue
        for mask in range(x.num_letters):
            nxt = (x.delta[p][mask], y.delta[q][mask])
            if nxt not in parent:
                parent[nxt] = (node, mask)
                queue.append(nxt)
    return Equivalence(True)


def _path(parent, node) -> list[int]:
    masks = []
    while parent[node] is not None:
        node, mask = parent[node]
        masks.append(mask)
    return masks[::-1]


def _survive(b: SafetyDba, s: int) -> tuple[list[int], list[int]]:
    """Follow smallest surviving letters from ``s`` until a state repeats."""
    seen: dict[int, int] = {}
    masks: list[int] = []
    while s not in seen:
        seen[s] = len(masks)
        mask = next(m for m in range(b.num_letters) if b.delta[s][m] in b.accepting)
        masks.append(mask)
        s = b.delta[s][mask]
    k = seen[s]
    return masks[:k], masks[k:]


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------


def _kind(a) -> str:
    if isinstance(a, SafetyDba):
        return "dba"
    return "dfa" if isinstance(a, Dfa) else "nfa"


def _edges(a) -> list[tuple[int, int, int]]:
    if isinstance(a, Dfa):
        return [(s, m, t) for s, row in enumerate(a.delta) for m, t in enumerate(row)]
    return sorted((s, m, t) for (s, m), ts in a.delta.items() for t in ts)


def _initials(a) -> list[int]:
    return [a.initial] if isinstance(a, Dfa) else sorted(a.initial)


def to_dot(a: Nfa | Dfa) -> str:
    letters = all_letters(a.props)
    lines = [f"digraph {_kind(a)} {{", "  rankdir=LR;", '  node [shape=circle];',
             '  __start [shape=point, label=""];']
    for s in range(a.num_states):
        shape = "doublecircle" if s in a.accepting else "circle"
        label = a.names[s] if a.names else str(s)
        label = label.replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  s{s} [shape={shape}, label="{label}"];')
    for s in _initials(a):
        lines.append(f"  __start -> s{s};")
    grouped: dict[tuple[int, int], list[int]] = {}
    for s, m, t in _edges(a):
        grouped.setdefault((s, t), []).append(m)
    for (s, t), masks in sorted(grouped.items()):
        label = ", ".join(_fmt_letter(letters[m]) for m in masks)
        lines.append(f'  s{s} -> s{t} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dump_aut(a: Nfa | Dfa) -> str:
    letters = all_letters(a.props)
    out = [_kind(a), "props " + " ".join(a.props) if a.props else "props"]
    for s in range(a.num_states):
        out.append(f"state {s}" + (" accepting" if s in a.accepting else ""))
    out.append("init " + " ".join(str(s) for s in _initials(a)))
    for s, m, t in _edges(a):
        out.append(f"edge {s} {_fmt_letter(letters[m])} {t}")
    return "\n".join(out) + "\n"


def parse_aut(text: str) -> Nfa | Dfa:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] not in ("nfa", "dfa", "dba"):
        raise AutomatonError("aut header must be nfa, dfa or dba")
    kind = lines[0]
    props: tuple[str, ...] = ()
    states: dict[int, bool] = {}
    init: list[int] = []
    edges: list[tuple[int, frozenset[str], int]] = []
    for ln in lines[1:]:
        head, _, rest = ln.partition(" ")
        if head == "props":
            props = tuple(rest.split())
        elif head == "state":
            parts = rest.split()
            states[int(parts[0])] = parts[1:] == ["accepting"]
        elif head == "init":
            init = [int(x) for x in rest.split()]
        elif head == "edge":
            src, _, tail = rest.partition(" ")
            inner, _, dst = tail.rpartition("}")
            letter = frozenset(inner.strip().lstrip("{").split())
            edges.append((int(src), letter, int(dst)))
        else:
            raise AutomatonError(f"unknown aut line: {ln!r}")
    n = len(states)
    if sorted(states) != list(range(n)):
        raise AutomatonError("states must be numbered 0..n-1")
    props = _props(props)
    accepting = frozenset(s for s, acc in states.items() if acc)
    if kind == "nfa":
        delta: dict[tuple[int, int], set[int]] = {}
        for s, letter, t in edges:
            delta.setdefault((s, letter_mask(letter, props)), set()).add(t)
        return Nfa(props, n, frozenset(init), {k: frozenset(v) for k, v in delta.items()},
                   accepting)
    if len(init) != 1:
        raise AutomatonError("deterministic automata have exactly one initial state")
    rows = [[None] * (1 << len(props)) for _ in range(n)]
    for s, letter, t in edges:
        m = letter_mask(letter, props)
        if rows[s][m] is not None:
            raise AutomatonError(f"state {s} has two successors on {_fmt_letter(letter)}")
        rows[s][m] = t
    if any(t is None for row in rows for t in row):
        raise AutomatonError("deterministic automaton is not complete")
    cls = SafetyDba if kind == "dba" else Dfa
    return cls(props, n, init[0], tuple(tuple(r) for r in rows), accepting)
