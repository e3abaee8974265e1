"""LTLf to automata by formula progression.

An obligation set is a frozenset of NNF formulas read as a conjunction. On a
letter, each obligation expands into alternatives; an alternative is a set of
tagged next-step requirements ``(strong, g)``. The trace may end after the
letter iff some alternative has no strong requirement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

from .automata import Dfa, Nfa, SafetyDba, _props, determinize, make_accepting_sinks, swap_acceptance
from .formula import (
    FALSE, TRUE, And, Atom, Const, Eventually, Formula, FormulaError, Globally, Next, Not, Or,
    Release, Until, WeakNext, all_letters, atoms, is_propositional, render_formula, to_nnf,
)

Alternative = frozenset  # of (bool strong, Formula)
Obligations = frozenset  # of Formula


class FragmentError(FormulaError):
    pass


def _minimal(sets: Iterable[frozenset]) -> list[frozenset]:
    """Drop every set that strictly contains, or duplicates, another."""
    out: list[frozenset] = []
    for s in sorted(set(sets), key=len):
        if not any(t <= s for t in out):
            out.append(s)
    return out


class Progression:
    """Memoized one-step expansion of NNF obligations."""

    def __init__(self):
        self._expand: dict[tuple[Formula, frozenset[str]], tuple[Alternative, ...]] = {}
        self._step: dict[tuple[Obligations, frozenset[str]], tuple[bool, tuple[Obligations, ...]]] = {}
        self._names: dict[Formula, str] = {}

    def name(self, f: Formula) -> str:
        s = self._names.get(f)
        if s is None:
            s = self._names[f] = render_formula(f)
        return s

    def key(self, obligations: Obligations) -> tuple[str, ...]:
        return tuple(sorted(self.name(g) for g in obligations))

    def expand(self, f: Formula, letter: frozenset[str]) -> tuple[Alternative, ...]:
        k = (f, letter)
        hit = self._expand.get(k)
        if hit is None:
            hit = self._expand[k] = tuple(_minimal(self._expand_raw(f, letter)))
        return hit

    def _expand_raw(self, f: Formula, letter: frozenset[str]) -> list[Alternative]:
        empty = frozenset()
        if isinstance(f, Const):
            return [empty] if f.value else []
        if isinstance(f, Atom):
            return [empty] if f.name in letter else []
        if isinstance(f, Not):
            if not isinstance(f.arg, Atom):
                raise FormulaError("progression expects NNF input")
            return [] if f.arg.name in letter else [empty]
        if isinstance(f, Next):
            return [] if f.arg == FALSE else [frozenset({(True, f.arg)})]
        if isinstance(f, WeakNext):
            return [empty] if f.arg == TRUE else [frozenset({(False, f.arg)})]
        if isinstance(f, And):
            return self._both(self.expand(f.left, letter), self.expand(f.right, letter))
        if isinstance(f, Or):
            return [*self.expand(f.left, letter), *self.expand(f.right, letter)]
        if isinstance(f, Eventually):  # F g = g | X F g
            return [*self.expand(f.arg, letter), frozenset({(True, f)})]
        if isinstance(f, Globally):  # G g = g & N G g
            return [a | {(False, f)} for a in self.expand(f.arg, letter)]
        if isinstance(f, Until):  # a U b = b | (a & X(a U b))
            return [*self.expand(f.right, letter),
                    *(a | {(True, f)} for a in self.expand(f.left, letter))]
        if isinstance(f, Release):  # a R b = b & (a | N(a R b))
            return self._both(self.expand(f.right, letter),
                              [*self.expand(f.left, letter), frozenset({(False, f)})])
        raise FormulaError(f"progression expects NNF input, got {type(f).__name__}")

    @staticmethod
    def _both(xs, ys) -> list[Alternative]:
        return [x | y for x, y in product(xs, ys)]

    def step(self, obligations: Obligations, letter: frozenset[str]) -> tuple[bool, tuple[Obligations, ...]]:
        """Return (may end here, minimal successor obligation sets)."""
        k = (obligations, letter)
        hit = self._step.get(k)
        if hit is not None:
            return hit
        alts = [frozenset()]
        for g in obligations:
            alts = _minimal(self._both(alts, self.expand(g, letter)))
            if not alts:
                break
        ends = any(not any(strong for strong, _ in a) for a in alts)
        succ = _minimal(frozenset(g for _, g in a if g != TRUE) for a in alts
                        if (False, FALSE) not in a)
        succ.sort(key=self.key)
        hit = self._step[k] = (ends, tuple(succ))
        return hit


def _initial(f: Formula) -> Obligations:
    g = to_nnf(f)
    return frozenset() if g == TRUE else frozenset({g})


def _alphabet(f: Formula, props: Iterable[str] | None) -> tuple[str, ...]:
    props = _props(atoms(f) if props is None else props)
    missing = atoms(f) - set(props)
    if missing:
        raise FormulaError(f"alphabet lacks atoms {sorted(missing)}")
    return props


# ---------------------------------------------------------------------------
# Explicit automata
# ---------------------------------------------------------------------------


def ltlf_to_nfa(f: Formula, props: Iterable[str] | None = None) -> Nfa:
    """State 0 is the initial obligation set, state 1 is the ACCEPT terminal."""
    props = _alphabet(f, props)
    prog = Progression()
    letters = all_letters(props)
    start = _initial(f)
    index: dict[Obligations, int] = {start: 0}
    order = [start]
    names = ["", "ACCEPT"]
    delta: dict[tuple[int, int], frozenset[int]] = {}
    accept = 1
    i = 0
    while i < len(order):
        state = order[i]
        src = 0 if i == 0 else i + 1
        for mask, letter in enumerate(letters):
            ends, succ = prog.step(state, letter)
            targets = {accept} if ends else set()
            for s in succ:
                if s not in index:
                    index[s] = len(order)
                    order.append(s)
                targets.add(0 if index[s] == 0 else index[s] + 1)
            if targets:
                delta[(src, mask)] = frozenset(targets)
        i += 1
    names[0] = _state_name(prog, order[0])
    names[2:] = [_state_name(prog, s) for s in order[1:]]
    return Nfa(props, len(order) + 1, frozenset({0}), delta, frozenset({accept}), tuple(names))


def _state_name(prog: Progression, s: Obligations) -> str:
    return " & ".join(prog.key(s)) if s else "true"


def ltlf_to_dfa(f: Formula, props: Iterable[str] | None = None) -> Dfa:
    return determinize(ltlf_to_nfa(f, props))


def prefix_dba(f: Formula, props: Iterable[str] | None = None) -> SafetyDba:
    """Safety automaton for the infinite words all of whose prefixes satisfy ``f``."""
    return swap_acceptance(make_accepting_sinks(ltlf_to_dfa(Not(f), props)))


# ---------------------------------------------------------------------------
# On-the-fly automata
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    """Antichain of live obligation sets plus whether the word so far is accepted."""

    states: tuple[Obligations, ...]
    accepted: bool


@dataclass(eq=False)
class LazyDfa:
    """Determinized progression automaton for ``f``, built on demand."""

    formula: Formula
    progression: Progression = field(default_factory=Progression)
    _memo: dict[tuple[Token, frozenset[str]], Token] = field(default_factory=dict, repr=False)
    _tokens: set[Token] = field(default_factory=set, repr=False)

    def __post_init__(self):
        self.initial = Token((_initial(self.formula),), False)
        self._tokens.add(self.initial)

    def step(self, token: Token, letter: Iterable[str]) -> Token:
        letter = frozenset(letter)
        k = (token, letter)
        hit = self._memo.get(k)
        if hit is not None:
            return hit
        ends = False
        succ: list[Obligations] = []
        for s in token.states:
            e, nxt = self.progression.step(s, letter)
            ends |= e
            succ.extend(nxt)
        states = _minimal(succ)
        states.sort(key=self.progression.key)
        hit = Token(tuple(states), ends)
        self._memo[k] = hit
        self._tokens.add(hit)
        return hit

    def accepts(self, token: Token) -> bool:
        return token.accepted

    def is_dead(self, token: Token) -> bool:
        """No extension of the word read so far is accepted."""
        return not token.states

    @property
    def token_count(self) -> int:
        return len(self._tokens)


class LazyPrefixDba:
    """On-the-fly safety automaton for the prefix language of ``f``.

    A token is rejecting once some prefix read so far violates ``f``; such
    tokens are sinks, mirroring ``prefix_dba``.
    """

    def __init__(self, f: Formula):
        self.formula = f
        self.dfa = LazyDfa(Not(f))
        self.initial = self.dfa.initial

    def step(self, token: Token, letter: Iterable[str]) -> Token:
        if token.accepted:
            return token
        return self.dfa.step(token, letter)

    def is_rejecting(self, token: Token) -> bool:
        return token.accepted

    def is_universal(self, token: Token) -> bool:
        """Every continuation stays accepted."""
        return not token.accepted and not token.states

    @property
    def token_count(self) -> int:
        return self.dfa.token_count


def lazy_prefix_dba(f: Formula) -> LazyPrefixDba:
    return LazyPrefixDba(f)


# ---------------------------------------------------------------------------
# The release-free, literal-disjunction fragment and its LTL image
# ---------------------------------------------------------------------------


def _is_literal_formula(f: Formula) -> bool:
    """``l := a | !a | l & l | l | l`` (constants also admitted)."""
    if isinstance(f, (Atom, Const)):
        return True
    if isinstance(f, Not):
        return isinstance(f.arg, Atom)
    if isinstance(f, (And, Or)):
        return _is_literal_formula(f.left) and _is_literal_formula(f.right)
    return False


def _is_fragment_literal(f: Formula) -> bool:
    if _is_literal_formula(f):
        return True
    return isinstance(f, Not) and _is_literal_formula(f.arg)


def in_fragment(f: Formula) -> bool:
    if _is_fragment_literal(f):
        return True
    if isinstance(f, (And, Until)):
        return in_fragment(f.left) and in_fragment(f.right)
    if isinstance(f, (Next, WeakNext, Eventually, Globally)):
        return in_fragment(f.arg)
    return False


def translate_fragment(f: Formula) -> Formula:
    """Map a fragment formula to an LTL formula whose models are its prefix language.

    The result uses ``Next`` and ``Globally`` with their infinite-word meaning.
    """
    if _is_fragment_literal(f):
        return f
    if isinstance(f, Next):
        return FALSE
    if isinstance(f, WeakNext):
        return Next(translate_fragment(f.arg))
    if isinstance(f, And):
        return And(translate_fragment(f.left), translate_fragment(f.right))
    if isinstance(f, Eventually):
        return translate_fragment(f.arg)
    if isinstance(f, Until):
        return translate_fragment(f.right)
    if isinstance(f, Globally):
        return Globally(translate_fragment(f.arg))
    raise FragmentError(f"not in the fragment: {render_formula(f)}")


def in_image(f: Formula) -> bool:
    if is_propositional(f):
        return True
    if isinstance(f, And):
        return in_image(f.left) and in_image(f.right)
    if isinstance(f, (Next, Globally)):
        return in_image(f.arg)
    return False


def _holds(f: Formula, letter: frozenset[str]) -> bool:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Atom):
        return f.name in letter
    if isinstance(f, Not):
        return not _holds(f.arg, letter)
    if isinstance(f, And):
        return _holds(f.left, letter) and _holds(f.right, letter)
    if isinstance(f, Or):
        return _holds(f.left, letter) or _holds(f.right, letter)
    # image formulas are built from literals, so no other connective appears
    raise FragmentError(f"unexpected connective {type(f).__name__} in image formula")


def _image_step(obligations: Obligations, letter: frozenset[str]) -> Obligations | None:
    nxt: set[Formula] = set()
    todo = list(obligations)
    while todo:
        g = todo.pop()
        if isinstance(g, Next):
            if g.arg != TRUE:
                nxt.add(g.arg)
        elif isinstance(g, Globally):
            nxt.add(g)
            todo.append(g.arg)
        elif isinstance(g, And) and not is_propositional(g):
            todo += [g.left, g.right]
        elif not _holds(g, letter):
            return None
    return frozenset(nxt)


def image_dba(f: Formula, props: Iterable[str] | None = None) -> SafetyDba:
    """Deterministic safety automaton for an image formula under infinite-word semantics."""
    if not in_image(f):
        raise FragmentError(f"not an image formula: {render_formula(f)}")
    props = _alphabet(f, props)
    prog = Progression()
    letters = all_letters(props)
    start = frozenset() if f == TRUE else frozenset({f})
    reject = None
    index: dict[Obligations, int] = {start: 0}
    order: list[Obligations | None] = [start]
    rows: list[tuple[int, ...]] = []
    i = 0
    while i < len(order):
        state = order[i]
        row = []
        for letter in letters:
            nxt = None if state is None else _image_step(state, letter)
            if nxt is None:
                if reject is None:
                    reject = len(order)
                    order.append(None)
                row.append(reject)
                continue
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        rows.append(tuple(row))
        i += 1
    accepting = frozenset(k for k, s in enumerate(order) if s is not None)
    names = tuple("reject" if s is None else _state_name(prog, s) for s in order)
    return SafetyDba(props, len(order), 0, tuple(rows), accepting, names)
