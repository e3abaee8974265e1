"""LTLf / LTL syntax trees, parsing, rendering, negation normal form and
direct semantic evaluation on finite traces and lassos."""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Letter = frozenset  # a valuation: the set of atoms that hold

DIALECTS = ("ltlf", "ltl")
KEYWORDS = frozenset({"true", "false", "X", "N", "F", "G", "U", "R", "W"})


class FormulaError(ValueError):
    """Raised for malformed formulas or unsupported constructs."""


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UndeclaredAtomError(FormulaError):
    pass


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Formula:
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((type(self).__name__, *self._key())))

    def _key(self) -> tuple:
        return ()

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(other) is not type(self) or other._hash != self._hash:
            return False
        return self._key() == other._key()

    @property
    def children(self) -> tuple[Formula, ...]:
        return ()

    def __str__(self) -> str:
        return render_formula(self)


@dataclass(frozen=True, eq=False)
class Const(Formula):
    value: bool = True

    def _key(self):
        return (self.value,)


@dataclass(frozen=True, eq=False)
class Atom(Formula):
    name: str = ""

    def __post_init__(self):
        if not self.name:
            raise FormulaError("atom names must be non-empty")
        super().__post_init__()

    def _key(self):
        return (self.name,)


@dataclass(frozen=True, eq=False)
class Unary(Formula):
    arg: Formula = None

    def _key(self):
        return (self.arg,)

    @property
    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class Binary(Formula):
    left: Formula = None
    right: Formula = None

    def _key(self):
        return (self.left, self.right)

    @property
    def children(self):
        return (self.left, self.right)


class Not(Unary): pass
class Next(Unary): pass          # X: strong next
class WeakNext(Unary): pass      # N: weak next
class Eventually(Unary): pass    # F
class Globally(Unary): pass      # G
class And(Binary): pass
class Or(Binary): pass
class Implies(Binary): pass
class Iff(Binary): pass
class Until(Binary): pass        # U
class Release(Binary): pass      # R
class WeakUntil(Binary): pass    # W


for _cls in (Not, Next, WeakNext, Eventually, Globally,
             And, Or, Implies, Iff, Until, Release, WeakUntil):
    dataclass(frozen=True, eq=False)(_cls)

TRUE = Const(True)
FALSE = Const(False)

UNARY_SYMBOL = {Not: "!", Next: "X", WeakNext: "N", Eventually: "F", Globally: "G"}
BINARY_SYMBOL = {And: "&", Or: "|", Implies: "->", Iff: "<->",
                 Until: "U", Release: "R", WeakUntil: "W"}
TEMPORAL = (Next, WeakNext, Eventually, Globally, Until, Release, WeakUntil)


def conj(*fs: Formula) -> Formula:
    """Balanced conjunction; ``TRUE`` for no arguments."""
    fs = list(fs)
    if not fs:
        return TRUE
    while len(fs) > 1:
        fs = [And(fs[i], fs[i + 1]) if i + 1 < len(fs) else fs[i]
              for i in range(0, len(fs), 2)]
    return fs[0]


def disj(*fs: Formula) -> Formula:
    fs = list(fs)
    if not fs:
        return FALSE
    while len(fs) > 1:
        fs = [Or(fs[i], fs[i + 1]) if i + 1 < len(fs) else fs[i]
              for i in range(0, len(fs), 2)]
    return fs[0]


def nexts(f: Formula, k: int, weak: bool = False) -> Formula:
    op = WeakNext if weak else Next
    for _ in range(k):
        f = op(f)
    return f


def subformulas(f: Formula) -> list[Formula]:
    """Distinct subformulas in post-order (children before parents)."""
    seen: set[Formula] = set()
    order: list[Formula] = []
    stack = [(f, False)]
    while stack:
        g, expanded = stack.pop()
        if g in seen:
            continue
        if expanded:
            seen.add(g)
            order.append(g)
            continue
        stack.append((g, True))
        for c in reversed(g.children):
            if c not in seen:
                stack.append((c, False))
    return order


def size(f: Formula) -> int:
    """Number of operator, atom and constant occurrences in the tree."""
    memo: dict[Formula, int] = {}
    for g in subformulas(f):
        memo[g] = 1 + sum(memo[c] for c in g.children)
    return memo[f]


def atoms(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def is_propositional(f: Formula) -> bool:
    return not any(isinstance(g, TEMPORAL) for g in subformulas(f))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<op><->|->|[!&|()])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<bad>.)
""", re.VERBOSE)

# binding strength of binary operators; higher binds tighter
_BINARY_PREC = {"<->": 1, "->": 2, "|": 3, "&": 4, "U": 5, "R": 5, "W": 5}
_RIGHT_ASSOC = {"->", "U", "R", "W"}
_SYMBOL_BINARY = {v: k for k, v in BINARY_SYMBOL.items()}
_SYMBOL_UNARY = {v: k for k, v in UNARY_SYMBOL.items()}


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        kind, value = m.lastgroup, m.group()
        col = m.start() - line_start + 1
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind == "bad":
            raise FormulaSyntaxError(f"unexpected character {value!r}", line, col)
        elif kind in ("op", "ident"):
            tokens.append((kind, value, line, col))
    tokens.append(("eof", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, dialect: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.dialect = dialect

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return FormulaSyntaxError(message, tok[2], tok[3])

    def parse(self) -> Formula:
        f = self.binary(1)
        if self.peek()[0] != "eof":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return f

    def binary(self, min_prec: int) -> Formula:
        left = self.unary()
        while True:
            kind, value, *_ = self.peek()
            prec = _BINARY_PREC.get(value) if kind in ("op", "ident") else None
            if prec is None or prec < min_prec:
                return left
            self.advance()
            next_min = prec if value in _RIGHT_ASSOC else prec + 1
            right = self.binary(next_min)
            left = _SYMBOL_BINARY[value](left, right)

    def unary(self) -> Formula:
        tok = self.advance()
        kind, value = tok[0], tok[1]
        if kind == "eof":
            raise self.error("unexpected end of input", tok)
        if value in _SYMBOL_UNARY:
            if value == "N" and self.dialect == "ltl":
                raise self.error("weak next N is an LTLf operator", tok)
            return _SYMBOL_UNARY[value](self.unary())
        if value == "(":
            f = self.binary(1)
            if self.advance()[1] != ")":
                raise self.error("expected ')'", self.tokens[self.pos - 1])
            return f
        if value == "true":
            return TRUE
        if value == "false":
            return FALSE
        if kind == "ident" and value not in KEYWORDS:
            return Atom(value)
        raise self.error(f"unexpected token {value!r}", tok)


def parse_formula(text: str, dialect: str = "ltlf") -> Formula:
    if dialect not in DIALECTS:
        raise FormulaError(f"unknown dialect {dialect!r}")
    return _Parser(text, dialect).parse()


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_PREC_OF = {cls: _BINARY_PREC[sym] for cls, sym in BINARY_SYMBOL.items()}
_UNARY_PREC = 6


def render_formula(f: Formula, dialect: str = "ltlf") -> str:
    """Concrete syntax that parses back to exactly ``f``."""
    memo: dict[Formula, tuple[str, int]] = {}
    for g in subformulas(f):
        if isinstance(g, Const):
            memo[g] = ("true" if g.value else "false", 7)
        elif isinstance(g, Atom):
            memo[g] = (g.name, 7)
        elif isinstance(g, Unary):
            text, prec = memo[g.arg]
            if prec < _UNARY_PREC:
                text = f"({text})"
            sym = UNARY_SYMBOL[type(g)]
            memo[g] = (f"{sym}{text}" if sym == "!" else f"{sym} {text}", _UNARY_PREC)
        else:
            prec = _PREC_OF[type(g)]
            sym = BINARY_SYMBOL[type(g)]
            lt, lp = memo[g.left]
            rt, rp = memo[g.right]
            right_assoc = sym in _RIGHT_ASSOC
            if lp < prec or (lp == prec and right_assoc):
                lt = f"({lt})"
            if rp < prec or (rp == prec and not right_assoc):
                rt = f"({rt})"
            memo[g] = (f"{lt} {sym} {rt}", prec)
    return memo[f][0]


# ---------------------------------------------------------------------------
# Negation normal form
# ---------------------------------------------------------------------------


def to_nnf(f: Formula) -> Formula:
    """Push negations onto atoms; expands ->, <-> and W.

    The result uses only constants, literals, &, |, X, N, U, R, F, G.
    """
    memo: dict[tuple[Formula, bool], Formula] = {}

    def go(g: Formula, neg: bool) -> Formula:
        key = (g, neg)
        if key in memo:
            return memo[key]
        t = type(g)
        if t is Const:
            r = Const(g.value != neg)
        elif t is Atom:
            r = Not(g) if neg else g
        elif t is Not:
            r = go(g.arg, not neg)
        elif t is And:
            r = (Or if neg else And)(go(g.left, neg), go(g.right, neg))
        elif t is Or:
            r = (And if neg else Or)(go(g.left, neg), go(g.right, neg))
        elif t is Implies:
            r = (And(go(g.left, False), go(g.right, True)) if neg
                 else Or(go(g.left, True), go(g.right, False)))
        elif t is Iff:
            a, b = g.left, g.right
            if neg:
                r = Or(And(go(a, False), go(b, True)), And(go(a, True), go(b, False)))
            else:
                r = Or(And(go(a, False), go(b, False)), And(go(a, True), go(b, True)))
        elif t is Next:
            r = WeakNext(go(g.arg, True)) if neg else Next(go(g.arg, False))
        elif t is WeakNext:
            r = Next(go(g.arg, True)) if neg else WeakNext(go(g.arg, False))
        elif t is Eventually:
            r = Globally(go(g.arg, True)) if neg else Eventually(go(g.arg, False))
        elif t is Globally:
            r = Eventually(go(g.arg, True)) if neg else Globally(go(g.arg, False))
        elif t is Until:
            r = (Release(go(g.left, True), go(g.right, True)) if neg
                 else Until(go(g.left, False), go(g.right, False)))
        elif t is Release:
            r = (Until(go(g.left, True), go(g.right, True)) if neg
                 else Release(go(g.left, False), go(g.right, False)))
        elif t is WeakUntil:
            # a W b == (a U b) | G a
            if neg:
                r = And(Release(go(g.left, True), go(g.right, True)),
                        Eventually(go(g.left, True)))
            else:
                r = Or(Until(go(g.left, False), go(g.right, False)),
                       Globally(go(g.left, False)))
        else:  # pragma: no cover
            raise FormulaError(f"unknown constructor {t.__name__}")
        memo[key] = r
        return r

    return _iterative(go, f)


def _iterative(go, f):
    # recursion depth grows with nesting; generated formulas can be deep
    import sys
    limit = sys.getrecursionlimit()
    need = 4 * max(1, _depth(f)) + 200
    if need > limit:
        sys.setrecursionlimit(need)
    try:
        return go(f, False)
    finally:
        sys.setrecursionlimit(limit)


def _depth(f: Formula) -> int:
    d: dict[Formula, int] = {}
    for g in subformulas(f):
        d[g] = 1 + max((d[c] for c in g.children), default=0)
    return d[f]


def is_nnf(f: Formula) -> bool:
    for g in subformulas(f):
        if isinstance(g, Not) and not isinstance(g.arg, Atom):
            return False
        if isinstance(g, (Implies, Iff, WeakUntil)):
            return False
    return True


# ---------------------------------------------------------------------------
# Traces and lassos
# ---------------------------------------------------------------------------


def _letter(x: Iterable[str]) -> frozenset[str]:
    return x if isinstance(x, frozenset) else frozenset(x)


@dataclass(frozen=True)
class Trace:
    """Finite non-empty sequence of valuations over ``props``."""

    letters: tuple[frozenset[str], ...]
    props: frozenset[str]

    def __init__(self, letters: Iterable[Iterable[str]], props: Iterable[str] | None = None):
        letters = tuple(_letter(x) for x in letters)
        if not letters:
            raise ValueError("traces have length >= 1")
        props = frozenset().union(*letters) if props is None else frozenset(props)
        for x in letters:
            if not x <= props:
                raise UndeclaredAtomError(f"letter {sorted(x)} uses undeclared atoms")
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "props", props)

    def __len__(self) -> int:
        return len(self.letters)

    def __getitem__(self, i):
        return self.letters[i]


@dataclass(frozen=True)
class Lasso:
    """The ultimately periodic word ``stem . cycle^omega``."""

    stem: tuple[frozenset[str], ...]
    cycle: tuple[frozenset[str], ...]
    props: frozenset[str]

    def __init__(self, stem: Iterable[Iterable[str]], cycle: Iterable[Iterable[str]],
                 props: Iterable[str] | None = None):
        stem = tuple(_letter(x) for x in stem)
        cycle = tuple(_letter(x) for x in cycle)
        if not cycle:
            raise ValueError("lasso cycle must be non-empty")
        props = frozenset().union(*stem, *cycle) if props is None else frozenset(props)
        for x in stem + cycle:
            if not x <= props:
                raise UndeclaredAtomError(f"letter {sorted(x)} uses undeclared atoms")
        object.__setattr__(self, "stem", stem)
        object.__setattr__(self, "cycle", cycle)
        object.__setattr__(self, "props", props)

    def letter(self, i: int) -> frozenset[str]:
        if i < len(self.stem):
            return self.stem[i]
        return self.cycle[(i - len(self.stem)) % len(self.cycle)]

    def prefix(self, n: int) -> Trace:
        return Trace([self.letter(i) for i in range(n)], self.props)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _check_atoms(f: Formula, props: frozenset[str]) -> None:
    missing = atoms(f) - props
    if missing:
        raise UndeclaredAtomError(f"undeclared atoms: {', '.join(sorted(missing))}")


def evaluate(f: Formula, t: Trace) -> bool:
    """LTLf satisfaction of ``t`` at position 0.

    Bottom-up over subformulas, each filled right-to-left over positions.
    """
    _check_atoms(f, t.props)
    n = len(t)
    val: dict[Formula, list[bool]] = {}
    for g in subformulas(f):
        ty = type(g)
        if ty is Const:
            v = [g.value] * n
        elif ty is Atom:
            v = [g.name in x for x in t.letters]
        elif ty is Not:
            v = [not b for b in val[g.arg]]
        elif ty in (And, Or, Implies, Iff):
            a, b = val[g.left], val[g.right]
            if ty is And:
                v = [p and q for p, q in zip(a, b)]
            elif ty is Or:
                v = [p or q for p, q in zip(a, b)]
            elif ty is Implies:
                v = [(not p) or q for p, q in zip(a, b)]
            else:
                v = [p == q for p, q in zip(a, b)]
        elif ty is Next:
            a = val[g.arg]
            v = a[1:] + [False]
        elif ty is WeakNext:
            a = val[g.arg]
            v = a[1:] + [True]
        else:
            v = [False] * n
            if ty is Eventually:
                a, nxt = val[g.arg], False
                for i in range(n - 1, -1, -1):
                    nxt = v[i] = a[i] or nxt
            elif ty is Globally:
                a, nxt = val[g.arg], True
                for i in range(n - 1, -1, -1):
                    nxt = v[i] = a[i] and nxt
            elif ty is Until:
                a, b, nxt = val[g.left], val[g.right], False
                for i in range(n - 1, -1, -1):
                    nxt = v[i] = b[i] or (a[i] and nxt)
            elif ty is Release:
                a, b, nxt = val[g.left], val[g.right], True
                for i in range(n - 1, -1, -1):
                    nxt = v[i] = b[i] and (a[i] or nxt)
            elif ty is WeakUntil:
                a, b, nxt = val[g.left], val[g.right], True
                for i in range(n - 1, -1, -1):
                    nxt = v[i] = b[i] or (a[i] and nxt)
            else:  # pragma: no cover
                raise FormulaError(f"unknown constructor {ty.__name__}")
        val[g] = v
    return val[f][0]


def evaluate_prefixes(f: Formula, word: Sequence[Iterable[str]], props=None) -> np.ndarray:
    """``out[m-1]`` is the LTLf truth value of ``f`` on the first ``m`` letters.

    Evaluates every prefix at once: each subformula gets an L x L table
    ``T[i, m]`` (position ``i`` inside the prefix of length ``m``), filled
    right-to-left over ``i`` with vector operations over ``m``.
    """
    letters = [_letter(x) for x in word]
    if not letters:
        raise ValueError("word must be non-empty")
    if props is not None:
        _check_atoms(f, frozenset(props))
    L = len(letters)
    lengths = np.arange(1, L + 1)
    # inside[i, m-1]: position i exists in the prefix of length m
    inside = np.arange(L)[:, None] < lengths[None, :]
    order = subformulas(f)
    last_use = {c: k for k, g in enumerate(order) for c in g.children}
    val: dict[Formula, np.ndarray] = {}
    for k, g in enumerate(order):
        ty = type(g)
        if ty is Const:
            v = np.full((L, L), g.value)
        elif ty is Atom:
            col = np.array([g.name in x for x in letters])
            v = np.repeat(col[:, None], L, axis=1)
        elif ty is Not:
            v = ~val[g.arg]
        elif ty is And:
            v = val[g.left] & val[g.right]
        elif ty is Or:
            v = val[g.left] | val[g.right]
        elif ty is Implies:
            v = ~val[g.left] | val[g.right]
        elif ty is Iff:
            v = val[g.left] == val[g.right]
        elif ty in (Next, WeakNext):
            a = val[g.arg]
            has_next = np.zeros((L, L), dtype=bool)
            has_next[:-1] = inside[1:]
            shifted = np.zeros((L, L), dtype=bool)
            shifted[:-1] = a[1:]
            v = has_next & shifted if ty is Next else ~has_next | shifted
        else:
            v = np.zeros((L, L), dtype=bool)
            nxt = np.zeros(L, dtype=bool)
            for i in range(L - 1, -1, -1):
                # has[m-1]: position i+1 exists in the prefix of length m
                has = inside[i + 1] if i + 1 < L else np.zeros(L, dtype=bool)
                if ty is Eventually:
                    row = val[g.arg][i] | (has & nxt)
                elif ty is Globally:
                    row = val[g.arg][i] & (~has | nxt)
                elif ty is Until:
                    row = val[g.right][i] | (val[g.left][i] & has & nxt)
                elif ty is WeakUntil:
                    row = val[g.right][i] | (val[g.left][i] & (~has | nxt))
                elif ty is Release:
                    row = val[g.right][i] & (val[g.left][i] | ~has | nxt)
                else:  # pragma: no cover
                    raise FormulaError(f"unknown constructor {ty.__name__}")
                v[i] = nxt = row
        val[g] = v
        for c in set(g.children):
            if last_use[c] == k and c is not f:
                del val[c]
    return val[f][0].copy()


_LASSO_OK = (Const, Atom, Not, And, Or, Implies, Iff, Next, Eventually, Globally, Until)


def evaluate_ltl_on_lasso(f: Formula, w: Lasso) -> bool:
    """LTL (infinite-word) satisfaction of ``stem . cycle^omega``.

    Positions ``0 .. |stem|+|cycle|-1`` form a rho-shaped graph whose last
    position loops back to ``|stem|``; temporal operators are computed as
    least/greatest fixpoints over that graph.
    """
    _check_atoms(f, w.props)
    subs = subformulas(f)
    for g in subs:
        if not isinstance(g, _LASSO_OK):
            raise FormulaError(f"{type(g).__name__} is not supported on lassos")
    L = len(w.stem) + len(w.cycle)
    succ = [i + 1 if i + 1 < L else len(w.stem) for i in range(L)]
    letters = [w.letter(i) for i in range(L)]
    val: dict[Formula, list[bool]] = {}
    for g in subs:
        ty = type(g)
        if ty is Const:
            v = [g.value] * L
        elif ty is Atom:
            v = [g.name in x for x in letters]
        elif ty is Not:
            v = [not b for b in val[g.arg]]
        elif ty is And:
            v = [p and q for p, q in zip(val[g.left], val[g.right])]
        elif ty is Or:
            v = [p or q for p, q in zip(val[g.left], val[g.right])]
        elif ty is Implies:
            v = [(not p) or q for p, q in zip(val[g.left], val[g.right])]
        elif ty is Iff:
            v = [p == q for p, q in zip(val[g.left], val[g.right])]
        elif ty is Next:
            a = val[g.arg]
            v = [a[succ[i]] for i in range(L)]
        else:
            if ty is Eventually:
                now, keep, init = val[g.arg], [True] * L, False
            elif ty is Globally:
                now, keep, init = val[g.arg], [True] * L, True
            else:
                now, keep, init = val[g.right], val[g.left], False
            v = [init] * L
            changed = True
            while changed:
                changed = False
                for i in range(L - 1, -1, -1):
                    if ty is Globally:
                        nv = now[i] and v[succ[i]]
                    else:
                        nv = now[i] or (keep[i] and v[succ[i]])
                    if nv != v[i]:
                        v[i] = nv
                        changed = True
        val[g] = v
    return val[f][0]


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

MAX_ENUM = 8


def enumerate_traces(props: Iterable[str], max_len: int) -> list[Trace]:
    """Every trace of length 1..max_len, shorter first, letters in bitmask order."""
    props = sorted(props)
    if len(props) > MAX_ENUM or max_len > MAX_ENUM:
        raise ValueError(f"enumeration bounded to {MAX_ENUM} props and length {MAX_ENUM}")
    alphabet = all_letters(props)
    pset = frozenset(props)
    out = []
    for n in range(1, max_len + 1):
        for word in itertools.product(alphabet, repeat=n):
            out.append(Trace(word, pset))
    return out


def all_letters(props: Sequence[str]) -> list[frozenset[str]]:
    """All valuations over ``props``, indexed by bitmask (bit i = props[i])."""
    props = list(props)
    return [frozenset(p for i, p in enumerate(props) if mask >> i & 1)
            for mask in range(1 << len(props))]


_FULL_UNARY = (Not, Next, WeakNext, Eventually, Globally)
_FULL_BINARY = (And, Or, Implies, Until, Release, And, Or, Until, Iff, WeakUntil)


def random_formula(seed: int, max_size: int, props: Iterable[str],
                   restrict: str = "full") -> Formula:
    """Seeded random formula with ``size(f) <= max_size``.

    ``restrict="fragment"`` draws from the R-free fragment in which | and !
    occur only inside propositional subformulas.
    """
    props = sorted(props)
    if not props:
        raise ValueError("random_formula needs at least one proposition")
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    if restrict not in ("full", "fragment"):
        raise ValueError(f"unknown restriction {restrict!r}")
    rng = random.Random(seed)
    target = rng.randint(1, max_size)

    def prop(n: int) -> Formula:
        if n == 1:
            return Atom(rng.choice(props))
        if n == 2:
            return Not(Atom(rng.choice(props)))
        k = rng.randint(1, n - 2)
        return rng.choice((And, Or))(prop(k), prop(n - 1 - k))

    def frag(n: int) -> Formula:
        if n <= 2 or rng.random() < 0.2:
            return prop(n)
        if rng.random() < 0.5:
            return rng.choice((Next, WeakNext, Eventually, Globally))(frag(n - 1))
        k = rng.randint(1, n - 2)
        return rng.choice((And, Until))(frag(k), frag(n - 1 - k))

    def full(n: int) -> Formula:
        if n == 1:
            return Atom(rng.choice(props))
        if n == 2 or rng.random() < 0.4:
            return rng.choice(_FULL_UNARY)(full(n - 1))
        k = rng.randint(1, n - 2)
        return rng.choice(_FULL_BINARY)(full(k), full(n - 1 - k))

    return frag(target) if restrict == "fragment" else full(target)
