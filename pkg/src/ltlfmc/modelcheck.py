"""Model checking LTLf properties of terminating and non-terminating systems.

A terminating system satisfies ``f`` when every finite execution does. A
non-terminating system satisfies ``f`` when every infinite execution has a
non-empty prefix satisfying ``f``; a violation is therefore an execution in
the prefix language of ``!f``, found as a reachable cycle in the safe part
of the product with the on-the-fly prefix automaton.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Union

from .compile import LazyDfa, LazyPrefixDba, Progression, _initial, ltlf_to_dfa
from .formula import Formula, Not, Trace, UndeclaredAtomError, atoms, evaluate, evaluate_prefixes
from .systems import NONTERMINATING, TERMINATING, TransitionSystem

HOLDS = "holds"
VIOLATED = "violated"
TERMINATING_MODE = TERMINATING
NONTERMINATING_MODE = NONTERMINATING
ORACLE_LIMIT = 10 ** 6
EAGER_BOUND_PROPS = 4


class ModelCheckError(ValueError):
    pass


@dataclass(frozen=True)
class FinitePath:
    states: tuple[str, ...]

    def word(self, m: TransitionSystem) -> list[frozenset[str]]:
        return [m.labels[s] for s in self.states]


@dataclass(frozen=True)
class LassoPath:
    stem: tuple[str, ...]
    cycle: tuple[str, ...]

    def word(self, m: TransitionSystem, length: int) -> list[frozenset[str]]:
        seq = self.stem + self.cycle
        k = len(self.stem)
        return [m.labels[seq[i] if i < k else self.cycle[(i - k) % len(self.cycle)]]
                for i in range(length)]


Counterexample = Union[FinitePath, LassoPath]


@dataclass(frozen=True)
class Verdict:
    outcome: str
    counterexample: Counterexample | None = None
    stats: dict = field(default_factory=dict, compare=False)
    warnings: tuple[str, ...] = ()
    bounded: bool = False

    @property
    def holds(self) -> bool:
        return self.outcome == HOLDS


def _require(m: TransitionSystem, f: Formula, kind: str) -> None:
    if m.kind != kind:
        raise ModelCheckError(f"expected a {kind} system, got a {m.kind} one")
    missing = atoms(f) - set(m.props)
    if missing:
        raise UndeclaredAtomError(f"formula uses undeclared atoms: {', '.join(sorted(missing))}")


def _path(parent: dict, node) -> list:
    out = []
    while node is not None:
        out.append(node)
        node = parent[node]
    return out[::-1]


# ---------------------------------------------------------------------------
# Terminating systems
# ---------------------------------------------------------------------------


def check_terminating(m: TransitionSystem, f: Formula) -> Verdict:
    """Breadth-first search of the product with the progression NFA of ``!f``.

    A product node ``(s, S)`` pairs a system state with the obligation set that
    still has to read ``L(s)``; it witnesses a violation when ``s`` is terminal
    and the run may end after ``L(s)``.
    """
    _require(m, f, TERMINATING)
    started = time.perf_counter()
    prog = Progression()
    start = _initial(Not(f))
    roots = [(s, start) for s in m.initial]
    parent: dict = {}
    queue: deque = deque()
    for r in roots:
        if r not in parent:
            parent[r] = None
            queue.append(r)
    peak = len(queue)
    hit = None
    while queue:
        node = queue.popleft()
        s, obligations = node
        ends, succ = prog.step(obligations, m.labels[s])
        if ends and s in m.terminal:
            hit = node
            break
        for nxt_s in m.succ[s]:
            for nxt_o in succ:
                child = (nxt_s, nxt_o)
                if child not in parent:
                    parent[child] = node
                    queue.append(child)
        peak = max(peak, len(queue))
    stats = {"explored": len(parent), "peak_frontier": peak,
             "seconds": round(time.perf_counter() - started, 6)}
    if hit is not None:
        path = FinitePath(tuple(s for s, _ in _path(parent, hit)))
        return Verdict(VIOLATED, path, stats)
    warnings = () if _terminal_reachable(m) else (
        "no terminal state is reachable: the system has no executions, so the property holds vacuously",)
    return Verdict(HOLDS, None, stats, warnings)


def _terminal_reachable(m: TransitionSystem) -> bool:
    seen = set(m.initial)
    todo = list(m.initial)
    while todo:
        s = todo.pop()
        if s in m.terminal:
            return True
        for t in m.succ[s]:
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return False


# ---------------------------------------------------------------------------
# Non-terminating systems
# ---------------------------------------------------------------------------


def check_nonterminating(m: TransitionSystem, f: Formula) -> Verdict:
    """Search for a reachable cycle in the safe product with the prefix automaton of ``!f``.

    A product node ``(s, token)`` carries the token after reading the labels
    up to and including ``s``. Rejecting tokens (some prefix satisfies ``f``)
    are never expanded.
    """
    _require(m, f, NONTERMINATING)
    started = time.perf_counter()
    pref = LazyPrefixDba(Not(f))
    order: list = []
    index: dict = {}
    parent: list[int] = []
    dist: list[int] = []
    edges: list[list[int]] = []
    expanded_rejecting = 0
    queue: deque[int] = deque()

    def visit(node, par: int):
        if node in index:
            return index[node]
        k = index[node] = len(order)
        order.append(node)
        parent.append(par)
        dist.append(0 if par < 0 else dist[par] + 1)
        edges.append([])
        queue.append(k)
        return k

    for s in m.initial:
        token = pref.step(pref.initial, m.labels[s])
        if not pref.is_rejecting(token):
            visit((s, token), -1)
    peak = len(queue)
    while queue:
        k = queue.popleft()
        s, token = order[k]
        if pref.is_rejecting(token):
            expanded_rejecting += 1
        for t in m.succ[s]:
            nxt = pref.step(token, m.labels[t])
            if pref.is_rejecting(nxt):
                continue
            edges[k].append(visit((t, nxt), k))
        peak = max(peak, len(queue))
    stats = {"explored": len(order), "peak_frontier": peak,
             "prefix_tokens": pref.token_count,
             "expanded_from_rejecting": expanded_rejecting,
             "seconds": 0.0}
    on_cycle = _cyclic_nodes(edges)
    if not on_cycle:
        stats["seconds"] = round(time.perf_counter() - started, 6)
        return Verdict(HOLDS, None, stats)
    entry = min(on_cycle, key=lambda k: (dist[k], k))
    cycle = _shortest_cycle(edges, entry)
    stem = []
    k = parent[entry]
    while k >= 0:
        stem.append(k)
        k = parent[k]
    lasso = LassoPath(tuple(order[k][0] for k in reversed(stem)),
                      tuple(order[k][0] for k in cycle))
    stats["seconds"] = round(time.perf_counter() - started, 6)
    return Verdict(VIOLATED, lasso, stats)


def _cyclic_nodes(edges: list[list[int]]) -> set[int]:
    """Nodes lying on some cycle (iterative Tarjan)."""
    n = len(edges)
    low = [0] * n
    num = [-1] * n
    on_stack = [False] * n
    stack: list[int] = []
    comp = [-1] * n
    counter = 0
    ncomp = 0
    for root in range(n):
        if num[root] >= 0:
            continue
        work = [(root, 0)]
        num[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(edges[v]):
                work[-1] = (v, i + 1)
                w = edges[v][i]
                if num[w] < 0:
                    num[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], num[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == num[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    sizes: dict[int, int] = {}
    for c in comp:
        sizes[c] = sizes.get(c, 0) + 1
    return {v for v in range(n) if sizes[comp[v]] > 1 or v in edges[v]}


def _shortest_cycle(edges: list[list[int]], entry: int) -> list[int]:
    parent = {entry: -1}
    queue = deque([entry])
    while queue:
        v = queue.popleft()
        for w in edges[v]:
            if w == entry:
                path = [v]
                while parent[path[-1]] >= 0:
                    path.append(parent[path[-1]])
                return path[::-1]
            if w not in parent:
                parent[w] = v
                queue.append(w)
    raise AssertionError("entry node is not on a cycle")  # pragma: no cover


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    ok: bool
    structural: bool = True
    reason: str = ""
    checked_prefixes: int = 0

    def __bool__(self) -> bool:
        return self.ok


def _structure(m: TransitionSystem, seq: tuple[str, ...]) -> str:
    if not seq:
        return "empty path"
    if any(s not in m.labels for s in seq):
        return "path mentions an unknown state"
    if seq[0] not in m.initial:
        return f"path starts at non-initial state {seq[0]!r}"
    for a, b in zip(seq, seq[1:]):
        if b not in m.succ[a]:
            return f"missing edge {a} -> {b}"
    return ""


def lasso_bound(m: TransitionSystem, f: Formula, c: LassoPath) -> int:
    """Number of prefixes that decides whether any prefix of the lasso satisfies ``f``.

    With few atoms this is ``|stem| + |cycle| * (N + 1)`` for ``N`` the state
    count of the complete DFA of ``f``. Otherwise it is the first point where
    the pair (cycle offset, DFA state) repeats, with the DFA explored lazily;
    prefix acceptance is periodic from there on.
    """
    k, p = len(c.stem), len(c.cycle)
    if len(atoms(f)) <= EAGER_BOUND_PROPS:
        n = ltlf_to_dfa(f, atoms(f)).num_states
        return k + p * (n + 1)
    dfa = LazyDfa(f)
    token = dfa.initial
    seen = set()
    i = 0
    while True:
        if i >= k:
            key = ((i - k) % p, token)
            if key in seen:
                return i
            seen.add(key)
        s = c.stem[i] if i < k else c.cycle[(i - k) % p]
        token = dfa.step(token, m.labels[s])
        i += 1


def certify_counterexample(m: TransitionSystem, f: Formula, c: Counterexample) -> Certificate:
    """Replay ``c`` on ``m`` and re-check it with the direct evaluator."""
    if isinstance(c, FinitePath):
        err = _structure(m, c.states)
        if not err and c.states[-1] not in m.terminal:
            err = f"path ends at non-terminal state {c.states[-1]!r}"
        if err:
            return Certificate(False, False, err)
        if evaluate(f, Trace(c.word(m), m.props)):
            return Certificate(False, True, "the path's trace satisfies the formula", 1)
        return Certificate(True, checked_prefixes=1)
    if not c.cycle:
        return Certificate(False, False, "empty cycle")
    err = _structure(m, c.stem + c.cycle)
    if not err and c.cycle[0] not in m.succ[c.cycle[-1]]:
        err = f"cycle does not close: missing edge {c.cycle[-1]} -> {c.cycle[0]}"
    if err:
        return Certificate(False, False, err)
    bound = lasso_bound(m, f, c)
    sat = evaluate_prefixes(f, c.word(m, bound), m.props)
    if sat.any():
        n = int(sat.argmax()) + 1
        return Certificate(False, True, f"the prefix of length {n} satisfies the formula", bound)
    return Certificate(True, checked_prefixes=bound)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------


def _count_paths(m: TransitionSystem, max_len: int) -> int:
    total = len(m.initial)
    layer = {s: 1 for s in m.initial}
    for _ in range(max_len - 1):
        nxt: dict[str, int] = {}
        for s, c in layer.items():
            for t in m.succ[s]:
                nxt[t] = nxt.get(t, 0) + c
        layer = nxt
        total += sum(layer.values())
        if total > ORACLE_LIMIT:
            break
    return total


def _paths(m: TransitionSystem, max_len: int):
    stack = [(s,) for s in reversed(m.initial)]
    while stack:
        p = stack.pop()
        yield p
        if len(p) < max_len:
            stack.extend(p + (t,) for t in reversed(m.succ[p[-1]]))


def bounded_oracle_check(m: TransitionSystem, f: Formula, mode: str, max_len: int) -> Verdict:
    """Exhaustive check over short executions; a ``holds`` answer is only bounded."""
    _require(m, f, mode)
    if _count_paths(m, max_len) > ORACLE_LIMIT:
        raise ModelCheckError(f"more than {ORACLE_LIMIT} paths up to length {max_len}")
    if mode == TERMINATING:
        for p in _paths(m, max_len):
            if p[-1] in m.terminal and not evaluate(f, Trace([m.labels[s] for s in p], m.props)):
                return Verdict(VIOLATED, FinitePath(p))
        return Verdict(HOLDS, bounded=True)
    bound_n = None
    for p in _paths(m, max_len):
        for j in range(len(p)):
            if p[j] not in m.succ[p[-1]]:
                continue
            c = LassoPath(p[:j], p[j:])
            if bound_n is None:
                bound_n = ltlf_to_dfa(f, atoms(f)).num_states
            bound = len(c.stem) + len(c.cycle) * (bound_n + 1)
            if not evaluate_prefixes(f, c.word(m, bound), m.props).any():
                return Verdict(VIOLATED, c)
    return Verdict(HOLDS, bounded=True)


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def dump_cex(c: Counterexample) -> str:
    if isinstance(c, FinitePath):
        lines = ["cex finite", *(f"state {s}" for s in c.states)]
    else:
        lines = ["cex lasso", *(f"state {s}" for s in c.stem), "cycle",
                 *(f"state {s}" for s in c.cycle)]
    return "\n".join(lines) + "\n"


def parse_cex(text: str) -> Counterexample:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] not in ("cex finite", "cex lasso"):
        raise ModelCheckError("cex header must be 'cex finite' or 'cex lasso'")
    lasso = lines[0] == "cex lasso"
    before: list[str] = []
    after: list[str] | None = None
    for ln in lines[1:]:
        if ln == "cycle":
            if not lasso or after is not None:
                raise ModelCheckError("unexpected cycle marker")
            after = []
            continue
        word, _, sid = ln.partition(" ")
        if word != "state" or not sid.strip():
            raise ModelCheckError(f"bad cex line {ln!r}")
        (before if after is None else after).append(sid.strip())
    if lasso:
        if not after:
            raise ModelCheckError("lasso counterexample needs a non-empty cycle")
        return LassoPath(tuple(before), tuple(after))
    return FinitePath(tuple(before))


def check(m: TransitionSystem, f: Formula) -> Verdict:
    return check_terminating(m, f) if m.terminating else check_nonterminating(m, f)
