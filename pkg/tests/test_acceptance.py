"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line."""

import itertools
import random
import time
from pathlib import Path

import pytest

from conftest import ACCEPTANCE
from ltlfmc import cli
from ltlfmc.automata import dba_accepts_lasso, make_accepting_sinks, minimize, nfa_accepts, safety_equiv
from ltlfmc.cli import agree, run
from ltlfmc.compile import (
    LazyPrefixDba, image_dba, ltlf_to_dfa, ltlf_to_nfa, prefix_dba, translate_fragment,
)
from ltlfmc.formula import (
    Eventually, Lasso, Not, Until, WeakNext, all_letters, enumerate_traces, evaluate,
    evaluate_ltl_on_lasso, evaluate_prefixes, parse_formula, random_formula, render_formula,
)
from ltlfmc.hardness import (
    ONE_HOT_PROPS, fn_member, gen_phi_n, gen_tm_instance, ln_member, one_hot_lasso,
    one_hot_trace, parse_tm, simulate_tm,
)
from ltlfmc.modelcheck import (
    Certificate, bounded_oracle_check, certify_counterexample, check_nonterminating,
    check_terminating, dump_cex,
)
from ltlfmc.systems import NONTERMINATING, TERMINATING, random_ts

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
P = ["a", "b"]
LETTERS = all_letters(tuple(P))


def record(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE[k] = line
    print(line)


def random_lasso(rng: random.Random, letters, max_len: int) -> Lasso:
    total = rng.randint(1, max_len)
    cyc = rng.randint(1, total)
    return Lasso([rng.choice(letters) for _ in range(total - cyc)],
                 [rng.choice(letters) for _ in range(cyc)])


def direct_prefix_acceptance(f, w: Lasso, dfa_states: int) -> bool:
    """Every prefix satisfies f, checked with the evaluator up to the pigeonhole bound."""
    bound = len(w.stem) + len(w.cycle) * (dfa_states + 1)
    return bool(evaluate_prefixes(f, [w.letter(i) for i in range(bound)]).all())


def test_criterion_1_nfa_matches_evaluator():
    start = time.perf_counter()
    traces = enumerate_traces(P, 4)
    bad = []
    for seed in range(500):
        f = random_formula(seed, 7, P)
        nfa = ltlf_to_nfa(f, P)
        if any(nfa_accepts(nfa, t) != evaluate(f, t) for t in traces):
            bad.append(render_formula(f))
    secs = time.perf_counter() - start
    ok = not bad and secs < 60
    record(1, ok, f"500 formulas x {len(traces)} traces, {len(bad)} disagreements, {secs:.1f}s")
    assert ok, bad[:5]


def test_criterion_2_prefix_automaton_shape_and_complement():
    rng = random.Random(2)
    failures = []
    for seed in range(100):
        f = random_formula(seed, 6, P)
        b = prefix_dba(f, P)
        c = make_accepting_sinks(ltlf_to_dfa(Not(f), P))
        if not (b.is_safety_shaped() and len(b.delta) == b.num_states
                and all(len(row) == len(LETTERS) for row in b.delta)):
            failures.append((render_formula(f), "shape"))
        n = ltlf_to_dfa(f, P).num_states
        for _ in range(100):
            w = random_lasso(rng, LETTERS, 6)
            in_b, in_c = dba_accepts_lasso(b, w), dba_accepts_lasso(c, w)
            if in_b == in_c or in_b != direct_prefix_acceptance(f, w, n):
                failures.append((render_formula(f), w))
                break
    record(2, not failures, f"100 formulas x 100 lassos, {len(failures)} failures")
    assert not failures, failures[:3]


def test_criterion_3_worked_examples():
    w = Lasso([{"a"}, {"b"}], [set()], P)
    accepts = dba_accepts_lasso(prefix_dba(parse_formula("G a | F b"), P), w)
    xa = prefix_dba(parse_formula("X a"), P)
    empty = bool(safety_equiv(xa, prefix_dba(parse_formula("false"), P)))
    record(3, accepts and empty, f"G a | F b accepts {{a}}{{b}}{{}}^w: {accepts}; X a empty: {empty}")
    assert accepts and empty


def _weak_next_under_eventuality(f, under: bool = False) -> bool:
    if isinstance(f, WeakNext) and under:
        return True
    if isinstance(f, Eventually):
        return _weak_next_under_eventuality(f.arg, True)
    if isinstance(f, Until):
        return _weak_next_under_eventuality(f.left, under) or _weak_next_under_eventuality(f.right, True)
    return any(_weak_next_under_eventuality(c, under) for c in f.children)


def _fragment_run():
    start = time.perf_counter()
    results = []
    for seed in range(200):
        f = random_formula(seed, 7, P, restrict="fragment")
        results.append((f, safety_equiv(prefix_dba(f, P), image_dba(translate_fragment(f), P))))
    return results, time.perf_counter() - start


@pytest.mark.xfail(strict=True, reason="the translation drops weak-next obligations under F and U; "
                   "see test_criterion_4_mismatches_are_genuine")
def test_criterion_4_fragment_translation():
    results, secs = _fragment_run()
    bad = [render_formula(f) for f, r in results if not r]
    ok = not bad and secs < 120
    record(4, ok, f"200 fragment formulas, {len(bad)} not equivalent {bad}, {secs:.1f}s")
    assert ok


def test_criterion_4_mismatches_are_genuine():
    # each witness is re-checked by two routes that share no code with safety_equiv
    results, _ = _fragment_run()
    for f, r in results:
        if r:
            continue
        assert _weak_next_under_eventuality(f)
        g, w = translate_fragment(f), r.witness
        n = ltlf_to_dfa(f, P).num_states
        assert direct_prefix_acceptance(f, w, n) != evaluate_ltl_on_lasso(g, w)
    # formulas without that pattern translate correctly
    checked = 0
    for seed in range(200, 1200):
        f = random_formula(seed, 7, P, restrict="fragment")
        if _weak_next_under_eventuality(f):
            continue
        checked += 1
        assert safety_equiv(prefix_dba(f, P), image_dba(translate_fragment(f), P)), render_formula(f)
    assert checked > 500


def test_criterion_5_model_checking_agrees_with_oracles():
    start = time.perf_counter()
    rng = random.Random(5)
    tally = {}
    bad = []
    for mode, bound in ((TERMINATING, 6), (NONTERMINATING, 5)):
        counts = {"holds": 0, "violated": 0}
        for k in range(300):
            f = random_formula(rng.randrange(2 ** 32), 6, P)
            m = random_ts(rng.randrange(2 ** 32), 6, P, mode)
            v = check_terminating(m, f) if mode == TERMINATING else check_nonterminating(m, f)
            o = bounded_oracle_check(m, f, mode, bound)
            counts[v.outcome] += 1
            if not agree(v, o, bound) or (not v.holds and not certify_counterexample(m, f, v.counterexample)):
                bad.append((mode, k, render_formula(f)))
        tally[mode] = counts
    secs = time.perf_counter() - start
    ok = not bad and secs < 300
    record(5, ok, f"{tally}, {len(bad)} disagreements, {secs:.1f}s")
    assert ok, bad[:5]


def test_criterion_6_turing_machine_reduction():
    lines, ok = [], True
    for name, word in (("accept", "1"), ("reject", "1"), ("loop", "0")):
        tm = parse_tm((SAMPLES / f"{name}.tm").read_text())
        start = time.perf_counter()
        inst = gen_tm_instance(tm, list(word), c=2)
        v = check_nonterminating(inst.system, inst.formula)
        secs = time.perf_counter() - start
        sim = simulate_tm(tm, list(word), c=2)
        good = (v.holds == (sim.outcome == "accept") and secs < 300 and inst.cn <= 4
                and (v.holds or bool(certify_counterexample(inst.system, inst.formula, v.counterexample))))
        ok &= good
        lines.append(f"{name}/{word} cn={inst.cn} sim={sim.outcome} check={v.outcome} {secs:.1f}s")
    record(6, ok, "; ".join(lines))
    assert ok


def test_criterion_7_phi_n_languages():
    f = gen_phi_n(1)
    finite_bad = sum(
        evaluate(f, one_hot_trace("".join(s))) != fn_member(one_hot_trace("".join(s)), 1)
        for k in range(1, 7) for s in itertools.product("01#&", repeat=k))
    b = prefix_dba(f, ONE_HOT_PROPS)
    rng = random.Random(7)
    lasso_bad = 0
    for _ in range(500):
        total = rng.randint(1, 8)
        cyc = rng.randint(1, total)
        w = one_hot_lasso("".join(rng.choice("01#&") for _ in range(total - cyc)),
                          "".join(rng.choice("01#&") for _ in range(cyc)))
        lasso_bad += dba_accepts_lasso(b, w) != ln_member(w, 1)
    growth = []
    for n in (1, 2):
        phi = gen_phi_n(n)
        d = ltlf_to_dfa(phi, ONE_HOT_PROPS)
        lazy = LazyPrefixDba(phi)
        frontier, seen = [lazy.initial], {lazy.initial}
        while frontier:
            x = frontier.pop()
            for letter in all_letters(ONE_HOT_PROPS):
                y = lazy.step(x, letter)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        growth.append(f"n={n}: DFA {d.num_states} ({minimize(d).num_states} minimal), "
                      f"reachable prefix tokens {len(seen)}")
    growth[0] += f", eager prefix DBA {b.num_states} ({minimize(b).num_states} minimal)"
    ok = finite_bad == 0 and lasso_bad == 0
    record(7, ok, f"{finite_bad} trace and {lasso_bad} lasso disagreements; " + "; ".join(growth))
    assert ok


def _cli_script(tmp: Path):
    sam = str(SAMPLES)
    return [
        (["check", "--system", f"{sam}/word.ts", "--formula", "G a | F b"], 0),
        (["check", "--system", f"{sam}/word.ts", "--formula", "F (a & b)"], 1),
        (["check", "--system", f"{sam}/two_step.ts", "--formula", "G a", "--cex", str(tmp / "cex")], 1),
        (["check", "--moore", f"{sam}/toggle.moore", "--formula", "G (req -> N grant)"], 0),
        (["check", "--system", f"{sam}/word.ts", "--formula", "a U"], 2),
        (["compile", "--formula", "a U b", "--target", "nfa"], 0),
        (["compile", "--formula", "G a | F b", "--target", "prefix-dba", "--minimize", "--emit", "dot"], 0),
        (["compile", "--formula", "a", "--target", "dfa", "--props", "b"], 2),
        (["translate", "--formula", "G (a & N b)"], 0),
        (["translate", "--formula", "a R b"], 2),
        (["gen", "tm", "--machine", f"{sam}/accept.tm", "--input", "1", "--out", str(tmp / "tm")], 0),
        (["check", "--system", str(tmp / "tm" / "system.ts"), "--formula-file", str(tmp / "tm" / "formula.ltlf")], 0),
        (["gen", "phin", "--n", "2", "--out", str(tmp / "phi")], 0),
        (["gen", "tm", "--machine", f"{sam}/missing.tm", "--input", "1", "--out", str(tmp / "x")], 2),
        (["fuzz", "--seed", "7", "--max-size", "6", "--trials", "200"], 0),
        (["fuzz", "--props", ""], 2),
    ]


def _outputs(tmp: Path, capsys):
    tmp.mkdir()
    outs = []
    for argv, code in _cli_script(tmp):
        got = run(argv)
        out = capsys.readouterr()
        outs.append((argv, code, got, out.out))
    files = {p.relative_to(tmp): p.read_bytes() for p in sorted(tmp.rglob("*")) if p.is_file()}
    return outs, files


def test_criterion_8_determinism_and_exit_codes(tmp_path, capsys, monkeypatch):
    first, files1 = _outputs(tmp_path / "one", capsys)
    second, files2 = _outputs(tmp_path / "two", capsys)
    codes_ok = all(code == got for _, code, got, _ in first + second)
    # stdout mentions output paths, which differ between the two runs
    same_out = all(a[3].replace("one", "") == b[3].replace("two", "") for a, b in zip(first, second))
    rng = random.Random(8)
    repeat_ok = True
    for _ in range(50):
        f = random_formula(rng.randrange(2 ** 32), 6, P)
        m = random_ts(rng.randrange(2 ** 32), 6, P, NONTERMINATING)
        a, b = check_nonterminating(m, f), check_nonterminating(m, f)
        repeat_ok &= a == b and (a.holds or dump_cex(a.counterexample) == dump_cex(b.counterexample))
    monkeypatch.setattr(cli, "certify_counterexample", lambda *a: Certificate(False, True, "forced"))
    internal = run(["check", "--system", str(SAMPLES / "word.ts"), "--formula", "F (a & b)"]) == 3
    capsys.readouterr()
    ok = codes_ok and same_out and files1 == files2 and repeat_ok and internal
    wrong = [(argv, code, got) for argv, code, got, _ in first if code != got]
    record(8, ok, f"{len(first)} CLI invocations x 2, exit codes {'as expected' if codes_ok else wrong}, "
                  f"outputs identical: {same_out and files1 == files2}, exit 3 on failed certification: {internal}")
    assert ok
