"""Command-line driver.

Exit codes: 0 success / property holds, 1 property violated or fuzz
disagreement, 2 usage or input error, 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import __version__
from .automata import AutomatonError, dba_accepts_lasso, minimize, nfa_accepts, to_dot, dump_aut
from .compile import (
    FragmentError, in_fragment, ltlf_to_dfa, ltlf_to_nfa, prefix_dba, translate_fragment,
)
from .formula import (
    FormulaError, Lasso, atoms, enumerate_traces, evaluate, evaluate_prefixes, parse_formula,
    random_formula, render_formula,
)
from .hardness import MachineError, gen_phi_n, gen_tm_instance, parse_tm, simulate_tm
from .modelcheck import (
    ModelCheckError, bounded_oracle_check, certify_counterexample, check_nonterminating,
    check_terminating, dump_cex,
)
from .systems import (
    NONTERMINATING, TERMINATING, SystemFormatError, moore_to_ts, parse_moore, parse_ts,
    random_ts, render_ts,
)

EXIT_HOLDS, EXIT_VIOLATED, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
INPUT_ERRORS = (FormulaError, SystemFormatError, MachineError, AutomatonError, ModelCheckError, OSError)


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _formula(args) -> object:
    if (args.formula is None) == (args.formula_file is None):
        raise UsageError("give exactly one of --formula and --formula-file")
    text = args.formula if args.formula is not None else _read(args.formula_file)
    return parse_formula(text)


def _add_formula(p: argparse.ArgumentParser) -> None:
    p.add_argument("--formula", help="LTLf formula text")
    p.add_argument("--formula-file", help="file containing the formula")


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    f = _formula(args)
    if (args.system is None) == (args.moore is None):
        raise UsageError("give exactly one of --system and --moore")
    if args.system is not None:
        m = parse_ts(_read(args.system))
    else:
        m = moore_to_ts(parse_moore(_read(args.moore)), terminal_continue=args.terminal_continue)
    mode = m.kind if args.mode == "auto" else args.mode
    if mode != m.kind:
        raise UsageError(f"--mode {mode} does not match the {m.kind} system")
    verdict = check_terminating(m, f) if mode == TERMINATING else check_nonterminating(m, f)
    for w in verdict.warnings:
        print(f"warning: {w}", file=sys.stderr)
    stats = " ".join(f"{k}={v}" for k, v in verdict.stats.items() if k != "seconds")
    if verdict.holds:
        print(f"holds ({mode}; {stats})")
        return EXIT_HOLDS
    cert = certify_counterexample(m, f, verdict.counterexample)
    if not cert:
        print(f"error: counterexample failed certification: {cert.reason}", file=sys.stderr)
        return EXIT_INTERNAL
    print(f"violated ({mode}; {stats})")
    text = dump_cex(verdict.counterexample)
    if args.cex:
        _write(args.cex, text)
    else:
        sys.stdout.write(text)
    return EXIT_VIOLATED


# ---------------------------------------------------------------------------
# compile / translate
# ---------------------------------------------------------------------------


def cmd_compile(args) -> int:
    f = _formula(args)
    props = args.props.split(",") if args.props else sorted(atoms(f))
    if args.target == "nfa":
        a = ltlf_to_nfa(f, props)
    elif args.target == "dfa":
        a = ltlf_to_dfa(f, props)
    else:
        a = prefix_dba(f, props)
    if args.minimize and args.target != "nfa":
        a = minimize(a)
    _write(args.out, dump_aut(a) if args.emit == "aut" else to_dot(a))
    return EXIT_HOLDS


def cmd_translate(args) -> int:
    f = _formula(args)
    if not in_fragment(f):
        print("error: formula is outside the translatable fragment (no R, W, ->, <->; "
              "negation and disjunction only over propositional subformulas)", file=sys.stderr)
        return EXIT_USAGE
    print(render_formula(translate_fragment(f), "ltl"))
    return EXIT_HOLDS


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def cmd_gen_tm(args) -> int:
    tm = parse_tm(_read(args.machine))
    word = list(args.input)
    inst = gen_tm_instance(tm, word, args.c)
    sim = simulate_tm(tm, word, c=args.c)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "system.ts").write_text(render_ts(inst.system), encoding="utf-8")
    (out / "formula.ltlf").write_text(render_formula(inst.formula) + "\n", encoding="utf-8")
    print(f"wrote {out / 'system.ts'} ({len(inst.system.states)} states) and "
          f"{out / 'formula.ltlf'}; cn={inst.cn}; simulator: {sim.outcome} ({sim.reason})")
    return EXIT_HOLDS


def cmd_gen_phin(args) -> int:
    phi = gen_phi_n(args.n)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"phi_{args.n}.ltlf"
    path.write_text(render_formula(phi) + "\n", encoding="utf-8")
    print(f"wrote {path}")
    return EXIT_HOLDS


# ---------------------------------------------------------------------------
# fuzz
# ---------------------------------------------------------------------------


def _props_arg(text: str) -> list[str]:
    if text.isdigit():
        return [chr(ord("a") + i) for i in range(int(text))]
    return [p for p in text.split(",") if p]


def _random_lasso(rng: random.Random, letters: list, max_len: int) -> Lasso:
    total = rng.randint(1, max_len)
    cyc = rng.randint(1, total)
    return Lasso([rng.choice(letters) for _ in range(total - cyc)],
                 [rng.choice(letters) for _ in range(cyc)])


def fuzz(seed: int, max_size: int, props: list[str], trials: int, out=sys.stdout) -> dict[str, int]:
    """Run the oracle-agreement suites; returns disagreement counts per suite."""
    from .formula import all_letters

    rng = random.Random(seed)
    letters = all_letters(tuple(sorted(props)))
    traces = enumerate_traces(props, 3)
    failures = {"nfa": 0, "prefix": 0, "terminating": 0, "nonterminating": 0}
    for k in range(trials):
        s = rng.randrange(2 ** 32)
        f = random_formula(s, max_size, props)
        nfa = ltlf_to_nfa(f, props)
        if any(nfa_accepts(nfa, t) != evaluate(f, t) for t in traces):
            failures["nfa"] += 1
            print(f"nfa disagreement: {render_formula(f)}", file=out)
        dba = prefix_dba(f, props)
        n = ltlf_to_dfa(f, props).num_states
        for _ in range(5):
            w = _random_lasso(rng, letters, 5)
            bound = len(w.stem) + len(w.cycle) * (n + 1)
            direct = bool(evaluate_prefixes(f, [w.letter(i) for i in range(bound)]).all())
            if dba_accepts_lasso(dba, w) != direct:
                failures["prefix"] += 1
                print(f"prefix automaton disagreement: {render_formula(f)} on {w}", file=out)
        for mode, bound in ((TERMINATING, 6), (NONTERMINATING, 5)):
            m = random_ts(s, 6, props, mode)
            v = check_terminating(m, f) if mode == TERMINATING else check_nonterminating(m, f)
            o = bounded_oracle_check(m, f, mode, bound)
            if not agree(v, o, bound) or (not v.holds and not certify_counterexample(m, f, v.counterexample)):
                failures[mode] += 1
                print(f"{mode} disagreement (trial {k}): {render_formula(f)}", file=out)
    return failures


def agree(verdict, oracle, bound: int) -> bool:
    """Oracle violations are exact; a checker violation beyond the bound may be an oracle bounded-hold."""
    if not oracle.holds:
        return not verdict.holds
    if verdict.holds:
        return True
    c = verdict.counterexample
    length = len(c.states) if hasattr(c, "states") else len(c.stem) + len(c.cycle)
    return length > bound


def cmd_fuzz(args) -> int:
    props = _props_arg(args.props)
    if not props:
        raise UsageError("--props must name at least one proposition")
    failures = fuzz(args.seed, args.max_size, props, args.trials)
    for suite, count in failures.items():
        print(f"{suite}: {'ok' if count == 0 else f'{count} disagreements'}")
    return EXIT_HOLDS if not any(failures.values()) else EXIT_VIOLATED


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ltlfmc", description="LTLf model checking toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="model check a system against an LTLf formula")
    p.add_argument("--system", help="transition system in ts format")
    p.add_argument("--moore", help="Moore machine in moore format")
    _add_formula(p)
    p.add_argument("--mode", choices=["auto", TERMINATING, NONTERMINATING], default="auto")
    p.add_argument("--cex", help="write the counterexample here instead of stdout")
    p.add_argument("--terminal-continue", action="store_true",
                   help="keep outgoing edges of terminal pairs when converting a Moore machine")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("compile", help="compile a formula to an automaton")
    _add_formula(p)
    p.add_argument("--target", choices=["nfa", "dfa", "prefix-dba"], required=True)
    p.add_argument("--emit", choices=["aut", "dot"], default="aut")
    p.add_argument("--props", help="comma-separated alphabet (default: the formula's atoms)")
    p.add_argument("--minimize", action="store_true")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(run=cmd_compile)

    p = sub.add_parser("translate", help="translate a fragment formula to LTL")
    _add_formula(p)
    p.set_defaults(run=cmd_translate)

    p = sub.add_parser("gen", help="generate lower-bound instances")
    gen = p.add_subparsers(dest="what", required=True)
    g = gen.add_parser("tm", help="Turing machine reduction instance")
    g.add_argument("--machine", required=True)
    g.add_argument("--input", required=True)
    g.add_argument("--c", type=int, default=None, help="override the space constant")
    g.add_argument("--out", required=True)
    g.set_defaults(run=cmd_gen_tm)
    g = gen.add_parser("phin", help="formula phi_n")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(run=cmd_gen_phin)

    p = sub.add_parser("fuzz", help="random oracle-agreement suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-size", type=int, default=6)
    p.add_argument("--props", default="a,b", help="comma list or a count")
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(run=cmd_fuzz)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_HOLDS
    try:
        return args.run(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FragmentError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (AssertionError, RecursionError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())
