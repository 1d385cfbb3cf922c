"""Command-line front end.

Exit codes: 0 ok, 1 usage error, 2 formula parse error, 3 a requested check
failed, 4 a resource cap was exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from typing import List, Optional

from .automata import StateCapError, accepts, isomorphic, to_dot, to_json
from .compiler import CompileError, compile_formula
from .corpus import APPENDIX
from .logic.parser import FormulaSyntaxError, parse
from .logic.syntax import props_of
from .monitor import (EARLY_POSITIVE, NEGATIVE_TRANSFORM, check_absorbing, color_states,
                      coloring_to_dot, coloring_to_json, shape_rewards, shaping_invariance)
from .rewards import ModelError, build_extended_mdp, load_domain, load_spec
from .semantics import TraceCapError, enumerate_traces, satisfies
from .solve import SolverConfig, brute_force_value, simulate, value_iterate

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_CHECK, EXIT_CAP = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _props(text: Optional[str], formulas) -> List[str]:
    if text:
        return [p.strip() for p in text.split(",") if p.strip()]
    found = set()
    for f in formulas:
        found |= props_of(f)
    return sorted(found)


class Output:
    def __init__(self, args):
        self.json = args.json
        self.data = {}
        self.out_dir = args.out

    def line(self, text: str, **fields):
        self.data.update(fields)
        if not self.json:
            print(text)

    def write(self, name: str, content: str):
        if not self.out_dir:
            return
        os.makedirs(self.out_dir, exist_ok=True)
        with open(os.path.join(self.out_dir, name), "w") as fh:
            fh.write(content)

    def finish(self):
        if self.json:
            print(json.dumps(self.data, indent=2, sort_keys=True))


def _oracle(f, alphabet, dfa, max_len):
    count = mismatches = 0
    for tr in enumerate_traces(alphabet, max_len):
        count += 1
        if accepts(dfa, tr) != satisfies(tr, f):
            mismatches += 1
    return count, mismatches


# --------------------------------------------------------------------------
# commands


def cmd_compile(args, out: Output) -> int:
    f = parse(args.formula)
    alphabet = _props(args.props, [f])
    c = compile_formula(f, alphabet, direct_ltlf=args.direct_ltlf)
    out.line(f"formula: {f}", formula=str(f), alphabet=alphabet)
    out.line(f"NFA states={c.nfa.n_states} transitions={len(c.nfa.transitions)}",
             nfa_states=c.nfa.n_states, nfa_transitions=len(c.nfa.transitions))
    out.line(f"determinized states={c.dfa.n_states}", dfa_states=c.dfa.n_states)
    out.line(f"minimized DFA states={c.min_dfa.n_states}", min_dfa_states=c.min_dfa.n_states)
    out.write("nfa.json", json.dumps(to_json(c.nfa), indent=1))
    out.write("dfa.json", json.dumps(to_json(c.dfa), indent=1))
    out.write("min_dfa.json", json.dumps(to_json(c.min_dfa), indent=1))
    out.write("min_dfa.dot", to_dot(c.min_dfa))
    status = EXIT_OK
    if args.check_oracle is not None:
        count, bad = _oracle(f, alphabet, c.min_dfa, args.check_oracle)
        verdict = "PASS" if bad == 0 else "FAIL"
        out.line(f"oracle: {verdict} ({count} traces)" + (f", {bad} mismatches" if bad else ""),
                 oracle={"verdict": verdict, "traces": count, "mismatches": bad})
        status = EXIT_OK if bad == 0 else EXIT_CHECK
    return status


def cmd_check(args, out: Output) -> int:
    failures = 0
    if args.appendix:
        for item in APPENDIX:
            a = compile_formula(item.ltlf, item.alphabet).min_dfa
            b = compile_formula(item.ldlf, item.alphabet).min_dfa
            diff = sum(accepts(a, tr) != accepts(b, tr)
                       for tr in enumerate_traces(item.alphabet, args.max_len))
            same = isomorphic(a, b) and diff == 0
            failures += not same
            out.line(f"item {item.number:2d}: {'PASS' if same else 'FAIL'}  "
                     f"{item.ltlf}  vs  {item.ldlf}" + (f"  ({diff} traces differ)" if diff else ""),
                     **{f"item_{item.number}": same})
        return EXIT_OK if failures == 0 else EXIT_CHECK
    if not args.formulas:
        raise UsageError("check needs one or two formulas, or --appendix")
    formulas = [parse(t) for t in args.formulas]
    if len(formulas) > 2:
        raise UsageError("check takes at most two formulas")
    alphabet = _props(args.props, formulas)
    dfas = [compile_formula(f, alphabet).min_dfa for f in formulas]
    if len(formulas) == 1:
        count, bad = _oracle(formulas[0], alphabet, dfas[0], args.max_len)
        verdict = "PASS" if bad == 0 else "FAIL"
        out.line(f"oracle: {verdict} ({count} traces)", oracle=verdict, traces=count)
        return EXIT_OK if bad == 0 else EXIT_CHECK
    same = isomorphic(dfas[0], dfas[1])
    diff = [tr for tr in enumerate_traces(alphabet, args.max_len)
            if accepts(dfas[0], tr) != accepts(dfas[1], tr)]
    verdict = "PASS" if same and not diff else "FAIL"
    out.line(f"equivalence: {verdict} (minimal DFAs {'isomorphic' if same else 'differ'}; "
             f"{len(diff)} distinguishing traces up to length {args.max_len})",
             equivalent=verdict == "PASS", isomorphic=same, distinguishing=len(diff))
    if diff:
        witness = [sorted(x) for x in diff[0]]
        out.line(f"shortest witness: {witness}", witness=witness)
    return EXIT_OK if verdict == "PASS" else EXIT_CHECK


def _project(args):
    if not args.domain or not args.rewards:
        raise UsageError("--domain and --rewards are required")
    domain = load_domain(args.domain)
    spec = load_spec(args.rewards)
    if args.mode:
        spec.mode = "complete" if args.mode == "complete" else "prefix"
    if args.gamma is not None:
        spec.discount = args.gamma
    return domain, spec


def _solve(args, out: Output):
    domain, spec = _project(args)
    mdp = build_extended_mdp(domain, spec, action_props=args.action_props)
    gamma = spec.discount
    if gamma >= 1.0:
        raise UsageError("value iteration needs --gamma < 1")
    result = value_iterate(mdp, SolverConfig(gamma, args.epsilon))
    v0 = result.value[mdp.initial]
    out.line(f"|S'|={mdp.n_states} iterations={result.iterations} "
             f"residual={result.residual:.3e} V(init)={v0:.10g}",
             states=mdp.n_states, iterations=result.iterations, residual=result.residual,
             value_init=v0, action_init=result.policy[mdp.initial])
    return mdp, result


def cmd_solve(args, out: Output) -> int:
    mdp, result = _solve(args, out)
    out.write("policy.json", json.dumps(result.policy.to_json(), indent=1, sort_keys=True))
    out.write("value.json", json.dumps(result.value.to_json(), indent=1, sort_keys=True))
    status = EXIT_OK
    if args.brute_force:
        bf = brute_force_value(mdp, args.brute_force, mdp.spec.discount)[mdp.initial]
        gap = abs(bf - result.value[mdp.initial])
        r_max = max([abs(r) for r in mdp.reward.values()] + [0.0])
        g = mdp.spec.discount
        bound = g ** args.brute_force * r_max / (1 - g) + 1e-6
        verdict = "PASS" if gap <= bound else "FAIL"
        out.line(f"brute force H={args.brute_force}: {bf:.10g} (gap {gap:.2e}, bound {bound:.2e}) "
                 f"{verdict}", brute_force=bf, brute_force_check=verdict)
        status = EXIT_OK if verdict == "PASS" else EXIT_CHECK
    return status


def cmd_simulate(args, out: Output) -> int:
    mdp, result = _solve(args, out)
    stats = simulate(mdp, result.policy, args.episodes, args.horizon, args.seed)
    out.line(f"episodes={stats.episodes} mean={stats.mean:.6g} std={stats.std:.6g} "
             f"stderr={stats.stderr:.3g}", simulation=stats.to_json())
    for (f, _), frac in zip(mdp.spec.pairs, stats.triggered):
        out.line(f"  rewarded {frac:.3f}  {f}")
    return EXIT_OK


def cmd_monitor(args, out: Output) -> int:
    mdp = None
    if args.domain:
        domain, spec = _project(args)
        mdp = build_extended_mdp(domain, spec, action_props=args.action_props)
        formulas, dfas = spec.formulas, mdp.dfas
    else:
        if args.formula:
            formulas = [parse(args.formula)]
        elif args.rewards:
            formulas = load_spec(args.rewards).formulas
        else:
            raise UsageError("monitor needs a formula, --rewards, or --domain with --rewards")
        alphabet = _props(args.props, formulas)
        dfas = [compile_formula(f, alphabet).min_dfa for f in formulas]
    status = EXIT_OK
    colorings = []
    for i, (f, dfa) in enumerate(zip(formulas, dfas)):
        colors = color_states(dfa)
        colorings.append(colors)
        shown = ", ".join(f"{q}:{c.value}" for q, c in sorted(colors.items()))
        out.line(f"formula {i}: {f}  [{shown}]",
                 **{f"coloring_{i}": coloring_to_json(colors)})
        out.write(f"coloring_{i}.dot", coloring_to_dot(dfa, colors))
        problems = check_absorbing(dfa, colors)
        if problems:
            status = EXIT_CHECK
            out.line(f"  absorbing-colour check FAIL: {problems[0]}")
    if args.shape:
        if mdp is None:
            raise UsageError("--shape needs --domain and --rewards")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            shaped = shape_rewards(mdp, colorings, args.shape)
        for w in caught:
            out.line(f"warning: {w.message}", warning=str(w.message))
        out.line(f"shaped MDP states={shaped.n_states} ({shaped.note})", shaped_states=shaped.n_states)
        if args.shape == NEGATIVE_TRANSFORM:
            ok = shaping_invariance(mdp, shaped, args.max_len)
            out.line(f"invariance check (gamma=1, complete traces up to {args.max_len} steps): "
                     f"{'PASS' if ok else 'FAIL'}", invariance=ok)
            if not ok:
                status = EXIT_CHECK
    return status


def cmd_export_dot(args, out: Output) -> int:
    f = parse(args.formula)
    alphabet = _props(args.props, [f])
    c = compile_formula(f, alphabet)
    aut = {"nfa": c.nfa, "dfa": c.dfa, "min": c.min_dfa}[args.kind]
    text = to_dot(aut)
    if args.out:
        out.write(f"{args.kind}.dot", text)
    if args.json:
        out.data["dot"] = text
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--props", help="comma-separated proposition names (alphabet order)")
    common.add_argument("--gamma", type=float, help="discount factor")
    common.add_argument("--epsilon", type=float, default=1e-8, help="value-iteration tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument("--mode", choices=["prefix", "complete"], help="reward mode override")
    common.add_argument("--action-props", action="store_true",
                        help="add one p_<action> proposition per step")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", metavar="DIR", help="directory for written artifacts")

    parser = _Parser(prog="nmrdp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compile", parents=[common], help="compile a formula to automata")
    p.add_argument("formula")
    p.add_argument("--check-oracle", type=int, metavar="N",
                   help="compare with the direct semantics on all traces up to length N")
    p.add_argument("--direct-ltlf", action="store_true", help="use the LTLf rows of delta")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("check", parents=[common], help="oracle or equivalence checks")
    p.add_argument("formulas", nargs="*")
    p.add_argument("--max-len", type=int, default=5)
    p.add_argument("--appendix", action="store_true", help="check the bundled LTLf/LDLf pairs")
    p.set_defaults(func=cmd_check)

    for name, func in (("solve", cmd_solve), ("simulate", cmd_simulate)):
        p = sub.add_parser(name, parents=[common], help=f"{name} a project")
        p.add_argument("--domain", required=True)
        p.add_argument("--rewards", required=True)
        if name == "solve":
            p.add_argument("--brute-force", type=int, metavar="H",
                           help="also compare with exact H-step backward induction")
        else:
            p.add_argument("--episodes", type=int, default=1000)
            p.add_argument("--horizon", type=int, default=200)
        p.set_defaults(func=func)

    p = sub.add_parser("monitor", parents=[common], help="colour DFA states; shape rewards")
    p.add_argument("formula", nargs="?")
    p.add_argument("--domain")
    p.add_argument("--rewards")
    p.add_argument("--shape", choices=[EARLY_POSITIVE, NEGATIVE_TRANSFORM])
    p.add_argument("--max-len", type=int, default=5)
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("export-dot", parents=[common], help="print GraphViz for a formula")
    p.add_argument("formula")
    p.add_argument("--kind", choices=["nfa", "dfa", "min"], default="min")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args)
    try:
        code = args.func(args, out)
    except FormulaSyntaxError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (StateCapError, TraceCapError) as err:
        print(f"resource cap exceeded: {err}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, CompileError, ModelError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    out.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
