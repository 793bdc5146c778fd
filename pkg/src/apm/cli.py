"""Command line interface: ``apm COMMAND SPEC [TERM] [options]``.

Exit codes: 0 confluent / ok, 1 non-confluent / violation found,
2 unknown, 3 input error.
"""
from __future__ import annotations

import argparse
import os
import sys

from .errors import ApmError
from .steps import Bounds

EXIT_OK, EXIT_VIOLATION, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3

COMMANDS = ("check", "critical-pairs", "normalize", "rewrite", "quotient", "termination")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apm", description="Rewriting modulo algebraic theories.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("spec", help="spec file")
    common.add_argument("--format", choices=("text", "json", "dot"), default="text")
    common.add_argument("--max-class", type=int)
    common.add_argument("--max-terms", type=int)
    common.add_argument("--max-depth", type=int)
    common.add_argument("--insertion-bound", type=int)
    common.add_argument("--join-depth", type=int)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="confluence report (Newman lemma modulo)")
    sub.add_parser("critical-pairs", parents=[common], help="list critical branchings")
    p = sub.add_parser("normalize", parents=[common], help="canonical form of a term")
    p.add_argument("term")
    p = sub.add_parser("rewrite", parents=[common], help="steps and reachability from a term")
    p.add_argument("term")
    sub.add_parser("quotient", parents=[common], help="quotient rewriting system")
    p = sub.add_parser("termination", parents=[common], help="termination taxonomy")
    p.add_argument("--seed-terms", metavar="FILE", help="one seed term per line")
    return parser


def _bounds(spec, args) -> Bounds:
    values = {k.replace("-", "_"): v for k, v in spec.bounds.items()}
    env = os.environ.get("APM_MAX_TERMS")
    if env:
        if not env.isdigit() or int(env) < 1:
            raise ValueError(f"APM_MAX_TERMS must be a positive integer, got {env!r}")
        values["max_terms"] = int(env)
    for name in ("max_class", "max_terms", "max_depth", "insertion_bound", "join_depth"):
        v = getattr(args, name)
        if v is not None:
            if v < 1:
                raise ValueError(f"--{name.replace('_', '-')} must be at least 1")
            values[name] = v
    return Bounds(**values)


def run_command(cmd: str, spec_path: str, args) -> tuple[int, dict]:
    from . import report as rp
    from .confluence import critical_branchings, newman_confluence_report, quotient_system
    from .engine import find_redexes, quasi_normal_form, reachability, termination_check
    from .paradigms import ParadigmSpec, parse_any, render_native
    from .specfile import load_spec
    from .strategy import sigma_representative

    spec = load_spec(spec_path)
    apm = spec.build(_bounds(spec, args))
    p = ParadigmSpec(apm.paradigm)
    if cmd == "check":
        seeds = spec.seed_terms(apm) or None
        v = newman_confluence_report(apm, seeds=seeds)
        r = rp.check_report(apm, v, spec_path)
        r["diagnostics"] = spec.diagnostics
        code = {"CONFLUENT": EXIT_OK, "NON_CONFLUENT": EXIT_VIOLATION}.get(v.status, EXIT_UNKNOWN)
        return code, r
    if cmd == "critical-pairs":
        crit, completeness = critical_branchings(apm)
        return EXIT_OK, rp.critical_report(apm, crit, completeness, spec_path)
    if cmd == "quotient":
        q = quotient_system(apm)
        r = rp.header(apm, "quotient", spec_path)
        r.update({"presentation": q.render(), "rules": q.rules, "positive_rules": q.positive_rules})
        return EXIT_OK, r
    if cmd == "termination":
        if args.seed_terms:
            with open(args.seed_terms, encoding="utf-8") as fh:
                seeds = [parse_any(p, line.strip(), apm.signature) for line in fh
                         if line.strip() and not line.lstrip().startswith("#")]
        else:
            seeds = spec.seed_terms(apm) or None
        v = termination_check(apm, seeds)
        code = {"TERMINATING": EXIT_OK, "QUASI_TERMINATING": EXIT_OK, "EXPONENTIATION_DETECTED": EXIT_VIOLATION,
                "NON_TERMINATING_EVIDENCE": EXIT_VIOLATION}.get(v.kind, EXIT_UNKNOWN)
        return code, rp.termination_report(apm, v, spec_path)
    t = parse_any(p, args.term, apm.signature)
    if cmd == "normalize":
        rep = sigma_representative(apm.strategy, t, apm) if apm.paradigm == "generic" else t
        r = rp.header(apm, "normalize", spec_path)
        r.update({"term": rp._term(apm, t), "normal_form": render_native(p, rep),
                  "representative": rp._term(apm, rep)})
        return EXIT_OK, r
    # rewrite
    steps = find_redexes(apm, t)
    g = reachability(apm, [t])
    r = rp.header(apm, "rewrite", spec_path)
    r.update({
        "term": rp._term(apm, t),
        "steps": [rp.step_dict(apm, s) for s in steps],
        "reachability": {"nodes": len(g), "complete": g.complete,
                         "classes": [apm.backend.render(k) for k in g.keys[:50]]},
    })
    if g.complete:
        q, d = quasi_normal_form(apm, t)
        r["quasi_normal_form"] = {"term": render_native(p, q), "distance": d}
    return EXIT_OK, r


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    from .report import emit_report

    try:
        code, report = run_command(args.command, args.spec, args)
    except (ApmError, ValueError, OSError, KeyError) as e:
        print(f"apm: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(emit_report(report, args.format).decode())
    return code


if __name__ == "__main__":
    sys.exit(main())
