"""Report construction and serialization (text, JSON, DOT)."""
from __future__ import annotations

import json

from .terms import format_term

SCHEMA = "apm-report/1"


def _term(apm, t):
    return format_term(t, apm.signature)


def _native(apm, t):
    from .paradigms import ParadigmSpec, render_native

    try:
        return render_native(ParadigmSpec(apm.paradigm), t)
    except Exception:
        return _term(apm, t)


def trace_dict(apm, tr):
    if tr is None:
        return None
    if tr.steps is None:
        return {"certificate": tr.certificate, "source": _term(apm, tr.source), "target": _term(apm, tr.target)}
    return [
        {"position": list(ctx.path), "axiom": inst.rule.name, "direction": inst.direction,
         "result": _term(apm, ctx(inst.target))}
        for ctx, inst in tr.steps
    ]


def step_dict(apm, st):
    return {
        "source": _term(apm, st.source),
        "e_trace": trace_dict(apm, st.pre) or [],
        "redex": _term(apm, st.redex_source),
        "position": list(st.context.path),
        "rule": st.rule.name,
        "e_prime_trace": trace_dict(apm, st.post) or [],
        "target": _term(apm, st.target),
    }


def path_dict(apm, path):
    if path is None:
        return None
    return [step_dict(apm, s) for s in path.steps]


def join_dict(apm, j):
    b = apm.paradigm_backend
    d = {"status": j.status, "left": b.render(j.left), "right": b.render(j.right)}
    if j.status == "CONFLUENT":
        d["diagram"] = {
            "meet": b.render(j.meet),
            "left_path": path_dict(apm, j.left_path),
            "right_path": path_dict(apm, j.right_path),
            "closing_equivalence": trace_dict(apm, j.equiv),
        }
    elif j.status == "NON_CONFLUENT":
        d["witnesses"] = [[b.render(k) for k in ws] for ws in j.witnesses]
    if j.note:
        d["note"] = j.note
    return d


def branching_dict(apm, cb, j):
    b = apm.paradigm_backend
    if cb is None:
        out = {"source": None, "kind": "sampled"}
    else:
        out = {
            "source": cb.render,
            "kind": cb.kind,
            "left_rule": cb.left.rule.name,
            "right_rule": cb.right.rule.name,
            "left_target": b.render(cb.left.target),
            "right_target": b.render(cb.right.target),
        }
    out.update(join_dict(apm, j))
    return out


def header(apm, command, spec_path=None):
    return {
        "schema": SCHEMA,
        "command": command,
        "spec": spec_path,
        "theory": apm.theory.name,
        "paradigm": apm.paradigm,
        "policy": apm.policy.value,
        "strategy": apm.strategy.describe(),
        "bounds": apm.bounds.as_dict(),
    }


def check_report(apm, verdict, spec_path=None):
    r = header(apm, "check", spec_path)
    pre = verdict.preconditions
    crit = [(cb, j) for cb, j in verdict.diagrams if cb is None or cb.kind != "additive"]
    additive = [(cb, j) for cb, j in verdict.diagrams if cb is not None and cb.kind == "additive"]
    r.update({
        "verdict": verdict.status,
        "preconditions": {
            "quasi_termination": pre.get("quasi_termination"),
            "quasi_termination_note": pre.get("quasi_termination_note"),
            "positive_confluence": pre.get("positive_confluence"),
        },
        "critical_branchings": [branching_dict(apm, cb, j) for cb, j in crit],
        "completeness": verdict.completeness,
        "notes": list(verdict.notes),
    })
    tv = pre.get("termination_verdict")
    if tv is not None and tv.cycle is not None:
        r["preconditions"]["cycle_witness"] = path_dict(apm, tv.cycle)
    if additive:
        r["additive_branchings"] = [branching_dict(apm, cb, j) for cb, j in additive]
    return r


def critical_report(apm, crit, completeness, spec_path=None):
    b = apm.paradigm_backend
    r = header(apm, "critical-pairs", spec_path)
    r["critical_branchings"] = [
        {"source": cb.render, "kind": cb.kind, "left_rule": cb.left.rule.name, "right_rule": cb.right.rule.name,
         "left_target": b.render(cb.left.target), "right_target": b.render(cb.right.target)}
        for cb in crit
    ]
    r["completeness"] = completeness
    return r


def termination_report(apm, v, spec_path=None):
    r = header(apm, "termination", spec_path)
    r.update({
        "verdict": v.kind,
        "quasi_termination": v.quasi_terminating,
        "complete": v.complete,
        "proved": v.proof,
        "nodes": v.nodes,
        "note": v.note,
        "witness": path_dict(apm, v.witness),
        "cycle": path_dict(apm, v.cycle),
    })
    for key, path in (("cycle", v.cycle), ("witness", v.witness)):
        if path is not None and path.steps:
            r[key + "_native"] = [_native(apm, path.steps[0].source)] + [_native(apm, s.target) for s in path.steps]
    return r


# -- emitters -------------------------------------------------------------------------


def to_json(report) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _text_branching(d, indent="  "):
    lines = [f"{indent}{d.get('source') or '(sampled)'} [{d.get('kind')}]: {d.get('left_target', d.get('left'))} <- -> "
             f"{d.get('right_target', d.get('right'))}  {d['status']}"]
    if d["status"] == "CONFLUENT":
        lines.append(f"{indent}  joins at {d['diagram']['meet']}")
    elif d["status"] == "NON_CONFLUENT":
        w = d["witnesses"]
        lines.append(f"{indent}  irreducible witnesses: {', '.join(w[0])} | {', '.join(w[1])}")
    if d.get("note"):
        lines.append(f"{indent}  {d['note']}")
    return lines


def to_text(report) -> str:
    cmd = report["command"]
    out = [f"{cmd}: theory {report['theory']}, paradigm {report['paradigm']}, policy {report['policy']}, "
           f"strategy {report['strategy']}"]
    if cmd == "check":
        out.append(f"verdict: {report['verdict']}")
        pre = report["preconditions"]
        out.append(f"quasi-termination: {pre['quasi_termination']}"
                   + (f" ({pre['quasi_termination_note']})" if pre.get("quasi_termination_note") else ""))
        out.append(f"positive confluence: {pre['positive_confluence']}")
        out.append(f"critical branchings ({report['completeness']}): {len(report['critical_branchings'])}")
        for d in report["critical_branchings"]:
            out.extend(_text_branching(d))
        add = report.get("additive_branchings")
        if add:
            bad = [d for d in add if d["status"] != "CONFLUENT"]
            out.append(f"additive branchings: {len(add)}, not closed: {len(bad)}")
            for d in bad:
                out.extend(_text_branching(d))
        for n in report["notes"]:
            out.append(f"note: {n}")
    elif cmd == "critical-pairs":
        out.append(f"critical branchings ({report['completeness']}): {len(report['critical_branchings'])}")
        for d in report["critical_branchings"]:
            out.append(f"  {d['source']} [{d['kind']}]: {d['left_rule']} -> {d['left_target']}, "
                       f"{d['right_rule']} -> {d['right_target']}")
    elif cmd == "termination":
        out.append(f"verdict: {report['verdict']}" + (" (proved)" if report["proved"] else ""))
        out.append(f"quasi-termination: {report['quasi_termination']}")
        if report["note"]:
            out.append(f"note: {report['note']}")
        for key in ("cycle", "witness"):
            if report.get(key + "_native"):
                out.append(f"{key}: " + " -> ".join(report[key + "_native"]))
    elif cmd == "quotient":
        out.append(report["presentation"])
        out.append("positive rules: " + (", ".join(f"{l} => {r}" for _, l, r in report["positive_rules"]) or "none"))
    elif cmd == "normalize":
        out = [report["normal_form"]]
    elif cmd == "rewrite":
        out.append(f"term: {report['term']}")
        for s in report["steps"]:
            out.append(f"  {s['rule']} at {s['position']}: {s['source']} ~> {s['redex']} => {s['target']}")
        g = report["reachability"]
        out.append(f"reachable classes: {g['nodes']} (complete: {g['complete']})")
        if report.get("quasi_normal_form"):
            q = report["quasi_normal_form"]
            out.append(f"quasi-normal form: {q['term']} at distance {q['distance']}")
    return "\n".join(out) + "\n"


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(report) -> str:
    lines = ["digraph apm {", "  rankdir=TB;"]
    branchings = list(report.get("critical_branchings", [])) + list(report.get("additive_branchings", []))
    for i, d in enumerate(branchings):
        lines.append(f"  subgraph cluster_{i} {{")
        lines.append(f"    label={_dot_id((d.get('source') or 'sampled') + ' ' + d.get('status', ''))};")
        src = f"b{i}_src"
        lines.append(f"    {src} [label={_dot_id(d.get('source') or '?')}];")
        lt = d.get("left_target", d.get("left"))
        rt = d.get("right_target", d.get("right"))
        lines.append(f"    b{i}_l [label={_dot_id(lt)}];")
        lines.append(f"    b{i}_r [label={_dot_id(rt)}];")
        lines.append(f"    {src} -> b{i}_l [label={_dot_id(d.get('left_rule', ''))}];")
        lines.append(f"    {src} -> b{i}_r [label={_dot_id(d.get('right_rule', ''))}];")
        if d.get("status") == "CONFLUENT":
            lines.append(f"    b{i}_m [label={_dot_id(d['diagram']['meet'])}];")
            lines.append(f"    b{i}_l -> b{i}_m [style=dashed];")
            lines.append(f"    b{i}_r -> b{i}_m [style=dashed];")
        lines.append("  }")
    for key in ("cycle", "witness"):
        path = report.get(key)
        if path:
            names = [path[0]["source"]] + [s["target"] for s in path]
            for j, n in enumerate(names):
                lines.append(f"  {key}_{j} [label={_dot_id(n)}];")
            for j in range(len(names) - 1):
                lines.append(f"  {key}_{j} -> {key}_{j + 1} [label={_dot_id(path[j]['rule'])}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_report(report, fmt: str = "text") -> bytes:
    if fmt == "json":
        return to_json(report).encode()
    if fmt == "dot":
        return to_dot(report).encode()
    if fmt == "text":
        return to_text(report).encode()
    raise ValueError(f"unknown format {fmt!r}")
