"""Branchings, critical branchings, joinability modulo and confluence reports."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import networkx as nx

from .backends import Move
from .engine import (
    AlgebraicPolygraphModulo,
    ReachGraph,
    reachability,
    realize_path,
    termination_check,
)
from .errors import NotLeftMonomial, NotLocal
from .normalize import Polynomial, group_inverse, group_mul
from .steps import Bounds, EquivTrace, Policy, RewritingPath, RewritingStep
from .strategy import PositiveStrategy, StrategyKind, positive_confluence_check
from .terms import Context, Var, disjoint, format_term, term_size
from .theories import groundify_matches

TRIVIAL = "TRIVIAL"
INCLUSION_INDEPENDENT = "INCLUSION_INDEPENDENT"
ORTHOGONAL = "ORTHOGONAL"
NON_ORTHOGONAL = "NON_ORTHOGONAL"

CONFLUENT = "CONFLUENT"
NON_CONFLUENT = "NON_CONFLUENT"
UNKNOWN = "UNKNOWN"


@dataclass
class Branching:
    """``left`` from e₋, ``equiv`` from e₋ to e₊, ``right`` from e₊."""

    left: RewritingPath
    equiv: EquivTrace
    right: RewritingPath

    @property
    def source(self):
        return self.left.source

    def is_local(self) -> bool:
        return self.left.length == 1 and (self.equiv.length or 0) + self.right.length == 1


@dataclass
class CriticalBranching:
    branching: Branching
    source: object  # class key
    left: Move
    right: Move
    kind: str = "overlap"
    render: str = ""


@dataclass
class JoinResult:
    status: str
    left: object
    right: object
    meet: object = None
    left_path: RewritingPath | None = None
    right_path: RewritingPath | None = None
    equiv: EquivTrace | None = None
    witnesses: tuple = ()
    depth: int = 0
    note: str = ""


@dataclass
class ConfluenceVerdict:
    status: str
    diagrams: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)
    preconditions: dict = field(default_factory=dict)
    critical: list = field(default_factory=list)
    complete: bool = False
    completeness: str = "EXACT"
    notes: list = field(default_factory=list)


# -- classification -------------------------------------------------------------------


def _through_variable(pattern, rel) -> bool:
    t = pattern
    for i in rel:
        if isinstance(t, Var):
            return True
        t = t.args[i - 1]
    return isinstance(t, Var)


def _interval(step: RewritingStep):
    info = step.info
    if not info:
        return None
    if info[0] == "string":
        from .normalize import assoc_flatten

        n = len(assoc_flatten(step.rule.lhs, "mu", None))
        return ("w", info[1], info[1] + n)
    if info[0] == "linear":
        from .normalize import linear_canonical

        lam, pw, qw = info[1:]
        lw = linear_canonical(step.rule.lhs).items()[0][0]
        return ("m", pw + lw + qw, len(pw), len(pw) + len(lw))
    return None


def classify_local_branching(b: Branching) -> str:
    if not b.is_local():
        raise NotLocal("branching is not local")
    a = b.left.steps[0]
    if b.right.length == 1:
        c = b.right.steps[0]
        if a.rule == c.rule and a.context == c.context and a.redex_source == c.redex_source:
            return TRIVIAL
        if a.redex_source == c.redex_source and (a.pre is None or a.pre.length == 0) and (c.pre is None or c.pre.length == 0):
            return ORTHOGONAL if disjoint(a.context.path, c.context.path) else NON_ORTHOGONAL
        ia, ic = _interval(a), _interval(c)
        if ia and ic and ia[0] == ic[0] == "w":
            return ORTHOGONAL if ia[2] <= ic[1] or ic[2] <= ia[1] else NON_ORTHOGONAL
        if ia and ic and ia[0] == ic[0] == "m":
            if ia[1] != ic[1]:
                return ORTHOGONAL
            return ORTHOGONAL if ia[3] <= ic[2] or ic[3] <= ia[2] else NON_ORTHOGONAL
        return NON_ORTHOGONAL
    # (a, e) with e a single axiom application
    (ctx, inst), = b.equiv.steps
    base = a.redex_source
    if b.equiv.source != base:
        return NON_ORTHOGONAL
    p, q = a.context.path, ctx.path
    if disjoint(p, q):
        return ORTHOGONAL
    if p[:len(q)] == q and len(p) > len(q):
        pattern = inst.rule.lhs if inst.direction == "+" else inst.rule.rhs
        if _through_variable(pattern, p[len(q):]):
            return INCLUSION_INDEPENDENT
    return NON_ORTHOGONAL


# -- critical branchings ---------------------------------------------------------------------


def _branching_from(apm, backend, key, m1: Move, m2: Move) -> Branching:
    t = backend.term(key)
    a = backend.realize(t, m1)
    b = backend.realize(t, m2)
    return Branching(RewritingPath([a], t), EquivTrace.empty(t), RewritingPath([b], t))


def _word_pairs(rules):
    """Overlaps and proper inclusions among words ``(rule, word)``."""
    out = []
    for (r1, l1), (r2, l2) in product(rules, repeat=2):
        n1, n2 = len(l1), len(l2)
        for k in range(1, min(n1, n2)):
            if l1[n1 - k:] == l2[:k]:
                out.append((l1 + l2[k:], (r1, 0), (r2, n1 - k), "overlap"))
        if n2 <= n1:
            for i in range(n1 - n2 + 1):
                if l1[i:i + n2] == l2 and (r1, 0) != (r2, i) and not (n1 == n2 and r1.name > r2.name):
                    out.append((l1, (r1, 0), (r2, i), "inclusion"))
    return out


def _dedupe(cbs, backend):
    seen, out = set(), []
    for cb in cbs:
        sig = (cb.source, frozenset([(cb.left.rule.name, cb.left.data), (cb.right.rule.name, cb.right.data)]))
        if sig in seen:
            continue
        seen.add(sig)
        out.append(cb)
    out.sort(key=lambda cb: (backend.order_key(cb.source), cb.render))
    return out


def _string_critical(apm, backend):
    rules = [(r, l) for r, l, _ in backend.rules]
    cbs = []
    for w, (r1, i), (r2, j), kind in _word_pairs(rules):
        ms, _ = backend.moves(w)
        m1 = next(m for m in ms if m.rule == r1 and m.data == (i,))
        m2 = next(m for m in ms if m.rule == r2 and m.data == (j,))
        cbs.append(CriticalBranching(_branching_from(apm, backend, w, m1, m2), w, m1, m2, kind, backend.render(w)))
    return _dedupe(cbs, backend), "EXACT"


def _linear_critical(apm, backend):
    bad = [r.name for r, L, R, lw in backend.rules if lw is None]
    if bad:
        raise NotLeftMonomial(f"rules with a non-monomial source: {', '.join(bad)}")
    rules = [(r, lw) for r, L, R, lw in backend.rules]
    cbs = []
    for w, (r1, i), (r2, j), kind in _word_pairs(rules):
        p = Polynomial.monomial(w)
        ms, _ = backend.moves(p, positive_only=True)
        m1 = next(m for m in ms if m.rule == r1 and m.data[1] == w[:i])
        m2 = next(m for m in ms if m.rule == r2 and m.data[1] == w[:j])
        cbs.append(CriticalBranching(_branching_from(apm, backend, p, m1, m2), p, m1, m2, kind, backend.render(p)))
    return _dedupe(cbs, backend), "EXACT"


def _group_critical(apm, backend, insertion_bound):
    sides = []
    for rule, r1, r2 in backend.rules:
        for eps in (1, -1):
            a, b = (r1, r2) if eps > 0 else (group_inverse(r1), group_inverse(r2))
            sides.append((rule, eps, a, b))
    [c.name for c in apm.constants]
    cands = []
    for (ra, ea, a, _), (rb, eb, b2, _) in product(sides, repeat=2):
        na, nb = len(a), len(b2)
        for k in range(1, min(na, nb)):
            if a[na - k:] == b2[:k]:
                w = a + b2[k:]
                cands.append((w, (ra, ea, ()), (rb, eb, a[:na - k]), "overlap"))
        if nb <= na:
            for i in range(na - nb + 1):
                if a[i:i + nb] == b2 and ((ra, ea) != (rb, eb) or i != 0):
                    cands.append((a, (ra, ea, ()), (rb, eb, a[:i]), "inclusion"))
        # overlaps through cancellation, with up to ``insertion_bound`` letters between
        for n in range(insertion_bound + 1):
            for y in backend._words(n) if n else [()]:
                w = group_mul(a, y, b2)
                if len(w) >= na + nb + n or not w:
                    continue
                cands.append((w, (ra, ea, ()), (rb, eb, group_mul(a, y)), "insertion"))
    cbs = []
    for w, (ra, ea, ua), (rb, eb, ub), kind in cands:
        ms = []
        for rule, eps, u in ((ra, ea, ua), (rb, eb, ub)):
            r1, r2 = next((x, y) for r, x, y in backend.rules if r == rule)
            a, b = (r1, r2) if eps > 0 else (group_inverse(r1), group_inverse(r2))
            v = group_mul(group_inverse(a), group_inverse(u), w)
            tgt = group_mul(u, b, v)
            pos = backend.order.key(tgt) < backend.order.key(w)
            ms.append(Move(tgt, rule, pos, (u, v, eps)))
        m1, m2 = ms
        if not (m1.positive and m2.positive) or m1.target == m2.target:
            continue
        cbs.append(CriticalBranching(_branching_from(apm, backend, w, m1, m2), w, m1, m2, kind, backend.render(w)))
    seen, out = set(), []
    for cb in cbs:
        sig = (cb.source, frozenset([cb.left.target, cb.right.target]))
        if sig not in seen:
            seen.add(sig)
            out.append(cb)
    out.sort(key=lambda cb: (backend.order_key(cb.source), backend.order_key(cb.left.target), backend.order_key(cb.right.target)))
    return out, "UNDER_APPROXIMATE"


def _generic_critical(apm, backend):
    from .normalize import enumerate_class
    from .terms import syntactic_occurrences

    cbs = []
    b = apm.bounds
    for r1 in apm.rules:
        cls = enumerate_class(apm.theory.axioms, r1.lhs, bound=b.max_depth, constants=apm.constants,
                              max_terms=min(b.max_class, 64))
        for u in cls:
            occ1 = syntactic_occurrences(r1.lhs, u)
            for r2 in apm.rules:
                for c1 in occ1:
                    for c2 in syntactic_occurrences(r2.lhs, u):
                        if (r1, c1.path) == (r2, c2.path) or disjoint(c1.path, c2.path):
                            continue
                        k = backend.key(u)
                        m1 = Move(backend.key(c1(r1.rhs)), r1, True, (u, c1.path))
                        m2 = Move(backend.key(c2(r2.rhs)), r2, True, (u, c2.path))
                        a = RewritingStep(c1, r1)
                        c = RewritingStep(c2, r2)
                        pa, pc = backend.is_positive_step(a), backend.is_positive_step(c)
                        if not (pa and pc):
                            continue
                        br = Branching(RewritingPath([a], u), EquivTrace.empty(u), RewritingPath([c], u))
                        cbs.append(CriticalBranching(br, k, m1, m2, "overlap", format_term(u, apm.signature)))
    seen, out = set(), []
    for cb in cbs:
        sig = (cb.source, frozenset([(cb.left.rule.name, cb.left.target), (cb.right.rule.name, cb.right.target)]))
        if sig not in seen:
            seen.add(sig)
            out.append(cb)
    out.sort(key=lambda cb: cb.render)
    return out, "UNDER_APPROXIMATE"


def critical_branchings(apm: AlgebraicPolygraphModulo, sigma: PositiveStrategy | None = None,
                        paradigm: str | None = None, bounds: Bounds | None = None):
    """``(branchings, completeness)`` with completeness EXACT or UNDER_APPROXIMATE."""
    if sigma is not None and sigma != apm.strategy:
        apm = apm.with_options(strategy=sigma)
    if paradigm is not None and paradigm != apm.paradigm:
        apm = apm.with_options(paradigm=paradigm)
    if bounds is not None:
        apm = apm.with_options(bounds=bounds)
    backend = apm.paradigm_backend
    if apm.paradigm == "string":
        return _string_critical(apm, backend)
    if apm.paradigm == "linear":
        return _linear_critical(apm, backend)
    if apm.paradigm == "group":
        return _group_critical(apm, backend, apm.bounds.insertion_bound)
    return _generic_critical(apm, backend)


# -- joinability -------------------------------------------------------------------------------


def _bfs_positive(backend, start, depth):
    parent = {start: None}
    dist = {start: 0}
    layer = [start]
    for d in range(depth):
        nxt = []
        for k in layer:
            for m in backend.moves(k, positive_only=True)[0]:
                if m.target not in parent:
                    parent[m.target] = (k, m)
                    dist[m.target] = d + 1
                    nxt.append(m.target)
        layer = nxt
        if not layer:
            break
    return parent, dist


def _chain(parent, k):
    out = []
    while parent[k] is not None:
        prev, m = parent[k]
        out.append((prev, m))
        k = prev
    return out[::-1]


def joinable_modulo(apm: AlgebraicPolygraphModulo, sigma: PositiveStrategy | None, b, depth: int | None = None,
                    bounds: Bounds | None = None) -> JoinResult:
    """Close a branching by positive steps up to equivalence.

    ``b`` is a Branching, a CriticalBranching or a pair of class keys.
    """
    if sigma is not None and sigma != apm.strategy:
        apm = apm.with_options(strategy=sigma)
    bounds = bounds or apm.bounds
    depth = depth if depth is not None else bounds.join_depth
    pb = apm.paradigm_backend
    if isinstance(b, CriticalBranching):
        lk, rk = b.left.target, b.right.target
        lt, rt = b.branching.left.target, b.branching.right.target
    elif isinstance(b, Branching):
        lt, rt = b.left.target, b.right.target
        lk, rk = pb.key(lt), pb.key(rt)
    else:
        lk, rk = b
        lt, rt = pb.term(lk), pb.term(rk)
    lp, ld = _bfs_positive(pb, lk, depth)
    rp, rd = _bfs_positive(pb, rk, depth)
    common = set(lp) & set(rp)
    if common:
        meet = min(common, key=lambda k: (ld[k] + rd[k], pb.order_key(k)))
        a = realize_path(apm.with_options(policy=Policy.EPRE) if apm.policy == Policy.R else apm, _chain(lp, meet), lt)
        c = realize_path(apm.with_options(policy=Policy.EPRE) if apm.policy == Policy.R else apm, _chain(rp, meet), rt)
        e = pb.equivalence_trace(a.target, c.target)
        return JoinResult(CONFLUENT, lk, rk, meet, a, c, e, (), ld[meet] + rd[meet])
    # try to certify divergence on complete positive closures
    cap = min(bounds.max_terms, 5000)
    key_apm = apm.with_options(policy=Policy.EPRE) if apm.policy == Policy.R else apm
    gl = reachability(key_apm, [lt], cap, bounds.max_depth, positive_only=True)
    gr = reachability(key_apm, [rt], cap, bounds.max_depth, positive_only=True)
    if gl.complete and gr.complete:
        if set(gl.keys) & set(gr.keys):
            # joinable beyond the search depth
            meet = min(set(gl.keys) & set(gr.keys), key=lambda k: (gl.depth[k] + gr.depth[k], pb.order_key(k)))
            a = realize_path(key_apm, gl.path_to(meet), lt)
            c = realize_path(key_apm, gr.path_to(meet), rt)
            return JoinResult(CONFLUENT, lk, rk, meet, a, c, pb.equivalence_trace(a.target, c.target), (),
                              gl.depth[meet] + gr.depth[meet], "closed beyond the join depth")
        wl = _irreducibles(pb, gl)
        wr = _irreducibles(pb, gr)
        return JoinResult(NON_CONFLUENT, lk, rk, None, None, None, None, (wl, wr), depth,
                          "positive closures are complete and disjoint")
    if gl.exact and gr.exact:
        # two distinct irreducible classes are their own closures, so they never meet
        il = sorted((k for k, ms in gl.edges.items() if not ms), key=pb.order_key)
        ir = sorted((k for k, ms in gr.edges.items() if not ms), key=pb.order_key)
        for a in il:
            other = [k for k in ir if k != a]
            if other:
                return JoinResult(NON_CONFLUENT, lk, rk, None, None, None, None, ((a,), (other[0],)), depth,
                                  "the two sides reach distinct irreducible classes")
    return JoinResult(UNKNOWN, lk, rk, None, None, None, None, (), depth,
                      f"no common positive reduct within depth {depth}; closures incomplete")


def _irreducibles(backend, g: ReachGraph):
    out = [k for k in g.keys if not g.edges.get(k)]
    out.sort(key=backend.order_key)
    return tuple(out)


# -- reports ------------------------------------------------------------------------------------


def _additive_branchings(apm, backend):
    """Branchings L_i q + p L_j of two positive steps on different monomials."""
    letters = [()] + [(c.name,) for c in apm.constants]
    out = []
    rules = [(r, lw) for r, L, R, lw in backend.rules if lw is not None]
    for (r1, l1), (r2, l2) in product(rules, repeat=2):
        for q, p in product(letters, repeat=2):
            m1, m2 = l1 + q, p + l2
            if m1 == m2:
                continue
            src = Polynomial.monomial(m1) + Polynomial.monomial(m2)
            ms, _ = backend.moves(src, positive_only=True)
            a = next((m for m in ms if m.rule == r1 and m.data[1] == () and m.data[2] == q), None)
            c = next((m for m in ms if m.rule == r2 and m.data[1] == p and m.data[2] == ()), None)
            if a is None or c is None:
                continue
            out.append(CriticalBranching(_branching_from(apm, backend, src, a, c), src, a, c, "additive",
                                         backend.render(src)))
    return _dedupe(out, backend)


def _ae_branchings(apm, limit=50):
    """(a, e) branchings with e one axiom application inside a rule source."""
    out = []
    for rule in apm.rules:
        for ctx, inst in groundify_matches(apm.theory, apm.constants, rule.lhs):
            e = EquivTrace(rule.lhs, ctx(inst.target), ((ctx, inst),))
            a = RewritingStep(Context.identity(rule.lhs.op.coarity), rule)
            out.append((rule, a, e))
            if len(out) >= limit:
                return out
    return out


def _ae_join(apm, rule, e, depth):
    """Join a₊ = rhs with a syntactic positive path from e₊ (policies below EPRE)."""
    from .backends import SyntacticBackend

    pb = apm.paradigm_backend
    syn = SyntacticBackend(apm, apm.strategy, pb)
    pb.key(rule.rhs)

    def reach(t):
        seen = {pb.key(t)}
        layer = [t]
        for _ in range(depth):
            nxt = []
            for u in layer:
                for m in syn.moves(u, positive_only=True)[0]:
                    k = pb.key(m.target)
                    if k not in seen:
                        seen.add(k)
                        nxt.append(m.target)
            layer = nxt
        return seen

    left = reach(rule.rhs)
    right = reach(e.target)
    return CONFLUENT if left & right else UNKNOWN


def _qt_precondition(apm, bounds):
    """(status, verdict): a global argument when one applies, else the seeded check."""
    b = apm.paradigm_backend
    if apm.paradigm == "string" or apm.policy == Policy.R:
        size = (lambda t: b.size(b.key(t))) if apm.paradigm == "string" and apm.policy != Policy.R else term_size
        if all(size(r.rhs) <= size(r.lhs) for r in apm.rules):
            return "HOLDS", None, "rules do not increase size: every reachable set is finite"
    v = termination_check(apm, bounds=bounds)
    note = v.note or ("checked from the rule sides only" if v.quasi_terminating == "HOLDS" else "")
    return v.quasi_terminating, v, note


def local_confluence_report(apm: AlgebraicPolygraphModulo, sigma: PositiveStrategy | None = None,
                            paradigm: str | None = None, bounds: Bounds | None = None,
                            preconditions: bool = True) -> ConfluenceVerdict:
    if sigma is not None and sigma != apm.strategy:
        apm = apm.with_options(strategy=sigma)
    if paradigm is not None and paradigm != apm.paradigm:
        apm = apm.with_options(paradigm=paradigm)
    if bounds is not None:
        apm = apm.with_options(bounds=bounds)
    bounds = apm.bounds
    crit, completeness = critical_branchings(apm)
    diagrams = []
    for cb in crit:
        diagrams.append((cb, joinable_modulo(apm, None, cb)))
    notes = []
    extra = []
    if apm.paradigm == "linear":
        for cb in _additive_branchings(apm, apm.paradigm_backend):
            extra.append((cb, joinable_modulo(apm, None, cb)))
    ae_status = []
    if apm.policy != Policy.EPRE:
        for rule, a, e in _ae_branchings(apm):
            ae_status.append(_ae_join(apm, rule, e, bounds.join_depth))
        if ae_status:
            notes.append(f"(a,e) branchings sampled: {len(ae_status)}, unclosed: {ae_status.count(UNKNOWN)}")
    pre = {}
    if preconditions:
        qt, tv, note = _qt_precondition(apm, bounds)
        pre["quasi_termination"] = qt
        pre["quasi_termination_note"] = note
        pre["termination_verdict"] = tv
        pc = positive_confluence_check(apm, bounds=bounds)
        pre["positive_confluence"] = pc.status
    statuses = [j.status for _, j in diagrams] + [j.status for _, j in extra]
    exact = completeness == "EXACT"
    if NON_CONFLUENT in statuses:
        status = NON_CONFLUENT
    elif all(s == CONFLUENT for s in [j.status for _, j in diagrams] + ae_status) and exact:
        needs = apm.paradigm != "string" and apm.strategy.kind != StrategyKind.FULL
        ok = not preconditions or not needs or (
            pre["quasi_termination"] == "HOLDS" and pre["positive_confluence"] == "HOLDS_ON_SAMPLE")
        status = CONFLUENT if ok else UNKNOWN
        if not ok:
            notes.append("critical branchings close but the theorem's preconditions are not established")
    else:
        status = UNKNOWN
    if any(j.status != CONFLUENT for _, j in extra):
        notes.append("some additive branchings do not close by positive steps within the join depth")
    return ConfluenceVerdict(status, diagrams + extra, bounds.as_dict(), pre, crit, exact, completeness, notes)


def bottom_components(g: ReachGraph):
    """For each node, the set of terminal strongly connected components it reaches."""
    dg = g.digraph()
    cond = nx.condensation(dg)
    bottoms = {c for c in cond.nodes if cond.out_degree(c) == 0}
    reach = {}
    for c in reversed(list(nx.topological_sort(cond))):
        if c in bottoms:
            reach[c] = frozenset([c])
        else:
            s = set()
            for d in cond.successors(c):
                s |= reach[d]
            reach[c] = frozenset(s)
    mapping = cond.graph["mapping"]
    return {g.keys[i]: reach[mapping[i]] for i in range(len(g.keys))}, cond


def _divergent_seed(apm, lc, seeds, bounds) -> bool:
    """Look for a seed reaching two distinct irreducible classes; such a pair
    never joins, whatever the termination behaviour."""
    b = apm.backend
    cap = min(bounds.max_terms, 2000)
    for s in seeds:
        g = reachability(apm, [s], cap, bounds.max_depth, positive_only=True)
        if not g.exact:
            continue
        irr = sorted((k for k, ms in g.edges.items() if not ms), key=b.order_key)
        if len(irr) >= 2:
            lc.status = NON_CONFLUENT
            lc.notes.append(f"{b.render(b.key(s))} reaches distinct irreducible classes "
                            f"{b.render(irr[0])} and {b.render(irr[1])}")
            lc.diagrams.append((None, JoinResult(NON_CONFLUENT, irr[0], irr[1], None, None, None, None,
                                                 ((irr[0],), (irr[1],)), 0, "distinct irreducible reducts")))
            return True
    return False


def newman_confluence_report(apm: AlgebraicPolygraphModulo, sigma: PositiveStrategy | None = None,
                             seeds=None, bounds: Bounds | None = None, sample: int = 20) -> ConfluenceVerdict:
    if sigma is not None and sigma != apm.strategy:
        apm = apm.with_options(strategy=sigma)
    if bounds is not None:
        apm = apm.with_options(bounds=bounds)
    bounds = apm.bounds
    lc = local_confluence_report(apm)
    if lc.status == NON_CONFLUENT:
        return lc
    seeds = list(seeds) if seeds is not None else apm.default_seeds()
    seeds += [cb.branching.source for cb in lc.critical]
    if not seeds:
        lc.notes.append("no seeds: nothing to validate")
        return lc
    if lc.status != CONFLUENT:
        return lc
    if lc.preconditions.get("quasi_termination") != "HOLDS":
        # local confluence alone does not give confluence
        if _divergent_seed(apm, lc, seeds, bounds):
            return lc
        lc.status = UNKNOWN
        lc.notes.append("locally confluent, but quasi-termination is not established")
        return lc
    b = apm.backend
    g = reachability(apm, seeds, bounds.max_terms, bounds.max_depth, positive_only=True)
    if not g.complete:
        if _divergent_seed(apm, lc, seeds, bounds):
            return lc
        lc.status = UNKNOWN
        lc.notes.append("positive reachability from the seeds did not complete")
        return lc
    reach, _ = bottom_components(g)
    for k in g.keys:
        if len(reach[k]) > 1:
            # two terminal components reachable from k: a certified divergence
            comps = sorted(reach[k])
            picks = []
            for c in comps[:2]:
                members = [x for x in g.keys if reach[x] == frozenset([c])]
                picks.append(min(members, key=b.order_key))
            lc.status = NON_CONFLUENT
            lc.notes.append(f"{b.render(k)} reaches distinct terminal components {b.render(picks[0])} and {b.render(picks[1])}")
            lc.diagrams.append((None, JoinResult(NON_CONFLUENT, picks[0], picks[1], None, None, None, None,
                                                 ((picks[0],), (picks[1],)), 0, "terminal components differ")))
            return lc
    # every non-local branching closes: sample pairs of outgoing paths and join them
    checked = 0
    for k in g.keys:
        outs = g.edges.get(k, [])
        if len(outs) < 2:
            continue
        for m1, m2 in zip(outs, outs[1:]):
            j = joinable_modulo(apm, None, (m1.target, m2.target), depth=bounds.join_depth)
            checked += 1
            if j.status != CONFLUENT:
                lc.status = UNKNOWN
                lc.notes.append(f"sampled branching at {b.render(k)} did not close within depth")
                return lc
        if checked >= sample:
            break
    lc.notes.append(f"validated on {len(g.keys)} reachable classes, {checked} sampled branchings closed")
    return lc


# -- quotient systems ---------------------------------------------------------------------------


@dataclass
class QuotientSystem:
    generators: list
    rules: list  # (name, lhs, rhs) renders
    positive_rules: list

    def render(self) -> str:
        body = ", ".join(f"{l} => {r}" for _, l, r in self.rules)
        return f"<{','.join(self.generators)} | {body}>"


def quotient_system(apm: AlgebraicPolygraphModulo, sigma: PositiveStrategy | None = None) -> QuotientSystem:
    if sigma is not None and sigma != apm.strategy:
        apm = apm.with_options(strategy=sigma)
    b = apm.paradigm_backend
    rules, positive = [], []
    for r in apm.rules:
        lk, rk = b.key(r.lhs), b.key(r.rhs)
        rules.append((r.name, b.render(lk), b.render(rk)))
        ms, _ = b.moves(lk, positive_only=True)
        if any(m.rule == r and m.target == rk for m in ms):
            positive.append((r.name, b.render(lk), b.render(rk)))
    return QuotientSystem([c.name for c in apm.constants], rules, positive)
