"""Algebraic polygraphs modulo: steps, reachability, termination, quasi-normal forms."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx

from .backends import BACKENDS, Move, SyntacticBackend
from .errors import BoundExhausted
from .normalize import group_inverse, group_mul
from .steps import Bounds, GroundRule, Policy, RewritingPath, RewritingStep
from .strategy import DeglexOrder, PositiveStrategy
from .terms import Term, parse_term, term_size, typecheck_term
from .theories import CartesianPolygraph, builtin_theory, modulo_split

STRING_THEORIES = ("Mon", "Ass")
GROUP_THEORIES = ("Grp", "GrpTilde")
LINEAR_THEORIES = ("ModC", "AssAlg", "Mod")


def default_paradigm(theory_name: str) -> str:
    if theory_name in STRING_THEORIES:
        return "string"
    if theory_name in GROUP_THEORIES:
        return "group"
    if theory_name in LINEAR_THEORIES:
        return "linear"
    return "generic"


class AlgebraicPolygraphModulo:
    """A theory, extra constants, ground rules and a step policy.

    Constants are given as names (declared with the theory's default sort,
    ``m`` for module theories) or as ``(name, sort)`` pairs.
    """

    def __init__(self, theory: CartesianPolygraph | str, constants=(), rules=(), policy=Policy.EPRE,
                 paradigm=None, strategy: PositiveStrategy | None = None, bounds: Bounds | None = None,
                 field: bool = False, signature=None):
        if isinstance(theory, str):
            theory = builtin_theory(theory)
        self.theory = theory
        self.policy = Policy.parse(policy) if isinstance(policy, str) else policy
        self.paradigm = paradigm or default_paradigm(theory.name)
        self.bounds = bounds or Bounds()
        self.field = field
        self.split = modulo_split(theory)
        if signature is None:
            signature = theory.signature.extended()
            default_sort = "m" if "m" in signature.sorts else next(iter(signature.sorts))
            for c in constants:
                name, sort = (c, default_sort) if isinstance(c, str) else (c[0], c[1])
                if name in theory.signature.operations:
                    raise ValueError(f"constant {name!r} clashes with a theory symbol")
                signature.add_operation(name, (), sort)
            names = [c if isinstance(c, str) else c[0] for c in constants]
            if field and "r" in signature.sorts and "recip" not in signature.operations:
                # scalars over Q: fractions are written n*recip(d)
                signature.add_operation("recip", ("r",), "r")
        else:
            names = [c if isinstance(c, str) else c.name for c in constants]
        self.signature = signature
        self.constants = tuple(signature.op(n) for n in names)
        self.rules = tuple(self._rule(r) for r in rules)
        if strategy is None:
            strategy = self._default_strategy()
        self.strategy = strategy
        self._backend = None
        self._syntactic = None

    def _rule(self, r) -> GroundRule:
        if isinstance(r, GroundRule):
            return r
        name, lhs, rhs = r
        if isinstance(lhs, str):
            lhs = parse_term(lhs, self.signature)
            rhs = parse_term(rhs, self.signature)
        typecheck_term(self.signature, lhs)
        typecheck_term(self.signature, rhs)
        return GroundRule(name, lhs, rhs)

    def _default_strategy(self):
        if self.paradigm in ("string", "linear"):
            return PositiveStrategy.nf_modulo()
        if self.paradigm == "group":
            return PositiveStrategy.group_deglex(DeglexOrder.from_generators([c.name for c in self.constants]))
        return PositiveStrategy.full()

    @property
    def paradigm_backend(self):
        if self._backend is None:
            self._backend = BACKENDS[self.paradigm](self, self.strategy)
        return self._backend

    @property
    def backend(self):
        """The backend used for reachability: class level unless the policy is R."""
        if self.policy == Policy.R:
            if self._syntactic is None:
                self._syntactic = SyntacticBackend(self, self.strategy, self.paradigm_backend)
            return self._syntactic
        return self.paradigm_backend

    def with_options(self, **kw):
        args = dict(theory=self.theory, constants=[c.name for c in self.constants], rules=self.rules,
                    policy=self.policy, paradigm=self.paradigm, strategy=self.strategy,
                    bounds=self.bounds, field=self.field, signature=self.signature)
        args.update(kw)
        return AlgebraicPolygraphModulo(**args)

    def parse(self, text: str) -> Term:
        t = parse_term(text, self.signature)
        typecheck_term(self.signature, t)
        return t

    def default_seeds(self) -> list[Term]:
        seen, out = set(), []
        for r in self.rules:
            for t in (r.lhs, r.rhs):
                if t not in seen:
                    seen.add(t)
                    out.append(t)
        return out

    def __repr__(self):
        return f"AlgebraicPolygraphModulo({self.theory.name}, {[c.name for c in self.constants]}, {len(self.rules)} rules, {self.policy.value})"


def make_apm(theory, constants, rules, **kw) -> AlgebraicPolygraphModulo:
    """Shorthand: ``rules`` as ``(name, lhs text, rhs text)`` triples."""
    return AlgebraicPolygraphModulo(theory, constants, rules, **kw)


# -- steps --------------------------------------------------------------------------------


def find_redexes(apm: AlgebraicPolygraphModulo, t: Term) -> list[RewritingStep]:
    """Every step out of ``t`` allowed by the policy (the full list for exact
    backends, a sample for linear and group classes)."""
    typecheck_term(apm.signature, t)
    if apm.policy in (Policy.R, Policy.RPE):
        syn = SyntacticBackend(apm, apm.strategy, apm.paradigm_backend)
        moves, _ = syn.moves(t)
        return [syn.realize(t, m) for m in moves]
    b = apm.paradigm_backend
    moves, _ = b.moves(b.key(t))
    return [b.realize(t, m) for m in moves]


def apply_step(apm_or_step, step: RewritingStep | None = None) -> Term:
    """Target of the step after replaying it (``apply_step(step)`` also works)."""
    if step is None:
        return apm_or_step.replay()
    return step.replay(apm_or_step.theory)


def complete_post(apm: AlgebraicPolygraphModulo, step: RewritingStep, target: Term) -> RewritingStep:
    """Attach the trailing equivalence bringing the reduct to ``target``."""
    post = apm.paradigm_backend.equivalence_trace(step.redex_target, target)
    return step.with_post(post)


# -- reachability -------------------------------------------------------------------------


@dataclass
class ReachGraph:
    keys: list = field(default_factory=list)
    seeds: dict = field(default_factory=dict)  # seed key -> seed term
    edges: dict = field(default_factory=dict)
    parent: dict = field(default_factory=dict)
    depth: dict = field(default_factory=dict)
    closed: bool = True
    exact: bool = True
    bounds: dict = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return self.closed and self.exact

    def __len__(self):
        return len(self.keys)

    def __contains__(self, k):
        return k in self.depth

    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.keys)))
        idx = {k: i for i, k in enumerate(self.keys)}
        for k, ms in self.edges.items():
            for m in ms:
                if m.target in idx:
                    g.add_edge(idx[k], idx[m.target])
        return g

    def path_to(self, k) -> list:
        """Tree path of ``(key, move)`` pairs from a seed to ``k``."""
        out = []
        while self.parent.get(k) is not None:
            prev, m = self.parent[k]
            out.append((prev, m))
            k = prev
        return out[::-1]


def reachability(apm: AlgebraicPolygraphModulo, seeds: Iterable[Term], max_terms: int | None = None,
                 max_depth: int | None = None, positive_only: bool = False, stop=None) -> ReachGraph:
    """Breadth-first closure of the seeds under the policy's steps.

    ``stop(graph)`` may end the search early; the graph is then not closed.
    """
    b = apm.backend
    max_terms = max_terms or apm.bounds.max_terms
    max_depth = max_depth if max_depth is not None else apm.bounds.max_depth
    g = ReachGraph(bounds={"max_terms": max_terms, "max_depth": max_depth})
    queue = deque()
    syntactic_seeds = apm.policy == Policy.RPE
    for s in seeds:
        k = b.key(s)
        if k in g.depth:
            continue
        g.keys.append(k)
        g.seeds[k] = s
        g.parent[k] = None
        g.depth[k] = 0
        queue.append(k)
    seed_keys = set(g.keys)
    while queue:
        k = queue.popleft()
        if g.depth[k] >= max_depth:
            g.closed = False
            continue
        if syntactic_seeds and k in seed_keys:
            syn = SyntacticBackend(apm, apm.strategy, b)
            sm, exact = syn.moves(g.seeds[k], positive_only)
            moves = [Move(b.key(m.target), m.rule, m.positive, m.data, m.label) for m in sm]
        else:
            moves, exact = b.moves(k, positive_only)
        g.exact = g.exact and exact
        g.edges[k] = moves
        for m in moves:
            if m.target in g.depth:
                continue
            if len(g.keys) >= max_terms:
                g.closed = False
                continue
            g.keys.append(m.target)
            g.parent[m.target] = (k, m)
            g.depth[m.target] = g.depth[k] + 1
            queue.append(m.target)
        if stop is not None and stop(g):
            g.closed = False
            break
    return g


def realize_path(apm, keys_moves, start: Term | None = None) -> RewritingPath:
    """Realize a chain of ``(key, move)`` pairs as a replayable path."""
    b = apm.backend
    steps = []
    cur = start
    for k, m in keys_moves:
        if cur is None:
            cur = b.term(k)
        st = b.realize(cur, m)
        steps.append(st)
        cur = st.target
    return RewritingPath(steps, start if start is not None else (steps[0].source if steps else None))


# -- termination ----------------------------------------------------------------------------


TERMINATION_KINDS = (
    "TERMINATING", "QUASI_TERMINATING", "ALGEBRAICALLY_TERMINATING",
    "EXPONENTIATION_DETECTED", "NON_TERMINATING_EVIDENCE", "UNKNOWN",
)


@dataclass
class TerminationVerdict:
    kind: str
    witness: RewritingPath | None = None
    cycle: RewritingPath | None = None
    complete: bool = False
    bounds: dict = field(default_factory=dict)
    proof: bool = False
    note: str = ""
    nodes: int = 0

    @property
    def quasi_terminating(self) -> str:
        """HOLDS / FAILS / UNKNOWN for the quasi-termination precondition."""
        if self.kind in ("TERMINATING", "QUASI_TERMINATING"):
            return "HOLDS"
        if self.kind == "EXPONENTIATION_DETECTED" or (self.kind == "NON_TERMINATING_EVIDENCE" and self.proof):
            return "FAILS"
        return "UNKNOWN"


def _find_cycle(g: ReachGraph):
    """A cycle as a list of ``(key, move)`` pairs, or None."""
    for k in g.keys:
        for m in g.edges.get(k, []):
            if m.target == k:
                return [(k, m)]
    dg = g.digraph()
    try:
        cyc = nx.find_cycle(dg)
    except nx.NetworkXNoCycle:
        return None
    out = []
    for u, v in cyc:
        k, tk = g.keys[u], g.keys[v]
        m = next(m for m in g.edges[k] if m.target == tk)
        out.append((k, m))
    return out


def _proper_part(b, small, big) -> bool:
    """Is ``small`` a proper factor (string) or proper subterm of ``big``?"""
    if b.paradigm == "string" and isinstance(small, tuple):
        n = len(small)
        return len(big) > n and any(big[i:i + n] == small for i in range(len(big) - n + 1))
    from .terms import enumerate_positions

    st, bt = b.term(small), b.term(big)
    return term_size(bt) > term_size(st) and any(u == st for p, u in enumerate_positions(bt) if p)


def _exponentiation(apm, g: ReachGraph):
    b = apm.backend
    if b.paradigm not in ("string", "generic"):
        return None
    if apm.theory.name not in ("Mag", "Ass", "AC", "Mon", "CMon"):
        return None
    for k in g.keys:
        chain = g.path_to(k)
        for i, (anc, _) in enumerate(chain):
            if _proper_part(b, anc, k):
                return chain[i:]
    return None


def _growth_run(apm, g: ReachGraph, need: int = 3):
    """A tree path along which the size strictly grows at every step."""
    b = apm.backend
    for k in reversed(g.keys):
        chain = g.path_to(k)
        if len(chain) < need:
            continue
        sizes = [b.size(x) for x, _ in chain] + [b.size(k)]
        run = 0
        for i in range(len(sizes) - 1, 0, -1):
            if sizes[i] > sizes[i - 1]:
                run += 1
                if run >= need:
                    return chain[i - 1:]
            else:
                run = 0
    return None


def _progression_witness(apm, seeds):
    """Linear and group classes: an explicit infinite family of distinct steps.

    For a rule f => g, the classes k*g - (k-1)*f (linear) or c^k w with
    c = g f^-1 (group, torsion free) are pairwise distinct and each is reached
    from the previous one by a single step.  Returns a path of three such
    steps and a two-step cycle f -> g -> f, or None when every rule is degenerate.
    """
    b = apm.paradigm_backend
    for rule in apm.rules:
        f, gk = b.key(rule.lhs), b.key(rule.rhs)
        if f == gk:
            continue
        if b.paradigm == "linear":
            one = Fraction(1)
            back = Move(f, rule, False, (Fraction(-1), (), (), "cycle"))
            cycle = realize_path(apm, [(f, Move(gk, rule, True, (one, (), (), "positive"))), (gk, back)], rule.lhs)
            D = gk - f
            path = []
            cur = f
            for _ in range(3):
                nxt = cur + D
                path.append((cur, Move(nxt, rule, False, (one, (), (), "split"))))
                cur = nxt
            return realize_path(apm, path, rule.lhs), cycle
        if b.paradigm == "group":
            # w -> g f^-1 w, with u = 1 and v = f^-1 w
            def mv(w):
                return Move(group_mul(gk, group_inverse(f), w), rule, False, ((), group_mul(group_inverse(f), w), 1))

            path, cur = [], f
            for _ in range(3):
                m = mv(cur)
                path.append((cur, m))
                cur = m.target
            # back from g to f: g = g f^-1 f and f = g g^-1 f
            back = Move(f, rule, False, (gk, f, -1))
            cycle = realize_path(apm, [(f, mv(f)), (gk, back)], rule.lhs)
            return realize_path(apm, path, rule.lhs), cycle
    return None


def termination_check(apm: AlgebraicPolygraphModulo, seeds: Sequence[Term] | None = None,
                      bounds: Bounds | None = None, positive_only: bool = False) -> TerminationVerdict:
    bounds = bounds or apm.bounds
    seeds = list(seeds) if seeds is not None else apm.default_seeds()
    b = apm.backend
    bd = bounds.as_dict()

    # the full class-level relation of the linear and group paradigms is never
    # quasi-terminating once a rule is non-degenerate
    if not positive_only and apm.policy != Policy.R and b.paradigm in ("linear", "group"):
        pw = _progression_witness(apm, seeds)
        if pw is not None:
            path, cycle = pw
            return TerminationVerdict(
                "NON_TERMINATING_EVIDENCE", path, cycle, False, bd, True,
                "infinitely many distinct classes along k*g-(k-1)*f" if b.paradigm == "linear"
                else "infinitely many distinct classes along c^k w (free groups are torsion free)",
            )

    state = {"checked": 0}

    def stop(g):
        if g.exact or len(g.keys) - state["checked"] < 200:
            return False
        state["checked"] = len(g.keys)
        return _growth_run(apm, g) is not None and _find_cycle(g) is not None

    g = reachability(apm, seeds, bounds.max_terms, bounds.max_depth, positive_only, stop)
    cyc = _find_cycle(g)
    cycle = realize_path(apm, cyc) if cyc else None
    n = len(g.keys)
    if g.complete:
        if cyc is None:
            return TerminationVerdict("TERMINATING", None, None, True, bd, True, "", n)
        return TerminationVerdict("QUASI_TERMINATING", cycle, cycle, True, bd, True, "", n)
    exp = _exponentiation(apm, g)
    if exp is not None:
        return TerminationVerdict("EXPONENTIATION_DETECTED", realize_path(apm, exp), cycle, False, bd, True,
                                  "path from f to a term containing f in a nontrivial context", n)
    run = _growth_run(apm, g)
    if run is not None:
        return TerminationVerdict("NON_TERMINATING_EVIDENCE", realize_path(apm, run), cycle, False, bd, False,
                                  "size grows along a path of an incomplete graph (heuristic)", n)
    return TerminationVerdict("UNKNOWN", None, cycle, False, bd, False, "bounds exhausted", n)


# -- quasi-normal forms ------------------------------------------------------------------------


def quasi_irreducible_keys(g: ReachGraph) -> list:
    """Nodes all of whose direct successors can come back to them."""
    dg = g.digraph()
    comp = {}
    for i, scc in enumerate(nx.strongly_connected_components(dg)):
        for v in scc:
            comp[v] = i
    idx = {k: i for i, k in enumerate(g.keys)}
    out = []
    for k in g.keys:
        i = idx[k]
        if all(comp[idx[m.target]] == comp[i] for m in g.edges.get(k, [])):
            out.append(k)
    return out


def quasi_normal_form(apm: AlgebraicPolygraphModulo, t: Term, bounds: Bounds | None = None,
                      positive_only: bool = False):
    """``(qnf, distance)``: the least quasi-irreducible reachable term and its
    step distance from ``t``."""
    bounds = bounds or apm.bounds
    g = reachability(apm, [t], bounds.max_terms, bounds.max_depth, positive_only)
    if not g.complete:
        raise BoundExhausted(f"reachability from {t!r} did not complete within bounds")
    b = apm.backend
    cands = quasi_irreducible_keys(g)
    best = min(cands, key=lambda k: (b.order_key(k), g.depth[k]))
    return b.term(best) if not isinstance(best, Term) else best, g.depth[best]
