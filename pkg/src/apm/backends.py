"""Per-paradigm machinery behind the rewrite engine.

A backend works on equivalence classes through hashable keys (words,
polynomials, reduced signed words, canonical terms).  ``moves`` lists the
steps out of a class; ``realize`` turns such a move into a concrete
``RewritingStep`` starting from any member of the class, with the
equivalence trace that brings it to the redex.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotRepresentable
from .normalize import (
    Polynomial,
    are_conjugate,
    assoc_flatten,
    canonical_key,
    cyclic_reduce,
    enumerate_class,
    format_polynomial,
    format_word,
    group_eval,
    group_inverse,
    group_mul,
    group_reduce,
    linear_canonical,
    polynomial_size,
    polynomial_to_term,
    right_comb,
    scalar_term,
    signed_word_to_term,
    theory_canonical,
    word_to_term,
)
from .steps import EquivTrace, GroundRule, RewritingStep
from .strategy import DeglexOrder, StrategyKind, is_positive
from .terms import App, Context, Hole, Term, enumerate_positions, format_term, sort_of, syntactic_occurrences, term_size
from .theories import AxiomInstance, builtin_theory, match, instantiate, rule_instances_at


@dataclass(frozen=True)
class Move:
    """A step out of a class: its target class, rule and realization data."""

    target: object
    rule: GroundRule
    positive: bool
    data: tuple = ()
    label: str = ""


def normal_form_trace(rules, t: Term, limit: int = 100000):
    """Rewrite ``t`` with ``rules`` (left to right, leftmost-outermost) and
    record each application as ``(context, instance)``."""
    steps = []
    cur = t
    for _ in range(limit):
        for pos, sub in enumerate_positions(cur):
            hit = None
            for rule in rules:
                s = match(rule.lhs, sub)
                if s is not None:
                    hit = AxiomInstance(rule, sub, instantiate(rule.rhs, s), "+")
                    break
            if hit is not None:
                ctx = Context.at(cur, pos)
                steps.append((ctx, hit))
                cur = ctx(hit.rhs)
                break
        else:
            return cur, steps
    raise RuntimeError("normalization trace did not terminate")


def reverse_steps(steps):
    return [(ctx, inst.reversed()) for ctx, inst in reversed(steps)]


def hole_context(spine: Term) -> Context:
    for pos, u in enumerate_positions(spine):
        if isinstance(u, Hole):
            return Context(spine, pos, u.sort)
    raise ValueError("no hole in spine")


class Backend:
    paradigm = "generic"
    exact_full = True

    def __init__(self, apm, strategy):
        self.apm = apm
        self.strategy = strategy
        self.sig = apm.signature
        self._moves: dict = {}

    # keys -------------------------------------------------------------
    def key(self, t: Term):
        raise NotImplementedError

    def term(self, key) -> Term:
        raise NotImplementedError

    def order_key(self, key):
        return self.sig.order_key(self.term(key))

    def size(self, key) -> int:
        return term_size(self.term(key))

    def render(self, key) -> str:
        return format_term(self.term(key), self.sig)

    # moves ------------------------------------------------------------
    def moves(self, key, positive_only: bool = False):
        """``(moves, exact)``; ``exact`` tells whether the list is the full set."""
        ck = (key, positive_only)
        hit = self._moves.get(ck)
        if hit is None:
            if self.strategy.predicate is not None:
                ms, exact = self._compute(key, False)
                t = self.term(key)
                ms = [
                    Move(m.target, m.rule, bool(self.strategy.predicate(self.realize(t, m))), m.data, m.label)
                    for m in ms
                ]
                if positive_only:
                    ms = [m for m in ms if m.positive]
                hit = (ms, exact)
            else:
                hit = self._compute(key, positive_only)
            self._moves[ck] = hit
        return hit

    def _compute(self, key, positive_only):
        raise NotImplementedError

    def realize(self, t: Term, move: Move) -> RewritingStep:
        raise NotImplementedError

    def is_positive_step(self, step) -> bool:
        return is_positive(self.strategy, step, self.apm)

    def equivalence_trace(self, t: Term, u: Term) -> EquivTrace:
        """Trace between two equivalent terms (certificate when not explicit)."""
        if t == u:
            return EquivTrace.empty(t)
        return EquivTrace(t, u, None, "canonical form")


# -- string rewriting ---------------------------------------------------------------


class StringBackend(Backend):
    paradigm = "string"

    def __init__(self, apm, strategy):
        super().__init__(apm, strategy)
        self.unit = "e" if "e" in self.sig.operations else None
        self.rules = [(r, assoc_flatten(r.lhs, "mu", self.unit), assoc_flatten(r.rhs, "mu", self.unit)) for r in apm.rules]
        self.rank = {c.name: i for i, c in enumerate(apm.constants)}
        ax = {r.name: r for r in apm.theory.axioms}
        self.assoc = [ax["A"]]
        self.units = [ax[n] for n in ("E_l", "E_r") if n in ax]

    def key(self, t):
        return assoc_flatten(t, "mu", self.unit)

    def term(self, w):
        if not w and self.unit is None:
            raise NotRepresentable("empty word without a unit")
        return word_to_term(w, self.sig, "mu", self.unit or "")

    def order_key(self, w):
        return (len(w), tuple(self.rank.get(c, len(self.rank)) for c in w))

    def size(self, w):
        return len(w)

    def render(self, w):
        return format_word(w) if w else "1"

    def _compute(self, w, positive_only):
        out = []
        for rule, l, r in self.rules:
            n = len(l)
            for i in range(len(w) - n + 1):
                if w[i:i + n] == l:
                    tgt = w[:i] + r + w[i + n:]
                    out.append(Move(tgt, rule, True, (i,), f"{rule.name}@{i}"))
        return out, True

    def _offsets(self, u: Term):
        """Number of non-unit leaves before each position."""
        out = {}
        count = 0

        def walk(x, pos):
            nonlocal count
            out[pos] = count
            if not x.args:
                if x.op.name != self.unit:
                    count += 1
                return
            for i, a in enumerate(x.args, 1):
                walk(a, pos + (i,))

        walk(u, ())
        return out

    def _find_redex(self, u, lhs, offset):
        offs = None
        for pos, sub in enumerate_positions(u):
            if sub == lhs:
                offs = offs or self._offsets(u)
                if offs[pos] == offset:
                    return pos
        return None

    def realize(self, t, move):
        (i,) = move.data
        lhs = move.rule.lhs
        t1, tr1 = normal_form_trace(self.units, t) if self.units else (t, [])
        # shortest associativity trace to a term exhibiting the redex
        pos = self._find_redex(t1, lhs, i)
        found = (t1, pos, []) if pos is not None else None
        if found is None:
            parent = {t1: None}
            queue = deque([t1])
            while queue and found is None and len(parent) < self.apm.bounds.max_class:
                u = queue.popleft()
                for p, sub in enumerate_positions(u):
                    for inst in rule_instances_at(self.assoc, sub):
                        ctx = Context.at(u, p)
                        v = ctx(inst.target)
                        if v in parent:
                            continue
                        parent[v] = (u, ctx, inst)
                        q = self._find_redex(v, lhs, i)
                        if q is not None:
                            tr = []
                            x = v
                            while parent[x] is not None:
                                prev, c, ins = parent[x]
                                tr.append((c, ins))
                                x = prev
                            found = (v, q, tr[::-1])
                            break
                        queue.append(v)
                    if found:
                        break
        if found is None:
            # constructive route through the right comb
            w = self.key(t)
            prefix, suffix = w[:i], w[i + len(self.key(lhs)):]
            hole = Hole(sort_of(lhs))
            mu = self.sig.op("mu")
            inner = hole if not suffix else App(mu, (hole, self.term(suffix)))
            spine = inner if not prefix else right_comb([App(self.sig.op(c), ()) for c in prefix] + [inner], mu)
            ctx = hole_context(spine)
            s = ctx(lhs)
            comb1, tr2 = normal_form_trace(self.assoc, t1)
            comb2, tr3 = normal_form_trace(self.assoc + self.units, s)
            assert comb1 == comb2
            found = (s, ctx.path, tr2 + reverse_steps(tr3))
        u, p, tr = found
        pre = EquivTrace(t, u, tuple(tr1 + tr))
        return RewritingStep(Context.at(u, p), move.rule, pre, None, ("string", i))

    def equivalence_trace(self, t, u):
        rules = self.assoc + self.units
        n1, s1 = normal_form_trace(rules, t)
        n2, s2 = normal_form_trace(rules, u)
        if n1 != n2:
            raise ValueError("terms are not equivalent")
        return EquivTrace(t, u, tuple(s1 + reverse_steps(s2)))


# -- linear rewriting -----------------------------------------------------------------


class LinearBackend(Backend):
    paradigm = "linear"
    exact_full = False

    def __init__(self, apm, strategy):
        super().__init__(apm, strategy)
        self.field = apm.field
        self.rules = []
        for r in apm.rules:
            L, R = linear_canonical(r.lhs), linear_canonical(r.rhs)
            items = L.items()
            lw = items[0][0] if len(items) == 1 and items[0][1] == 1 and _is_monomial_term(r.lhs) else None
            self.rules.append((r, L, R, lw))
        self._size: dict = {}

    def key(self, t):
        return linear_canonical(t)

    def term(self, p):
        return polynomial_to_term(p, self.sig)

    def size(self, p):
        return polynomial_size(p)

    def order_key(self, p):
        return (self.size(p), p.sort_key())

    def render(self, p):
        return format_polynomial(p)

    def _ok(self, lam: Fraction) -> bool:
        return lam != 0 and (self.field or lam.denominator == 1)

    def _compute(self, p, positive_only):
        full = self.strategy.kind == StrategyKind.FULL
        out = []
        seen = set()

        def add(rule, L, R, lam, pw, qw, kind, positive):
            tgt = p + (R - L).multiply_word(pw, qw).scale(lam)
            sig = (tgt, rule.name, lam, pw, qw)
            if sig in seen or tgt == p:
                return
            seen.add(sig)
            out.append(Move(tgt, rule, positive or full, (lam, pw, qw, kind), f"{rule.name}[{lam}]"))

        support = p.support
        for rule, L, R, lw in self.rules:
            if lw is None:
                continue
            n = len(lw)
            for m in support:
                for i in range(len(m) - n + 1):
                    if m[i:i + n] == lw:
                        add(rule, L, R, p.coeff(m), m[:i], m[i + n:], "positive", True)
        if positive_only and not full:
            return out, True
        # a sample of the (infinite) non-positive steps
        for rule, L, R, lw in self.rules:
            D = R - L
            if lw is not None:
                n = len(lw)
                for m in support:
                    for i in range(len(m) - n + 1):
                        if m[i:i + n] == lw:
                            for lam in (Fraction(1), Fraction(-1)):
                                if lam != p.coeff(m):
                                    add(rule, L, R, lam, m[:i], m[i + n:], "split", False)
            for w, dc in D.items():
                k = len(w)
                for m in support:
                    for i in range(len(m) - k + 1):
                        if m[i:i + k] == w:
                            lam = -p.coeff(m) / dc
                            if self._ok(lam):
                                add(rule, L, R, lam, m[:i], m[i + k:], "cancel", False)
            add(rule, L, R, Fraction(-1), (), (), "cycle", False)
        if positive_only:
            out = [m for m in out if m.positive]
        return out, False

    def realize(self, t, move):
        lam, pw, qw, _ = move.data
        rule = move.rule
        sig = self.sig
        mu = sig.op("mu") if "mu" in sig.operations else None
        hole = Hole(sort_of(rule.lhs))
        parts = ([self.term(Polynomial.monomial(pw))] if pw else []) + [hole] + ([self.term(Polynomial.monomial(qw))] if qw else [])
        mono = right_comb(parts, mu) if len(parts) > 1 else hole
        scaled = mono if lam == 1 else App(sig.op("act"), (scalar_term(lam, sig), mono))
        L = linear_canonical(rule.lhs)
        rest = self.key(t) - L.multiply_word(pw, qw).scale(lam)
        spine = scaled if rest.is_zero() else App(sig.op("oplus"), (scaled, self.term(rest)))
        ctx = hole_context(spine)
        s = ctx(rule.lhs)
        pre = EquivTrace(t, s, () if s == t else None, None if s == t else "linear_canonical")
        return RewritingStep(ctx, rule, pre, None, ("linear", lam, pw, qw))


def _is_monomial_term(t: Term) -> bool:
    return all(u.op.name == "mu" or not u.args for _, u in enumerate_positions(t)) and all(
        u.op.name not in ("0m",) for _, u in enumerate_positions(t)
    )


# -- group rewriting --------------------------------------------------------------------


class GroupBackend(Backend):
    paradigm = "group"
    exact_full = False

    def __init__(self, apm, strategy):
        super().__init__(apm, strategy)
        gens = [c.name for c in apm.constants]
        self.order = strategy.order if strategy.order is not None else DeglexOrder.from_generators(gens)
        self.letters = sorted([(x, s) for x in gens for s in (1, -1)], key=self.order.rank)
        self.rules = [(r, group_eval(r.lhs), group_eval(r.rhs)) for r in apm.rules]
        self.complete_rules = builtin_theory("GrpTilde").axioms
        self._words_by_len = {0: [()]}

    def key(self, t):
        return group_eval(t)

    def term(self, w):
        return signed_word_to_term(w, self.sig)

    def order_key(self, w):
        return self.order.key(w)

    def size(self, w):
        return len(w)

    def render(self, w):
        return format_signed_word(w)

    def _words(self, n):
        """All reduced words of length ``n`` in increasing deglex order."""
        if n not in self._words_by_len:
            out = []
            for w in self._words(n - 1):
                for l in self.letters:
                    if not w or not (w[-1][0] == l[0] and w[-1][1] == -l[1]):
                        out.append(w + (l,))
            self._words_by_len[n] = out
        return self._words_by_len[n]

    def _conjugator(self, d, c):
        """``u`` with ``d == red(u c u^-1)``, or None."""
        a, core_c = cyclic_reduce(group_reduce(c))
        b, core_d = cyclic_reduce(group_reduce(d))
        n = len(core_c)
        if n != len(core_d) or n == 0:
            return None
        for k in range(n):
            if core_c[k:] + core_c[:k] == core_d:
                x = core_c[:k]
                return group_mul(b, group_inverse(x), group_inverse(a))
        return None

    def _compute(self, w, positive_only):
        out = []
        seen = set()
        full = self.strategy.kind == StrategyKind.FULL
        wi = group_inverse(w)
        wkey = self.order.key(w)
        cands = [x for n in range(len(w) + 1) for x in self._words(n) if self.order.key(x) < wkey]
        for rule, r1, r2 in self.rules:
            for eps in (1, -1):
                a, b = (r1, r2) if eps > 0 else (group_inverse(r1), group_inverse(r2))
                c = group_mul(b, group_inverse(a))
                core_len = len(cyclic_reduce(c)[1])
                for x in cands:
                    d = group_mul(x, wi)
                    if len(cyclic_reduce(d)[1]) != core_len or not are_conjugate(d, c):
                        continue
                    u = self._conjugator(d, c)
                    v = group_mul(group_inverse(a), group_inverse(u), w)
                    if (x, rule.name, eps) in seen:
                        continue
                    seen.add((x, rule.name, eps))
                    out.append(Move(x, rule, True, (u, v, eps), f"{rule.name}{'' if eps > 0 else '^-'}"))
        if positive_only and not full:
            return out, True
        # sample of non-positive steps: replace an occurrence of a side as a factor
        for rule, r1, r2 in self.rules:
            for eps in (1, -1):
                a, b = (r1, r2) if eps > 0 else (group_inverse(r1), group_inverse(r2))
                n = len(a)
                for i in range(len(w) - n + 1):
                    if w[i:i + n] == a:
                        u, v = w[:i], w[i + n:]
                        x = group_mul(u, b, v)
                        if self.order.key(x) < wkey or (x, rule.name, eps) in seen:
                            continue
                        seen.add((x, rule.name, eps))
                        out.append(Move(x, rule, full, (u, v, eps), f"{rule.name}{'' if eps > 0 else '^-'}"))
        if positive_only:
            out = [m for m in out if m.positive]
        return out, False

    def realize(self, t, move):
        u, v, eps = move.data
        sig = self.sig
        mu = sig.op("mu")
        hole = Hole(sort_of(move.rule.lhs))
        core = hole if eps > 0 else App(sig.op("inv"), (hole,))
        spine = core
        if u:
            spine = App(mu, (self.term(u), spine))
        if v:
            spine = App(mu, (spine, self.term(v)))
        ctx = hole_context(spine)
        s = ctx(move.rule.lhs)
        return RewritingStep(ctx, move.rule, self.equivalence_trace(t, s), None, ("group", u, v, eps))

    def equivalence_trace(self, t, u):
        if t == u:
            return EquivTrace.empty(t)
        n1, s1 = normal_form_trace(self.complete_rules, t)
        n2, s2 = normal_form_trace(self.complete_rules, u)
        if n1 != n2:
            raise ValueError("terms are not equivalent")
        return EquivTrace(t, u, tuple(s1 + reverse_steps(s2)))


def format_signed_word(w) -> str:
    if not w:
        return "1"
    parts = [x + ("^-" if s < 0 else "") for x, s in w]
    if all(len(x) == 1 for x, _ in w):
        return "".join(parts)
    return " ".join(parts)


# -- generic terms ---------------------------------------------------------------------


class GenericBackend(Backend):
    paradigm = "generic"

    def __init__(self, apm, strategy):
        super().__init__(apm, strategy)
        self.rep: dict = {}
        self.split = apm.split

    def key(self, t):
        k = canonical_key(self.apm.theory, t)
        if k is None:
            k = theory_canonical(t, self.split.assoc_ops, self.split.comm_ops, self.sig)
        self.rep.setdefault(k, t)
        return k

    def term(self, k):
        if isinstance(k, Term):
            return k
        return self.rep[k]

    def _class(self, t):
        b = self.apm.bounds
        return enumerate_class(self.apm.theory.axioms, t, bound=b.max_depth, constants=self.apm.constants, max_terms=b.max_class)

    def _compute(self, k, positive_only):
        t = self.term(k)
        cls = self._class(t)
        out = []
        seen = set()
        for u in cls:
            for rule in self.apm.rules:
                for ctx in syntactic_occurrences(rule.lhs, u):
                    tgt = self.key(ctx(rule.rhs))
                    if (tgt, rule.name) in seen:
                        continue
                    step = RewritingStep(ctx, rule)
                    pos = self.is_positive_step(step)
                    if positive_only and not pos:
                        continue
                    seen.add((tgt, rule.name))
                    out.append(Move(tgt, rule, pos, (u, ctx.path), f"{rule.name}@{'.'.join(map(str, ctx.path)) or 'root'}"))
        return out, cls.complete

    def realize(self, t, move):
        u, path = move.data
        rep = self.term(self.key(t))
        cls = self._class(rep)
        steps = cls.trace_to(u)
        pre = EquivTrace(rep, u, tuple(steps))
        if t != rep:
            pre = self.equivalence_trace(t, rep).then(pre)
        return RewritingStep(Context.at(u, path), move.rule, pre, None, ("generic",))

    def equivalence_trace(self, t, u):
        if t == u:
            return EquivTrace.empty(t)
        cls = self._class(t)
        if u in cls:
            return EquivTrace(t, u, tuple(cls.trace_to(u)))
        return EquivTrace(t, u, None, "canonical form")


# -- policy R: purely syntactic steps ------------------------------------------------------


class SyntacticBackend(Backend):
    """Steps without equivalence traces; classes are single terms."""

    def __init__(self, apm, strategy, inner: Backend):
        super().__init__(apm, strategy)
        self.inner = inner
        self.paradigm = inner.paradigm

    def key(self, t):
        return t

    def term(self, t):
        return t

    def _compute(self, t, positive_only):
        out = []
        for rule in self.apm.rules:
            for ctx in syntactic_occurrences(rule.lhs, t):
                step = RewritingStep(ctx, rule)
                pos = self.inner.is_positive_step(step)
                if positive_only and not pos:
                    continue
                out.append(Move(ctx(rule.rhs), rule, pos, (ctx.path,), f"{rule.name}@{'.'.join(map(str, ctx.path)) or 'root'}"))
        return out, True

    def realize(self, t, move):
        (path,) = move.data
        return RewritingStep(Context.at(t, path), move.rule, None, None, ("syntactic",))

    def equivalence_trace(self, t, u):
        return self.inner.equivalence_trace(t, u)


BACKENDS = {
    "string": StringBackend,
    "linear": LinearBackend,
    "group": GroupBackend,
    "generic": GenericBackend,
}
