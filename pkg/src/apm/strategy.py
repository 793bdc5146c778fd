"""Positive strategies: which members of an equivalence class may start a step."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

from .errors import BoundExhausted, InvalidOrder
from .normalize import (
    enumerate_class,
    group_eval,
    group_inverse,
    group_mul,
    linear_canonical,
    polynomial_to_term,
    signed_word_to_term,
    theory_canonical,
    word_to_term,
    assoc_flatten,
)
from .terms import Hole, Term, enumerate_positions, sort_of


class StrategyKind(str, Enum):
    FULL = "FULL"
    NF_MODULO = "NF_MODULO"
    GROUP_DEGLEX = "GROUP_DEGLEX"


class DeglexOrder:
    """Total order on signed letters, extended to reduced words by degree then
    lexicographically.  ``descending`` lists the letters from largest to
    smallest, e.g. ``s > t > s^- > t^-``.
    """

    def __init__(self, descending: Sequence[tuple[str, int]]):
        letters = [tuple(l) for l in descending]
        if len(set(letters)) != len(letters):
            raise InvalidOrder("repeated letter in order")
        self.descending = tuple(letters)
        n = len(letters)
        self._rank = {l: n - i for i, l in enumerate(letters)}
        pos = [l for l in letters if l[1] > 0]
        for x in pos:
            for y in pos:
                if x == y:
                    continue
                xi, yi = (x[0], -1), (y[0], -1)
                if xi not in self._rank or yi not in self._rank:
                    raise InvalidOrder(f"inverse of {x[0]} or {y[0]} missing from the order")
                if (self._rank[x] < self._rank[y]) != (self._rank[xi] < self._rank[yi]):
                    raise InvalidOrder(
                        f"order must satisfy x < y implies x^- < y^- (violated by {x[0]}, {y[0]})"
                    )

    @classmethod
    def from_generators(cls, names: Sequence[str]) -> "DeglexOrder":
        """``names`` from largest to smallest; inverses follow in the same order."""
        return cls([(n, 1) for n in names] + [(n, -1) for n in names])

    @property
    def generators(self):
        return [x for x, s in self.descending if s > 0]

    def rank(self, letter) -> int:
        return self._rank[tuple(letter)]

    def key(self, w):
        return (len(w), tuple(self._rank[l] for l in w))

    def less(self, w1, w2) -> bool:
        return self.key(w1) < self.key(w2)

    def __repr__(self):
        return " > ".join(x + ("^-" if s < 0 else "") for x, s in self.descending)


def deglex_compare(order: DeglexOrder, w1, w2) -> str:
    k1, k2 = order.key(w1), order.key(w2)
    return "LT" if k1 < k2 else "GT" if k1 > k2 else "EQ"


@dataclass
class PositiveStrategy:
    """``kind`` selects the built-in membership test; ``predicate`` (a function of
    a realized step) overrides it, which is how custom strategies are plugged in."""

    kind: StrategyKind = StrategyKind.FULL
    order: DeglexOrder | None = None
    predicate: Callable | None = field(default=None, compare=False)

    @classmethod
    def full(cls):
        return cls(StrategyKind.FULL)

    @classmethod
    def nf_modulo(cls):
        return cls(StrategyKind.NF_MODULO)

    @classmethod
    def group_deglex(cls, order: DeglexOrder | Sequence[str]):
        if not isinstance(order, DeglexOrder):
            order = DeglexOrder.from_generators(list(order))
        return cls(StrategyKind.GROUP_DEGLEX, order)

    def describe(self) -> str:
        if self.predicate is not None:
            return "custom"
        if self.kind == StrategyKind.GROUP_DEGLEX:
            return f"group-deglex {self.order!r}"
        return self.kind.value.lower().replace("_", "-")


# -- membership tests --------------------------------------------------------------

_LINEAR_AC = {"add", "mul", "oplus"}


def is_nf_modulo(apm, t: Term) -> bool:
    """Is ``t`` a normal form of the oriented part modulo the unoriented part?"""
    name = apm.theory.name
    if name in ("Mag", "Ass", "AC"):
        return True
    if name in ("Mon", "CMon"):
        return t.op.name == "e" or all(u.op.name != "e" for _, u in enumerate_positions(t))
    if name in ("ModC", "AssAlg") and sort_of(t).name == "m":
        assoc = _LINEAR_AC | ({"mu"} if name == "AssAlg" else set())
        nf = polynomial_to_term(linear_canonical(t), apm.signature)
        return theory_canonical(t, assoc, _LINEAR_AC) == theory_canonical(nf, assoc, _LINEAR_AC)
    if name == "GrpTilde":
        from .theories import oriented_normal_form

        nf = oriented_normal_form(apm.theory.axioms, t)
        return theory_canonical(t, {"mu"}) == theory_canonical(nf, {"mu"})
    return _generic_nf(apm, t)


def _generic_nf(apm, t: Term) -> bool:
    from .theories import rule_instances_at

    split = apm.split
    cls = enumerate_class(split.unoriented, t, bound=apm.bounds.max_depth, max_terms=apm.bounds.max_class)
    for u in cls:
        for _, sub in enumerate_positions(u):
            for _ in rule_instances_at(split.oriented, sub, (), "+"):
                return False
    return True


def hole_reading(ctx):
    """Read a group context as ``u . hole^eps . v`` with ``u, v`` reduced."""

    def ev(x):
        if isinstance(x, Hole):
            return (("\0hole", 1),)
        n = x.op.name
        if n == "mu":
            return group_mul(ev(x.args[0]), ev(x.args[1]))
        if n == "inv":
            return group_inverse(ev(x.args[0]))
        if n == "e":
            return ()
        if not x.args:
            return ((n, 1),)
        raise ValueError(f"symbol {n!r} outside the group signature")

    w = ev(ctx.spine)
    for i, (x, s) in enumerate(w):
        if x == "\0hole":
            return w[:i], s, w[i + 1:]
    raise ValueError("hole vanished")


def group_step_positive(order: DeglexOrder, step) -> bool:
    u, eps, v = hole_reading(step.context)
    r1, r2 = group_eval(step.rule.lhs), group_eval(step.rule.rhs)
    if eps < 0:
        r1, r2 = group_inverse(r1), group_inverse(r2)
    return order.less(group_mul(u, r2, v), group_mul(u, r1, v))


def is_positive(sigma: PositiveStrategy, step, apm=None) -> bool:
    """Positivity is judged on the redex term ``A[lhs]`` the rule is applied to."""
    if sigma.predicate is not None:
        return bool(sigma.predicate(step))
    if sigma.kind == StrategyKind.FULL:
        return True
    if sigma.kind == StrategyKind.GROUP_DEGLEX:
        return group_step_positive(sigma.order, step)
    if apm is None:
        raise ValueError("the normal-form strategy needs the polygraph to decide membership")
    return is_nf_modulo(apm, step.redex_source)


def sigma_representative(sigma: PositiveStrategy, t: Term, apm=None) -> Term:
    """A deterministic member of sigma(class of t) equivalent to ``t``.

    For the group strategy the class of an irreducible word has no member of
    the source shape, so the right comb of the reduced word is returned.
    """
    if sigma.kind == StrategyKind.FULL or sigma.predicate is not None:
        return t
    if apm is None:
        raise ValueError("a polygraph is needed to choose representatives")
    name = apm.theory.name
    sig = apm.signature
    if sigma.kind == StrategyKind.GROUP_DEGLEX:
        backend = apm.paradigm_backend
        k = backend.key(t)
        moves, _ = backend.moves(k, positive_only=True)
        if moves:
            return backend.realize(signed_word_to_term(k, sig), moves[0]).redex_source
        return signed_word_to_term(k, sig)
    if name in ("Mon", "Ass"):
        return word_to_term(assoc_flatten(t, "mu", "e"), sig, "mu", "e")
    if name in ("ModC", "AssAlg") and sort_of(t).name == "m":
        return polynomial_to_term(linear_canonical(t), sig)
    if name == "GrpTilde":
        return signed_word_to_term(group_eval(t), sig)
    from .theories import oriented_normal_form

    nf = oriented_normal_form(apm.split.oriented, t, limit=apm.bounds.max_terms)
    if not _generic_nf(apm, nf):
        raise BoundExhausted("no normal form modulo found within bounds")
    return theory_canonical(nf, apm.split.assoc_ops, apm.split.comm_ops, sig)


# -- positive confluence ----------------------------------------------------------------


@dataclass
class PositiveConfluenceResult:
    status: str  # HOLDS_ON_SAMPLE, COUNTEREXAMPLE, UNKNOWN
    sampled: int = 0
    counterexample: object = None
    note: str = ""


def positive_confluence_check(apm, sigma: PositiveStrategy | None = None, bounds=None, seeds=None, sample: int = 200):
    """Sampled check that every step can be replaced by positive steps of
    length at most one closing the square (up to equivalence)."""
    from .engine import reachability

    sigma = sigma or apm.strategy
    if sigma.kind == StrategyKind.FULL and sigma.predicate is None:
        return PositiveConfluenceResult("HOLDS_ON_SAMPLE", 0, None, "full strategy: a' = a and b' is an identity")
    if not apm.rules:
        return PositiveConfluenceResult("HOLDS_ON_SAMPLE", 0, None, "no rules, hence no steps to close")
    bounds = bounds or apm.bounds
    if sigma is not apm.strategy:
        apm = apm.with_options(strategy=sigma)
    backend = apm.backend
    seeds = seeds if seeds is not None else apm.default_seeds()
    g = reachability(apm, seeds, max_terms=min(bounds.max_terms, 300), max_depth=min(bounds.max_depth, 6))
    checked = 0
    for k in g.keys:
        for m in g.edges.get(k, []):
            if checked >= sample:
                break
            checked += 1
            if m.positive:
                continue
            left = {k} | {x.target for x in backend.moves(k, positive_only=True)[0]}
            right = {m.target} | {x.target for x in backend.moves(m.target, positive_only=True)[0]}
            if not left & right:
                step = backend.realize(backend.term(k), m)
                return PositiveConfluenceResult("COUNTEREXAMPLE", checked, step)
    if checked == 0:
        return PositiveConfluenceResult("UNKNOWN", 0, None, "no step sampled")
    return PositiveConfluenceResult("HOLDS_ON_SAMPLE", checked)
