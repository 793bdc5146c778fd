"""Ground rules, equivalence traces, rewriting steps and paths."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .errors import MalformedStep
from .terms import Context, Term, sort_of


class Policy(str, Enum):
    """How an R-step may be sandwiched between equivalences."""

    R = "R"
    EPR = "EPR"
    RPE = "RPE"
    EPRE = "EPRE"

    @classmethod
    def parse(cls, text: str) -> "Policy":
        key = text.strip().upper()
        aliases = {"R": "R", "PR": "EPR", "EPR": "EPR", "RP": "RPE", "RPE": "RPE", "PRP": "EPRE", "EPRE": "EPRE"}
        if key not in aliases:
            raise ValueError(f"unknown step policy {text!r}")
        return cls(aliases[key])


@dataclass(frozen=True)
class GroundRule:
    name: str
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if sort_of(self.lhs) != sort_of(self.rhs):
            from .errors import SortMismatch

            raise SortMismatch(f"rule {self.name}: sides have different sorts")

    def __repr__(self):
        return f"{self.name}: {self.lhs!r} => {self.rhs!r}"


@dataclass
class Bounds:
    max_class: int = 256
    max_terms: int = 10000
    max_depth: int = 64
    insertion_bound: int = 1
    join_depth: int = 8

    def as_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True)
class EquivTrace:
    """A chain of axiom applications from ``source`` to ``target``.

    ``steps`` holds ``(context, axiom instance)`` pairs.  When it is None the
    equivalence is certified by the theory's canonical form instead
    (``certificate`` names the procedure); such traces replay by re-deciding
    the equivalence.
    """

    source: Term
    target: Term
    steps: tuple | None = ()
    certificate: str | None = None

    @classmethod
    def empty(cls, t: Term) -> "EquivTrace":
        return cls(t, t, ())

    @property
    def length(self) -> int | None:
        return None if self.steps is None else len(self.steps)

    def reversed(self) -> "EquivTrace":
        if self.steps is None:
            return EquivTrace(self.target, self.source, None, self.certificate)
        steps = tuple((ctx, inst.reversed()) for ctx, inst in reversed(self.steps))
        return EquivTrace(self.target, self.source, steps)

    def then(self, other: "EquivTrace") -> "EquivTrace":
        if self.target != other.source:
            raise MalformedStep("traces do not chain")
        if self.steps is None or other.steps is None:
            return EquivTrace(self.source, other.target, None, self.certificate or other.certificate)
        return EquivTrace(self.source, other.target, self.steps + other.steps)

    def replay(self, theory=None) -> Term:
        """Check every link of the chain and return the target."""
        if self.steps is None:
            from .normalize import equiv_modulo

            if theory is None or not equiv_modulo(theory, self.source, self.target):
                raise MalformedStep("certified equivalence does not hold")
            return self.target
        cur = self.source
        for ctx, inst in self.steps:
            if ctx(inst.source) != cur:
                raise MalformedStep(f"trace link does not match {cur!r}")
            cur = ctx(inst.target)
        if cur != self.target:
            raise MalformedStep("trace does not end at its target")
        return cur


@dataclass(frozen=True)
class RewritingStep:
    """``pre`` then ``context[rule]`` then ``post``; traces are optional."""

    context: Context
    rule: GroundRule
    pre: EquivTrace | None = None
    post: EquivTrace | None = None
    info: tuple = ()

    @property
    def redex_source(self) -> Term:
        return self.context(self.rule.lhs)

    @property
    def redex_target(self) -> Term:
        return self.context(self.rule.rhs)

    @property
    def source(self) -> Term:
        return self.pre.source if self.pre is not None else self.redex_source

    @property
    def target(self) -> Term:
        return self.post.target if self.post is not None else self.redex_target

    def with_post(self, post: EquivTrace) -> "RewritingStep":
        return RewritingStep(self.context, self.rule, self.pre, post, self.info)

    def replay(self, theory=None) -> Term:
        if self.pre is not None:
            if self.pre.target != self.redex_source:
                raise MalformedStep("pre-equivalence does not end at the redex")
            self.pre.replay(theory)
        if self.post is not None:
            if self.post.source != self.redex_target:
                raise MalformedStep("post-equivalence does not start at the reduct")
            self.post.replay(theory)
        return self.target


@dataclass
class RewritingPath:
    steps: list = field(default_factory=list)
    start: Term | None = None

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def source(self) -> Term:
        return self.steps[0].source if self.steps else self.start

    @property
    def target(self) -> Term:
        return self.steps[-1].target if self.steps else self.start

    def then(self, other: "RewritingPath") -> "RewritingPath":
        start = self.start if self.start is not None else other.source
        return RewritingPath(self.steps + other.steps, start)

    def replay(self, theory=None, equiv=None) -> Term:
        """Replay each step; consecutive steps must chain up to ``equiv``."""
        cur = self.source
        for s in self.steps:
            if s.source != cur and not (equiv and equiv(s.source, cur)):
                raise MalformedStep("path steps do not chain")
            cur = s.replay(theory)
        return cur


def apply_step(step: RewritingStep, theory=None) -> Term:
    """Target of ``step`` after checking it is well formed."""
    return step.replay(theory)


def context_path(ctx: Context) -> tuple:
    return ctx.path


def step_chain(steps: Sequence[RewritingStep]) -> RewritingPath:
    return RewritingPath(list(steps), steps[0].source if steps else None)
