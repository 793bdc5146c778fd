"""Sorted terms, contexts and positions over a many-sorted signature.

Terms are immutable trees.  A node is either a :class:`Var` (a projection
``x_i`` relative to a declared arity), an :class:`App` (an operation applied to
its argument tuple) or, inside contexts only, a :class:`Hole`.  Positions are
tuples of 1-based child indices; ``()`` is the root.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    ArityMismatch,
    ParseError,
    SortMismatch,
    UnknownSymbol,
)


@dataclass(frozen=True)
class Sort:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class OperationSymbol:
    name: str
    arity: tuple[Sort, ...]
    coarity: Sort

    @property
    def is_constant(self) -> bool:
        return not self.arity

    def __repr__(self):
        return self.name


class Term:
    """Base class of term nodes."""

    __slots__ = ()

    is_var = False
    is_hole = False

    @property
    def args(self) -> tuple["Term", ...]:
        return ()


class Var(Term):
    __slots__ = ("index", "sorts", "_hash")

    is_var = True

    def __init__(self, index: int, sorts: Sequence[Sort]):
        if index < 1 or index > len(sorts):
            raise ValueError(f"variable x{index} outside arity of length {len(sorts)}")
        self.index = index
        self.sorts = tuple(sorts)
        self._hash = hash(("var", index, self.sorts))

    @property
    def sort(self) -> Sort:
        return self.sorts[self.index - 1]

    def __eq__(self, other):
        return (
            isinstance(other, Var)
            and other.index == self.index
            and other.sorts == self.sorts
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"x{self.index}"


class Hole(Term):
    __slots__ = ("sort",)

    is_hole = True

    def __init__(self, sort: Sort):
        self.sort = sort

    def __eq__(self, other):
        return isinstance(other, Hole) and other.sort == self.sort

    def __hash__(self):
        return hash(("hole", self.sort))

    def __repr__(self):
        return "[]"


class App(Term):
    __slots__ = ("op", "_args", "_hash", "_size")

    def __init__(self, op: OperationSymbol, args: Sequence[Term] = ()):
        self.op = op
        self._args = tuple(args)
        self._hash = hash((op.name, self._args))
        self._size = None

    @property
    def args(self) -> tuple[Term, ...]:
        return self._args

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.op == other.op
            and self._args == other._args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self._args:
            return self.op.name
        return f"{self.op.name}({','.join(map(repr, self._args))})"


def const(op: OperationSymbol) -> App:
    return App(op, ())


# -- basic measures ---------------------------------------------------------


def term_size(t: Term) -> int:
    """Number of application nodes (variables and holes count zero)."""
    if isinstance(t, App):
        if t._size is None:
            t._size = 1 + sum(term_size(a) for a in t.args)
        return t._size
    return 0


def is_ground(t: Term) -> bool:
    if t.is_var or t.is_hole:
        return False
    return all(is_ground(a) for a in t.args)


def variables(t: Term) -> set[int]:
    if isinstance(t, Var):
        return {t.index}
    out: set[int] = set()
    for a in t.args:
        out |= variables(a)
    return out


def symbols(t: Term) -> set[OperationSymbol]:
    if isinstance(t, App):
        out = {t.op}
        for a in t.args:
            out |= symbols(a)
        return out
    return set()


# -- signatures ---------------------------------------------------------------


@dataclass
class Signature:
    """Sorts and operation symbols in declaration order.

    ``infix`` maps an infix token (``"."``, ``"(+)"``, ``"*"`` ...) to the
    candidate binary symbols it may denote; the parser picks the one whose
    arity fits the argument sorts.
    """

    sorts: dict[str, Sort] = field(default_factory=dict)
    operations: dict[str, OperationSymbol] = field(default_factory=dict)
    infix: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def add_sort(self, name: str) -> Sort:
        if name in self.sorts:
            return self.sorts[name]
        s = Sort(name)
        self.sorts[name] = s
        return s

    def add_operation(self, name: str, arity: Sequence[str | Sort], coarity: str | Sort) -> OperationSymbol:
        ar = tuple(self._sort(s) for s in arity)
        co = self._sort(coarity)
        op = OperationSymbol(name, ar, co)
        old = self.operations.get(name)
        if old is not None and old != op:
            raise ValueError(f"operation {name} redeclared with a different type")
        self.operations[name] = op
        self._rank = None
        return op

    def _sort(self, s: str | Sort) -> Sort:
        name = s.name if isinstance(s, Sort) else s
        if name not in self.sorts:
            raise UnknownSymbol(f"unknown sort {name!r}")
        return self.sorts[name]

    def op(self, name: str) -> OperationSymbol:
        try:
            return self.operations[name]
        except KeyError:
            raise UnknownSymbol(f"unknown symbol {name!r}") from None

    def rank(self, op: OperationSymbol) -> int:
        ranks = getattr(self, "_rank", None)
        if ranks is None:
            ranks = {name: i for i, name in enumerate(self.operations)}
            self._rank = ranks
        return ranks.get(op.name, len(ranks))

    def constants(self, sort: Sort | None = None) -> list[OperationSymbol]:
        return [
            op for op in self.operations.values()
            if op.is_constant and (sort is None or op.coarity == sort)
        ]

    def extended(self) -> "Signature":
        """A copy that can take further declarations without touching self."""
        sig = Signature(dict(self.sorts), dict(self.operations), dict(self.infix))
        return sig

    def order_key(self, t: Term):
        """Total order on ground terms: size, root rank, then children."""
        if isinstance(t, App):
            # the name breaks ties between symbols this signature does not know
            return (term_size(t), self.rank(t.op), t.op.name, tuple(self.order_key(a) for a in t.args))
        if isinstance(t, Var):
            return (0, -1, "", (t.index,))
        return (0, -2, "", ())


def typecheck_term(sig: Signature, t: Term) -> Sort:
    """Return the coarity of ``t`` after checking every subterm against ``sig``."""
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, Hole):
        return t.sort
    assert isinstance(t, App)
    declared = sig.operations.get(t.op.name)
    if declared is None:
        raise UnknownSymbol(f"unknown symbol {t.op.name!r}")
    if declared != t.op:
        raise SortMismatch(f"symbol {t.op.name} used with type {t.op.arity}->{t.op.coarity}")
    if len(t.args) != len(t.op.arity):
        raise ArityMismatch(
            f"{t.op.name} expects {len(t.op.arity)} arguments, got {len(t.args)}"
        )
    for i, (a, s) in enumerate(zip(t.args, t.op.arity), 1):
        got = typecheck_term(sig, a)
        if got != s:
            raise SortMismatch(f"argument {i} of {t.op.name} has sort {got}, expected {s}")
    return t.op.coarity


def sort_of(t: Term) -> Sort:
    if isinstance(t, App):
        return t.op.coarity
    return t.sort


# -- positions ------------------------------------------------------------------

Position = tuple  # tuple[int, ...] of 1-based child indices


def subterm(t: Term, pos: Position) -> Term:
    for i in pos:
        t = t.args[i - 1]
    return t


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    assert isinstance(t, App)
    i = pos[0]
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], pos[1:], new)
    return App(t.op, args)


def enumerate_positions(t: Term) -> list[tuple[Position, Term]]:
    """Pre-order list of ``(position, subterm)`` pairs."""
    out: list[tuple[Position, Term]] = []

    def walk(u, pos):
        out.append((pos, u))
        for i, a in enumerate(u.args, 1):
            walk(a, pos + (i,))

    walk(t, ())
    return out


def from_positions(entries: Sequence[tuple[Position, Term]]) -> Term:
    """Rebuild a term from its position listing (the root entry suffices)."""
    for pos, u in entries:
        if pos == ():
            return u
    raise ValueError("no root entry")


# -- contexts -------------------------------------------------------------------


class Context:
    """A term with exactly one hole, remembered by its position."""

    __slots__ = ("spine", "path", "hole_sort")

    def __init__(self, spine: Term, path: Position, hole_sort: Sort):
        self.spine = spine
        self.path = tuple(path)
        self.hole_sort = hole_sort

    @classmethod
    def identity(cls, sort: Sort) -> "Context":
        return cls(Hole(sort), (), sort)

    @classmethod
    def at(cls, t: Term, pos: Position) -> "Context":
        """The context obtained by punching a hole into ``t`` at ``pos``."""
        s = sort_of(subterm(t, pos))
        return cls(replace_at(t, pos, Hole(s)), pos, s)

    def __call__(self, t: Term) -> Term:
        return apply_context(self, t)

    def compose(self, inner: "Context") -> "Context":
        return compose_contexts(self, inner)

    def is_identity(self) -> bool:
        return not self.path

    def __eq__(self, other):
        return isinstance(other, Context) and other.spine == self.spine and other.path == self.path

    def __hash__(self):
        return hash((self.spine, self.path))

    def __repr__(self):
        return f"Context({self.spine!r})"


def apply_context(ctx: Context, t: Term) -> Term:
    if sort_of(t) != ctx.hole_sort:
        raise SortMismatch(f"cannot plug a term of sort {sort_of(t)} into a hole of sort {ctx.hole_sort}")
    return replace_at(ctx.spine, ctx.path, t)


def compose_contexts(outer: Context, inner: Context) -> Context:
    """``(outer . inner)[t] == outer[inner[t]]``."""
    spine = apply_context(outer, inner.spine)
    return Context(spine, outer.path + inner.path, inner.hole_sort)


def syntactic_occurrences(pattern: Term, t: Term) -> list[Context]:
    """All contexts ``A`` with ``A[pattern] == t`` (pre-order)."""
    return [Context.at(t, pos) for pos, u in enumerate_positions(t) if u == pattern]


def disjoint(p: Position, q: Position) -> bool:
    """Neither position is a prefix of the other."""
    n = min(len(p), len(q))
    return p[:n] != q[:n]


# -- text syntax ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\(\+\)|[A-Za-z0-9_']+|[(),.*+#@])")


def _tokenize(text: str) -> list[str]:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].strip()[:1]!r} in {text!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


_ADDITIVE = ("+", "(+)")


def parse_term(text: str, sig: Signature, variables: dict[str, Var] | None = None) -> Term:
    """Parse prefix/infix term syntax, e.g. ``mu(s,t)`` or ``(s.t).s``.

    Infix operators are left-associative; ``+`` and ``(+)`` bind more
    loosely than the other infix symbols (``.``, ``*``).
    ``variables`` maps identifiers to variable nodes (used for axioms).
    """
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty term")
    variables = variables or {}
    i = 0

    def peek():
        return toks[i] if i < len(toks) else None

    def take(expected=None):
        nonlocal i
        if i >= len(toks):
            raise ParseError(f"unexpected end of input in {text!r}")
        tok = toks[i]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, got {tok!r} in {text!r}")
        i += 1
        return tok

    def atom():
        tok = take()
        if tok == "(":
            t = expr()
            take(")")
            return t
        if tok in variables:
            return variables[tok]
        if not re.fullmatch(r"[A-Za-z0-9_']+", tok):
            raise ParseError(f"unexpected token {tok!r} in {text!r}")
        op = sig.op(tok)
        if peek() == "(" and not op.is_constant:
            take("(")
            args = [expr()]
            while peek() == ",":
                take(",")
                args.append(expr())
            take(")")
            return App(op, args)
        return App(op, ())

    def product():
        left = atom()
        while peek() in sig.infix and peek() not in _ADDITIVE:
            tok = take()
            left = _infix(sig, tok, left, atom())
        return left

    def expr():
        left = product()
        while peek() in sig.infix and peek() in _ADDITIVE:
            tok = take()
            left = _infix(sig, tok, left, product())
        return left

    t = expr()
    if i != len(toks):
        raise ParseError(f"trailing input {' '.join(toks[i:])!r} in {text!r}")
    return t


def _infix(sig: Signature, tok: str, left: Term, right: Term) -> Term:
    ls, rs = sort_of(left), sort_of(right)
    for name in sig.infix[tok]:
        op = sig.operations.get(name)
        if op is not None and op.arity == (ls, rs):
            return App(op, (left, right))
    raise SortMismatch(f"no infix {tok!r} for sorts {ls}, {rs}")


def _infix_token(t: Term, sig: Signature | None) -> str | None:
    if sig is None or not isinstance(t, App) or len(t.args) != 2:
        return None
    for tok, names in sig.infix.items():
        if t.op.name in names:
            return tok
    return None


def format_term(t: Term, sig: Signature | None = None) -> str:
    """Inverse of :func:`parse_term`; uses infix sugar when the signature has it."""
    tok = _infix_token(t, sig)
    if tok is not None:
        sep = tok if tok == "." else f" {tok} "
        return sep.join(_wrap(a, sig) for a in t.args)
    if isinstance(t, App) and t.args:
        return f"{t.op.name}({','.join(format_term(a, sig) for a in t.args)})"
    return repr(t)


def _wrap(t: Term, sig: Signature | None) -> str:
    s = format_term(t, sig)
    return f"({s})" if _infix_token(t, sig) is not None else s
