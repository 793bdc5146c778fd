"""Canonical forms for the supported modulo theories.

Words are tuples of constant names.  Signed words (group case) are tuples of
``(name, sign)`` pairs with sign ``+1`` or ``-1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import IllTypedLinearTerm, NonFlattenableSymbol
from .terms import App, Context, OperationSymbol, Signature, Term, enumerate_positions, term_size

Word = tuple
SignedWord = tuple


# -- associative flattening ------------------------------------------------------


def _opname(op) -> str:
    return op.name if isinstance(op, OperationSymbol) else op


def assoc_flatten(t: Term, mu="mu", unit: str | None = "e") -> Word:
    """Spell ``t`` as a word: flatten ``mu``, drop the unit, keep constants."""
    mu = _opname(mu)
    out = []
    stack = [t]
    while stack:
        u = stack.pop()
        if not isinstance(u, App):
            raise NonFlattenableSymbol(f"variable or hole in {u!r}")
        if u.op.name == mu and len(u.args) == 2:
            stack.append(u.args[1])
            stack.append(u.args[0])
        elif not u.args:
            if u.op.name != unit:
                out.append(u.op.name)
        else:
            raise NonFlattenableSymbol(f"symbol {u.op.name!r} cannot be flattened under {mu!r}")
    return tuple(out)


def right_comb(items: Iterable[Term], op: OperationSymbol, empty: Term | None = None) -> Term:
    items = list(items)
    if not items:
        if empty is None:
            raise ValueError("empty right comb without a unit")
        return empty
    acc = items[-1]
    for x in reversed(items[:-1]):
        acc = App(op, (x, acc))
    return acc


def word_to_term(w: Word, sig: Signature, mu: str = "mu", unit: str = "e") -> Term:
    """Right-comb term spelling the word ``w``; the empty word is the unit."""
    empty = App(sig.op(unit), ()) if unit in sig.operations else None
    if len(w) == 1:
        return App(sig.op(w[0]), ())
    return right_comb([App(sig.op(c), ()) for c in w], sig.op(mu) if w else None, empty)


# -- A / AC canonical forms ----------------------------------------------------------


def _default_key(t: Term):
    if isinstance(t, App):
        return (term_size(t), t.op.name, tuple(_default_key(a) for a in t.args))
    return (0, "", ())


def theory_canonical(t: Term, assoc: Iterable[str], comm: Iterable[str] = (), sig: Signature | None = None) -> Term:
    """Canonical representative modulo associativity of ``assoc`` symbols and
    commutativity of ``comm`` symbols (which must also be associative).

    Arguments of a flattened symbol are canonicalized recursively; commutative
    ones are sorted by the total term order; the result is a right comb.
    """
    assoc, comm = frozenset(assoc), frozenset(comm)
    key = sig.order_key if sig is not None else _default_key
    memo: dict[Term, Term] = {}

    def canon(u: Term) -> Term:
        if not isinstance(u, App) or not u.args:
            return u
        hit = memo.get(u)
        if hit is not None:
            return hit
        name = u.op.name
        if name in assoc and len(u.args) == 2:
            parts = []
            stack = [u]
            while stack:
                v = stack.pop()
                if isinstance(v, App) and v.op == u.op:
                    stack.append(v.args[1])
                    stack.append(v.args[0])
                else:
                    parts.append(canon(v))
            if name in comm:
                parts.sort(key=key)
            res = right_comb(parts, u.op)
        else:
            res = App(u.op, [canon(a) for a in u.args])
        memo[u] = res
        return res

    return canon(t)


def ac_canonical(t: Term, mu="mu", sig: Signature | None = None) -> Term:
    """``t`` and ``u`` are AC-equivalent (for ``mu``) iff their canonical forms agree."""
    mu = _opname(mu)
    return theory_canonical(t, {mu}, {mu}, sig)


# -- polynomials -------------------------------------------------------------------


def _mono_key(m):
    if isinstance(m, tuple):
        return (0, len(m), m)
    return (1, _default_key(m), ())


class Polynomial:
    """Finite linear combination of monomials with exact rational coefficients.

    Monomials are words (tuples of constant names).  The empty word stands for
    a bare scalar.  Zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        d = {}
        for m, c in dict(terms or {}).items():
            c = Fraction(c)
            if c:
                d[m] = c
        self._terms = d
        self._hash = None

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def monomial(cls, m, c=1):
        return cls({m: c})

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: _mono_key(kv[0]))

    @property
    def support(self):
        return [m for m, _ in self.items()]

    def coeff(self, m) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._terms.values())

    def __len__(self):
        return len(self._terms)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        d = dict(self._terms)
        for m, c in other._terms.items():
            d[m] = d.get(m, 0) + c
        return Polynomial(d)

    def __neg__(self):
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        return Polynomial({m: c * v for m, v in self._terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        d: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 + m2
                d[m] = d.get(m, 0) + c1 * c2
        return Polynomial(d)

    def multiply_word(self, p: Word, q: Word) -> "Polynomial":
        """The polynomial ``p . self . q``."""
        return Polynomial({p + m + q: c for m, c in self._terms.items()})

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sort_key(self):
        return tuple((_mono_key(m), c) for m, c in self.items())

    def __repr__(self):
        return format_polynomial(self)


def format_word(w: Word) -> str:
    if all(len(c) == 1 for c in w):
        return "".join(w)
    return ".".join(w)


def _format_coeff(c: Fraction) -> str:
    s = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return f"({s})" if c < 0 or c.denominator != 1 else s


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for m, c in p.items():
        if isinstance(m, tuple):
            body = format_word(m) if m else None
        else:
            body = repr(m)
        if body is None:
            parts.append(_format_coeff(c).strip("()") if c > 0 else _format_coeff(c))
        elif c == 1:
            parts.append(body)
        else:
            parts.append(f"{_format_coeff(c)}*{body}")
    return " + ".join(parts)


SCALAR_OPS = {"add", "0", "neg", "mul", "1", "recip"}
MODULE_OPS = {"oplus", "0m", "inv", "act", "mu"}


def scalar_value(t: Term) -> Fraction:
    """Evaluate a ground scalar term over ``0, 1, +, neg, *`` (and ``recip``)."""
    if not isinstance(t, App):
        raise IllTypedLinearTerm(f"non-ground scalar {t!r}")
    n = t.op.name
    if n == "0":
        return Fraction(0)
    if n == "1":
        return Fraction(1)
    if n == "add":
        return scalar_value(t.args[0]) + scalar_value(t.args[1])
    if n == "mul":
        return scalar_value(t.args[0]) * scalar_value(t.args[1])
    if n == "neg":
        return -scalar_value(t.args[0])
    if n == "recip":
        v = scalar_value(t.args[0])
        if v == 0:
            raise IllTypedLinearTerm("reciprocal of zero")
        return 1 / v
    raise IllTypedLinearTerm(f"symbol {n!r} is not a scalar operation")


def linear_canonical(t: Term) -> Polynomial:
    """Fully reduced polynomial of a ground module term.

    Evaluates the term directly: scalars into exact rationals, ``(+)`` as sum,
    ``inv`` as negation, the action as scaling and ``.`` (when present) as the
    associative product of words.  A scalar-sorted term yields a polynomial on
    the empty word.
    """
    memo: dict[Term, Polynomial] = {}

    def ev(u: Term) -> Polynomial:
        if not isinstance(u, App):
            raise IllTypedLinearTerm(f"non-ground subterm {u!r}")
        hit = memo.get(u)
        if hit is not None:
            return hit
        n = u.op.name
        if n in SCALAR_OPS:
            res = Polynomial.monomial((), scalar_value(u))
        elif n == "oplus":
            res = ev(u.args[0]) + ev(u.args[1])
        elif n == "0m":
            res = Polynomial.zero()
        elif n == "inv":
            res = -ev(u.args[0])
        elif n == "act":
            res = ev(u.args[1]).scale(scalar_value(u.args[0]))
        elif n == "mu":
            res = ev(u.args[0]) * ev(u.args[1])
        elif not u.args:
            if u.op.coarity.name == "r":
                raise IllTypedLinearTerm(f"scalar constant {n!r} outside the coefficient domain")
            res = Polynomial.monomial((n,))
        else:
            raise IllTypedLinearTerm(f"symbol {n!r} is not a module operation")
        memo[u] = res
        return res

    return ev(t)


def scalar_term(c, sig: Signature) -> Term:
    """Canonical scalar term: ``1+(1+...)``, ``neg(1)+...`` or ``n*recip(d)``."""
    c = Fraction(c)
    one, zero = App(sig.op("1"), ()), App(sig.op("0"), ())
    add = sig.op("add")

    def integer(n: int) -> Term:
        if n == 0:
            return zero
        unit = one if n > 0 else App(sig.op("neg"), (one,))
        return right_comb([unit] * abs(n), add)

    if c.denominator == 1:
        return integer(c.numerator)
    return App(sig.op("mul"), (integer(c.numerator), App(sig.op("recip"), (integer(c.denominator),))))


def scalar_size(c) -> int:
    """Size of ``scalar_term(c)`` without building it."""
    c = Fraction(c)

    def integer(n):
        if n == 0:
            return 1
        return 2 * n - 1 if n > 0 else 3 * -n - 1

    if c.denominator == 1:
        return integer(c.numerator)
    return integer(c.numerator) + integer(c.denominator) + 2


def polynomial_size(p: Polynomial) -> int:
    """Size of ``polynomial_to_term(p)`` without building it."""
    if p.is_zero():
        return 1
    total = 0
    for m, c in p.items():
        mono = 2 * len(m) - 1
        total += mono if c == 1 else 1 + scalar_size(c) + mono
    return total + len(p) - 1


def polynomial_to_term(p: Polynomial, sig: Signature) -> Term:
    """Canonical module term for ``p``: a right comb of ``c.m`` summands."""
    parts = []
    for m, c in p.items():
        if m == ():
            raise IllTypedLinearTerm("bare scalar has no module term")
        mono = word_to_term(m, sig, "mu", unit="") if isinstance(m, tuple) else m
        parts.append(mono if c == 1 else App(sig.op("act"), (scalar_term(c, sig), mono)))
    return right_comb(parts, sig.op("oplus"), App(sig.op("0m"), ()))


# -- free groups ---------------------------------------------------------------------


def group_reduce(w: SignedWord) -> SignedWord:
    """Free reduction by cancelling adjacent ``x x^-`` and ``x^- x``."""
    out: list = []
    for letter in w:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def group_inverse(w: SignedWord) -> SignedWord:
    return tuple((x, -s) for x, s in reversed(w))


def group_mul(*ws: SignedWord) -> SignedWord:
    return group_reduce(tuple(l for w in ws for l in w))


def cyclic_reduce(w: SignedWord) -> tuple[SignedWord, SignedWord]:
    """Split reduced ``w`` as ``c . core . c^-1`` with ``core`` cyclically reduced."""
    i, j = 0, len(w) - 1
    while i < j and w[i][0] == w[j][0] and w[i][1] == -w[j][1]:
        i += 1
        j -= 1
    return w[:i], w[i:j + 1]


def are_conjugate(u: SignedWord, v: SignedWord) -> bool:
    """Conjugacy in the free group: compare cyclic reductions up to rotation."""
    _, cu = cyclic_reduce(group_reduce(u))
    _, cv = cyclic_reduce(group_reduce(v))
    if len(cu) != len(cv):
        return False
    if not cu:
        return True
    doubled = cu + cu
    n = len(cu)
    return any(doubled[k:k + n] == cv for k in range(n))


def leaf_signature(t: Term) -> SignedWord:
    """Normalize by the oriented group rules, then read leaves with signs.

    The sign of a leaf is ``+`` when it sits under an even number of ``inv``.
    """
    from .theories import builtin_theory, oriented_normal_form

    P = builtin_theory("GrpTilde")
    nf = oriented_normal_form(P.axioms, t)
    out = []
    stack = [(nf, 1)]
    while stack:
        u, s = stack.pop()
        if not isinstance(u, App):
            raise NonFlattenableSymbol(f"variable in {u!r}")
        n = u.op.name
        if n == "mu":
            stack.append((u.args[1], s))
            stack.append((u.args[0], s))
        elif n == "inv":
            stack.append((u.args[0], -s))
        elif n == "e":
            continue
        elif not u.args:
            out.append((n, s))
        else:
            raise NonFlattenableSymbol(f"symbol {n!r} outside the group signature")
    return tuple(out)


def group_eval(t: Term) -> SignedWord:
    """Reduced word denoted by a group term, computed structurally."""
    if not isinstance(t, App):
        raise NonFlattenableSymbol(f"variable in {t!r}")
    n = t.op.name
    if n == "mu":
        return group_mul(group_eval(t.args[0]), group_eval(t.args[1]))
    if n == "inv":
        return group_inverse(group_eval(t.args[0]))
    if n == "e":
        return ()
    if not t.args:
        return ((n, 1),)
    raise NonFlattenableSymbol(f"symbol {n!r} outside the group signature")


def signed_word_to_term(w: SignedWord, sig: Signature) -> Term:
    leaves = [
        App(sig.op(x), ()) if s > 0 else App(sig.op("inv"), (App(sig.op(x), ()),))
        for x, s in w
    ]
    return right_comb(leaves, sig.op("mu"), App(sig.op("e"), ()))


def group_insertions(w: SignedWord, letters: Iterable[str], k: int = 1) -> set:
    """Words obtained from ``w`` by inserting up to ``k`` pairs ``x x^-`` / ``x^- x``."""
    letters = list(letters)
    layer = {tuple(w)}
    seen = set(layer)
    for _ in range(k):
        nxt = set()
        for u in layer:
            for i in range(len(u) + 1):
                for x in letters:
                    for s in (1, -1):
                        v = u[:i] + ((x, s), (x, -s)) + u[i:]
                        if v not in seen:
                            nxt.add(v)
        seen |= nxt
        layer = nxt
    return seen


# -- equivalence and classes ------------------------------------------------------------


@dataclass
class ClassResult:
    """Terms reachable from ``root`` by axiom applications, with parent links."""

    root: Term
    terms: list
    complete: bool
    parent: dict = field(default_factory=dict)

    def __contains__(self, t):
        return t in self.parent or t == self.root

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def trace_to(self, u: Term) -> list:
        """Axiom steps ``(context, instance)`` leading from ``root`` to ``u``."""
        steps = []
        while u != self.root:
            prev, ctx, inst = self.parent[u]
            steps.append((ctx, inst))
            u = prev
        steps.reverse()
        return steps


def enumerate_class(rules, t: Term, bound: int = 8, constants=(), max_terms: int = 256) -> ClassResult:
    """Breadth-first closure of ``t`` under the axioms ``rules`` in both directions.

    ``bound`` limits the number of axiom applications; ``max_terms`` the class
    size.  ``complete`` is set when the closure stabilized within both.
    """
    from .theories import rule_instances_at

    rules = tuple(rules)
    res = ClassResult(t, [t], True)
    frontier = [t]
    depth = 0
    while frontier:
        if depth >= bound:
            res.complete = False
            break
        nxt = []
        for u in frontier:
            for pos, sub in enumerate_positions(u):
                for inst in rule_instances_at(rules, sub, constants):
                    ctx = Context.at(u, pos)
                    v = ctx(inst.target)
                    if v == t or v in res.parent:
                        continue
                    if len(res.terms) >= max_terms:
                        res.complete = False
                        return res
                    res.parent[v] = (u, ctx, inst)
                    res.terms.append(v)
                    nxt.append(v)
        frontier = nxt
        depth += 1
    return res


def canonical_key(P, t: Term):
    """A hashable key with ``key(t) == key(u)`` iff ``t`` and ``u`` are equivalent
    modulo the full theory ``P``; None when no decision procedure is built in."""
    name = P.name
    if name == "Mag":
        return t
    if name == "Ass":
        return theory_canonical(t, {"mu"}, (), P.signature)
    if name == "AC":
        return theory_canonical(t, {"mu"}, {"mu"}, P.signature)
    if name == "Mon":
        return assoc_flatten(t, "mu", "e")
    if name == "CMon":
        return tuple(sorted(assoc_flatten(t, "mu", "e")))
    if name in ("Grp", "GrpTilde"):
        return group_eval(t)
    if name == "Ab":
        counts: dict = {}
        for x, s in group_eval(t):
            counts[x] = counts.get(x, 0) + s
        return tuple(sorted((x, c) for x, c in counts.items() if c))
    if name in ("Ring", "CRing"):
        p = _ring_eval(t)
        if name == "CRing":
            d: dict = {}
            for m, c in p.items():
                k = tuple(sorted(m))
                d[k] = d.get(k, 0) + c
            p = Polynomial(d)
        return p
    if name in ("Mod", "ModC", "AssAlg"):
        return linear_canonical(t)
    return None


def _ring_eval(t: Term) -> Polynomial:
    if not isinstance(t, App):
        raise IllTypedLinearTerm(f"non-ground term {t!r}")
    n = t.op.name
    if n == "0":
        return Polynomial.zero()
    if n == "1":
        return Polynomial.monomial(())
    if n == "add":
        return _ring_eval(t.args[0]) + _ring_eval(t.args[1])
    if n == "neg":
        return -_ring_eval(t.args[0])
    if n == "mul":
        return _ring_eval(t.args[0]) * _ring_eval(t.args[1])
    if not t.args:
        return Polynomial.monomial((n,))
    raise IllTypedLinearTerm(f"symbol {n!r} outside the ring signature")


def equiv_modulo(P, t: Term, u: Term, bound: int = 1000):
    """True / False when decided, None when the bounded search was inconclusive."""
    if t == u:
        return True
    k = canonical_key(P, t)
    if k is not None:
        return k == canonical_key(P, u)
    cls = enumerate_class(P.axioms, t, bound=bound, max_terms=bound)
    if u in cls:
        return True
    return False if cls.complete else None
