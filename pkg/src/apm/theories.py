"""Built-in equational theories (cartesian 2-polygraphs) and their modulo splits.

A theory is a signature plus axioms whose sides contain variables.  Each theory
also records which axioms are kept unoriented (the part we work modulo).  Only
associativity and commutativity axioms may be unoriented.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import UnknownTheory, UnsupportedModuloTheory
from .terms import (
    App,
    Context,
    OperationSymbol,
    Signature,
    Sort,
    Term,
    Var,
    enumerate_positions,
    parse_term,
    sort_of,
    typecheck_term,
    variables,
)


@dataclass(frozen=True)
class TheoryRule:
    name: str
    lhs: Term
    rhs: Term
    arity: tuple[Sort, ...]

    def __repr__(self):
        return f"{self.name}: {self.lhs!r} => {self.rhs!r}"


@dataclass(frozen=True)
class CartesianPolygraph:
    name: str
    signature: Signature
    axioms: tuple[TheoryRule, ...]
    unoriented: frozenset[str] = frozenset()

    def axiom(self, name: str) -> TheoryRule:
        for r in self.axioms:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def sorts(self):
        return set(self.signature.sorts.values())

    @property
    def operations(self):
        return set(self.signature.operations.values())


@dataclass(frozen=True)
class ModuloSplit:
    """``oriented`` is the convergent part, ``unoriented`` what we work modulo."""

    oriented: tuple[TheoryRule, ...]
    unoriented: tuple[TheoryRule, ...]
    assoc_ops: frozenset[str] = frozenset()
    comm_ops: frozenset[str] = frozenset()

    @property
    def kind(self) -> str:
        if not self.unoriented:
            return "none"
        return "ac" if self.comm_ops else "ass"


def check_rule(sig: Signature, rule: TheoryRule) -> None:
    """Globular condition: both sides typecheck to the same coarity."""
    a = typecheck_term(sig, rule.lhs)
    b = typecheck_term(sig, rule.rhs)
    if a != b:
        from .errors import SortMismatch

        raise SortMismatch(f"axiom {rule.name}: sides have sorts {a} and {b}")


def make_rule(sig: Signature, name: str, lhs: str, rhs: str, var_sorts: Sequence[tuple[str, str]]) -> TheoryRule:
    """Build an axiom from text; ``var_sorts`` lists ``(variable, sort)`` in order."""
    arity = tuple(sig.sorts[s] for _, s in var_sorts)
    vmap = {v: Var(i, arity) for i, (v, _) in enumerate(var_sorts, 1)}
    rule = TheoryRule(name, parse_term(lhs, sig, vmap), parse_term(rhs, sig, vmap), arity)
    check_rule(sig, rule)
    return rule


# -- built-in theories ---------------------------------------------------------

THEORY_NAMES = (
    "Mag", "Ass", "AC", "Mon", "CMon", "Grp", "GrpTilde", "Ab",
    "Ring", "CRing", "Mod", "ModC", "AssAlg",
)


def _sig_single(ops: Iterable[tuple[str, tuple[str, ...], str]], infix=None) -> Signature:
    sig = Signature()
    sig.add_sort("1")
    for name, ar, co in ops:
        sig.add_operation(name, ar, co)
    sig.infix = dict(infix or {})
    return sig


_MU = [("mu", ("1", "1"), "1")]
_E = [("e", (), "1")]
_INV = [("inv", ("1",), "1")]
_DOT = {".": ("mu",)}

X = [("x", "1")]
XY = [("x", "1"), ("y", "1")]
XYZ = [("x", "1"), ("y", "1"), ("z", "1")]


def _assoc(sig, name="A", op="."):
    return make_rule(sig, name, f"(x{op}y){op}z", f"x{op}(y{op}z)", XYZ)


def _comm(sig, name="C", op="."):
    return make_rule(sig, name, f"x{op}y", f"y{op}x", XY)


def _units(sig, op=".", unit="e", suffix=""):
    return [
        make_rule(sig, "E_l" + suffix, f"{unit}{op}x", "x", X),
        make_rule(sig, "E_r" + suffix, f"x{op}{unit}", "x", X),
    ]


def _inverses(sig, op=".", unit="e", inv="inv", suffix=""):
    return [
        make_rule(sig, "I_l" + suffix, f"{inv}(x){op}x", unit, X),
        make_rule(sig, "I_r" + suffix, f"x{op}{inv}(x)", unit, X),
    ]


def _mag():
    sig = _sig_single(_MU, _DOT)
    return CartesianPolygraph("Mag", sig, ())


def _ass():
    sig = _sig_single(_MU, _DOT)
    return CartesianPolygraph("Ass", sig, (_assoc(sig),), frozenset({"A"}))


def _ac():
    sig = _sig_single(_MU, _DOT)
    return CartesianPolygraph("AC", sig, (_assoc(sig), _comm(sig)), frozenset({"A", "C"}))


def _mon():
    sig = _sig_single(_MU + _E, _DOT)
    return CartesianPolygraph("Mon", sig, (_assoc(sig), *_units(sig)), frozenset({"A"}))


def _cmon():
    sig = _sig_single(_MU + _E, _DOT)
    return CartesianPolygraph(
        "CMon", sig, (_assoc(sig), *_units(sig), _comm(sig)), frozenset({"A", "C"})
    )


def _grp():
    sig = _sig_single(_MU + _E + _INV, _DOT)
    return CartesianPolygraph(
        "Grp", sig, (_assoc(sig), *_units(sig), *_inverses(sig)), frozenset({"A"})
    )


def _grp_tilde_rules(sig):
    return [
        make_rule(sig, "G1", "inv(e)", "e", []),
        make_rule(sig, "G2", "inv(inv(x))", "x", X),
        make_rule(sig, "G3", "inv(x.y)", "inv(y).inv(x)", XY),
        make_rule(sig, "G4", "x.(inv(x).y)", "y", XY),
        make_rule(sig, "G5", "inv(x).(x.y)", "y", XY),
    ]


def _grp_tilde():
    # G1-G5 alone cannot derive x.inv(x) = e, so the unit and inverse rules of
    # Grp are kept alongside them; together with A oriented this is the
    # classical complete system for groups.
    sig = _sig_single(_MU + _E + _INV, _DOT)
    rules = (_assoc(sig), *_units(sig), *_inverses(sig), *_grp_tilde_rules(sig))
    return CartesianPolygraph("GrpTilde", sig, rules, frozenset({"A"}))


def _ab():
    sig = _sig_single(_MU + _E + _INV, _DOT)
    rules = (_assoc(sig), *_units(sig), *_inverses(sig), _comm(sig))
    return CartesianPolygraph("Ab", sig, rules, frozenset({"A", "C"}))


_RING_OPS = [
    ("add", ("r", "r"), "r"),
    ("0", (), "r"),
    ("neg", ("r",), "r"),
    ("mul", ("r", "r"), "r"),
    ("1", (), "r"),
]


def _ring_sig(sort="1"):
    sig = Signature()
    sig.add_sort(sort)
    for name, ar, co in _RING_OPS:
        sig.add_operation(name, tuple(sort for _ in ar), sort)
    sig.infix = {"+": ("add",), "*": ("mul",)}
    return sig


def _ring_axioms(sig, s="1", commutative=False):
    X_, XY_, XYZ_ = [("x", s)], [("x", s), ("y", s)], [("x", s), ("y", s), ("z", s)]
    rules = [
        make_rule(sig, "A+", "(x+y)+z", "x+(y+z)", XYZ_),
        make_rule(sig, "C+", "x+y", "y+x", XY_),
        make_rule(sig, "E_l+", "0+x", "x", X_),
        make_rule(sig, "E_r+", "x+0", "x", X_),
        make_rule(sig, "I_l+", "neg(x)+x", "0", X_),
        make_rule(sig, "I_r+", "x+neg(x)", "0", X_),
        make_rule(sig, "A*", "(x*y)*z", "x*(y*z)", XYZ_),
        make_rule(sig, "E_l*", "1*x", "x", X_),
        make_rule(sig, "E_r*", "x*1", "x", X_),
        make_rule(sig, "D_l", "x*(y+z)", "(x*y)+(x*z)", XYZ_),
        make_rule(sig, "D_r", "(y+z)*x", "(y*x)+(z*x)", XYZ_),
    ]
    if commutative:
        rules.append(make_rule(sig, "C*", "x*y", "y*x", XY_))
    return rules


def _ring():
    sig = _ring_sig()
    return CartesianPolygraph("Ring", sig, tuple(_ring_axioms(sig)), frozenset({"A+", "C+", "A*"}))


def _cring():
    sig = _ring_sig()
    return CartesianPolygraph(
        "CRing", sig, tuple(_ring_axioms(sig, commutative=True)), frozenset({"A+", "C+", "A*", "C*"})
    )


def _mod_sig():
    sig = Signature()
    sig.add_sort("r")
    sig.add_sort("m")
    for name, ar, co in _RING_OPS:
        sig.add_operation(name, ar, co)
    sig.add_operation("oplus", ("m", "m"), "m")
    sig.add_operation("0m", (), "m")
    sig.add_operation("inv", ("m",), "m")
    sig.add_operation("act", ("r", "m"), "m")
    sig.infix = {"+": ("add",), "*": ("mul", "act"), "(+)": ("oplus",), ".": ("act",)}
    return sig


R1 = [("x", "r")]
R2 = [("x", "r"), ("y", "r")]
R3 = [("x", "r"), ("y", "r"), ("z", "r")]
M1 = [("a", "m")]
M2 = [("a", "m"), ("b", "m")]
M3 = [("a", "m"), ("b", "m"), ("c", "m")]


def _ac_part(sig, with_oplus=True):
    rules = [
        make_rule(sig, "A+", "(x+y)+z", "x+(y+z)", R3),
        make_rule(sig, "C+", "x+y", "y+x", R2),
        make_rule(sig, "A*", "(x*y)*z", "x*(y*z)", R3),
        make_rule(sig, "C*", "x*y", "y*x", R2),
    ]
    if with_oplus:
        rules += [
            make_rule(sig, "A(+)", "(a (+) b) (+) c", "a (+) (b (+) c)", M3),
            make_rule(sig, "C(+)", "a (+) b", "b (+) a", M2),
        ]
    return rules


def modc_oriented_rules(sig) -> list[TheoryRule]:
    """The nine ring rules and ten module rules, in table order."""
    rx, rxa, rxy, rxya = R1, R1 + M1, R2, R2 + M1
    return [
        make_rule(sig, "ring1", "x+0", "x", rx),
        make_rule(sig, "ring2", "x+neg(x)", "0", rx),
        make_rule(sig, "ring3", "neg(0)", "0", []),
        make_rule(sig, "ring4", "neg(neg(x))", "x", rx),
        make_rule(sig, "ring5", "neg(x+y)", "neg(x)+neg(y)", rxy),
        make_rule(sig, "ring6", "x*(y+z)", "(x*y)+(x*z)", R3),
        make_rule(sig, "ring7", "x*0", "0", rx),
        make_rule(sig, "ring8", "x*neg(y)", "neg(x*y)", rxy),
        make_rule(sig, "ring9", "1*x", "x", rx),
        make_rule(sig, "mod1", "a (+) 0m", "a", M1),
        make_rule(sig, "mod2", "act(x,act(y,a))", "act(x*y,a)", rxya),
        make_rule(sig, "mod3", "act(1,a)", "a", M1),
        make_rule(sig, "mod4", "act(x,a) (+) act(y,a)", "act(x+y,a)", rxya),
        make_rule(sig, "mod5", "act(x,a (+) b)", "act(x,a) (+) act(x,b)", rx + M2),
        make_rule(sig, "mod6", "a (+) act(x,a)", "act(1+x,a)", rxa),
        make_rule(sig, "mod7", "a (+) a", "act(1+1,a)", M1),
        make_rule(sig, "mod8", "act(x,0m)", "0m", rx),
        make_rule(sig, "mod9", "act(0,a)", "0m", M1),
        make_rule(sig, "mod10", "inv(a)", "act(neg(1),a)", M1),
    ]


def _mod():
    sig = _mod_sig()
    rules = [
        make_rule(sig, "A+", "(x+y)+z", "x+(y+z)", R3),
        make_rule(sig, "C+", "x+y", "y+x", R2),
        make_rule(sig, "E_r+", "x+0", "x", R1),
        make_rule(sig, "I_r+", "x+neg(x)", "0", R1),
        make_rule(sig, "A*", "(x*y)*z", "x*(y*z)", R3),
        make_rule(sig, "C*", "x*y", "y*x", R2),
        make_rule(sig, "E_r*", "x*1", "x", R1),
        make_rule(sig, "D_l", "x*(y+z)", "(x*y)+(x*z)", R3),
        make_rule(sig, "A(+)", "(a (+) b) (+) c", "a (+) (b (+) c)", M3),
        make_rule(sig, "C(+)", "a (+) b", "b (+) a", M2),
        make_rule(sig, "E_r(+)", "a (+) 0m", "a", M1),
        make_rule(sig, "I_r(+)", "a (+) inv(a)", "0m", M1),
        make_rule(sig, "M1", "act(x,act(y,a))", "act(x*y,a)", R2 + M1),
        make_rule(sig, "M2", "act(1,a)", "a", M1),
        make_rule(sig, "M3", "act(x,a (+) b)", "act(x,a) (+) act(x,b)", R1 + M2),
        make_rule(sig, "M4", "act(x,a) (+) act(y,a)", "act(x+y,a)", R2 + M1),
    ]
    return CartesianPolygraph(
        "Mod", sig, tuple(rules), frozenset({"A+", "C+", "A*", "C*", "A(+)", "C(+)"})
    )


def _modc():
    sig = _mod_sig()
    rules = modc_oriented_rules(sig) + _ac_part(sig)
    return CartesianPolygraph(
        "ModC", sig, tuple(rules), frozenset({"A+", "C+", "A*", "C*", "A(+)", "C(+)"})
    )


def _assalg():
    # ModC plus an associative bilinear product on the module sort: the
    # setting of linear rewriting over an associative algebra.
    sig = _mod_sig()
    sig.add_operation("mu", ("m", "m"), "m")
    sig.infix = {"+": ("add",), "*": ("mul", "act"), "(+)": ("oplus",), ".": ("mu",)}
    extra = [
        make_rule(sig, "bil1", "(a (+) b).c", "(a.c) (+) (b.c)", M3),
        make_rule(sig, "bil2", "a.(b (+) c)", "(a.b) (+) (a.c)", M3),
        make_rule(sig, "bil3", "act(x,a).b", "act(x,a.b)", R1 + M2),
        make_rule(sig, "bil4", "a.act(x,b)", "act(x,a.b)", R1 + M2),
        make_rule(sig, "bil5", "0m.a", "0m", M1),
        make_rule(sig, "bil6", "a.0m", "0m", M1),
        make_rule(sig, "bil7", "inv(a).b", "inv(a.b)", M2),
        make_rule(sig, "bil8", "a.inv(b)", "inv(a.b)", M2),
    ]
    rules = modc_oriented_rules(sig) + extra + _ac_part(sig) + [
        make_rule(sig, "A.", "(a.b).c", "a.(b.c)", M3)
    ]
    return CartesianPolygraph(
        "AssAlg", sig, tuple(rules),
        frozenset({"A+", "C+", "A*", "C*", "A(+)", "C(+)", "A."}),
    )


_BUILDERS = {
    "Mag": _mag, "Ass": _ass, "AC": _ac, "Mon": _mon, "CMon": _cmon,
    "Grp": _grp, "GrpTilde": _grp_tilde, "Ab": _ab, "Ring": _ring,
    "CRing": _cring, "Mod": _mod, "ModC": _modc, "AssAlg": _assalg,
}

_CACHE: dict[str, CartesianPolygraph] = {}


def builtin_theory(name: str) -> CartesianPolygraph:
    """Return the named built-in theory (cached; theories are immutable)."""
    if name not in _BUILDERS:
        raise UnknownTheory(f"unknown theory {name!r}; known: {', '.join(THEORY_NAMES)}")
    if name not in _CACHE:
        _CACHE[name] = _BUILDERS[name]()
    return _CACHE[name]


# -- modulo split ---------------------------------------------------------------


def _is_assoc_rule(rule: TheoryRule) -> str | None:
    t = rule.lhs
    if not (isinstance(t, App) and len(t.args) == 2 and isinstance(t.args[0], App)):
        return None
    mu = t.op
    inner = t.args[0]
    if inner.op != mu or not all(isinstance(a, Var) for a in (*inner.args, t.args[1])):
        return None
    x, y = inner.args
    z = t.args[1]
    expected = App(mu, (x, App(mu, (y, z))))
    return mu.name if rule.rhs == expected and len({x, y, z}) == 3 else None


def _is_comm_rule(rule: TheoryRule) -> str | None:
    t = rule.lhs
    if not (isinstance(t, App) and len(t.args) == 2 and all(isinstance(a, Var) for a in t.args)):
        return None
    x, y = t.args
    if x != y and rule.rhs == App(t.op, (y, x)):
        return t.op.name
    return None


def modulo_split(P: CartesianPolygraph) -> ModuloSplit:
    oriented = tuple(r for r in P.axioms if r.name not in P.unoriented)
    unoriented = tuple(r for r in P.axioms if r.name in P.unoriented)
    assoc, comm = set(), set()
    for r in unoriented:
        a, c = _is_assoc_rule(r), _is_comm_rule(r)
        if a:
            assoc.add(a)
        elif c:
            comm.add(c)
        else:
            raise UnsupportedModuloTheory(
                f"axiom {r.name} of {P.name} is neither associativity nor commutativity"
            )
    if not comm <= assoc:
        raise UnsupportedModuloTheory(
            f"{P.name}: commutativity without associativity for {sorted(comm - assoc)}"
        )
    return ModuloSplit(oriented, unoriented, frozenset(assoc), frozenset(comm))


# -- matching and groundification -----------------------------------------------


def match(pattern: Term, t: Term, subst: dict[int, Term] | None = None) -> dict[int, Term] | None:
    """Syntactic first-order matching of ``pattern`` against ground ``t``."""
    subst = {} if subst is None else subst
    stack = [(pattern, t)]
    while stack:
        p, u = stack.pop()
        if isinstance(p, Var):
            bound = subst.get(p.index)
            if bound is None:
                if sort_of(u) != p.sort:
                    return None
                subst[p.index] = u
            elif bound != u:
                return None
            continue
        if not isinstance(u, App) or p.op != u.op:
            return None
        stack.extend(zip(p.args, u.args))
    return subst


def instantiate(t: Term, subst: dict[int, Term]) -> Term:
    if isinstance(t, Var):
        return subst[t.index]
    if not t.args:
        return t
    return App(t.op, [instantiate(a, subst) for a in t.args])


@dataclass(frozen=True)
class AxiomInstance:
    """A ground instance of an axiom, used in direction ``+`` or ``-``."""

    rule: TheoryRule
    lhs: Term
    rhs: Term
    direction: str = "+"

    @property
    def source(self) -> Term:
        return self.lhs if self.direction == "+" else self.rhs

    @property
    def target(self) -> Term:
        return self.rhs if self.direction == "+" else self.lhs

    def reversed(self) -> "AxiomInstance":
        return AxiomInstance(self.rule, self.lhs, self.rhs, "-" if self.direction == "+" else "+")


def _fill_unbound(rule: TheoryRule, subst: dict[int, Term], constants) -> Iterator[dict[int, Term]]:
    missing = [i for i in range(1, len(rule.arity) + 1) if i not in subst]
    missing = [i for i in missing if i in variables(rule.lhs) | variables(rule.rhs)]
    if not missing:
        yield subst
        return
    i = missing[0]
    for c in constants:
        if c.coarity == rule.arity[i - 1]:
            s2 = dict(subst)
            s2[i] = App(c, ())
            yield from _fill_unbound(rule, s2, constants)


def rule_instances_at(rules: Iterable[TheoryRule], u: Term, constants=(), directions="+-") -> Iterator[AxiomInstance]:
    """Axiom instances whose source is exactly ``u``."""
    for rule in rules:
        for d in directions:
            pat = rule.lhs if d == "+" else rule.rhs
            s = match(pat, u)
            if s is None:
                continue
            for full in _fill_unbound(rule, s, constants):
                inst = AxiomInstance(rule, instantiate(rule.lhs, full), instantiate(rule.rhs, full), d)
                if inst.lhs != inst.rhs:
                    yield inst


def groundify_matches(P: CartesianPolygraph | Iterable[TheoryRule], Q: Sequence[OperationSymbol], t: Term):
    """All single ground axiom applications to ``t``, in both directions.

    Returns ``(context, instance)`` pairs; ``instance.direction`` tells which
    way the axiom is used.  Variables occurring only on the produced side are
    instantiated with the constants ``Q`` of the right sort.
    """
    rules = P.axioms if isinstance(P, CartesianPolygraph) else tuple(P)
    out = []
    for pos, u in enumerate_positions(t):
        for inst in rule_instances_at(rules, u, Q):
            out.append((Context.at(t, pos), inst))
    return out


def oriented_normal_form(rules: Iterable[TheoryRule], t: Term, limit: int = 100000) -> Term:
    """Innermost normal form of ground ``t`` under the rules used left to right.

    Only meaningful for terminating rule sets; ``limit`` bounds the total
    number of rewrite steps as a safety net.
    """
    rules = tuple(rules)
    budget = [limit]

    def nf(u: Term) -> Term:
        if not isinstance(u, App) or not u.args:
            v = u
        else:
            v = App(u.op, [nf(a) for a in u.args])
        for rule in rules:
            s = match(rule.lhs, v)
            if s is not None:
                budget[0] -= 1
                if budget[0] < 0:
                    from .errors import BoundExhausted

                    raise BoundExhausted("oriented normalization did not stop")
                return nf(instantiate(rule.rhs, s))
        return v

    return nf(t)
