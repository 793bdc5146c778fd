"""Spec files: a line-oriented description of an algebraic polygraph modulo.

Example::

    # the positive braid monoid B3+
    theory Mon
    constants s t
    rule alpha: sts => tst
    strategy nf-modulo
    policy EPRE
    seed ststs

Directives (one per line, ``#`` starts a comment):

    theory NAME                       a built-in theory
    theory custom NAME ... end        a custom theory block, see below
    paradigm string|linear|group|generic
    constants a b c [: SORT]          repeatable
    rule NAME: LHS => RHS             native syntax of the paradigm
    rule NAME: term LHS => RHS        general term syntax
    strategy full|nf-modulo|group-deglex s > t [> s^- > t^-]
    order s > t [> s^- > t^-]         the deglex order on its own line
    policy R|EPR|RPE|EPRE
    coefficients Z|Q                  linear paradigm; Q enables fractions
    bounds max-class=N max-terms=N max-depth=N insertion-bound=N join-depth=N
    seed TERM                         repeatable; native or term syntax

Custom theory block::

    theory custom Semilattice
      sort 1
      op mu : 1 1 -> 1
      infix . mu
      vars x y z : 1
      axiom A : (x.y).z => x.(y.z) modulo
      axiom C : x.y => y.x modulo
      axiom I : x.x => x
    end
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .engine import AlgebraicPolygraphModulo, default_paradigm
from .errors import ApmError, InvalidOrder, ParseError
from .paradigms import KINDS, ParadigmSpec, parse_any, validate_rules
from .steps import Bounds, GroundRule, Policy
from .strategy import DeglexOrder, PositiveStrategy
from .terms import Signature, Var, parse_term, typecheck_term
from .theories import CartesianPolygraph, TheoryRule, builtin_theory, check_rule


@dataclass
class SpecFile:
    theory: CartesianPolygraph | None = None
    paradigm: str | None = None
    constants: list = field(default_factory=list)  # (name, sort or None)
    rules: list = field(default_factory=list)  # (name, lhs, rhs, syntax, line)
    strategy: str | None = None
    order: list | None = None
    strategy_line: int = 0
    policy: str = "EPRE"
    field_mode: bool = False
    bounds: dict = field(default_factory=dict)
    seeds: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    path: str | None = None

    def build(self, bounds: Bounds | None = None) -> AlgebraicPolygraphModulo:
        if self.theory is None:
            raise ParseError("no theory declared")
        paradigm = self.paradigm or default_paradigm(self.theory.name)
        b = bounds or Bounds(**{k.replace("-", "_"): v for k, v in self.bounds.items()})
        consts = [c if s is None else (c, s) for c, s in self.constants]
        apm = AlgebraicPolygraphModulo(self.theory, consts, (), self.policy, paradigm, None, b, self.field_mode)
        p = ParadigmSpec(paradigm)
        rules = []
        for name, lhs, rhs, syntax, line in self.rules:
            try:
                if syntax == "term":
                    l, r = parse_term(lhs, apm.signature), parse_term(rhs, apm.signature)
                else:
                    l, r = parse_any(p, lhs, apm.signature), parse_any(p, rhs, apm.signature)
                typecheck_term(apm.signature, l)
                typecheck_term(apm.signature, r)
            except ApmError as e:
                raise type(e)(f"line {line}: {e}") from None
            rules.append(GroundRule(name, l, r))
        rules, diags = validate_rules(p, rules, apm.signature)
        self.diagnostics.extend(diags)
        strategy = self._strategy(apm)
        return AlgebraicPolygraphModulo(self.theory, [c.name for c in apm.constants], rules, self.policy,
                                        paradigm, strategy, b, self.field_mode, apm.signature)

    def _strategy(self, apm):
        if self.strategy is None:
            return None
        if self.strategy == "full":
            return PositiveStrategy.full()
        if self.strategy == "nf-modulo":
            return PositiveStrategy.nf_modulo()
        if self.strategy == "group-deglex":
            names = [c.name for c in apm.constants]
            if not self.order:
                return PositiveStrategy.group_deglex(DeglexOrder.from_generators(names))
            letters = []
            for tok in self.order:
                if tok.endswith("^-"):
                    letters.append((tok[:-2], -1))
                else:
                    letters.append((tok, 1))
            if {x for x, _ in letters} != set(names):
                raise InvalidOrder(f"line {self.strategy_line}: the order must list exactly the constants "
                                   f"{' '.join(names)}")
            if all(s > 0 for _, s in letters):
                return PositiveStrategy.group_deglex(DeglexOrder.from_generators([x for x, _ in letters]))
            return PositiveStrategy.group_deglex(DeglexOrder(letters))
        raise ParseError(f"unknown strategy {self.strategy!r}")

    def seed_terms(self, apm: AlgebraicPolygraphModulo):
        p = ParadigmSpec(apm.paradigm)
        return [parse_any(p, s, apm.signature) for s in self.seeds]


_BOUND_KEYS = ("max-class", "max-terms", "max-depth", "insertion-bound", "join-depth")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _custom_theory(name: str, lines, start: int):
    sig = Signature()
    var_sorts: dict[str, str] = {}
    axioms, unoriented = [], set()
    i = start
    while i < len(lines):
        raw = _strip(lines[i])
        i += 1
        if not raw:
            continue
        head, _, rest = raw.partition(" ")
        rest = rest.strip()
        if head == "end":
            return CartesianPolygraph(name, sig, tuple(axioms), frozenset(unoriented)), i
        if head == "sort":
            for s in rest.split():
                sig.add_sort(s)
        elif head == "op":
            m = re.fullmatch(r"(\S+)\s*:\s*(.*?)\s*->\s*(\S+)", rest)
            if not m:
                raise ParseError(f"line {i}: expected 'op NAME : S1 S2 -> S'")
            sig.add_operation(m.group(1), m.group(2).split(), m.group(3))
        elif head == "infix":
            tok, op = rest.split()
            sig.infix[tok] = sig.infix.get(tok, ()) + (op,)
        elif head == "vars":
            names, _, sort = rest.partition(":")
            for v in names.split():
                var_sorts[v] = sort.strip()
        elif head == "axiom":
            m = re.fullmatch(r"(\S+)\s*:\s*(.*?)\s*=>\s*(.*?)(\s+modulo)?", rest)
            if not m:
                raise ParseError(f"line {i}: expected 'axiom NAME : LHS => RHS [modulo]'")
            aname, lhs, rhs, mod = m.groups()
            names = list(var_sorts)
            sorts = [sig.sorts[var_sorts[v]] for v in names]
            variables = {v: Var(k + 1, sorts) for k, v in enumerate(names)}
            lt, rt = parse_term(lhs, sig, variables), parse_term(rhs, sig, variables)
            rule = TheoryRule(aname, lt, rt, tuple(sorts))
            check_rule(sig, rule)
            axioms.append(rule)
            if mod:
                unoriented.add(aname)
        else:
            raise ParseError(f"line {i}: unknown directive {head!r} in theory block")
    raise ParseError("theory block without 'end'")


def parse_spec(text: str, path: str | None = None) -> SpecFile:
    spec = SpecFile(path=path)
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        lineno = i + 1
        raw = _strip(lines[i])
        i += 1
        if not raw:
            continue
        head, _, rest = raw.partition(" ")
        rest = rest.strip()
        if head == "theory":
            parts = rest.split()
            if parts and parts[0] == "custom":
                if len(parts) < 2:
                    raise ParseError(f"line {lineno}: custom theory needs a name")
                spec.theory, i = _custom_theory(parts[1], lines, i)
            else:
                spec.theory = builtin_theory(rest)
        elif head == "paradigm":
            if rest not in KINDS:
                raise ParseError(f"line {lineno}: unknown paradigm {rest!r}; known: {', '.join(KINDS)}")
            spec.paradigm = rest
        elif head in ("constants", "constant"):
            names, _, sort = rest.partition(":")
            for n in names.split():
                spec.constants.append((n, sort.strip() or None))
        elif head == "rule":
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(term\s+)?(.*?)\s*=>\s*(.*)", rest)
            if not m:
                raise ParseError(f"line {lineno}: expected 'rule NAME: LHS => RHS'")
            name, term, lhs, rhs = m.groups()
            spec.rules.append((name, lhs, rhs.strip(), "term" if term else "native", lineno))
        elif head == "strategy":
            parts = rest.split(None, 1)
            if not parts:
                raise ParseError(f"line {lineno}: empty strategy")
            spec.strategy = parts[0]
            spec.strategy_line = lineno
            if len(parts) > 1:
                spec.order = [t.strip() for t in parts[1].split(">")]
        elif head == "order":
            spec.order = [t.strip() for t in rest.split(">")]
            spec.strategy_line = lineno
        elif head == "policy":
            try:
                spec.policy = Policy.parse(rest).value
            except ValueError as e:
                raise ParseError(f"line {lineno}: {e}") from None
        elif head == "coefficients":
            if rest not in ("Z", "Q"):
                raise ParseError(f"line {lineno}: coefficients must be Z or Q")
            spec.field_mode = rest == "Q"
        elif head == "bounds":
            for item in rest.split():
                k, _, v = item.partition("=")
                if k not in _BOUND_KEYS or not v.isdigit() or int(v) < 1:
                    raise ParseError(f"line {lineno}: bad bound {item!r}")
                spec.bounds[k] = int(v)
        elif head == "seed":
            spec.seeds.append(rest)
        else:
            raise ParseError(f"line {lineno}: unknown directive {head!r}")
    return spec


def load_spec(path: str) -> SpecFile:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read(), path)
