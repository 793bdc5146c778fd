"""Native notations: words, polynomials and signed words.

Grammars::

    word        letters written together (``sts``) or separated by spaces or
                dots when a letter name is longer than one character; ``1``
                is the empty word
    polynomial  ``c*word + c*word ...`` with integer or rational ``c``
                (``2*yt``, ``(1/2)*xy``, ``-xz``); ``0`` is the zero polynomial
    signed word signed letters ``x`` / ``x^-`` (``sts^-`` or ``s t s^-``);
                ``1`` is the empty word

A rule is ``lhs => rhs``, optionally prefixed by ``name:``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .backends import format_signed_word
from .errors import NotLeftMonomial, NotRepresentable, ParseError, UnknownConstant
from .normalize import (
    Polynomial,
    assoc_flatten,
    format_polynomial,
    format_word,
    group_eval,
    group_reduce,
    linear_canonical,
    polynomial_to_term,
    word_to_term,
)
from .steps import GroundRule
from .terms import App, Signature, Term, enumerate_positions, format_term, parse_term, sort_of

KINDS = ("string", "linear", "group", "generic")


@dataclass
class ParadigmSpec:
    kind: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown paradigm {self.kind!r}")


def _letters(sig: Signature) -> dict:
    return {name: op for name, op in sig.operations.items() if op.is_constant}


def _constant(sig, name, builtin=()):
    op = sig.operations.get(name)
    if op is None or not op.is_constant or name in builtin:
        raise UnknownConstant(f"unknown constant {name!r}")
    return name


def _split_word(text: str, sig: Signature, builtin=()) -> tuple:
    text = text.strip()
    if text == "1":
        return ()
    if not text:
        raise ParseError("empty word")
    if re.search(r"[\s.]", text):
        parts = [p for p in re.split(r"[\s.]+", text) if p]
    else:
        parts = list(text)
    return tuple(_constant(sig, p, builtin) for p in parts)


_STRING_BUILTIN = ("e",)
_LINEAR_BUILTIN = ("0", "1", "0m")


def parse_word(text: str, sig: Signature) -> Term:
    w = _split_word(text, sig, _STRING_BUILTIN)
    if not w and "e" not in sig.operations:
        raise ParseError("the empty word needs a unit")
    return word_to_term(w, sig, "mu", "e")


_SUMMAND = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<coef>\(\s*-?\d+(?:\s*/\s*\d+)?\s*\)|\d+(?:\s*/\s*\d+)?)\s*\*?\s*)?
        (?P<word>[A-Za-z][A-Za-z0-9_'. ]*?)?\s*(?=[+-]|$)""",
    re.VERBOSE,
)


def parse_polynomial(text: str, sig: Signature) -> Polynomial:
    text = text.strip()
    if not text:
        raise ParseError("empty polynomial")
    if text == "0":
        return Polynomial.zero()
    total = Polynomial.zero()
    pos = 0
    first = True
    while pos < len(text):
        m = _SUMMAND.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse polynomial at {text[pos:]!r}")
        if not first and not m.group("sign"):
            raise ParseError(f"missing '+' before {text[pos:]!r}")
        first = False
        coef = m.group("coef")
        word = (m.group("word") or "").strip()
        c = Fraction(1)
        if coef:
            c = Fraction(coef.strip("() ").replace(" ", ""))
        if m.group("sign") == "-":
            c = -c
        if not word:
            if coef and c == 0:
                pos = m.end()
                continue
            raise ParseError(f"summand without a word in {text!r}")
        w = _split_word(word, sig, _LINEAR_BUILTIN)
        if len(w) > 1 and "mu" not in sig.operations:
            raise ParseError(f"word {word!r} needs an associative product (theory AssAlg)")
        total = total + Polynomial.monomial(w, c)
        pos = m.end()
    return total


_SIGNED = re.compile(r"([A-Za-z][A-Za-z0-9_']*)(\^-)?")


def parse_signed_word(text: str, sig: Signature) -> tuple:
    text = text.strip()
    if text == "1":
        return ()
    out = []
    tokens = text.split() if re.search(r"\s", text) else None
    if tokens is None:
        # single-character letters written together
        i = 0
        while i < len(text):
            x = text[i]
            i += 1
            s = 1
            if text.startswith("^-", i):
                s = -1
                i += 2
            out.append((_constant(sig, x, ("e",)), s))
    else:
        for tok in tokens:
            m = _SIGNED.fullmatch(tok)
            if not m:
                raise ParseError(f"bad signed letter {tok!r}")
            out.append((_constant(sig, m.group(1), ("e",)), -1 if m.group(2) else 1))
    return tuple(out)


def signed_word_left_comb(w, sig: Signature) -> Term:
    """``((x1 x2) x3) ...`` with ``inv(x)`` for inverse letters; ``e`` when empty."""
    if not w:
        return App(sig.op("e"), ())
    leaves = [App(sig.op(x), ()) if s > 0 else App(sig.op("inv"), (App(sig.op(x), ()),)) for x, s in w]
    t = leaves[0]
    for u in leaves[1:]:
        t = App(sig.op("mu"), (t, u))
    return t


def raw_signed_word(t: Term) -> tuple:
    """Signed leaves of a group term, without cancelling anything."""
    n = t.op.name
    if n == "mu":
        return raw_signed_word(t.args[0]) + raw_signed_word(t.args[1])
    if n == "inv":
        return tuple((x, -s) for x, s in reversed(raw_signed_word(t.args[0])))
    if n == "e":
        return ()
    return ((n, 1),)


def parse_native(p: ParadigmSpec, text: str, sig: Signature):
    """A ground term, or a GroundRule when ``text`` contains ``=>``."""
    if "=>" in text:
        name = ""
        head, sep, rest = text.partition(":")
        if sep and "=>" in rest and re.fullmatch(r"\s*[A-Za-z_][A-Za-z0-9_']*\s*", head):
            name, text = head.strip(), rest
        lhs, _, rhs = text.partition("=>")
        return GroundRule(name or "r", parse_native(p, lhs, sig), parse_native(p, rhs, sig))
    if p.kind == "string":
        return parse_word(text, sig)
    if p.kind == "linear":
        return polynomial_to_term(parse_polynomial(text, sig), sig)
    if p.kind == "group":
        return signed_word_left_comb(group_reduce(parse_signed_word(text, sig)), sig)
    return parse_term(text, sig)


def parse_any(p: ParadigmSpec, text: str, sig: Signature) -> Term:
    """Native syntax first, then the general term syntax."""
    try:
        return parse_native(p, text, sig)
    except (ParseError, UnknownConstant):
        return parse_term(text, sig)


def render_native(p: ParadigmSpec, t: Term) -> str:
    if p.kind == "string":
        unit = "e" if any(u.op.name == "e" for _, u in enumerate_positions(t)) else None
        w = assoc_flatten(t, "mu", unit or "e")
        return format_word(w) if w else "1"
    if p.kind == "linear":
        if sort_of(t).name != "m":
            raise NotRepresentable("only module terms have a polynomial form")
        return format_polynomial(linear_canonical(t))
    if p.kind == "group":
        return format_signed_word(group_eval(t))
    return format_term(t)


def _is_left_monomial(t: Term) -> bool:
    return all(u.op.name == "mu" or (not u.args and u.op.name not in _LINEAR_BUILTIN)
               for _, u in enumerate_positions(t))


def validate_rules(p: ParadigmSpec, rules, sig: Signature):
    """``(rules, diagnostics)``: the rules to use and one message per change."""
    out, diags = [], []
    for r in rules:
        if p.kind == "linear" and not _is_left_monomial(r.lhs):
            raise NotLeftMonomial(f"rule {r.name}: the source must be a monomial")
        if p.kind == "group":
            lw, rw = group_eval(r.lhs), group_eval(r.rhs)
            lt, rt = signed_word_left_comb(lw, sig), signed_word_left_comb(rw, sig)
            if (raw_signed_word(r.lhs), raw_signed_word(r.rhs)) != (lw, rw):
                diags.append(f"rule {r.name}: sides reduced to {format_signed_word(lw)} => {format_signed_word(rw)}")
            r = GroundRule(r.name, lt, rt)
            if lw == rw:
                diags.append(f"rule {r.name}: degenerate after reduction, dropped")
                continue
        elif p.kind == "string":
            lw = assoc_flatten(r.lhs, "mu", "e")
            if not lw:
                diags.append(f"rule {r.name}: empty source, dropped")
                continue
            if lw == assoc_flatten(r.rhs, "mu", "e"):
                diags.append(f"rule {r.name}: degenerate, dropped")
                continue
        elif p.kind == "linear":
            if linear_canonical(r.lhs) == linear_canonical(r.rhs):
                diags.append(f"rule {r.name}: degenerate, dropped")
                continue
        out.append(r)
    return out, diags
