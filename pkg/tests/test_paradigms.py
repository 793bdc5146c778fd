from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from apm import make_apm
from apm.backends import format_signed_word
from apm.errors import NotLeftMonomial, NotRepresentable, ParseError, UnknownConstant
from apm.normalize import format_polynomial, group_eval, linear_canonical
from apm.paradigms import (
    ParadigmSpec,
    parse_any,
    parse_native,
    parse_polynomial,
    parse_signed_word,
    parse_word,
    render_native,
    validate_rules,
)
from apm.steps import GroundRule
from apm.terms import format_term, parse_term

import oracles


@pytest.fixture(scope="module")
def mon():
    return make_apm("Mon", ["s", "t"], [])


@pytest.fixture(scope="module")
def alg():
    return make_apm("AssAlg", ["x", "y", "z", "t"], [], field=True)


@pytest.fixture(scope="module")
def grp():
    return make_apm("GrpTilde", ["s", "t"], [])


def test_words(mon):
    sig = mon.signature
    assert format_term(parse_word("sts", sig), sig) == "s.(t.s)"
    assert format_term(parse_word("s t s", sig), sig) == "s.(t.s)"
    assert format_term(parse_word("1", sig), sig) == "e"
    with pytest.raises(UnknownConstant):
        parse_word("sx", sig)
    with pytest.raises(UnknownConstant):
        parse_word("se", sig)  # the unit is not a letter


def test_empty_word_needs_unit():
    ass = make_apm("Ass", ["s"], [])
    with pytest.raises(ParseError):
        parse_word("1", ass.signature)


@pytest.mark.parametrize("text, want", [
    ("2*yt", "2*yt"),
    ("(1/2)*xy - xz", "(1/2)*xy + (-1)*xz"),
    ("-xz + xz", "0"),
    ("0", "0"),
    ("3 xy", "3*xy"),
    ("x + 2*x", "3*x"),
    ("xy + 0", "xy"),
])
def test_polynomials(alg, text, want):
    assert format_polynomial(parse_polynomial(text, alg.signature)) == want


@pytest.mark.parametrize("text", ["+", "2*", "", "x y+"])
def test_bad_polynomials(alg, text):
    with pytest.raises((ParseError, UnknownConstant)):
        parse_polynomial(text, alg.signature)


def test_polynomial_words_need_a_product():
    m = make_apm("ModC", ["a", "b"], [])
    assert format_polynomial(parse_polynomial("a - 2*b", m.signature)) == "a + (-2)*b"
    with pytest.raises(ParseError):
        parse_polynomial("ab", m.signature)


poly_dicts = st.dictionaries(
    st.tuples(*[st.sampled_from("xyzt")] * 2) | st.tuples(st.sampled_from("xyzt")),
    st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(lambda c: c != 0),
    max_size=4,
)


@settings(max_examples=150, deadline=None)
@given(poly_dicts)
def test_polynomial_text_round_trip(alg, p):
    parsed = parse_polynomial(oracles.poly_text(p), alg.signature)
    assert dict(parsed.items()) == p
    pl = ParadigmSpec("linear")
    t = parse_native(pl, oracles.poly_text(p), alg.signature)
    assert oracles.poly_eval(t) == p
    again = parse_polynomial(render_native(pl, t), alg.signature)
    assert dict(again.items()) == p


def test_signed_words(grp):
    sig = grp.signature
    assert parse_signed_word("sts^-", sig) == (("s", 1), ("t", 1), ("s", -1))
    assert parse_signed_word("s t^- s", sig) == (("s", 1), ("t", -1), ("s", 1))
    assert parse_signed_word("1", sig) == ()
    with pytest.raises(ParseError):
        parse_signed_word("s t^+", sig)


def _free_reduce(w):
    out = []
    for x in w:
        if out and out[-1][0] == x[0] and out[-1][1] == -x[1]:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


signed = st.lists(st.tuples(st.sampled_from("st"), st.sampled_from([1, -1])), max_size=10)


@settings(max_examples=150, deadline=None)
@given(signed)
def test_group_native_is_free_reduction(grp, w):
    p = ParadigmSpec("group")
    text = " ".join(x + ("^-" if s < 0 else "") for x, s in w) or "1"
    t = parse_native(p, text, grp.signature)
    want = _free_reduce(w)
    assert group_eval(t) == want
    assert render_native(p, t) == (format_signed_word(want))


def test_rules_and_names(mon):
    p = ParadigmSpec("string")
    r = parse_native(p, "alpha: sts => tst", mon.signature)
    assert isinstance(r, GroundRule) and r.name == "alpha"
    assert render_native(p, r.lhs) == "sts" and render_native(p, r.rhs) == "tst"
    assert parse_native(p, "st => 1", mon.signature).name == "r"


def test_parse_any_falls_back_to_terms(mon):
    p = ParadigmSpec("string")
    t = parse_any(p, "(s.t).s", mon.signature)
    assert format_term(t, mon.signature) == "(s.t).s"
    assert render_native(p, t) == "sts"


def test_unknown_paradigm():
    with pytest.raises(ValueError):
        ParadigmSpec("tree")


def test_validate_string_rules(mon):
    p = ParadigmSpec("string")
    rules = [parse_native(p, "x: 1 => s", mon.signature), parse_native(p, "y: st => st", mon.signature),
             parse_native(p, "z: ts => st", mon.signature)]
    kept, diags = validate_rules(p, rules, mon.signature)
    assert [r.name for r in kept] == ["z"]
    assert diags == ["rule x: empty source, dropped", "rule y: degenerate, dropped"]


def test_validate_group_rules_reduce_term_syntax(grp):
    p = ParadigmSpec("group")
    sig = grp.signature
    r = GroundRule("a", parse_any(p, "(s.inv(s)).t", sig), parse_any(p, "t.s", sig))
    kept, diags = validate_rules(p, [r], sig)
    assert diags == ["rule a: sides reduced to t => ts"]
    assert group_eval(kept[0].lhs) == (("t", 1),)
    d = GroundRule("d", parse_any(p, "s.inv(s)", sig), parse_any(p, "t.inv(t)", sig))
    kept, diags = validate_rules(p, [d], sig)
    assert kept == [] and "degenerate" in diags[-1]


def test_validate_linear_rules(alg):
    p = ParadigmSpec("linear")
    sig = alg.signature
    with pytest.raises(NotLeftMonomial):
        validate_rules(p, [parse_native(p, "b: x + y => z", sig)], sig)
    with pytest.raises(NotLeftMonomial):
        validate_rules(p, [parse_native(p, "b: 2*x => z", sig)], sig)
    kept, diags = validate_rules(p, [parse_native(p, "c: xy => xy + 0", sig)], sig)
    assert kept == [] and diags == ["rule c: degenerate, dropped"]


def test_render_linear_module_only(alg):
    p = ParadigmSpec("linear")
    t = parse_native(p, "xy + xy", alg.signature)
    assert render_native(p, t) == "2*xy"
    assert linear_canonical(t).items()[0][1] == Fraction(2)
    with pytest.raises(NotRepresentable):
        render_native(p, parse_term("1 + 1", alg.signature))
