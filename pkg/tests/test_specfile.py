import pytest

from apm.errors import ApmError, InvalidOrder, ParseError, UnknownSymbol, UnknownTheory
from apm.paradigms import ParadigmSpec, render_native
from apm.specfile import load_spec, parse_spec
from apm.steps import Bounds

SEMILATTICE = """\
# idempotent commutative monoid without unit
theory custom Semilattice
  sort 1
  op mu : 1 1 -> 1
  infix . mu
  vars x y z : 1
  axiom A : (x.y).z => x.(y.z) modulo
  axiom C : x.y => y.x modulo
  axiom I : x.x => x
end
constants a b
rule r: term a.b => a
"""


def test_directives():
    spec = parse_spec("""
        # comments and blank lines are ignored
        theory Mon
        paradigm string
        constants s t   # trailing comment
        rule alpha: sts => tst
        rule beta: term (t.s).t => s.(t.s)
        strategy nf-modulo
        policy rpe
        bounds max-terms=50 join-depth=3
        seed ststs
    """)
    apm = spec.build()
    assert [c.name for c in apm.constants] == ["s", "t"]
    assert [r.name for r in apm.rules] == ["alpha", "beta"]
    assert apm.policy.value == "RPE"
    assert apm.bounds.max_terms == 50 and apm.bounds.join_depth == 3
    assert apm.bounds.max_depth == Bounds().max_depth
    p = ParadigmSpec("string")
    assert [render_native(p, t) for t in spec.seed_terms(apm)] == ["ststs"]
    assert render_native(p, apm.rules[1].lhs) == "tst"


def test_default_paradigm_follows_theory():
    assert parse_spec("theory GrpTilde\nconstants s\n").build().paradigm == "group"
    assert parse_spec("theory AssAlg\nconstants x\n").build().paradigm == "linear"
    assert parse_spec("theory AC\nconstants x\n").build().paradigm == "generic"


def test_explicit_bounds_override_the_file():
    spec = parse_spec("theory Mon\nconstants s\nbounds max-terms=50\n")
    assert spec.build(Bounds(max_terms=7)).bounds.max_terms == 7


@pytest.mark.parametrize("text, exc, where", [
    ("theory Foo\n", UnknownTheory, "Foo"),
    ("theory Mon\nfrobnicate x\n", ParseError, "line 2"),
    ("theory Mon\nconstants s\nrule a sts\n", ParseError, "line 3"),
    ("theory Mon\nbounds max-terms=0\n", ParseError, "line 2"),
    ("theory Mon\nbounds speed=3\n", ParseError, "line 2"),
    ("theory Mon\nconstants s\n\nrule a: sx => s\n", UnknownSymbol, "line 4"),
    ("theory Mon\nconstants s\nstrategy group-deglex s > t\n", InvalidOrder, "line 3"),
    ("theory GrpTilde\nconstants s t\nstrategy group-deglex s > t > t^- > s^-\n", InvalidOrder, "x^-"),
    ("theory Mon\nstrategy greedy\n", ParseError, "greedy"),
    ("theory custom X\n sort 1\n", ParseError, "end"),
    ("theory custom X\n sort 1\n colour red\nend\n", ParseError, "line 3"),
    ("theory Mon\ncoefficients R\n", ParseError, "line 2"),
    ("paradigm foo\n", ParseError, "line 1"),
    ("theory Mon\npolicy XYZ\n", ParseError, "line 2"),
    ("constants s\nrule a: ss => s\n", ParseError, "no theory"),
])
def test_errors(text, exc, where):
    with pytest.raises(exc) as info:
        parse_spec(text).build()
    assert where in str(info.value)
    assert isinstance(info.value, ApmError)


def test_custom_theory_block():
    spec = parse_spec(SEMILATTICE)
    apm = spec.build()
    th = apm.theory
    assert th.name == "Semilattice" and apm.paradigm == "generic"
    assert [a.name for a in th.axioms] == ["A", "C", "I"]
    assert set(th.unoriented) == {"A", "C"}


def test_custom_theory_rejects_ill_formed_axiom():
    bad = SEMILATTICE.replace("axiom I : x.x => x", "axiom I : x.x => w")
    with pytest.raises(ApmError):
        parse_spec(bad).build()


def test_string_diagnostics_are_kept():
    spec = parse_spec("theory Mon\nconstants s t\nrule a: st => st\nrule b: ts => st\n")
    apm = spec.build()
    assert [r.name for r in apm.rules] == ["b"]
    assert spec.diagnostics == ["rule a: degenerate, dropped"]


def test_shipped_spec_files(spec_path):
    for name, theory, n in (("b3.apm", "Mon", 1), ("group-b3.apm", "GrpTilde", 1),
                            ("intro-linear.apm", "AssAlg", 2), ("modc-sanity.apm", "ModC", 0)):
        apm = load_spec(spec_path(name)).build()
        assert apm.theory.name == theory and len(apm.rules) == n


def test_missing_file():
    with pytest.raises(OSError):
        load_spec("/nonexistent/spec.apm")
