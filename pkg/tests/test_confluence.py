import random

import pytest
from hypothesis import given, settings, strategies as st

from apm import parse_spec
from apm.confluence import (
    CONFLUENT,
    INCLUSION_INDEPENDENT,
    NON_CONFLUENT,
    NON_ORTHOGONAL,
    ORTHOGONAL,
    TRIVIAL,
    UNKNOWN,
    Branching,
    bottom_components,
    classify_local_branching,
    critical_branchings,
    joinable_modulo,
    local_confluence_report,
    newman_confluence_report,
    quotient_system,
)
from apm.engine import find_redexes, make_apm, reachability
from apm.errors import NotLocal
from apm.steps import EquivTrace, Policy, RewritingPath
from apm.terms import Context
from apm.theories import rule_instances_at

import oracles

B3 = [("alpha", "(s.t).s", "t.(s.t)")]


def word_apm(letters, rules):
    return parse_spec(oracles.word_spec(letters, rules)).build()


def local(a, b, t):
    return Branching(RewritingPath([a], t), EquivTrace.empty(t), RewritingPath([b], t))


def test_classification():
    apm = word_apm("abc", [("ab", "c"), ("ba", "c")])
    b = apm.backend
    t = b.term(tuple("abab"))
    steps = find_redexes(apm, t)
    by_offset = {s.info[1]: s for s in steps}
    assert classify_local_branching(local(by_offset[0], by_offset[0], t)) == TRIVIAL
    assert classify_local_branching(local(by_offset[0], by_offset[2], t)) == ORTHOGONAL
    assert classify_local_branching(local(by_offset[0], by_offset[1], t)) == NON_ORTHOGONAL
    longer = Branching(RewritingPath([by_offset[0], by_offset[0]], t), EquivTrace.empty(t), RewritingPath([], t))
    with pytest.raises(NotLocal):
        classify_local_branching(longer)


def test_classification_of_step_against_axiom():
    apm = make_apm("Mon", ["s", "t"], [("r", "s", "t")], policy="R")
    t = apm.parse("(s.t).t")
    (step,) = find_redexes(apm, t)
    assoc = [i for i in rule_instances_at(apm.theory.axioms, t) if i.rule.name == "A"][0]
    e = EquivTrace(t, assoc.target, ((Context.at(t, ()), assoc),))
    br = Branching(RewritingPath([step], t), e, RewritingPath([], assoc.target))
    # the redex sits inside a variable of the associativity pattern
    assert classify_local_branching(br) == INCLUSION_INDEPENDENT


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_string_critical_sources_match_overlap_scan(seed):
    letters, rules = oracles.random_word_system(random.Random(seed))
    apm = word_apm(letters, rules)
    crit, completeness = critical_branchings(apm)
    assert completeness == "EXACT"
    assert {cb.render for cb in crit} == oracles.critical_overlap_sources(rules)


def test_b3_branching_and_quotient():
    apm = make_apm("Mon", ["s", "t"], B3)
    (cb,) = critical_branchings(apm)[0]
    assert cb.render == "ststs" and cb.kind == "overlap"
    j = joinable_modulo(apm, None, cb)
    assert j.status == NON_CONFLUENT
    b = apm.backend
    assert {b.render(j.witnesses[0][0]), b.render(j.witnesses[1][0])} == {"tstts", "sttst"}
    assert quotient_system(apm).render() == "<s,t | sts => tst>"


def test_joining_diagram_replays():
    apm = word_apm("ab", [("aa", "a"), ("ab", "b")])
    crit, _ = critical_branchings(apm)
    assert crit
    for cb in crit:
        j = joinable_modulo(apm, None, cb)
        assert j.status == CONFLUENT
        b = apm.backend
        left = j.left_path.replay(apm.theory)
        right = j.right_path.replay(apm.theory)
        assert b.key(left) == b.key(right) == j.meet
        assert j.equiv.replay(apm.theory) == right


def test_confluent_system_is_certified():
    v = newman_confluence_report(word_apm("ab", [("aa", "a"), ("ab", "b")]))
    assert v.status == CONFLUENT
    assert v.preconditions["quasi_termination"] == "HOLDS"


def test_kleene_example_is_caught():
    # locally confluent and quasi-terminating, yet a has two normal forms
    apm = make_apm("Mon", ["a", "b", "c", "d"], [("r1", "a", "b"), ("r2", "b", "a"), ("r3", "a", "c"), ("r4", "b", "d")])
    assert local_confluence_report(apm).status == CONFLUENT
    v = newman_confluence_report(apm)
    assert v.status == NON_CONFLUENT
    assert any("terminal components" in n for n in v.notes)


def test_local_confluence_without_termination_is_not_enough():
    apm = make_apm("Mon", ["a"], [("r", "a", "a.a")])
    v = newman_confluence_report(apm)
    assert v.status == UNKNOWN
    assert any("quasi-termination" in n for n in v.notes)


def test_divergence_between_irreducibles_with_infinite_closure():
    # aa -> 1 is irreducible, aa -> aaa -> ... reaches a, which is irreducible too
    apm = word_apm("a", [("aa", "aaa"), ("aaa", "aaaa"), ("aa", "")])
    v = newman_confluence_report(apm)
    assert v.status == NON_CONFLUENT


def test_bottom_components():
    apm = make_apm("Mon", ["a", "b", "c", "d"], [("r1", "a", "b"), ("r2", "b", "a"), ("r3", "a", "c"), ("r4", "b", "d")])
    g = reachability(apm, [apm.parse("a")])
    reach, _ = bottom_components(g)
    assert len(reach[("a",)]) == 2 and len(reach[("c",)]) == 1


def test_intro_linear_report():
    apm = make_apm("AssAlg", ["x", "y", "z", "t"], [("alpha", "x.y", "x.z"), ("beta", "z.t", "(1+1)*(y.t)")])
    crit, _ = critical_branchings(apm)
    assert crit == []
    v = local_confluence_report(apm)
    assert v.status == UNKNOWN
    assert v.preconditions["quasi_termination"] == "FAILS"
    kinds = {cb.kind for cb, _ in v.diagrams}
    assert kinds == {"additive"}


def test_linear_overlap_is_found():
    apm = make_apm("AssAlg", ["x", "y"], [("r", "x.x", "y")])
    crit, completeness = critical_branchings(apm)
    assert [cb.render for cb in crit] == ["xxx"] and completeness == "EXACT"
    assert joinable_modulo(apm, None, crit[0]).status == NON_CONFLUENT


def test_group_branchings():
    apm = make_apm("GrpTilde", ["s", "t"], B3)
    crit, completeness = critical_branchings(apm)
    assert completeness == "UNDER_APPROXIMATE"
    assert "ststs" in {cb.render for cb in crit}
    for cb in crit:
        assert cb.left.positive and cb.right.positive


def test_generic_critical_pairs_modulo_ac():
    apm = make_apm("AC", ["a", "b"], [("r", "a.b", "a")])
    crit, completeness = critical_branchings(apm)
    assert completeness == "UNDER_APPROXIMATE"
    v = local_confluence_report(apm)
    assert v.status in (CONFLUENT, UNKNOWN)
    for cb, j in v.diagrams:
        assert j.status == CONFLUENT


def test_quotient_is_policy_invariant():
    apm = make_apm("GrpTilde", ["s", "t"], B3)
    assert quotient_system(apm.with_options(policy=Policy.R)).render() == quotient_system(apm).render()
