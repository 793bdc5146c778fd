import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from apm import parse_spec
from apm.engine import (
    apply_step,
    find_redexes,
    make_apm,
    quasi_irreducible_keys,
    quasi_normal_form,
    reachability,
    termination_check,
)
from apm.errors import BoundExhausted
from apm.normalize import linear_canonical
from apm.paradigms import ParadigmSpec, parse_native
from apm.steps import Bounds, Policy
from apm.strategy import is_positive

import oracles

B3 = [("alpha", "(s.t).s", "t.(s.t)")]


def word_apm(letters, rules, **kw):
    return parse_spec(oracles.word_spec(letters, rules)).build(**kw)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_string_successors_match_oracle(seed):
    rng = random.Random(seed)
    letters, rules = oracles.random_word_system(rng)
    apm = word_apm(letters, rules)
    b = apm.backend
    w = "".join(rng.choice(letters) for _ in range(rng.randint(1, 7)))
    t = parse_native(ParadigmSpec("string"), w, apm.signature)
    got = {b.render(b.key(apply_step(apm, s))) for s in find_redexes(apm, t)}
    want = {v or "1" for v in oracles.successors(w, rules)}
    assert got == want


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_reachability_matches_oracle(seed):
    rng = random.Random(seed)
    letters, rules = oracles.random_word_system(rng)
    apm = word_apm(letters, rules)
    w = "".join(rng.choice(letters) for _ in range(rng.randint(1, 5)))
    t = parse_native(ParadigmSpec("string"), w, apm.signature)
    g = reachability(apm, [t], max_terms=400)
    want = oracles.reach_bfs(w, rules, limit=399)
    if want is not None and g.complete:
        assert {"".join(k) for k in g.keys} == set(want)
        assert all(g.depth[k] == want["".join(k)] for k in g.keys)


def test_policies_differ_on_unbracketed_redex():
    apm = make_apm("Mon", ["s", "t"], B3, policy="R")
    t = apm.parse("s.(t.s)")
    assert find_redexes(apm, t) == []
    assert find_redexes(apm.with_options(policy=Policy.RPE), t) == []
    assert len(find_redexes(apm.with_options(policy=Policy.EPR), t)) == 1
    assert len(find_redexes(apm.with_options(policy=Policy.EPRE), t)) == 1


def test_epre_step_is_traced():
    apm = make_apm("Mon", ["s", "t"], B3)
    t = apm.parse("(s.(s.(t.s))).t")
    (step,) = find_redexes(apm, t)
    assert step.source == t
    assert step.pre.replay(apm.theory) == step.redex_source
    assert apm.backend.key(apply_step(apm, step)) == tuple("ststt")


def test_termination_taxonomy():
    cases = [
        ([("r", "a", "a.b")], "EXPONENTIATION_DETECTED"),
        ([("r", "a.b", "b.a")], "TERMINATING"),
        ([("r", "a", "b"), ("q", "b", "a")], "QUASI_TERMINATING"),
    ]
    for rules, kind in cases:
        apm = make_apm("Mon", ["a", "b"], rules)
        v = termination_check(apm, [apm.parse("(a.b).b")])
        assert v.kind == kind, rules
    apm = make_apm("Mon", ["a"], [("r", "a", "a.a")])
    v = termination_check(apm, [apm.parse("a")])
    assert v.kind == "EXPONENTIATION_DETECTED"
    assert v.witness.replay(apm.theory) is not None


def test_linear_nontermination_is_proved():
    apm = make_apm("AssAlg", ["x", "y", "z"], [("r", "x.y", "x.z")])
    v = termination_check(apm)
    assert v.kind == "NON_TERMINATING_EVIDENCE" and v.proof
    assert v.quasi_terminating == "FAILS"
    b = apm.backend
    keys = [b.key(v.cycle.source)] + [b.key(s.target) for s in v.cycle.steps]
    assert keys[0] == keys[-1]
    v.cycle.replay(apm.theory)
    # the witness walks through k*g - (k-1)*f
    targets = [linear_canonical(s.target) for s in v.witness.steps]
    f, g = linear_canonical(apm.parse("x.y")), linear_canonical(apm.parse("x.z"))
    assert targets[-1] == g.scale(len(targets)) - f.scale(len(targets) - 1)


def test_group_nontermination_is_proved():
    apm = make_apm("GrpTilde", ["s", "t"], B3)
    v = termination_check(apm)
    assert v.kind == "NON_TERMINATING_EVIDENCE" and v.proof
    v.cycle.replay(apm.theory)
    lens = [len(apm.backend.key(s.target)) for s in v.witness.steps]
    assert lens == sorted(lens) and len(set(lens)) == len(lens)


def test_linear_positive_moves_match_oracle():
    rng = random.Random(2)
    for _ in range(40):
        f, g = oracles.random_monomial_rule(rng, letters="xyz", max_len=2)
        apm = make_apm("AssAlg", ["x", "y", "z"], [])
        p = ParadigmSpec("linear")
        rule = parse_native(p, f"r: {''.join(f)} => {oracles.poly_text(g)}", apm.signature)
        apm = apm.with_options(rules=[rule])
        b = apm.backend
        src = {}
        for _ in range(rng.randint(1, 3)):
            w = tuple(rng.choice("xyz") for _ in range(rng.randint(1, 4)))
            src = oracles._padd(src, {w: Fraction(rng.randint(1, 3))})
        if not src:
            continue
        key = b.key(parse_native(p, oracles.poly_text(src), apm.signature))
        want = set()
        for m, c in src.items():
            for i in range(len(m) - len(f) + 1):
                if m[i:i + len(f)] == f:
                    out = oracles._padd(src, {m: -c})
                    for w, d in g.items():
                        out = oracles._padd(out, {m[:i] + w + m[i + len(f):]: c * d})
                    want.add(tuple(sorted(out.items())))
        moves, exact = b.moves(key, positive_only=True)
        assert exact
        got = {tuple(sorted(m.target.items())) for m in moves}
        assert got == want - {tuple(sorted(src.items()))}
        for m in moves:
            step = b.realize(b.term(key), m)
            assert is_positive(apm.strategy, step, apm)
            assert linear_canonical(step.replay(apm.theory)) == m.target


def test_quasi_normal_form():
    apm = make_apm("Mon", ["s", "t"], B3)
    q, d = quasi_normal_form(apm, apm.parse("(s.(s.(t.s))).t"))
    assert apm.backend.key(q) == tuple("tsttt") and d == 2
    cyc = make_apm("Mon", ["a", "b"], [("r", "a", "b"), ("q", "b", "a")])
    g = reachability(cyc, [cyc.parse("a")])
    assert sorted(quasi_irreducible_keys(g)) == [("a",), ("b",)]
    q, d = quasi_normal_form(cyc, cyc.parse("b"))
    assert cyc.backend.key(q) == ("a",) and d == 1


def test_quasi_normal_form_needs_complete_graph():
    apm = make_apm("Mon", ["a"], [("r", "a", "a.a")], bounds=Bounds(max_terms=20))
    with pytest.raises(BoundExhausted):
        quasi_normal_form(apm, apm.parse("a"))


def test_generic_paradigm_modulo_ac():
    apm = make_apm("AC", ["a", "b"], [("r", "b.a", "a")])
    g = reachability(apm, [apm.parse("a.(b.b)")])
    assert g.complete and len(g) == 3
    # with a unit the classes are infinite: same nodes, but only a sample of moves
    cm = make_apm("CMon", ["a", "b"], [("r", "b.a", "a")])
    g = reachability(cm, [cm.parse("a.(b.b)")])
    assert len(g) == 3 and not g.complete
