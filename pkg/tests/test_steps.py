import pytest

from apm.engine import make_apm
from apm.errors import MalformedStep, SortMismatch
from apm.normalize import enumerate_class
from apm.steps import Bounds, EquivTrace, GroundRule, Policy, RewritingPath, RewritingStep
from apm.terms import Context


@pytest.fixture
def mon():
    return make_apm("Mon", ["s", "t"], [("alpha", "(s.t).s", "t.(s.t)")])


def test_policy_aliases():
    assert Policy.parse("prp") == Policy.EPRE
    assert Policy.parse("PR") == Policy.EPR
    assert Policy.parse("rp") == Policy.RPE
    with pytest.raises(ValueError):
        Policy.parse("ERE")


def test_bounds_defaults():
    b = Bounds()
    assert b.as_dict() == {"max_class": 256, "max_terms": 10000, "max_depth": 64,
                           "insertion_bound": 1, "join_depth": 8}


def test_rule_sides_must_share_sort():
    apm = make_apm("ModC", ["a"], [])
    with pytest.raises(SortMismatch):
        GroundRule("bad", apm.parse("a"), apm.parse("1"))


def test_trace_replay_reverse_and_chain(mon):
    t = mon.parse("(s.t).(s.t)")
    cls = enumerate_class(mon.theory.axioms, t, bound=2, constants=mon.constants)
    u = cls.terms[-1]
    tr = EquivTrace(t, u, tuple(cls.trace_to(u)))
    assert tr.replay(mon.theory) == u
    back = tr.reversed()
    assert back.replay(mon.theory) == t
    assert tr.then(back).replay(mon.theory) == t
    with pytest.raises(MalformedStep):
        tr.then(tr)


def test_broken_trace_is_rejected(mon):
    t = mon.parse("(s.t).s")
    cls = enumerate_class(mon.theory.axioms, t, bound=1)
    u = cls.terms[1]
    steps = tuple(cls.trace_to(u))
    with pytest.raises(MalformedStep):
        EquivTrace(mon.parse("s.s"), u, steps).replay()
    with pytest.raises(MalformedStep):
        EquivTrace(t, mon.parse("s"), steps).replay()


def test_certificate_trace_replays_by_deciding(mon):
    t, u = mon.parse("(s.t).s"), mon.parse("s.(t.s)")
    assert EquivTrace(t, u, None, "assoc_flatten").replay(mon.theory) == u
    with pytest.raises(MalformedStep):
        EquivTrace(t, mon.parse("t"), None, "assoc_flatten").replay(mon.theory)


def test_step_replay_checks_junctions(mon):
    rule = mon.rules[0]
    ctx = Context.at(mon.parse("(s.t).s"), ())
    st = RewritingStep(ctx, rule)
    assert st.replay() == rule.rhs
    bad = RewritingStep(ctx, rule, EquivTrace.empty(mon.parse("s")))
    with pytest.raises(MalformedStep):
        bad.replay()
    path = RewritingPath([st, st])
    with pytest.raises(MalformedStep):
        path.replay()
