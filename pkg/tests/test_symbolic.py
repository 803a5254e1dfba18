"""Saturation, witness expansion, and the cardinality decision procedures."""

import random

import pytest

from iorbn import (
    BROADCAST,
    Configuration,
    CrpQuery,
    EmptyRangeError,
    IONet,
    IOTransition,
    QueryKind,
    RBN,
    RBNTransition,
    RECEIVE,
    TargetNotCoveredError,
    UnboundedInitialCube,
    Verdict,
    coverable_states_explicit,
    crp_geq1_decide,
    crp_geq1_eq0_bounded,
    crp_geq1_saturate,
    expand_witness,
    io_crp_decide,
    replay_trace,
)
from iorbn.symbolic import RULE_INIT
from iorbn.harness import GenSpec, gen_random_ionet, gen_random_rbn


def cfg(mapping=None, **kw):
    return Configuration.of(mapping or kw)


SELF_NET = RBN(
    ("q", "p", "r"),
    ("m",),
    (RBNTransition("q", BROADCAST, "m", "q"), RBNTransition("p", RECEIVE, "m", "r")),
)

MOVE_NET = RBN(
    ("q", "q'", "p", "r"),
    ("m",),
    (RBNTransition("q", BROADCAST, "m", "q'"), RBNTransition("p", RECEIVE, "m", "r")),
)


def test_saturate_basic():
    s, cert = crp_geq1_saturate(SELF_NET, UnboundedInitialCube(("q", "p")))
    assert s == {"q", "p", "r"}
    # cross-check against the explicit oracle at population 2
    assert coverable_states_explicit(SELF_NET, ("q", "p"), 2) == s


def test_saturate_receive_needs_available_broadcast():
    s, _ = crp_geq1_saturate(SELF_NET, UnboundedInitialCube(("p",)))
    assert s == {"p"}


def test_saturate_moving_broadcaster():
    s, _ = crp_geq1_saturate(MOVE_NET, UnboundedInitialCube(("q", "p")))
    assert s == {"q", "q'", "p", "r"}
    assert coverable_states_explicit(MOVE_NET, ("q", "p"), 2) == s


def test_certificate_order_and_coverage():
    s, cert = crp_geq1_saturate(MOVE_NET, UnboundedInitialCube(("q", "p")))
    assert cert.states() == s
    cert.check_well_formed()
    seen = set()
    for entry in cert.entries:
        if entry.rule != RULE_INIT:
            assert entry.transition.source in seen
        if entry.enabler is not None:
            assert entry.enabler.source in seen
        seen.add(entry.state)


def test_expand_witness_one_step():
    init = UnboundedInitialCube(("q", "p"))
    _, cert = crp_geq1_saturate(SELF_NET, init)
    trace = expand_witness(SELF_NET, init, cert, ["r"])
    assert trace.initial == cfg(q=1, p=1)
    assert len(trace.steps) == 1
    final = replay_trace(SELF_NET, trace)
    assert final.count("r") >= 1


def test_expand_witness_initial_targets_need_no_steps():
    init = UnboundedInitialCube(("q", "p"))
    _, cert = crp_geq1_saturate(SELF_NET, init)
    trace = expand_witness(SELF_NET, init, cert, ["p"])
    assert trace.steps == ()


def test_expand_witness_uncovered_target():
    init = UnboundedInitialCube(("p",))
    _, cert = crp_geq1_saturate(SELF_NET, init)
    with pytest.raises(TargetNotCoveredError):
        expand_witness(SELF_NET, init, cert, ["r"])


def test_expand_witness_consumed_enabler_is_respawned():
    # the enabling broadcast moves its sender, so each use costs one process
    net = RBN(
        ("q", "s", "p", "r", "p2", "r2"),
        ("m",),
        (
            RBNTransition("q", BROADCAST, "m", "s"),
            RBNTransition("p", RECEIVE, "m", "r"),
            RBNTransition("p2", RECEIVE, "m", "r2"),
        ),
    )
    init = UnboundedInitialCube(("q", "p", "p2"))
    s, cert = crp_geq1_saturate(net, init)
    assert {"r", "r2"} <= s
    trace = expand_witness(net, init, cert, ["r", "r2"])
    final = replay_trace(net, trace)
    assert final.count("r") >= 1 and final.count("r2") >= 1
    assert trace.initial.count("q") == 2


def test_crp_geq1_decide():
    init = UnboundedInitialCube(("q", "p"))
    decision = crp_geq1_decide(SELF_NET, init, CrpQuery(frozenset({"r"})))
    assert decision.verdict is Verdict.YES
    assert replay_trace(SELF_NET, decision.trace).count("r") >= 1

    isolated = RBN(("q", "x"), ("m",), (RBNTransition("q", BROADCAST, "m", "q"),))
    assert (
        crp_geq1_decide(isolated, UnboundedInitialCube(("q",)), CrpQuery(frozenset({"x"}))).verdict
        is Verdict.NO
    )

    inside = crp_geq1_decide(SELF_NET, init, CrpQuery(frozenset({"q"})))
    assert inside.verdict is Verdict.YES
    assert inside.trace.steps == ()


def test_crp_geq1_decide_rejects_absence_atoms():
    with pytest.raises(ValueError):
        crp_geq1_decide(
            SELF_NET,
            UnboundedInitialCube(("q",)),
            CrpQuery(frozenset({"q"}), frozenset({"p"})),
        )


def test_crp_geq1_eq0_bounded_yes():
    init = UnboundedInitialCube(("q", "p"))
    query = CrpQuery(frozenset({"r"}), frozenset({"p"}))
    decision = crp_geq1_eq0_bounded(SELF_NET, init, query, range(2, 4))
    assert decision.verdict is Verdict.YES
    final = replay_trace(SELF_NET, decision.trace)
    assert final.count("r") >= 1 and final.count("p") == 0


def test_crp_geq1_eq0_bounded_unknown_when_stuck():
    net = RBN(("a", "b"), ("m",), ())
    query = CrpQuery(frozenset({"b"}), frozenset({"a"}))
    decision = crp_geq1_eq0_bounded(net, UnboundedInitialCube(("a",)), query, range(1, 4))
    assert decision.verdict is Verdict.UNKNOWN


def test_crp_geq1_eq0_bounded_empty_range():
    query = CrpQuery(frozenset({"r"}), frozenset({"p"}))
    with pytest.raises(EmptyRangeError):
        crp_geq1_eq0_bounded(SELF_NET, UnboundedInitialCube(("q", "p")), query, range(0))


def test_crp_geq1_eq0_never_answers_no():
    rng = random.Random(77)
    for _ in range(40):
        net = gen_random_rbn(GenSpec(rng.getrandbits(32), (2, 4), (0, 8), kind="rbn"))
        support = net.states[:2]
        present = frozenset({net.states[-1]})
        absent = frozenset({net.states[0]}) - present
        if not absent:
            continue
        query = CrpQuery(present, absent)
        decision = crp_geq1_eq0_bounded(net, UnboundedInitialCube(support), query, range(0, 4))
        assert decision.verdict in (Verdict.YES, Verdict.UNKNOWN)


AB_NET = IONet(("a", "b"), (IOTransition("a", "b", "b"),))


def test_io_crp_decide_examples():
    yes = io_crp_decide(AB_NET, UnboundedInitialCube(("a", "b")), CrpQuery(frozenset({"b"})))
    assert yes.verdict is Verdict.YES
    assert yes.trace.steps == ()

    no = io_crp_decide(AB_NET, UnboundedInitialCube(("a",)), CrpQuery(frozenset({"b"})))
    assert no.verdict is Verdict.NO

    eq0 = io_crp_decide(
        AB_NET,
        UnboundedInitialCube(("a", "b")),
        CrpQuery(frozenset({"b"}), frozenset({"a"})),
        range(2, 5),
    )
    assert eq0.verdict is Verdict.YES
    final = replay_trace(AB_NET, eq0.trace)
    assert final.count("b") >= 1 and final.count("a") == 0


def test_io_witnesses_use_only_io_steps():
    from iorbn.model import IOTransition as IOT

    rng = random.Random(88)
    for _ in range(40):
        net = gen_random_ionet(GenSpec(rng.getrandbits(32), (2, 4), (1, 6)))
        init = UnboundedInitialCube(net.states[:2])
        for q in net.states:
            decision = io_crp_decide(net, init, CrpQuery(frozenset({q})))
            if decision.verdict is Verdict.YES:
                assert all(isinstance(step, IOT) for step, _ in decision.trace.steps)
                final = replay_trace(net, decision.trace)
                assert final.count(q) >= 1
                assert set(decision.trace.initial.support()) <= set(init.support)


def test_saturation_bounded_by_oracle_and_constructive():
    # soundness: explicit coverable set never exceeds the fixpoint;
    # completeness: every fixpoint state has a replaying witness
    rng = random.Random(99)
    for _ in range(60):
        net = gen_random_rbn(GenSpec(rng.getrandbits(32), (2, 6), (0, 10), kind="rbn"))
        support = tuple(q for q in net.states if rng.random() < 0.5) or net.states[:1]
        init = UnboundedInitialCube(support)
        s, cert = crp_geq1_saturate(net, init)
        assert coverable_states_explicit(net, support, 3) <= s
        for q in s:
            trace = expand_witness(net, init, cert, [q])
            assert replay_trace(net, trace).count(q) >= 1


def test_query_kind_and_contradiction():
    assert CrpQuery(frozenset({"a"})).kind is QueryKind.GEQ1
    assert CrpQuery(frozenset({"a"}), frozenset({"b"})).kind is QueryKind.GEQ1_EQ0
    with pytest.raises(ValueError):
        CrpQuery(frozenset({"a"}), frozenset({"a"}))


def test_unbounded_initial_cube_dedupes_support():
    init = UnboundedInitialCube(("a", "b", "a"))
    assert init.support == ("a", "b")
