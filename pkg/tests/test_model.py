"""Semantics of both models: single steps, successor enumeration, cubes."""

import random

import pytest

from iorbn import (
    BROADCAST,
    Configuration,
    Cube,
    DisabledError,
    INF,
    InconsistentCubeError,
    IONet,
    IOTransition,
    MessageMismatchError,
    RBN,
    RBNStep,
    RBNTransition,
    RECEIVE,
    UnknownTransitionError,
    cube_configurations,
    cube_contains,
    cube_min_config,
    io_apply,
    io_successors,
    rbn_apply,
    rbn_successors,
)
from iorbn.harness import GenSpec, gen_random_ionet, gen_random_rbn


def cfg(mapping=None, **kw):
    return Configuration.of(mapping or kw)


# ---------------------------------------------------------------------------
# Configurations


def test_configuration_normalizes_zero_counts():
    assert cfg({"a": 0, "b": 2}) == cfg({"b": 2})
    assert cfg({}).counts == ()
    assert cfg({"a": 1}).population == 1


def test_configuration_rejects_negative_counts():
    with pytest.raises(ValueError):
        Configuration.of({"a": -1})


def test_configuration_equality_is_multiset_equality():
    assert cfg(a=1, b=2) == Configuration.of(["b", "a", "b"])
    assert hash(cfg(a=1)) == hash(cfg({"a": 1}))


def test_configuration_str():
    assert str(cfg(b=2, a=1)) == "{a:1, b:2}"
    assert str(cfg()) == "{}"


# ---------------------------------------------------------------------------
# Observation-net steps


@pytest.fixture
def pqr_net():
    return IONet(("p", "q", "r"), (IOTransition("p", "q", "r"),))


def test_io_apply_direct(pqr_net):
    out = io_apply(pqr_net, cfg(p=1, q=1), IOTransition("p", "q", "r"))
    assert out == cfg(q=1, r=1)


def test_io_apply_self_observation_needs_two_processes():
    net = IONet(("p", "r"), (IOTransition("p", "p", "r"),))
    with pytest.raises(DisabledError):
        io_apply(net, cfg(p=1), IOTransition("p", "p", "r"))
    assert io_apply(net, cfg(p=2), IOTransition("p", "p", "r")) == cfg(p=1, r=1)


def test_io_apply_self_observation_with_spectator():
    net = IONet(("p", "q", "r"), (IOTransition("p", "p", "r"),))
    assert io_apply(net, cfg(p=2, q=1), IOTransition("p", "p", "r")) == cfg(p=1, q=1, r=1)


def test_io_apply_unknown_transition(pqr_net):
    with pytest.raises(UnknownTransitionError):
        io_apply(pqr_net, cfg(p=1, q=1), IOTransition("q", "p", "r"))


def test_io_apply_observed_process_stays(pqr_net):
    out = io_apply(pqr_net, cfg(p=2, q=1), IOTransition("p", "q", "r"))
    assert out.count("q") == 1
    assert out.population == 3


def test_io_successors_observed_absent(pqr_net):
    assert io_successors(pqr_net, cfg(p=1)) == []


def test_io_successors_single(pqr_net):
    assert io_successors(pqr_net, cfg(p=1, q=1)) == [
        (IOTransition("p", "q", "r"), cfg(q=1, r=1))
    ]


def test_io_successors_two_rules():
    net = IONet(
        ("p", "q", "r", "s"),
        (IOTransition("p", "q", "r"), IOTransition("q", "p", "s")),
    )
    # enumerated by hand: each rule fires once from {p,q}
    assert io_successors(net, cfg(p=1, q=1)) == [
        (IOTransition("p", "q", "r"), cfg(q=1, r=1)),
        (IOTransition("q", "p", "s"), cfg(p=1, s=1)),
    ]


# ---------------------------------------------------------------------------
# Broadcast-network steps


BCAST = RBNTransition("q", BROADCAST, "m", "q")
RECV = RBNTransition("p", RECEIVE, "m", "p'")


@pytest.fixture
def bcast_net():
    return RBN(("q", "p", "p'"), ("m",), (BCAST, RECV))


def test_rbn_apply_one_receiver(bcast_net):
    step = RBNStep(BCAST, (RECV,))
    assert rbn_apply(bcast_net, cfg({"q": 1, "p": 1}), step) == cfg({"q": 1, "p'": 1})


def test_rbn_apply_zero_receivers_is_legal(bcast_net):
    step = RBNStep(BCAST, ())
    assert rbn_apply(bcast_net, cfg({"q": 1}), step) == cfg({"q": 1})


def test_rbn_apply_two_receivers_same_state(bcast_net):
    step = RBNStep(BCAST, (RECV, RECV))
    assert rbn_apply(bcast_net, cfg({"q": 1, "p": 2}), step) == cfg({"q": 1, "p'": 2})


def test_rbn_apply_disabled_when_receivers_exceed_processes(bcast_net):
    step = RBNStep(BCAST, (RECV, RECV))
    with pytest.raises(DisabledError):
        rbn_apply(bcast_net, cfg({"q": 1, "p": 1}), step)


def test_rbn_apply_unknown_transition(bcast_net):
    foreign = RBNTransition("p'", BROADCAST, "m", "p'")
    with pytest.raises(UnknownTransitionError):
        rbn_apply(bcast_net, cfg({"p'": 1}), RBNStep(foreign, ()))


def test_rbn_step_rejects_message_mismatch():
    b = RBNTransition("q", BROADCAST, "m", "q")
    r = RBNTransition("p", RECEIVE, "n", "p")
    with pytest.raises(MessageMismatchError):
        RBNStep(b, (r,))


def test_rbn_successors_self_broadcast_stutter():
    net = RBN(("q",), ("m",), (RBNTransition("q", BROADCAST, "m", "q"),))
    assert rbn_successors(net, cfg(q=1)) == [
        (RBNStep(net.transitions[0], ()), cfg(q=1))
    ]


def test_rbn_successors_receiver_subsets():
    net = RBN(
        ("q", "p", "r"),
        ("m",),
        (RBNTransition("q", BROADCAST, "m", "q"), RBNTransition("p", RECEIVE, "m", "r")),
    )
    # enumerated by hand: 0 or 1 receiver
    succs = {c for _, c in rbn_successors(net, cfg(q=1, p=1))}
    assert succs == {cfg(q=1, p=1), cfg(q=1, r=1)}
    # 0, 1, or 2 receivers
    succs = {c for _, c in rbn_successors(net, cfg(q=1, p=2))}
    assert succs == {cfg(q=1, p=2), cfg(q=1, p=1, r=1), cfg(q=1, r=2)}


def test_rbn_successors_distinct_configurations_only():
    # two receive rules with the same effect collapse to one successor each
    net = RBN(
        ("q", "p"),
        ("m",),
        (
            RBNTransition("q", BROADCAST, "m", "q"),
            RBNTransition("p", RECEIVE, "m", "p"),
        ),
    )
    succs = rbn_successors(net, cfg(q=1, p=1))
    assert len({c for _, c in succs}) == len(succs)


# ---------------------------------------------------------------------------
# Cubes


def test_cube_contains_examples():
    target = Cube.of(lower={"q": 1})
    assert cube_contains(target, cfg(q=3))
    assert not cube_contains(target, cfg(p=5))
    assert not cube_contains(Cube.of(upper={"q": 0}), cfg(q=1))


def test_cube_min_config():
    assert cube_min_config(Cube.of(lower={"q": 2}, upper={"q": INF, "p": 0})) == cfg(q=2)
    assert cube_min_config(Cube.of()) == cfg()
    with pytest.raises(InconsistentCubeError):
        cube_min_config(Cube.of(lower={"q": 1}, upper={"q": 0}))


def test_cube_from_support_excludes_other_states():
    cube = Cube.from_support(["a"])
    assert cube_contains(cube, cfg(a=4))
    assert not cube_contains(cube, cfg(a=1, b=1))
    assert cube_contains(cube, cfg())


def test_cube_configurations_descending_lexicographic():
    cube = Cube.of()
    got = list(cube_configurations(cube, ("a", "b"), 2))
    assert got == [cfg(a=2), cfg(a=1, b=1), cfg(b=2)]


def test_cube_configurations_respect_bounds():
    cube = Cube.of(lower={"a": 1}, upper={"b": 0})
    got = list(cube_configurations(cube, ("a", "b", "c"), 2))
    assert got == [cfg(a=2), cfg(a=1, c=1)]


# ---------------------------------------------------------------------------
# Net validation


def test_ionet_rejects_undeclared_and_duplicate():
    with pytest.raises(ValueError):
        IONet(("a",), (IOTransition("a", "b", "a"),))
    with pytest.raises(ValueError):
        IONet(("a",), (IOTransition("a", "a", "a"), IOTransition("a", "a", "a")))
    with pytest.raises(ValueError):
        IONet(("a", "a"), ())


def test_rbn_rejects_undeclared_message():
    with pytest.raises(ValueError):
        RBN(("a",), ("m",), (RBNTransition("a", BROADCAST, "x", "a"),))


def test_state_tokens_allow_primes():
    net = IONet(("p'", "q_1"), (IOTransition("p'", "q_1", "q_1"),))
    assert net.states == ("p'", "q_1")
    with pytest.raises(ValueError):
        IONet(("a b",), ())


# ---------------------------------------------------------------------------
# Randomized invariants


def _random_configs(states, rng, count, max_pop=4):
    for _ in range(count):
        pop = rng.randint(0, max_pop)
        yield Configuration.of([rng.choice(states) for _ in range(pop)])


def test_population_conservation_and_normalization():
    rng = random.Random(101)
    for i in range(60):
        net = gen_random_ionet(GenSpec(rng.getrandbits(32), (2, 4), (0, 6)))
        for c in _random_configs(net.states, rng, 5):
            for t, succ in io_successors(net, c):
                assert succ.population == c.population
                assert all(k >= 1 for _, k in succ.counts)
                assert io_apply(net, c, t) == succ
    for i in range(60):
        net = gen_random_rbn(GenSpec(rng.getrandbits(32), (2, 5), (0, 8), kind="rbn"))
        for c in _random_configs(net.states, rng, 5):
            for step, succ in rbn_successors(net, c):
                assert succ.population == c.population
                assert all(k >= 1 for _, k in succ.counts)
                assert rbn_apply(net, c, step) == succ


def test_successor_enumeration_is_deterministic():
    rng = random.Random(202)
    for i in range(30):
        net = gen_random_rbn(GenSpec(rng.getrandbits(32), (2, 5), (0, 8), kind="rbn"))
        for c in _random_configs(net.states, rng, 3):
            assert rbn_successors(net, c) == rbn_successors(net, c)
    for i in range(30):
        net = gen_random_ionet(GenSpec(rng.getrandbits(32), (2, 4), (0, 6)))
        for c in _random_configs(net.states, rng, 3):
            assert io_successors(net, c) == io_successors(net, c)


def test_receiver_anonymity():
    rng = random.Random(303)
    for i in range(40):
        net = gen_random_rbn(GenSpec(rng.getrandbits(32), (2, 5), (2, 8), kind="rbn"))
        for c in _random_configs(net.states, rng, 4):
            for step, succ in rbn_successors(net, c):
                if len(step.receives) < 2:
                    continue
                shuffled = list(step.receives)
                rng.shuffle(shuffled)
                permuted = RBNStep(step.broadcast, tuple(shuffled))
                assert rbn_apply(net, c, permuted) == succ
