"""Randomized differential validation.

Generates nets deterministically from seeds, then cross-checks the three
load-bearing claims at desk scale: the translation preserves reachability
configuration-for-configuration, the saturation fixpoint matches the
explicit-state oracle constructively, and the translation satisfies the
padded-simulation contract. Also ships the documented mutation probes used
to confirm the checks are not vacuous.
"""

from __future__ import annotations

import json
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .errors import InvalidSpecError, ModelError
from .explicit import DEFAULT_NODE_BUDGET, coverable_states_explicit, post_star
from .model import (
    BROADCAST,
    RECEIVE,
    Configuration,
    Cube,
    IONet,
    IOTransition,
    Net,
    RBN,
    RBNTransition,
    cube_configurations,
    replay_trace,
)
from .symbolic import (
    CertEntry,
    RULE_BROADCAST,
    RULE_INIT,
    RULE_RECEIVE,
    SaturationCertificate,
    UnboundedInitialCube,
    crp_geq1_saturate,
    expand_witness,
)
from .textio import serialize_net
from .translate import TranslationCertificate, io_to_rbn, transport_config


# ---------------------------------------------------------------------------
# Deterministic generators


@dataclass(frozen=True)
class GenSpec:
    """Seeded recipe for one random net; equal specs generate equal nets."""

    seed: int
    num_states: tuple[int, int] = (2, 4)
    num_transitions: tuple[int, int] = (0, 6)
    kind: str = "ionet"

    def __post_init__(self) -> None:
        lo, hi = self.num_states
        tlo, thi = self.num_transitions
        if lo < 1 or lo > hi:
            raise InvalidSpecError(f"bad state range {self.num_states}")
        if tlo < 0 or tlo > thi:
            raise InvalidSpecError(f"bad transition range {self.num_transitions}")
        if self.kind not in ("ionet", "rbn"):
            raise InvalidSpecError(f"bad kind {self.kind!r}")


def gen_random_ionet(spec: GenSpec) -> IONet:
    rng = random.Random(spec.seed)
    n = rng.randint(*spec.num_states)
    states = tuple(f"q{i}" for i in range(n))
    pool = [
        IOTransition(p, q, r) for p in states for q in states for r in states
    ]
    want = min(rng.randint(*spec.num_transitions), len(pool))
    return IONet(states, tuple(rng.sample(pool, want)))


def gen_random_rbn(spec: GenSpec) -> RBN:
    rng = random.Random(spec.seed)
    n = rng.randint(*spec.num_states)
    states = tuple(f"q{i}" for i in range(n))
    alphabet = tuple(f"m{i}" for i in range(rng.randint(1, n)))
    pool = [
        RBNTransition(p, kind, m, q)
        for kind in (BROADCAST, RECEIVE)
        for p in states
        for m in alphabet
        for q in states
    ]
    want = min(rng.randint(*spec.num_transitions), len(pool))
    return RBN(states, alphabet, tuple(rng.sample(pool, want)))


def gen_random_net(spec: GenSpec) -> Net:
    return gen_random_ionet(spec) if spec.kind == "ionet" else gen_random_rbn(spec)


# ---------------------------------------------------------------------------
# Counterexample records


@dataclass(frozen=True)
class Mismatch:
    """A reachability disagreement: `offending` is reachable on exactly one
    side when starting from c0."""

    net: Net
    c0: Configuration
    offending: Configuration
    direction: str

    def render(self) -> str:
        return (
            f"# mismatch direction={self.direction}\n"
            + serialize_net(self.net)
            + f"config {self.c0}\n"
            + f"config {self.offending}\n"
        )


@dataclass(frozen=True)
class SaturationMismatch:
    net: RBN
    support: tuple[str, ...]
    state: str
    reason: str

    def render(self) -> str:
        return (
            f"# saturation mismatch state={self.state} reason={self.reason} "
            f"support={' '.join(self.support)}\n" + serialize_net(self.net)
        )


@dataclass
class SimulationReport:
    instances_checked: int
    mismatches: list[Mismatch]
    elapsed: float

    @property
    def ok(self) -> bool:
        return not self.mismatches


# ---------------------------------------------------------------------------
# Differential checks


def check_translation_equivalence(
    net: IONet,
    c0: Configuration,
    *,
    rbn: Optional[RBN] = None,
    io_successors_fn: Optional[Callable] = None,
    budget: int = DEFAULT_NODE_BUDGET,
) -> Optional[Mismatch]:
    """Compare the reachability set of an observation net and its translation
    from one starting configuration (the state bijection is the identity, so
    configurations are compared directly)."""
    target = rbn if rbn is not None else io_to_rbn(net)[0]
    ra = post_star(net, c0, budget=budget, successors_fn=io_successors_fn).reachable
    rb = post_star(target, c0, budget=budget).reachable
    return _first_mismatch(net, c0, ra, rb)


def check_translation_equivalence_all_pops(
    net: IONet,
    max_pop: int,
    *,
    rbn: Optional[RBN] = None,
    io_successors_fn: Optional[Callable] = None,
) -> Optional[Mismatch]:
    """Compare reachability sets from every initial configuration with
    population <= max_pop.

    Population is invariant under steps, so each population level is handled
    as one finite graph: successor sets are computed once per configuration
    and the per-source reachability closures are read off them.
    """
    from .model import step_successors

    target = rbn if rbn is not None else io_to_rbn(net)[0]
    io_succ = io_successors_fn or step_successors
    everything = Cube.of()
    for pop in range(max_pop + 1):
        configs = list(cube_configurations(everything, net.states, pop))
        adj_a = {c: {s for _, s in io_succ(net, c)} for c in configs}
        adj_b = {c: {s for _, s in step_successors(target, c)} for c in configs}
        for c0 in configs:
            ra = _closure(adj_a, c0)
            rb = _closure(adj_b, c0)
            mismatch = _first_mismatch(net, c0, ra, rb)
            if mismatch is not None:
                return mismatch
    return None


def _closure(adj: dict, c0: Configuration) -> set[Configuration]:
    seen = {c0}
    stack = [c0]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def _first_mismatch(net, c0, ra, rb) -> Optional[Mismatch]:
    if ra == rb:
        return None
    diff = sorted(ra ^ rb, key=lambda c: c.counts)
    offending = diff[0]
    direction = "ionet-only" if offending in ra else "rbn-only"
    return Mismatch(net, c0, offending, direction)


def check_strong_simulation(
    inst_a: Net,
    inst_b: Net,
    cert: TranslationCertificate,
    pairs: Iterable[tuple[Configuration, Configuration]],
    *,
    budget: int = DEFAULT_NODE_BUDGET,
) -> SimulationReport:
    """Test the padded-simulation contract on sampled configuration pairs:
    C' is reachable from C in instance A exactly when their transported,
    padded images are reachable in instance B. Both failure directions are
    reported separately."""
    cert.validate(inst_a.states, inst_b.states)
    started = time.perf_counter()
    mismatches: list[Mismatch] = []
    cache_a: dict[Configuration, frozenset] = {}
    cache_b: dict[Configuration, frozenset] = {}
    checked = 0
    for c, c_prime in pairs:
        checked += 1
        if c not in cache_a:
            cache_a[c] = post_star(inst_a, c, budget=budget).reachable
        tc = transport_config(cert, c)
        if tc not in cache_b:
            cache_b[tc] = post_star(inst_b, tc, budget=budget).reachable
        fwd = c_prime in cache_a[c]
        bwd = transport_config(cert, c_prime) in cache_b[tc]
        if fwd and not bwd:
            mismatches.append(Mismatch(inst_a, c, c_prime, "a-reaches-b-does-not"))
        elif bwd and not fwd:
            mismatches.append(Mismatch(inst_a, c, c_prime, "b-reaches-a-does-not"))
    return SimulationReport(checked, mismatches, time.perf_counter() - started)


def sample_config_pairs(
    net: Net,
    rng: random.Random,
    *,
    population: int,
    count: int,
    budget: int = DEFAULT_NODE_BUDGET,
) -> list[tuple[Configuration, Configuration]]:
    """Sample (C, C') pairs at a fixed population: C' alternates between a
    genuinely reachable configuration and an arbitrary one, so both
    directions of the simulation contract get exercised."""
    c = _random_config(net.states, rng, population)
    reach = sorted(post_star(net, c, budget=budget).reachable, key=lambda x: x.counts)
    pairs = []
    for i in range(count):
        if i % 2 == 0:
            pairs.append((c, reach[rng.randrange(len(reach))]))
        else:
            pairs.append((c, _random_config(net.states, rng, population)))
    return pairs


def _random_config(states: tuple[str, ...], rng: random.Random, population: int) -> Configuration:
    return Configuration.of(Counter(rng.choice(states) for _ in range(population)))


def check_saturation_against_oracle(
    net: RBN,
    support: Iterable[str],
    max_pop: int,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
    saturate_fn: Callable = crp_geq1_saturate,
) -> Optional[SaturationMismatch]:
    """Assert the explicit coverable set is contained in the saturation set,
    and that every saturated state expands to a replaying witness whose
    initial configuration stays on the support."""
    sup = tuple(support)
    init = UnboundedInitialCube(sup)
    s, cert = saturate_fn(net, init)
    explicit = coverable_states_explicit(net, sup, max_pop, budget=budget)
    extra = sorted(explicit - s)
    if extra:
        return SaturationMismatch(net, sup, extra[0], "explicit-state-not-in-saturation")
    for q in sorted(s, key=net.state_index):
        try:
            trace = expand_witness(net, init, cert, [q])
            final = replay_trace(net, trace)
            if final.count(q) < 1:
                return SaturationMismatch(net, sup, q, "witness-misses-target")
            if not set(trace.initial.support()) <= set(sup):
                return SaturationMismatch(net, sup, q, "witness-starts-off-support")
        except (ModelError, ValueError, KeyError):
            return SaturationMismatch(net, sup, q, "witness-failed")
    return None


# ---------------------------------------------------------------------------
# Mutation probes (self-tests that the checks above can actually fail)


def drop_one_receive(rbn: RBN, index: int = 0) -> RBN:
    """Mutation probe: remove the index-th receive transition."""
    receives = [t for t in rbn.transitions if not t.is_broadcast]
    if not receives:
        raise ValueError("net has no receive transitions to drop")
    victim = receives[index % len(receives)]
    return RBN(rbn.states, rbn.alphabet, tuple(t for t in rbn.transitions if t != victim))


def saturate_without_broadcast_premise(
    net: RBN, init: UnboundedInitialCube
) -> tuple[frozenset[str], SaturationCertificate]:
    """Mutation probe: fire the receive rule whenever any broadcast of the
    message exists, even from states outside the covered set."""
    covered: dict[str, CertEntry] = {}
    for q in net.states:
        if q in init.support:
            covered[q] = CertEntry(q, RULE_INIT)
    changed = True
    while changed:
        changed = False
        for t in net.transitions:
            if t.is_broadcast:
                if t.source in covered and t.target not in covered:
                    covered[t.target] = CertEntry(t.target, RULE_BROADCAST, t)
                    changed = True
            elif t.source in covered and t.target not in covered:
                enabler = next(
                    (b for b in net.transitions if b.is_broadcast and b.message == t.message),
                    None,
                )
                if enabler is not None:
                    covered[t.target] = CertEntry(t.target, RULE_RECEIVE, t, enabler)
                    changed = True
    return frozenset(covered), SaturationCertificate(tuple(covered.values()))


def io_successors_allowing_self_observation(
    net: IONet, c: Configuration
) -> list[tuple[IOTransition, Configuration]]:
    """Mutation probe: let a single process observe itself (enabledness
    checked per state, not as a two-element multiset)."""
    out = []
    for t in net.transitions:
        if c.count(t.source) >= 1 and c.count(t.observed) >= 1:
            cnt = c.to_counter()
            cnt[t.source] -= 1
            cnt[t.target] += 1
            out.append((t, Configuration.of(cnt)))
    return out


# ---------------------------------------------------------------------------
# Orchestration


@dataclass
class CheckStats:
    name: str
    instances: int
    mismatches: int
    elapsed: float
    counterexamples: list[str] = field(default_factory=list)

    def line(self) -> str:
        return (
            f"check {self.name} instances={self.instances} "
            f"mismatches={self.mismatches} elapsed={self.elapsed:.2f}s"
        )


@dataclass
class ValidationSummary:
    seed: int
    iters: int
    checks: list[CheckStats]

    @property
    def failures(self) -> int:
        return sum(c.mismatches for c in self.checks)

    def json_line(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "iters": self.iters,
                "failures": self.failures,
                "checks": {
                    c.name: {"instances": c.instances, "mismatches": c.mismatches}
                    for c in self.checks
                },
            },
            sort_keys=True,
        )


_MAX_RENDERED = 3


def run_validation(
    seed: int,
    iters: int,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
    max_pop: int = 4,
    sim_pairs: int = 10,
) -> ValidationSummary:
    """Run the full differential suite on a seeded corpus and summarize it.

    Instance seeds are drawn from one master generator, so the whole report
    is a pure function of (seed, iters) apart from elapsed times.
    """
    rng = random.Random(seed)
    checks: list[CheckStats] = []

    started = time.perf_counter()
    hits: list[str] = []
    for _ in range(iters):
        net = gen_random_ionet(GenSpec(rng.getrandbits(63), (2, 4), (0, 6)))
        mismatch = check_translation_equivalence_all_pops(net, max_pop)
        if mismatch is not None and len(hits) < _MAX_RENDERED:
            hits.append(mismatch.render())
    checks.append(
        CheckStats("translation-equivalence", iters, len(hits), time.perf_counter() - started, hits)
    )

    started = time.perf_counter()
    hits = []
    for _ in range(iters):
        net = gen_random_rbn(GenSpec(rng.getrandbits(63), (2, 6), (0, 10), kind="rbn"))
        support = tuple(q for q in net.states if rng.random() < 0.6) or (net.states[0],)
        mismatch = check_saturation_against_oracle(net, support, max_pop, budget=budget)
        if mismatch is not None and len(hits) < _MAX_RENDERED:
            hits.append(mismatch.render())
    checks.append(
        CheckStats("saturation-oracle", iters, len(hits), time.perf_counter() - started, hits)
    )

    started = time.perf_counter()
    hits = []
    pair_total = 0
    for _ in range(iters):
        net = gen_random_ionet(GenSpec(rng.getrandbits(63), (2, 4), (0, 6)))
        rbn, cert = io_to_rbn(net)
        pairs = sample_config_pairs(
            net, rng, population=rng.randint(1, max_pop), count=sim_pairs, budget=budget
        )
        pair_total += len(pairs)
        report = check_strong_simulation(net, rbn, cert, pairs, budget=budget)
        for m in report.mismatches[: _MAX_RENDERED - len(hits)]:
            hits.append(m.render())
    checks.append(
        CheckStats("strong-simulation", pair_total, len(hits), time.perf_counter() - started, hits)
    )

    started = time.perf_counter()
    caught = _mutation_sensitivity(rng, min(iters, 100), max_pop)
    missed = [name for name, ok in caught.items() if not ok]
    checks.append(
        CheckStats(
            "mutation-sensitivity",
            len(caught),
            len(missed),
            time.perf_counter() - started,
            [f"# mutation never caught: {name}\n" for name in missed],
        )
    )

    started = time.perf_counter()
    smoke_ok = _certificate_transitivity_smoke()
    checks.append(
        CheckStats(
            "certificate-transitivity", 1, 0 if smoke_ok else 1, time.perf_counter() - started
        )
    )

    return ValidationSummary(seed, iters, checks)


def _mutation_sensitivity(rng: random.Random, instances: int, max_pop: int) -> dict[str, bool]:
    caught = {"drop-receive": False, "skip-broadcast-premise": False, "self-observation": False}
    for _ in range(instances):
        if all(caught.values()):
            break
        net = gen_random_ionet(GenSpec(rng.getrandbits(63), (2, 4), (1, 6)))
        rbn, _ = io_to_rbn(net)
        if not caught["drop-receive"] and any(not t.is_broadcast for t in rbn.transitions):
            mutated = drop_one_receive(rbn)
            if check_translation_equivalence_all_pops(net, max_pop, rbn=mutated) is not None:
                caught["drop-receive"] = True
        if not caught["self-observation"]:
            probe = io_successors_allowing_self_observation
            if (
                check_translation_equivalence_all_pops(net, max_pop, io_successors_fn=probe)
                is not None
            ):
                caught["self-observation"] = True
        if not caught["skip-broadcast-premise"]:
            rnet = gen_random_rbn(GenSpec(rng.getrandbits(63), (2, 6), (1, 10), kind="rbn"))
            support = tuple(q for q in rnet.states if rng.random() < 0.5) or (rnet.states[0],)
            if (
                check_saturation_against_oracle(
                    rnet, support, max_pop, saturate_fn=saturate_without_broadcast_premise
                )
                is not None
            ):
                caught["skip-broadcast-premise"] = True
    return caught


def _certificate_transitivity_smoke() -> bool:
    states = ("a", "b")
    one = TranslationCertificate.identity(states, "ionet", "rbn")
    two = TranslationCertificate.identity(states, "rbn", "rbn")
    composed = one.compose(two)
    return composed.state_map == one.state_map and composed.padding == Configuration()
