"""Population-independent decision procedures for cardinality reachability.

Queries start from an unbounded initial cube (arbitrarily many processes in
each supported state) and constrain the target by cardinality atoms:
"at least one process in q" and, in the extended form, "no process in q".

The presence-only problem is decided by a saturation fixpoint over the set
of states realizable with arbitrarily many copies; the fixpoint comes with a
provenance certificate from which a concrete replayable run is expanded, so
every YES is constructive and every NO is population-independent. The
extended problem with absence atoms is handled by bounded-complete explicit
search and honestly reports UNKNOWN past its population bounds.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .errors import CertificateError, TargetNotCoveredError
from .explicit import DEFAULT_NODE_BUDGET, Decision, Verdict, reach_bounded
from .model import (
    Configuration,
    Cube,
    IONet,
    Net,
    RBN,
    RBNStep,
    RBNTransition,
    Trace,
    check_states_known,
    rbn_apply,
)
from .translate import io_to_rbn, rbn_trace_to_io


class QueryKind(Enum):
    GEQ1 = "geq1"
    GEQ1_EQ0 = "geq1_eq0"


@dataclass(frozen=True)
class CrpQuery:
    """Cardinality constraints on the target: every state in
    `must_be_present` needs count >= 1, every state in `must_be_absent`
    needs count = 0, all other states are unconstrained."""

    must_be_present: frozenset[str]
    must_be_absent: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "must_be_present", frozenset(self.must_be_present))
        object.__setattr__(self, "must_be_absent", frozenset(self.must_be_absent))
        overlap = self.must_be_present & self.must_be_absent
        if overlap:
            raise ValueError(f"states both required and forbidden: {sorted(overlap)}")

    @property
    def kind(self) -> QueryKind:
        return QueryKind.GEQ1_EQ0 if self.must_be_absent else QueryKind.GEQ1

    def to_cube(self) -> Cube:
        return Cube.of(
            lower={q: 1 for q in self.must_be_present},
            upper={q: 0 for q in self.must_be_absent},
        )


@dataclass(frozen=True)
class UnboundedInitialCube:
    """Initial condition: any number of processes in each supported state."""

    support: tuple[str, ...]

    def __post_init__(self) -> None:
        seen = []
        for q in self.support:
            if q not in seen:
                seen.append(q)
        object.__setattr__(self, "support", tuple(seen))

    def to_cube(self) -> Cube:
        return Cube.from_support(self.support)


RULE_INIT = "init"
RULE_BROADCAST = "broadcast"
RULE_RECEIVE = "receive"


@dataclass(frozen=True)
class CertEntry:
    """Why one state entered the coverable set: it was initial, a covered
    state broadcast into it, or a covered state received into it using a
    broadcast available from the covered set."""

    state: str
    rule: str
    transition: Optional[RBNTransition] = None
    enabler: Optional[RBNTransition] = None

    def parent(self) -> Optional[str]:
        return None if self.rule == RULE_INIT else self.transition.source


@dataclass(frozen=True)
class SaturationCertificate:
    """Provenance of the saturation fixpoint: one entry per covered state, in
    discovery order, every entry's premise states appearing earlier."""

    entries: tuple[CertEntry, ...]

    def states(self) -> frozenset[str]:
        return frozenset(e.state for e in self.entries)

    def entry_for(self, state: str) -> CertEntry:
        for e in self.entries:
            if e.state == state:
                return e
        raise CertificateError(f"certificate has no entry for state {state!r}")

    def check_well_formed(self) -> None:
        """Every entry must cite only states with earlier entries; this is
        what makes witness expansion terminate."""
        index: dict[str, int] = {}
        for i, e in enumerate(self.entries):
            if e.state in index:
                raise CertificateError(f"state {e.state!r} has two entries")
            premises = []
            if e.rule != RULE_INIT:
                premises.append(e.transition.source)
            if e.rule == RULE_RECEIVE:
                premises.append(e.enabler.source)
            for q in premises:
                if index.get(q, i) >= i:
                    raise CertificateError(
                        f"entry for {e.state!r} cites {q!r} without an earlier entry"
                    )
            index[e.state] = i


def crp_geq1_saturate(
    net: RBN, init: UnboundedInitialCube
) -> tuple[frozenset[str], SaturationCertificate]:
    """Least fixpoint of the coverable-state rules, with provenance.

    Rules: supported states are covered; if q is covered and q -!m-> q' is a
    transition then q' is covered (a spare copy of q broadcasts); if p is
    covered, p -?m-> p' is a transition, and some covered state broadcasts m,
    then p' is covered (the broadcaster fires, one spare copy of p listens).
    Nothing else is covered. Receivers are never forced, so covered states
    can be stockpiled in any quantity, which is what makes the rules sound
    over the unbounded initial cube.
    """
    check_states_known(net, init.support)
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
            else:
                if t.source in covered and t.target not in covered:
                    enabler = _available_broadcast(net, t.message, covered)
                    if enabler is not None:
                        covered[t.target] = CertEntry(t.target, RULE_RECEIVE, t, enabler)
                        changed = True
    return frozenset(covered), SaturationCertificate(tuple(covered.values()))


def _available_broadcast(net: RBN, message: str, covered) -> Optional[RBNTransition]:
    for b in net.transitions:
        if b.is_broadcast and b.message == message and b.source in covered:
            return b
    return None


def expand_witness(
    net: RBN,
    init: UnboundedInitialCube,
    cert: SaturationCertificate,
    targets: Iterable[str],
) -> Trace:
    """Expand certificate provenance into a concrete replayable run that ends
    with at least one process in every target.

    Each target gets a dedicated process that starts at the initial-state
    root of its provenance chain and walks the chain; receive moves use one
    broadcast step with exactly one receiver, enabled by a process parked at
    the broadcaster's state (spawned on demand; kept for reuse when the
    broadcast is a self-loop, consumed otherwise). Fresh processes are never
    shared between targets, trading run length for an obvious correctness
    argument.
    """
    cert.check_well_formed()
    wanted = sorted(set(targets), key=lambda q: net.states.index(q) if q in net.states else -1)
    entry = {e.state: e for e in cert.entries}
    missing = [q for q in wanted if q not in entry]
    if missing:
        raise TargetNotCoveredError(f"not in the coverable set: {', '.join(map(str, missing))}")

    spawned: Counter = Counter()
    steps: list[RBNStep] = []
    ready_selfloop: set[str] = set()

    def chain_to(state: str) -> list[CertEntry]:
        chain = []
        e = entry.get(state)
        if e is None:
            raise CertificateError(f"certificate cites uncovered state {state!r}")
        while e.rule != RULE_INIT:
            chain.append(e)
            parent = entry.get(e.parent())
            if parent is None:
                raise CertificateError(f"certificate cites uncovered state {e.parent()!r}")
            e = parent
        chain.append(e)
        chain.reverse()
        return chain

    def walk_to(state: str) -> None:
        chain = chain_to(state)
        spawned[chain[0].state] += 1
        for e in chain[1:]:
            if e.rule == RULE_BROADCAST:
                steps.append(RBNStep(e.transition, ()))
            else:
                ensure_enabler(e.enabler)
                steps.append(RBNStep(e.enabler, (e.transition,)))

    def ensure_enabler(b: RBNTransition) -> None:
        if b.source == b.target and b.source in ready_selfloop:
            return
        walk_to(b.source)
        if b.source == b.target:
            ready_selfloop.add(b.source)

    for q in wanted:
        walk_to(q)

    initial = Configuration.of(spawned)
    cur = initial
    recorded = []
    for step in steps:
        cur = rbn_apply(net, cur, step)
        recorded.append((step, cur))
    return Trace(initial, tuple(recorded))


def crp_geq1_decide(net: RBN, init: UnboundedInitialCube, query: CrpQuery) -> Decision:
    """Decide the presence-only query: YES with a replayable witness exactly
    when every required state is coverable; NO is population-independent."""
    if query.kind is not QueryKind.GEQ1:
        raise ValueError("query has absence atoms; use the bounded procedure")
    check_states_known(net, query.must_be_present)
    s, cert = crp_geq1_saturate(net, init)
    if query.must_be_present <= s:
        return Decision(Verdict.YES, expand_witness(net, init, cert, query.must_be_present))
    return Decision(Verdict.NO)


def default_populations(net: Net, query: CrpQuery) -> range:
    """Escalation schedule when no population range is given: from the number
    of required states up to twice the state count."""
    return range(len(query.must_be_present), 2 * len(net.states) + 1)


def crp_bounded(
    net: Net,
    init: UnboundedInitialCube,
    query: CrpQuery,
    populations: Optional[Iterable[int]] = None,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
) -> Decision:
    """Bounded-complete search for either query kind on either model; YES
    carries a replayable witness in the input model, UNKNOWN means the
    population bounds were exhausted."""
    check_states_known(net, query.must_be_present | query.must_be_absent)
    check_states_known(net, init.support)
    pops = default_populations(net, query) if populations is None else populations
    if isinstance(net, IONet):
        rbn, _ = io_to_rbn(net)
        decision = reach_bounded(rbn, init.to_cube(), query.to_cube(), pops, budget=budget)
        if decision.verdict is Verdict.YES:
            return Decision(Verdict.YES, rbn_trace_to_io(net, decision.trace))
        return decision
    return reach_bounded(net, init.to_cube(), query.to_cube(), pops, budget=budget)


def crp_geq1_eq0_bounded(
    net: RBN,
    init: UnboundedInitialCube,
    query: CrpQuery,
    populations: Optional[Iterable[int]] = None,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
) -> Decision:
    """Presence-and-absence query via bounded search. Never answers NO: a
    failed search only exhausts the given populations."""
    if query.kind is not QueryKind.GEQ1_EQ0:
        raise ValueError("query has no absence atoms; the saturation procedure decides it")
    return crp_bounded(net, init, query, populations, budget=budget)


def io_crp_decide(
    net: IONet,
    init: UnboundedInitialCube,
    query: CrpQuery,
    populations: Optional[Iterable[int]] = None,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
) -> Decision:
    """Decide a cardinality query on an observation net by translating it to
    a broadcast network, transporting the query, deciding there, and mapping
    any witness run back through the translation."""
    check_states_known(net, query.must_be_present | query.must_be_absent)
    check_states_known(net, init.support)
    if query.kind is QueryKind.GEQ1:
        rbn, cert = io_to_rbn(net)
        init2 = UnboundedInitialCube(tuple(cert.map_state(q) for q in init.support))
        query2 = CrpQuery(frozenset(cert.map_state(q) for q in query.must_be_present))
        decision = crp_geq1_decide(rbn, init2, query2)
        if decision.verdict is Verdict.YES:
            return Decision(Verdict.YES, rbn_trace_to_io(net, decision.trace))
        return decision
    return crp_bounded(net, init, query, populations, budget=budget)
