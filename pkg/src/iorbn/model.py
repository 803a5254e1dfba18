"""Core formalisms: observation nets, broadcast networks, configurations, cubes.

Both models use anonymous-process counting semantics: a configuration records
how many processes occupy each state and nothing else. An observation net
moves one process at a time based on the state of some other process; a
broadcast network moves one sender plus an arbitrary finite multiset of
receivers in a single step (the communication topology reconfigures freely
between steps, so any subset of listeners may receive).

All values are immutable and hashable. Every enumeration follows a canonical
order (states by declaration order, transitions sorted, receiver multisets in
ascending count-vector order) so searches and fixpoints are reproducible.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

from .errors import (
    DisabledError,
    InconsistentCubeError,
    MessageMismatchError,
    UnknownStateError,
    UnknownTransitionError,
)

INF = math.inf

BROADCAST = "!"
RECEIVE = "?"

_TOKEN = re.compile(r"[A-Za-z0-9_']+\Z")


def _check_token(name: str, what: str) -> None:
    if not isinstance(name, str) or not _TOKEN.match(name):
        raise ValueError(f"invalid {what} name: {name!r}")


@dataclass(frozen=True)
class Configuration:
    """Finite multiset of states.

    `counts` holds (state, count) pairs strictly sorted by state name with
    every count >= 1; zero entries are normalized away, so two configurations
    are equal iff they denote the same multiset. Build instances with
    `Configuration.of`, which accepts any mapping or iterable of state names.
    """

    counts: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        prev = None
        for state, k in self.counts:
            if not isinstance(k, int) or k < 1:
                raise ValueError(f"count for {state!r} must be a positive int, got {k!r}")
            if prev is not None and state <= prev:
                raise ValueError("counts must be strictly sorted by state")
            prev = state
        object.__setattr__(self, "_map", dict(self.counts))

    @classmethod
    def of(cls, items: Union[Mapping[str, int], Iterable[str]] = ()) -> "Configuration":
        cnt = Counter(items)
        if any(k < 0 for k in cnt.values()):
            raise ValueError("negative count in configuration")
        return cls(tuple(sorted((s, k) for s, k in cnt.items() if k > 0)))

    def count(self, state: str) -> int:
        return self._map.get(state, 0)

    @property
    def population(self) -> int:
        return sum(k for _, k in self.counts)

    def support(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.counts)

    def to_counter(self) -> Counter:
        return Counter(self._map)

    def contains(self, need: Mapping[str, int]) -> bool:
        """True if this multiset includes `need` (pointwise >=)."""
        return all(self.count(s) >= k for s, k in need.items())

    def add(self, extra: Union["Configuration", Mapping[str, int]]) -> "Configuration":
        cnt = self.to_counter()
        cnt.update(extra.to_counter() if isinstance(extra, Configuration) else extra)
        return Configuration.of(cnt)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{s}:{k}" for s, k in self.counts) + "}"


@dataclass(frozen=True, order=True)
class IOTransition:
    """One observation rule: a process in `source` that sees some other
    process in `observed` may move to `target`."""

    source: str
    observed: str
    target: str

    def __str__(self) -> str:
        return f"{self.source} @ {self.observed} -> {self.target}"


@dataclass(frozen=True, order=True)
class RBNTransition:
    """One broadcast ('!') or receive ('?') rule of a broadcast network."""

    source: str
    kind: str
    message: str
    target: str

    def __post_init__(self) -> None:
        if self.kind not in (BROADCAST, RECEIVE):
            raise ValueError(f"kind must be {BROADCAST!r} or {RECEIVE!r}, got {self.kind!r}")

    @property
    def is_broadcast(self) -> bool:
        return self.kind == BROADCAST

    def compact(self) -> str:
        return f"{self.source}{self.kind}{self.message}->{self.target}"

    def __str__(self) -> str:
        return f"{self.source} {self.kind}{self.message} -> {self.target}"


def _validate_states(states: Iterable[str], what: str) -> tuple[str, ...]:
    out = tuple(states)
    for s in out:
        _check_token(s, what)
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate {what} declaration")
    return out


@dataclass(frozen=True)
class IONet:
    """An observation net: declared states and observation transitions.

    States keep declaration order (the canonical order for enumeration);
    transitions are stored sorted, with duplicates rejected.
    """

    states: tuple[str, ...]
    transitions: tuple[IOTransition, ...] = ()

    def __post_init__(self) -> None:
        states = _validate_states(self.states, "state")
        known = set(states)
        trans = tuple(sorted(self.transitions))
        for t in trans:
            if not {t.source, t.observed, t.target} <= known:
                raise ValueError(f"transition references undeclared state: {t}")
        if len(set(trans)) != len(trans):
            raise ValueError("duplicate transition")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transitions", trans)

    @property
    def kind(self) -> str:
        return "ionet"

    def state_index(self, state: str) -> int:
        return self.states.index(state)


@dataclass(frozen=True)
class RBN:
    """A broadcast network: states, message alphabet, broadcast/receive rules."""

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    transitions: tuple[RBNTransition, ...] = ()

    def __post_init__(self) -> None:
        states = _validate_states(self.states, "state")
        alphabet = _validate_states(self.alphabet, "message")
        known, msgs = set(states), set(alphabet)
        trans = tuple(sorted(self.transitions))
        for t in trans:
            if t.source not in known or t.target not in known:
                raise ValueError(f"transition references undeclared state: {t}")
            if t.message not in msgs:
                raise ValueError(f"transition references undeclared message: {t}")
        if len(set(trans)) != len(trans):
            raise ValueError("duplicate transition")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "transitions", trans)

    @property
    def kind(self) -> str:
        return "rbn"

    def state_index(self, state: str) -> int:
        return self.states.index(state)


Net = Union[IONet, RBN]


@dataclass(frozen=True)
class RBNStep:
    """One broadcast step: a sender transition plus a finite multiset of
    matching receive transitions, taken by pairwise distinct processes.

    Receives are a multiset, not a labeled assignment: they are normalized
    into sorted order, so permuting them yields the same step.
    """

    broadcast: RBNTransition
    receives: tuple[RBNTransition, ...] = ()

    def __post_init__(self) -> None:
        if not self.broadcast.is_broadcast:
            raise ValueError("step broadcast must be a '!' transition")
        receives = tuple(sorted(self.receives))
        for r in receives:
            if r.is_broadcast:
                raise ValueError("step receives must be '?' transitions")
            if r.message != self.broadcast.message:
                raise MessageMismatchError(
                    f"receive {r.compact()} does not match broadcast message "
                    f"{self.broadcast.message!r}"
                )
        object.__setattr__(self, "receives", receives)

    def __str__(self) -> str:
        recv = ", ".join(r.compact() for r in self.receives)
        return f"bcast {self.broadcast} recv [{recv}]"


Step = Union[IOTransition, RBNStep]


@dataclass(frozen=True)
class Trace:
    """A replayable run: an initial configuration, then (step, configuration
    reached) pairs. Population is constant along any trace."""

    initial: Configuration
    steps: tuple[tuple[Step, Configuration], ...] = ()

    @property
    def final(self) -> Configuration:
        return self.steps[-1][1] if self.steps else self.initial


# ---------------------------------------------------------------------------
# Observation-net semantics


def _io_need(t: IOTransition) -> Counter:
    return Counter((t.source, t.observed))


def io_apply(net: IONet, c: Configuration, t: IOTransition) -> Configuration:
    """Fire one observation: the observer moves, the observed process stays.

    Observer and observed are distinct processes, so a self-state observation
    (source == observed) needs at least two processes in that state.
    """
    if t not in net.transitions:
        raise UnknownTransitionError(f"not a transition of the net: {t}")
    if not c.contains(_io_need(t)):
        raise DisabledError(f"{t} is not enabled in {c}")
    cnt = c.to_counter()
    cnt[t.source] -= 1
    cnt[t.target] += 1
    return Configuration.of(cnt)


def io_successors(net: IONet, c: Configuration) -> list[tuple[IOTransition, Configuration]]:
    """All one-step successors, one pair per enabled transition, in canonical
    transition order."""
    out = []
    for t in net.transitions:
        if c.contains(_io_need(t)):
            cnt = c.to_counter()
            cnt[t.source] -= 1
            cnt[t.target] += 1
            out.append((t, Configuration.of(cnt)))
    return out


# ---------------------------------------------------------------------------
# Broadcast-network semantics


def rbn_apply(net: RBN, c: Configuration, s: RBNStep) -> Configuration:
    """Fire one broadcast step: the sender and every listed receiver move
    simultaneously; processes without a receive in the step are unaffected."""
    if s.broadcast not in net.transitions:
        raise UnknownTransitionError(f"not a transition of the net: {s.broadcast}")
    for r in s.receives:
        if r not in net.transitions:
            raise UnknownTransitionError(f"not a transition of the net: {r}")
    need = Counter([s.broadcast.source])
    need.update(r.source for r in s.receives)
    if not c.contains(need):
        raise DisabledError(f"step needs {dict(need)} but configuration is {c}")
    cnt = c.to_counter()
    cnt[s.broadcast.source] -= 1
    cnt[s.broadcast.target] += 1
    for r in s.receives:
        cnt[r.source] -= 1
        cnt[r.target] += 1
    return Configuration.of(cnt)


def _receiver_choices(
    receivers: list[RBNTransition], pool: dict[str, int]
) -> Iterator[tuple[RBNTransition, ...]]:
    # Ascending count-vector order over the (sorted) receive transitions;
    # capacities shared between receives with the same source state.
    if not receivers:
        yield ()
        return
    first = receivers[0]
    cap = pool.get(first.source, 0)
    for k in range(cap + 1):
        sub = dict(pool)
        sub[first.source] = cap - k
        for tail in _receiver_choices(receivers[1:], sub):
            yield (first,) * k + tail


def rbn_successors(net: RBN, c: Configuration) -> list[tuple[RBNStep, Configuration]]:
    """All distinct one-step successor configurations, each paired with one
    representative step (the canonically first receiver multiset reaching it)."""
    out: list[tuple[RBNStep, Configuration]] = []
    seen: set[Configuration] = set()
    for b in net.transitions:
        if not b.is_broadcast or c.count(b.source) < 1:
            continue
        pool = c.to_counter()
        pool[b.source] -= 1
        receivers = [t for t in net.transitions if not t.is_broadcast and t.message == b.message]
        for combo in _receiver_choices(receivers, dict(pool)):
            cnt = Counter(pool)
            cnt[b.target] += 1
            for r in combo:
                cnt[r.source] -= 1
                cnt[r.target] += 1
            succ = Configuration.of(cnt)
            if succ not in seen:
                seen.add(succ)
                out.append((RBNStep(b, combo), succ))
    return out


# ---------------------------------------------------------------------------
# Generic step plumbing


def apply_step(net: Net, c: Configuration, step: Step) -> Configuration:
    if isinstance(step, IOTransition):
        if not isinstance(net, IONet):
            raise UnknownTransitionError("observation step applied to a broadcast network")
        return io_apply(net, c, step)
    if not isinstance(net, RBN):
        raise UnknownTransitionError("broadcast step applied to an observation net")
    return rbn_apply(net, c, step)


def step_successors(net: Net, c: Configuration) -> list[tuple[Step, Configuration]]:
    if isinstance(net, IONet):
        return io_successors(net, c)
    return rbn_successors(net, c)


def replay_trace(net: Net, trace: Trace) -> Configuration:
    """Re-apply every step of a trace, checking each recorded configuration.

    Raises a ModelError (or ValueError on a recording mismatch) if the trace
    does not replay; returns the final configuration otherwise.
    """
    cur = trace.initial
    for step, recorded in trace.steps:
        cur = apply_step(net, cur, step)
        if cur != recorded:
            raise ValueError(f"trace records {recorded} but step yields {cur}")
    return cur


# ---------------------------------------------------------------------------
# Cubes


@dataclass(frozen=True)
class Cube:
    """Per-state count intervals; a possibly infinite set of configurations.

    States absent from both bound maps get lower 0 and upper `default_upper`.
    Target cubes use the permissive default (INF); initial cubes built from a
    support set use 0, which forbids states off the support.
    """

    lower: tuple[tuple[str, int], ...] = ()
    upper: tuple[tuple[str, Union[int, float]], ...] = ()
    default_upper: Union[int, float] = INF

    def __post_init__(self) -> None:
        for _, k in self.lower:
            if not isinstance(k, int) or k < 0:
                raise ValueError(f"lower bound must be a nonnegative int, got {k!r}")
        for _, u in self.upper:
            if u != INF and (not isinstance(u, int) or u < 0):
                raise ValueError(f"upper bound must be a nonnegative int or INF, got {u!r}")
        if self.default_upper != INF and self.default_upper != 0:
            raise ValueError("default upper bound must be 0 or INF")
        object.__setattr__(self, "_lower", dict(self.lower))
        object.__setattr__(self, "_upper", dict(self.upper))

    @classmethod
    def of(
        cls,
        lower: Mapping[str, int] | None = None,
        upper: Mapping[str, Union[int, float]] | None = None,
        default_upper: Union[int, float] = INF,
    ) -> "Cube":
        return cls(
            tuple(sorted((lower or {}).items())),
            tuple(sorted((upper or {}).items())),
            default_upper,
        )

    @classmethod
    def from_support(cls, support: Iterable[str]) -> "Cube":
        """The unbounded initial cube over `support`: any number of processes
        in each supported state, none anywhere else."""
        return cls.of(upper={q: INF for q in support}, default_upper=0)

    def lower_bound(self, state: str) -> int:
        return self._lower.get(state, 0)

    def upper_bound(self, state: str) -> Union[int, float]:
        return self._upper.get(state, self.default_upper)

    def mentioned(self) -> tuple[str, ...]:
        return tuple(sorted(set(self._lower) | set(self._upper)))

    def check_consistent(self) -> None:
        for q in self.mentioned():
            if self.lower_bound(q) > self.upper_bound(q):
                raise InconsistentCubeError(
                    f"state {q}: lower {self.lower_bound(q)} exceeds upper {self.upper_bound(q)}"
                )


def cube_contains(cube: Cube, c: Configuration) -> bool:
    """True iff every state's count sits within the cube's interval."""
    for q in set(c.support()) | set(cube.mentioned()):
        if not cube.lower_bound(q) <= c.count(q) <= cube.upper_bound(q):
            return False
    return True


def cube_min_config(cube: Cube) -> Configuration:
    """The pointwise-smallest member of a consistent cube."""
    cube.check_consistent()
    return Configuration.of({q: cube.lower_bound(q) for q in cube.mentioned()})


def cube_configurations(
    cube: Cube, states: tuple[str, ...], population: int
) -> Iterator[Configuration]:
    """All configurations over `states` with the given population that lie in
    the cube, in descending lexicographic count-vector order (count vectors
    read in state declaration order)."""

    def rec(i: int, remaining: int) -> Iterator[tuple[int, ...]]:
        if i == len(states):
            if remaining == 0:
                yield ()
            return
        q = states[i]
        lo = cube.lower_bound(q)
        hi = min(cube.upper_bound(q), remaining)
        if lo > hi:
            return
        for k in range(int(hi), lo - 1, -1):
            for tail in rec(i + 1, remaining - k):
                yield (k,) + tail

    for vec in rec(0, population):
        yield Configuration.of({s: k for s, k in zip(states, vec) if k})


def check_states_known(net: Net, states: Iterable[str]) -> None:
    unknown = [q for q in states if q not in net.states]
    if unknown:
        raise UnknownStateError(f"not states of the net: {', '.join(sorted(unknown))}")
