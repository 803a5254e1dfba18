"""State-announcing translation from observation nets to broadcast networks.

The translated network keeps the source state set, uses it verbatim as the
message alphabet, and has two transition families: every state broadcasts its
own name while staying put, and every observation rule becomes a receive of
the observed state's announcement. Each translation carries a certificate
(state renaming plus an auxiliary padding multiset, both trivial here) so
that simulation checkers can treat all constructions uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import CertificateError, UnknownStateError
from .model import (
    BROADCAST,
    RECEIVE,
    Configuration,
    Cube,
    IONet,
    IOTransition,
    RBN,
    RBNTransition,
    Trace,
    io_apply,
)


@dataclass(frozen=True)
class TranslationCertificate:
    """How configurations of the source instance embed into the target.

    `state_map` renames source states to target states (injective); `padding`
    is a fixed multiset of auxiliary target-only processes added to every
    transported configuration. The observation-net translation needs neither:
    its map is the identity and its padding is empty.
    """

    state_map: tuple[tuple[str, str], ...]
    padding: Configuration = Configuration()
    source_kind: str = "ionet"
    target_kind: str = "rbn"

    @classmethod
    def identity(cls, states: Iterable[str], source_kind: str, target_kind: str) -> "TranslationCertificate":
        return cls(tuple((q, q) for q in states), Configuration(), source_kind, target_kind)

    def mapping(self) -> dict[str, str]:
        return dict(self.state_map)

    def map_state(self, state: str) -> str:
        try:
            return self.mapping()[state]
        except KeyError:
            raise UnknownStateError(f"state {state!r} is not in the certificate's domain") from None

    def validate(self, source_states: Iterable[str], target_states: Iterable[str]) -> None:
        """Check totality, injectivity, and that padding lives outside the
        image of the source states."""
        src, tgt = set(source_states), set(target_states)
        m = self.mapping()
        if set(m) != src:
            raise CertificateError("state map is not total on the source states")
        image = set(m.values())
        if len(image) != len(m):
            raise CertificateError("state map is not injective")
        if not image <= tgt:
            raise CertificateError("state map leaves the target state set")
        pad = set(self.padding.support())
        if not pad <= tgt - image:
            raise CertificateError("padding must use only target states outside the mapped image")

    def compose(self, other: "TranslationCertificate") -> "TranslationCertificate":
        """Certificate for the composite embedding self;other."""
        if self.target_kind != other.source_kind:
            raise CertificateError("certificates do not chain: kinds differ")
        other_map = other.mapping()
        state_map = tuple((a, other_map[b]) for a, b in self.state_map)
        padding = transport_config(other, self.padding)
        return TranslationCertificate(state_map, padding, self.source_kind, other.target_kind)


def io_to_rbn(net: IONet) -> tuple[RBN, TranslationCertificate]:
    """Translate an observation net into a broadcast network.

    The result has one self-announcing broadcast per state and one receive per
    observation rule, so its transition count is |states| + |rules|.
    """
    broadcasts = [RBNTransition(q, BROADCAST, q, q) for q in net.states]
    receives = [RBNTransition(t.source, RECEIVE, t.observed, t.target) for t in net.transitions]
    rbn = RBN(net.states, net.states, tuple(broadcasts + receives))
    return rbn, TranslationCertificate.identity(net.states, "ionet", "rbn")


def transport_config(cert: TranslationCertificate, c: Configuration) -> Configuration:
    """Rename a configuration through the certificate and add its padding."""
    m = cert.mapping()
    renamed = {}
    for q, k in c.counts:
        if q not in m:
            raise UnknownStateError(f"state {q!r} is not in the certificate's domain")
        renamed[m[q]] = k
    return Configuration.of(renamed).add(cert.padding)


def transport_cube(cert: TranslationCertificate, cube: Cube) -> Cube:
    """Rename a cube's bounds through the certificate; padding states are
    pinned to exactly their padding count. No consistency check happens here,
    inconsistent cubes surface when a query is run."""
    m = cert.mapping()
    lower: dict[str, int] = {}
    upper: dict[str, int | float] = {}
    for q, k in cube.lower:
        if q not in m:
            raise UnknownStateError(f"state {q!r} is not in the certificate's domain")
        lower[m[q]] = k
    for q, u in cube.upper:
        if q not in m:
            raise UnknownStateError(f"state {q!r} is not in the certificate's domain")
        upper[m[q]] = u
    for q, k in cert.padding.counts:
        lower[q] = k
        upper[q] = k
    return Cube.of(lower, upper, cube.default_upper)


def rbn_trace_to_io(net: IONet, trace: Trace) -> Trace:
    """Rewrite a run of the translated network as a run of the source net.

    Each broadcast step becomes one observation per receive (the announced
    message is the observed state); broadcasts with no receivers disappear.
    """
    cur = trace.initial
    steps = []
    for step, _ in trace.steps:
        if isinstance(step, IOTransition):
            raise ValueError("expected a broadcast-network trace")
        for r in step.receives:
            t = IOTransition(r.source, step.broadcast.message, r.target)
            cur = io_apply(net, cur, t)
            steps.append((t, cur))
    if cur != trace.final:
        raise ValueError("translated trace does not land on the recorded final configuration")
    return Trace(trace.initial, tuple(steps))
