"""Line-oriented text formats for nets, configurations, queries, and traces.

Net files::

    ionet                     rbn
    states a b                states p q
    trans a @ b -> b          alphabet m
                              trans p !m -> p
                              trans q ?m -> p

`#` starts a comment, blank lines are skipped, and spacing within a line is
free (`trans a@b->b` parses the same). Query files are a single expression,
e.g. ``init: a b ; target: #b>=1 & #a=0`` with cube atoms ``q:[l,u]`` (``*``
for no upper bound) accepted on either side. Traces alternate ``config {...}``
and ``step ...`` lines; serialize/parse round-trips are exact on canonical
output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .errors import (
    ContradictoryAtomError,
    DuplicateTransitionError,
    ParseError,
    UndeclaredStateError,
)
from .model import (
    BROADCAST,
    INF,
    RECEIVE,
    Configuration,
    Cube,
    IONet,
    IOTransition,
    Net,
    RBN,
    RBNStep,
    RBNTransition,
    Trace,
)
from .symbolic import CrpQuery

_TOKEN_RE = re.compile(r"[A-Za-z0-9_']+")
_LEXEME_RE = re.compile(r"[A-Za-z0-9_']+|->|[@!?]|\S")


def _lex(line: str) -> list[tuple[str, int]]:
    out = []
    for m in _LEXEME_RE.finditer(line):
        tok = m.group(0)
        if tok == "#":
            break
        out.append((tok, m.start() + 1))
    return out


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def parse_net(text: str) -> Net:
    """Parse a net file into an observation net or a broadcast network."""
    header: Optional[str] = None
    states: Optional[list[str]] = None
    alphabet: Optional[list[str]] = None
    raw_transitions: list[tuple[list[tuple[str, int]], int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _lex(raw)
        if not toks:
            continue
        head, col = toks[0]
        if header is None:
            if head not in ("ionet", "rbn") or len(toks) != 1:
                raise ParseError("expected header line 'ionet' or 'rbn'", lineno, col)
            header = head
        elif head == "states":
            if states is not None:
                raise ParseError("duplicate states line", lineno, col)
            states = [t for t, _ in toks[1:]]
            _require_tokens(states, toks[1:], lineno)
        elif head == "alphabet":
            if header != "rbn":
                raise ParseError("alphabet line is only valid in rbn files", lineno, col)
            if alphabet is not None:
                raise ParseError("duplicate alphabet line", lineno, col)
            alphabet = [t for t, _ in toks[1:]]
            _require_tokens(alphabet, toks[1:], lineno)
        elif head == "trans":
            raw_transitions.append((toks[1:], lineno))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, col)
    if header is None:
        raise ParseError("empty net file")
    if states is None:
        raise ParseError("missing states line")
    if header == "ionet":
        return _build_ionet(states, raw_transitions)
    if alphabet is None:
        raise ParseError("missing alphabet line")
    return _build_rbn(states, alphabet, raw_transitions)


def _require_tokens(names, toks, lineno):
    for name, (tok, col) in zip(names, toks):
        if not _TOKEN_RE.fullmatch(tok):
            raise ParseError(f"invalid name {tok!r}", lineno, col)


def _expect(toks: list[tuple[str, int]], i: int, what: str, lineno: int) -> tuple[str, int]:
    if i >= len(toks):
        raise ParseError(f"expected {what} at end of line", lineno)
    return toks[i]


def _expect_name(toks, i, lineno) -> str:
    tok, col = _expect(toks, i, "a name", lineno)
    if not _TOKEN_RE.fullmatch(tok):
        raise ParseError(f"expected a name, got {tok!r}", lineno, col)
    return tok


def _expect_literal(toks, i, literal, lineno) -> None:
    tok, col = _expect(toks, i, repr(literal), lineno)
    if tok != literal:
        raise ParseError(f"expected {literal!r}, got {tok!r}", lineno, col)


def _build_ionet(states, raw_transitions) -> IONet:
    declared = set(states)
    transitions = []
    for toks, lineno in raw_transitions:
        src = _expect_name(toks, 0, lineno)
        _expect_literal(toks, 1, "@", lineno)
        obs = _expect_name(toks, 2, lineno)
        _expect_literal(toks, 3, "->", lineno)
        tgt = _expect_name(toks, 4, lineno)
        if len(toks) > 5:
            raise ParseError(f"trailing input {toks[5][0]!r}", lineno, toks[5][1])
        for q in (src, obs, tgt):
            if q not in declared:
                raise UndeclaredStateError(f"undeclared state {q!r}", lineno)
        t = IOTransition(src, obs, tgt)
        if t in transitions:
            raise DuplicateTransitionError(f"duplicate transition {t}", lineno)
        transitions.append(t)
    return IONet(tuple(states), tuple(transitions))


def _build_rbn(states, alphabet, raw_transitions) -> RBN:
    declared, msgs = set(states), set(alphabet)
    transitions = []
    for toks, lineno in raw_transitions:
        src = _expect_name(toks, 0, lineno)
        kind, col = _expect(toks, 1, "'!' or '?'", lineno)
        if kind not in (BROADCAST, RECEIVE):
            raise ParseError(f"expected '!' or '?', got {kind!r}", lineno, col)
        msg = _expect_name(toks, 2, lineno)
        _expect_literal(toks, 3, "->", lineno)
        tgt = _expect_name(toks, 4, lineno)
        if len(toks) > 5:
            raise ParseError(f"trailing input {toks[5][0]!r}", lineno, toks[5][1])
        for q in (src, tgt):
            if q not in declared:
                raise UndeclaredStateError(f"undeclared state {q!r}", lineno)
        if msg not in msgs:
            raise UndeclaredStateError(f"undeclared message {msg!r}", lineno)
        t = RBNTransition(src, kind, msg, tgt)
        if t in transitions:
            raise DuplicateTransitionError(f"duplicate transition {t}", lineno)
        transitions.append(t)
    return RBN(tuple(states), tuple(alphabet), tuple(transitions))


def serialize_net(net: Net) -> str:
    """Canonical text for a net; parse(serialize(net)) == net."""
    lines = [net.kind, "states " + " ".join(net.states)]
    if isinstance(net, RBN):
        lines.append("alphabet " + " ".join(net.alphabet))
    lines.extend(f"trans {t}" for t in net.transitions)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Configurations


def parse_config(text: str) -> Configuration:
    """Parse ``{a:1, b:2}`` (braces optional, ``{}`` is the empty one)."""
    body = text.strip()
    if body.startswith("{"):
        if not body.endswith("}"):
            raise ParseError(f"unbalanced braces in configuration {text!r}")
        body = body[1:-1]
    counts: dict[str, int] = {}
    for part in re.split(r"[,\s]+", body.strip()):
        if not part:
            continue
        m = re.fullmatch(r"([A-Za-z0-9_']+):(\d+)", part)
        if not m:
            raise ParseError(f"bad configuration entry {part!r}")
        state, k = m.group(1), int(m.group(2))
        if state in counts:
            raise ParseError(f"state {state!r} listed twice in configuration")
        counts[state] = k
    return Configuration.of(counts)


def format_config(c: Configuration) -> str:
    return str(c)


# ---------------------------------------------------------------------------
# Queries


@dataclass(frozen=True)
class QuerySpec:
    """Parsed query: an initial condition (support set or explicit cube) and
    a target (cardinality constraints or explicit cube)."""

    init_support: Optional[tuple[str, ...]] = None
    init_cube: Optional[Cube] = None
    crp: Optional[CrpQuery] = None
    target_cube: Optional[Cube] = None

    def initial_cube(self) -> Cube:
        if self.init_cube is not None:
            return self.init_cube
        if self.init_support is not None:
            return Cube.from_support(self.init_support)
        raise ParseError("query has no init part")

    def target_as_cube(self) -> Cube:
        if self.target_cube is not None:
            return self.target_cube
        if self.crp is not None:
            return self.crp.to_cube()
        raise ParseError("query has no target part")


_CUBE_ATOM = re.compile(r"([A-Za-z0-9_']+):\[(\d+),(\d+|\*)\]")
_GEQ1_ATOM = re.compile(r"#([A-Za-z0-9_']+)>=1")
_EQ0_ATOM = re.compile(r"#([A-Za-z0-9_']+)=0")
_NAME_ATOM = re.compile(r"[A-Za-z0-9_']+")


def _split_atoms(side: str) -> list[str]:
    return [a for chunk in side.split("&") for a in chunk.split() if a]


def _parse_target(side: str) -> tuple[Optional[CrpQuery], Optional[Cube]]:
    atoms = _split_atoms(side)
    if not atoms:
        raise ParseError("empty target")
    present: set[str] = set()
    absent: set[str] = set()
    lower: dict[str, int] = {}
    upper: dict[str, Union[int, float]] = {}
    crp_seen = cube_seen = False
    for atom in atoms:
        if m := _GEQ1_ATOM.fullmatch(atom):
            present.add(m.group(1))
            crp_seen = True
        elif m := _EQ0_ATOM.fullmatch(atom):
            absent.add(m.group(1))
            crp_seen = True
        elif m := _CUBE_ATOM.fullmatch(atom):
            q, lo, up = m.group(1), int(m.group(2)), m.group(3)
            if q in lower:
                raise ParseError(f"state {q!r} bounded twice")
            lower[q] = lo
            upper[q] = INF if up == "*" else int(up)
            cube_seen = True
        else:
            raise ParseError(f"bad target atom {atom!r}")
    if crp_seen and cube_seen:
        raise ParseError("cannot mix cardinality atoms and cube bounds in one target")
    if crp_seen:
        clash = present & absent
        if clash:
            raise ContradictoryAtomError(
                f"states both required and forbidden: {' '.join(sorted(clash))}"
            )
        return CrpQuery(frozenset(present), frozenset(absent)), None
    return None, Cube.of(lower, upper, default_upper=INF)


def _parse_init(side: str) -> tuple[Optional[tuple[str, ...]], Optional[Cube]]:
    atoms = _split_atoms(side)
    if not atoms:
        raise ParseError("empty init")
    if all(_CUBE_ATOM.fullmatch(a) for a in atoms):
        lower: dict[str, int] = {}
        upper: dict[str, Union[int, float]] = {}
        for atom in atoms:
            m = _CUBE_ATOM.fullmatch(atom)
            q, lo, up = m.group(1), int(m.group(2)), m.group(3)
            if q in lower:
                raise ParseError(f"state {q!r} bounded twice")
            lower[q] = lo
            upper[q] = INF if up == "*" else int(up)
        return None, Cube.of(lower, upper, default_upper=0)
    if all(_NAME_ATOM.fullmatch(a) for a in atoms):
        return tuple(dict.fromkeys(atoms)), None
    raise ParseError(f"bad init part {side!r}")


def parse_query(text: str) -> QuerySpec:
    """Parse a query expression like ``init: a b ; target: #b>=1 & #a=0``.

    Unmentioned states default to [0,0] on the init side and [0,inf] on the
    target side; the init/target keywords make the role, and therefore the
    default, explicit.
    """
    spec = QuerySpec()
    body = " ".join(text.split())
    if not body:
        raise ParseError("empty query")
    init_support = init_cube = crp = target_cube = None
    for part in body.split(";"):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition(":")
        if not sep:
            raise ParseError(f"expected 'init:' or 'target:' in {part!r}")
        key = key.strip()
        if key == "init":
            if init_support is not None or init_cube is not None:
                raise ParseError("duplicate init part")
            init_support, init_cube = _parse_init(value)
        elif key == "target":
            if crp is not None or target_cube is not None:
                raise ParseError("duplicate target part")
            crp, target_cube = _parse_target(value)
        else:
            raise ParseError(f"unknown query part {key!r}")
    return QuerySpec(init_support, init_cube, crp, target_cube)


# ---------------------------------------------------------------------------
# Traces


_RECV_ITEM = re.compile(r"([A-Za-z0-9_']+)\?([A-Za-z0-9_']+)->([A-Za-z0-9_']+)")


def format_trace(trace: Trace) -> str:
    """Alternating config/step lines; output re-parses with parse_trace."""
    lines = [f"config {trace.initial}"]
    for step, cfg in trace.steps:
        if isinstance(step, IOTransition):
            lines.append(f"step io {step}")
        else:
            lines.append(f"step {step}")
        lines.append(f"config {cfg}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str, net: Net) -> Trace:
    """Parse a printed trace back into step objects.

    Verdict lines (YES/NO/UNKNOWN) and comments are skipped so the output of
    the query commands can be replayed as-is.
    """
    initial: Optional[Configuration] = None
    steps: list[tuple] = []
    pending_step = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line or line in ("YES", "NO", "UNKNOWN"):
            continue
        if line.startswith("config"):
            cfg = parse_config(line[len("config"):])
            if initial is None:
                initial = cfg
            elif pending_step is not None:
                steps.append((pending_step, cfg))
                pending_step = None
            else:
                raise ParseError("configuration without a preceding step", lineno)
        elif line.startswith("step"):
            if initial is None:
                raise ParseError("step before the initial configuration", lineno)
            if pending_step is not None:
                raise ParseError("two steps without a configuration between them", lineno)
            pending_step = _parse_step(line[len("step"):].strip(), net, lineno)
        else:
            raise ParseError(f"unexpected trace line {line!r}", lineno)
    if initial is None:
        raise ParseError("trace has no initial configuration")
    if pending_step is not None:
        raise ParseError("trace ends with a step but no configuration")
    return Trace(initial, tuple(steps))


def _parse_step(body: str, net: Net, lineno: int):
    if body.startswith("io "):
        toks = _lex(body[3:])
        vals = [t for t, _ in toks]
        if len(vals) != 5 or vals[1] != "@" or vals[3] != "->":
            raise ParseError(f"bad observation step {body!r}", lineno)
        return IOTransition(vals[0], vals[2], vals[4])
    if body.startswith("bcast "):
        m = re.fullmatch(
            r"bcast\s+([A-Za-z0-9_']+)\s*!\s*([A-Za-z0-9_']+)\s*->\s*([A-Za-z0-9_']+)"
            r"\s+recv\s+\[([^\]]*)\]",
            body,
        )
        if not m:
            raise ParseError(f"bad broadcast step {body!r}", lineno)
        bcast = RBNTransition(m.group(1), BROADCAST, m.group(2), m.group(3))
        receives = []
        inner = m.group(4).strip()
        if inner:
            for item in inner.split(","):
                rm = _RECV_ITEM.fullmatch(item.strip())
                if not rm:
                    raise ParseError(f"bad receive item {item.strip()!r}", lineno)
                receives.append(RBNTransition(rm.group(1), RECEIVE, rm.group(2), rm.group(3)))
        return RBNStep(bcast, tuple(receives))
    raise ParseError(f"bad step line {body!r}", lineno)
