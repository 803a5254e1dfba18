"""Brute-force explicit-state reachability for fixed populations.

This is the ground-truth oracle the symbolic procedures are validated
against: plain breadth-first search over configurations, canonical successor
order, deterministic exploration, explicit node budget.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional

from .errors import BudgetExceededError, EmptyRangeError
from .model import (
    Configuration,
    Cube,
    Net,
    Step,
    Trace,
    check_states_known,
    cube_configurations,
    cube_contains,
    step_successors,
)

DEFAULT_NODE_BUDGET = 10**6


class Verdict(Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Decision:
    """Outcome of a reachability query; YES carries a replayable witness."""

    verdict: Verdict
    trace: Optional[Trace] = None


@dataclass(frozen=True)
class ReachResult:
    reachable: frozenset[Configuration]
    witness: Optional[Trace]
    explored: int
    population: int


_Parents = "dict[Configuration, tuple[Configuration, Step] | None]"


def _bfs(
    net: Net,
    seeds: Iterable[Configuration],
    *,
    budget: int = DEFAULT_NODE_BUDGET,
    successors_fn: Optional[Callable] = None,
    goal: Optional[Callable[[Configuration], bool]] = None,
):
    """Multi-source BFS; returns (parent map, first goal configuration or None).

    The parent map's keys are exactly the discovered configurations, i.e. the
    union of the seeds' reachability sets (restricted to the budget)."""
    succ_fn = successors_fn or step_successors
    parent: dict = {}
    queue: deque = deque()
    for s in seeds:
        if s not in parent:
            parent[s] = None
            queue.append(s)
            if len(parent) > budget:
                raise BudgetExceededError(
                    f"node budget {budget} exceeded", partial=frozenset(parent)
                )
    while queue:
        cur = queue.popleft()
        if goal is not None and goal(cur):
            return parent, cur
        for step, nxt in succ_fn(net, cur):
            if nxt not in parent:
                parent[nxt] = (cur, step)
                if len(parent) > budget:
                    raise BudgetExceededError(
                        f"node budget {budget} exceeded", partial=frozenset(parent)
                    )
                queue.append(nxt)
    return parent, None


def _trace_from_parents(parent, hit: Configuration, c0: Configuration) -> Trace:
    steps = []
    cur = hit
    while parent[cur] is not None:
        prev, step = parent[cur]
        steps.append((step, cur))
        cur = prev
    assert cur == c0
    return Trace(c0, tuple(reversed(steps)))


def post_star(
    net: Net,
    c0: Configuration,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
    successors_fn: Optional[Callable] = None,
) -> ReachResult:
    """Every configuration reachable from c0, including c0 itself.

    Raises BudgetExceededError (with the partial set attached) if the search
    would visit more than `budget` configurations; a returned result is
    always complete.
    """
    check_states_known(net, c0.support())
    parent, _ = _bfs(net, [c0], budget=budget, successors_fn=successors_fn)
    return ReachResult(frozenset(parent), None, len(parent), c0.population)


def reach_bounded(
    net: Net,
    from_cube: Cube,
    to_cube: Cube,
    populations: Iterable[int],
    *,
    budget: int = DEFAULT_NODE_BUDGET,
) -> Decision:
    """Search for a run from some configuration in `from_cube` to `to_cube`,
    trying each population in order.

    Initial configurations are enumerated in descending lexicographic
    count-vector order; witnesses are minimum-length for their starting
    configuration (BFS). UNKNOWN means no witness within the explored
    populations, never a proof of unreachability.
    """
    pops = list(populations)
    if not pops:
        raise EmptyRangeError("empty population range")
    from_cube.check_consistent()

    def goal(cfg: Configuration) -> bool:
        return cube_contains(to_cube, cfg)

    # Configurations already known to reach nothing in the target cube: any
    # BFS that exhausts without a hit rules out its entire visited set as a
    # starting point (reach sets of visited nodes are subsets).
    dead: set[Configuration] = set()
    for n in pops:
        for c0 in cube_configurations(from_cube, net.states, n):
            if c0 in dead:
                continue
            parent, hit = _bfs(net, [c0], budget=budget, goal=goal)
            if hit is not None:
                return Decision(Verdict.YES, _trace_from_parents(parent, hit, c0))
            dead.update(parent)
    return Decision(Verdict.UNKNOWN)


def coverable_states_explicit(
    net: Net,
    support: Iterable[str],
    max_pop: int,
    *,
    budget: int = DEFAULT_NODE_BUDGET,
) -> frozenset[str]:
    """States occurring in any configuration reachable from any initial
    configuration over `support` with population <= max_pop.

    Computed as one multi-source BFS over all such initial configurations,
    which visits exactly the union of their individual reachability sets.
    Monotone in both the support and the population bound.
    """
    sup = tuple(support)
    check_states_known(net, sup)
    cube = Cube.from_support(sup)
    seeds = [
        c for n in range(max_pop + 1) for c in cube_configurations(cube, net.states, n)
    ]
    parent, _ = _bfs(net, seeds, budget=budget)
    return frozenset(s for cfg in parent for s in cfg.support())
