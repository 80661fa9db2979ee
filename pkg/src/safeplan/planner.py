"""Optimal classical planning over ground SAS+ problems.

:func:`solve` is A* with a goal-count heuristic scaled by the largest effect
size, which keeps it admissible and consistent under unit costs. :func:`solve_bfs`
is a plain breadth-first search kept as an independent oracle.
"""

from __future__ import annotations

import heapq
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Literal

from .core import Problem, State, Successors, holds
from .errors import StateSpaceCapError

Outcome = Literal["plan", "no_plan", "resource_limit"]


@dataclass(frozen=True)
class Limits:
    max_generated: int = 10_000_000
    time_limit: float = 60.0


@dataclass
class SearchStats:
    expanded: int = 0
    generated: int = 0
    peak_frontier: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class SearchResult:
    outcome: Outcome
    plan: tuple[str, ...] | None = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def solved(self) -> bool:
        return self.outcome == "plan"


class _Budget:
    def __init__(self, limits: Limits):
        self.limits = limits
        self.deadline = time.monotonic() + limits.time_limit

    def exceeded(self, stats: SearchStats) -> bool:
        if stats.generated > self.limits.max_generated:
            return True
        return stats.expanded % 256 == 0 and time.monotonic() > self.deadline


def _extract(parents: dict[State, tuple[State, str] | None], state: State) -> tuple[str, ...]:
    steps = []
    while parents[state] is not None:
        state, name = parents[state]
        steps.append(name)
    return tuple(reversed(steps))


def goal_count_heuristic(problem: Problem):
    """Unsatisfied goal entries divided by the largest effect size, rounded up."""
    goal = problem.goal
    width = max((len(a.eff) for a in problem.model.actions.values()), default=1) or 1

    def h(state: State) -> int:
        unsat = sum(1 for var, val in goal if state[var] != val)
        return -(-unsat // width)

    return h


def solve(problem: Problem, limits: Limits = Limits(), succ: Successors | None = None) -> SearchResult:
    """A* search; ties broken by lower f, lower h, smaller state, then action name.

    ``succ`` may be a prebuilt successor index for ``problem.model``.
    """
    start_time = time.monotonic()
    stats = SearchStats()
    budget = _Budget(limits)
    succ = succ or Successors(problem.model)
    h = goal_count_heuristic(problem)
    goal = problem.goal

    init = problem.init
    best_g = {init: 0}
    parents: dict[State, tuple[State, str] | None] = {init: None}
    h0 = h(init)
    frontier = [(h0, h0, init)]
    closed: set[State] = set()
    stats.generated = 1
    stats.peak_frontier = 1

    def finish(outcome: Outcome, plan=None) -> SearchResult:
        stats.wall_time = time.monotonic() - start_time
        return SearchResult(outcome, plan, stats)

    while frontier:
        _, _, state = heapq.heappop(frontier)
        if state in closed:
            continue
        closed.add(state)
        stats.expanded += 1
        if holds(goal, state):
            return finish("plan", _extract(parents, state))
        if budget.exceeded(stats):
            return finish("resource_limit")
        g = best_g[state] + 1
        for act, nxt in succ(state):
            stats.generated += 1
            if nxt in closed:
                continue
            if g < best_g.get(nxt, math.inf):
                best_g[nxt] = g
                parents[nxt] = (state, act.name)
                hn = h(nxt)
                heapq.heappush(frontier, (g + hn, hn, nxt))
        stats.peak_frontier = max(stats.peak_frontier, len(frontier))
    return finish("no_plan")


def solve_bfs(problem: Problem, limits: Limits = Limits(), succ: Successors | None = None) -> SearchResult:
    start_time = time.monotonic()
    stats = SearchStats()
    budget = _Budget(limits)
    succ = succ or Successors(problem.model)
    goal = problem.goal

    parents: dict[State, tuple[State, str] | None] = {problem.init: None}
    queue = deque([problem.init])
    stats.generated = 1
    stats.peak_frontier = 1

    def finish(outcome: Outcome, plan=None) -> SearchResult:
        stats.wall_time = time.monotonic() - start_time
        return SearchResult(outcome, plan, stats)

    while queue:
        state = queue.popleft()
        stats.expanded += 1
        if holds(goal, state):
            return finish("plan", _extract(parents, state))
        if budget.exceeded(stats):
            return finish("resource_limit")
        for act, nxt in succ(state):
            stats.generated += 1
            if nxt not in parents:
                parents[nxt] = (state, act.name)
                queue.append(nxt)
        stats.peak_frontier = max(stats.peak_frontier, len(queue))
    return finish("no_plan")


def reachable_states(problem_or_succ, init: State | None = None, cap: int | None = None) -> set[State]:
    """All states reachable from the initial state (explicit enumeration).

    Accepts either a :class:`Problem` or a prebuilt :class:`Successors` plus
    ``init``. Raises :class:`StateSpaceCapError` once more than ``cap`` states
    have been seen.
    """
    if isinstance(problem_or_succ, Problem):
        succ = Successors(problem_or_succ.model)
        init = problem_or_succ.init
    else:
        succ = problem_or_succ
    seen = {init}
    stack = [init]
    while stack:
        state = stack.pop()
        for _, nxt in succ(state):
            if nxt not in seen:
                seen.add(nxt)
                if cap is not None and len(seen) > cap:
                    raise StateSpaceCapError(f"more than {cap} reachable states")
                stack.append(nxt)
    return seen
