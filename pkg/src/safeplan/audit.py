"""Check a learned model against a known ground truth.

:func:`audit_safety` enumerates (or samples) the full assignment space, not
just reachable states, and reports the first state/action pair on which the
learned model would either apply an action the real domain rejects or
predict a different successor. :func:`audit_bounds` checks that every
learned bound brackets the true precondition and effect.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

from .core import ActionModel, Assignment, State, Successors, Trajectory, apply, holds
from .errors import StateSpaceCapError, ValidationError
from .learner import LearnedModel

EXHAUSTIVE_CAP = 50_000

Violation = Literal["inapplicable-under-truth", "state-mismatch"]


@dataclass(frozen=True)
class Counterexample:
    state: State
    action: str
    kind: Violation
    learned_next: State
    truth_next: State | None

    def reproduces(self, learned: ActionModel, truth: ActionModel) -> bool:
        """Replay through the core semantics and confirm the violation."""
        act = learned.actions[self.action]
        if not holds(act.pre, self.state):
            return False
        real = truth.actions.get(self.action)
        if self.kind == "inapplicable-under-truth":
            return real is None or not holds(real.pre, self.state)
        return real is not None and holds(real.pre, self.state) and apply(self.state, act) != apply(self.state, real)


@dataclass(frozen=True)
class SafetyReport:
    safe: bool
    states_checked: int
    mode: str  # "exhaustive" | "sampled"
    samples: int | None = None
    seed: int | None = None
    counterexample: Counterexample | None = None


def _check_state(state: State, learned: Successors, truth: ActionModel) -> Counterexample | None:
    for act in learned.applicable(state):
        name = act.name
        learned_next = apply(state, act)
        real = truth.actions.get(name)
        if real is None or not holds(real.pre, state):
            return Counterexample(state, name, "inapplicable-under-truth", learned_next, None)
        truth_next = apply(state, real)
        if truth_next != learned_next:
            return Counterexample(state, name, "state-mismatch", learned_next, truth_next)
    return None


def audit_safety(
    learned: ActionModel,
    truth: ActionModel,
    mode: str = "exhaustive",
    *,
    samples: int = 10_000,
    seed: int = 0,
    cap: int = EXHAUSTIVE_CAP,
) -> SafetyReport:
    if learned.variables != truth.variables:
        raise ValidationError("learned and truth models use different variables")
    sizes = [v.domain_size for v in truth.variables]
    succ = Successors(learned)
    if mode == "exhaustive":
        total = math.prod(sizes)
        if total > cap:
            raise StateSpaceCapError(
                f"{total} states exceed the exhaustive cap of {cap}; use sampled mode"
            )
        checked = 0
        for state in itertools.product(*(range(n) for n in sizes)):
            checked += 1
            cex = _check_state(state, succ, truth)
            if cex is not None:
                return SafetyReport(False, checked, mode, counterexample=cex)
        return SafetyReport(True, checked, mode)
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        draws = rng.integers(0, sizes, size=(samples, len(sizes))) if sizes else np.zeros((samples, 0), int)
        for i, row in enumerate(draws):
            cex = _check_state(tuple(int(v) for v in row), succ, truth)
            if cex is not None:
                return SafetyReport(False, i + 1, mode, samples, seed, cex)
        return SafetyReport(True, samples, mode, samples, seed)
    raise ValueError(f"unknown audit mode {mode!r}")


@dataclass(frozen=True)
class BoundViolation:
    action: str
    kind: str  # "pre-not-contained" | "eff-lower-not-contained" | "eff-outside-post"
    entry: tuple[int, int]


@dataclass(frozen=True)
class BoundsReport:
    violations: tuple[BoundViolation, ...]
    checked: tuple[str, ...]
    # per observed action, the intersection of its post-states (upper bound on effects)
    post_intersection: dict[str, Assignment] = field(default_factory=dict)

    @property
    def clean(self) -> bool:
        return not self.violations


def audit_bounds(lm: LearnedModel, truth: ActionModel, trajs: Iterable[Trajectory]) -> BoundsReport:
    post_common: dict[str, dict[int, int]] = {}
    for traj in trajs:
        for _, name, post in traj.triplets():
            if name not in post_common:
                post_common[name] = dict(enumerate(post))
            else:
                common = post_common[name]
                for var in [v for v, x in common.items() if post[v] != x]:
                    del common[var]

    violations = []
    checked = []
    for name, la in lm.actions.items():
        real = truth.actions.get(name)
        if real is None:
            continue
        checked.append(name)
        upper = set(la.pre_upper)
        for entry in real.pre:
            if entry not in upper:
                violations.append(BoundViolation(name, "pre-not-contained", entry))
        real_eff = set(real.eff)
        for entry in la.eff_lower:
            if entry not in real_eff:
                violations.append(BoundViolation(name, "eff-lower-not-contained", entry))
        common = post_common.get(name, {})
        for var, val in real.eff:
            if common.get(var) != val:
                violations.append(BoundViolation(name, "eff-outside-post", (var, val)))
    return BoundsReport(
        tuple(violations),
        tuple(checked),
        {name: tuple(sorted(c.items())) for name, c in sorted(post_common.items())},
    )
