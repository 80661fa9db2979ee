"""Conservative action-model learning from successful trajectories.

For every observed action the learner keeps the intersection of its
pre-states (the largest precondition consistent with the data) and the
union of observed changes (the smallest effect consistent with the data).
Planning with that pair can never apply an action where the real one would
fail, nor predict a different successor.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .core import Action, ActionModel, Assignment, State, Trajectory, Variable, check_state
from .errors import ModelInconsistencyError, ValidationError


@dataclass(frozen=True)
class ActionTriplet:
    pre_state: State
    action_name: str
    post_state: State


@dataclass(frozen=True)
class LearnedAction:
    name: str
    pre_upper: Assignment
    eff_lower: Assignment
    observations: int

    def __post_init__(self):
        if self.observations < 1:
            raise ValidationError(f"learned action {self.name!r} needs at least one observation")


@dataclass(frozen=True)
class LearnedModel:
    variables: tuple[Variable, ...]
    actions: Mapping[str, LearnedAction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "actions", dict(sorted(self.actions.items())))


def extract_triplets(trajs: Iterable[Trajectory]) -> dict[str, list[ActionTriplet]]:
    groups: dict[str, list[ActionTriplet]] = defaultdict(list)
    for traj in trajs:
        for pre, name, post in traj.triplets():
            groups[name].append(ActionTriplet(pre, name, post))
    return dict(groups)


class Learner:
    """Incremental accumulator; :func:`learn` is a fold over it.

    Seed it with an existing :class:`LearnedModel` to keep learning from
    new trajectories without revisiting the old ones.
    """

    def __init__(self, variables: Sequence[Variable], start: LearnedModel | None = None):
        self.variables = tuple(variables)
        self._pre: dict[str, dict[int, int]] = {}
        self._eff: dict[str, dict[int, int]] = {}
        # intersection of post-states; unknown for actions carried over from a seed model
        self._post: dict[str, dict[int, int] | None] = {}
        self._count: dict[str, int] = {}
        if start is not None:
            if start.variables != self.variables:
                raise ValidationError("seed model is over a different variable set")
            for name, la in start.actions.items():
                self._pre[name] = dict(la.pre_upper)
                self._eff[name] = dict(la.eff_lower)
                self._post[name] = None
                self._count[name] = la.observations

    def observe(self, pre: State, name: str, post: State) -> None:
        check_state(pre, self.variables)
        check_state(post, self.variables)
        if name not in self._count:
            self._pre[name] = dict(enumerate(pre))
            self._eff[name] = {}
            self._post[name] = None
            self._count[name] = 0
        pre_upper = self._pre[name]
        for var in [v for v, x in pre_upper.items() if pre[v] != x]:
            del pre_upper[var]
        eff = self._eff[name]
        for var, (before, after) in enumerate(zip(pre, post)):
            if before != after:
                if eff.get(var, after) != after:
                    raise ModelInconsistencyError(
                        f"{name}: variable {self.variables[var].name} observed changing to "
                        f"{self.variables[var].values[eff[var]]} and to {self.variables[var].values[after]}"
                    )
                eff[var] = after
        post_common = self._post[name]
        if post_common is None:
            post_common = self._post[name] = dict(enumerate(post))
        else:
            for var in [v for v, x in post_common.items() if post[v] != x]:
                del post_common[var]
        for var, val in eff.items():
            if post_common.get(var) != val:
                # the effect lower bound must stay inside the post-state intersection
                raise ModelInconsistencyError(
                    f"{name}: {self.variables[var].name} changed to "
                    f"{self.variables[var].values[val]} in one triplet but not in every post-state"
                )
        self._count[name] += 1

    def observe_all(self, trajs: Iterable[Trajectory]) -> "Learner":
        for traj in trajs:
            for pre, name, post in traj.triplets():
                self.observe(pre, name, post)
        return self

    def model(self) -> LearnedModel:
        return LearnedModel(
            self.variables,
            {
                name: LearnedAction(
                    name,
                    tuple(sorted(self._pre[name].items())),
                    tuple(sorted(self._eff[name].items())),
                    self._count[name],
                )
                for name in self._count
            },
        )


def learn(trajs: Iterable[Trajectory], variables: Sequence[Variable]) -> LearnedModel:
    """Learn conservative bounds for every action appearing in ``trajs``.

    Goals attached to the trajectories are ignored.
    """
    return Learner(variables).observe_all(trajs).model()


def learned_to_model(lm: LearnedModel) -> ActionModel:
    return ActionModel(
        lm.variables,
        {name: Action(name, la.pre_upper, la.eff_lower) for name, la in lm.actions.items()},
    )
