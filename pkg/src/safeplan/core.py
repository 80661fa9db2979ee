"""Ground SAS+ representation: variables, states, actions, problems and plans.

States are plain tuples of value indices, one per variable, so they hash and
compare cheaply during search. Partial assignments (preconditions, effects,
goals) are tuples of ``(variable, value)`` pairs sorted by variable with at
most one entry per variable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import PreconditionError, ResolutionError, ValidationError

State = tuple[int, ...]
Assignment = tuple[tuple[int, int], ...]


def assignment(entries: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> Assignment:
    """Build a canonical partial assignment, rejecting conflicting entries."""
    pairs = entries.items() if isinstance(entries, Mapping) else entries
    seen: dict[int, int] = {}
    for var, val in pairs:
        var, val = int(var), int(val)
        if var < 0 or val < 0:
            raise ValidationError(f"negative index in assignment entry {var}={val}")
        if var in seen and seen[var] != val:
            raise ValidationError(f"variable {var} assigned both {seen[var]} and {val}")
        seen[var] = val
    return tuple(sorted(seen.items()))


def holds(part: Assignment, state: State) -> bool:
    """True iff every entry of ``part`` agrees with ``state`` (``part`` is a subset of ``state``)."""
    try:
        return all(state[var] == val for var, val in part)
    except IndexError:
        raise ValidationError(f"assignment {part} references a variable outside a state of size {len(state)}") from None


def is_subset(small: Assignment, big: Assignment) -> bool:
    return set(small) <= set(big)


@dataclass(frozen=True)
class Variable:
    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValidationError(f"variable {self.name!r} has an empty domain")
        if len(set(self.values)) != len(self.values):
            raise ValidationError(f"variable {self.name!r} has duplicate value names")

    @property
    def domain_size(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Action:
    """A ground action. Effects restating a precondition value are dropped."""

    name: str
    pre: Assignment = ()
    eff: Assignment = ()

    def __post_init__(self):
        pre = assignment(self.pre)
        eff = assignment(self.eff)
        pre_set = set(pre)
        object.__setattr__(self, "pre", pre)
        object.__setattr__(self, "eff", tuple(e for e in eff if e not in pre_set))


def _check_assignment(part: Assignment, variables: Sequence[Variable], what: str) -> None:
    for var, val in part:
        if var >= len(variables):
            raise ValidationError(f"{what}: variable index {var} out of range")
        if val >= variables[var].domain_size:
            raise ValidationError(f"{what}: value {val} out of range for {variables[var].name}")


def check_state(state: State, variables: Sequence[Variable]) -> None:
    if len(state) != len(variables):
        raise ValidationError(f"state has {len(state)} values, expected {len(variables)}")
    for var, val in enumerate(state):
        if not 0 <= val < variables[var].domain_size:
            raise ValidationError(f"value {val} out of range for {variables[var].name}")


def check_assignment(part: Assignment, variables: Sequence[Variable], what: str = "assignment") -> None:
    _check_assignment(part, variables, what)


@dataclass(frozen=True)
class ActionModel:
    variables: tuple[Variable, ...]
    actions: Mapping[str, Action] = field(default_factory=dict)

    def __post_init__(self):
        variables = tuple(self.variables)
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate variable names")
        actions = self.actions
        if not isinstance(actions, Mapping):
            actions_list = list(actions)
            actions = {a.name: a for a in actions_list}
            if len(actions) != len(actions_list):
                raise ValidationError("duplicate action names")
        for name, act in actions.items():
            if name != act.name:
                raise ValidationError(f"action keyed as {name!r} is named {act.name!r}")
            _check_assignment(act.pre, variables, f"{name}.pre")
            _check_assignment(act.eff, variables, f"{name}.eff")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "actions", dict(sorted(actions.items())))

    @property
    def max_domain_size(self) -> int:
        return max((v.domain_size for v in self.variables), default=0)

    @property
    def state_count(self) -> int:
        return math.prod(v.domain_size for v in self.variables)

    def var_index(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise ValidationError(f"unknown variable {name!r}")

    def value_index(self, var: int, name: str) -> int:
        try:
            return self.variables[var].values.index(name)
        except ValueError:
            raise ValidationError(f"unknown value {name!r} for variable {self.variables[var].name}") from None

    def partial(self, named: Mapping[str, str]) -> Assignment:
        """Translate ``{"TruckAt": "A"}`` into an index-based assignment."""
        out = []
        for var_name, val_name in named.items():
            var = self.var_index(var_name)
            out.append((var, self.value_index(var, val_name)))
        return assignment(out)

    def state(self, named: Mapping[str, str]) -> State:
        part = dict(self.partial(named))
        if len(part) != len(self.variables):
            missing = [v.name for i, v in enumerate(self.variables) if i not in part]
            raise ValidationError(f"state is not total, missing {missing}")
        return tuple(part[i] for i in range(len(self.variables)))

    def describe(self, part: Assignment | State) -> dict[str, str]:
        """Inverse of :meth:`partial` / :meth:`state`."""
        if part and isinstance(part[0], tuple):
            pairs = part
        else:
            pairs = enumerate(part)
        return {self.variables[var].name: self.variables[var].values[val] for var, val in pairs}

    def with_actions(self, actions: Iterable[Action]) -> "ActionModel":
        return ActionModel(self.variables, {a.name: a for a in actions})


@dataclass(frozen=True)
class Problem:
    model: ActionModel
    init: State
    goal: Assignment

    def __post_init__(self):
        object.__setattr__(self, "init", tuple(self.init))
        object.__setattr__(self, "goal", assignment(self.goal))
        check_state(self.init, self.model.variables)
        check_assignment(self.goal, self.model.variables, "goal")


@dataclass(frozen=True)
class Trajectory:
    """An alternating state/action sequence that starts and ends with a state."""

    states: tuple[State, ...]
    actions: tuple[str, ...]
    goal: Assignment | None = None
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(tuple(s) for s in self.states))
        object.__setattr__(self, "actions", tuple(self.actions))
        if self.goal is not None:
            object.__setattr__(self, "goal", assignment(self.goal))
        if len(self.states) != len(self.actions) + 1:
            raise ValidationError(
                f"trajectory {self.id!r} has {len(self.states)} states and {len(self.actions)} actions"
            )

    def __len__(self) -> int:
        return len(self.actions)

    def triplets(self) -> Iterator[tuple[State, str, State]]:
        for i, name in enumerate(self.actions):
            yield self.states[i], name, self.states[i + 1]


def is_applicable(state: State, action: Action) -> bool:
    return holds(action.pre, state)


def apply(state: State, action: Action) -> State:
    if not holds(action.pre, state):
        raise PreconditionError(f"{action.name} is not applicable in {state}")
    out = list(state)
    for var, val in action.eff:
        out[var] = val
    return tuple(out)


def satisfies_goal(state: State, goal: Assignment) -> bool:
    return holds(goal, state)


@dataclass(frozen=True)
class ValidationReport:
    success: bool
    states: tuple[State, ...]
    failed_step: int | None = None
    reason: str | None = None  # "inapplicable" | "goal-unsatisfied"


def validate_plan(plan: Sequence[str], problem: Problem) -> ValidationReport:
    actions = problem.model.actions
    unknown = [name for name in plan if name not in actions]
    if unknown:
        raise ResolutionError(f"unknown action {unknown[0]!r}")
    state = problem.init
    states = [state]
    for i, name in enumerate(plan):
        act = actions[name]
        if not holds(act.pre, state):
            return ValidationReport(False, tuple(states), i, "inapplicable")
        state = apply(state, act)
        states.append(state)
    if not holds(problem.goal, state):
        return ValidationReport(False, tuple(states), len(plan), "goal-unsatisfied")
    return ValidationReport(True, tuple(states))


def all_states(variables: Sequence[Variable]) -> Iterator[State]:
    """Every total assignment, in lexicographic order."""
    return itertools.product(*(range(v.domain_size) for v in variables))


class Successors:
    """Applicable-action lookup indexed on each action's first precondition.

    Iteration order within a state follows action names, which the planner
    relies on for deterministic tie-breaking.
    """

    def __init__(self, model: ActionModel):
        self.model = model
        self._order = {name: i for i, name in enumerate(model.actions)}
        self._free: list[Action] = []
        self._by_fact: dict[tuple[int, int], list[Action]] = {}
        for act in model.actions.values():
            if act.pre:
                self._by_fact.setdefault(act.pre[0], []).append(act)
            else:
                self._free.append(act)
        self._pre_rest = {a.name: a.pre[1:] for a in model.actions.values()}

    def applicable(self, state: State) -> list[Action]:
        found = list(self._free)
        by_fact = self._by_fact
        for fact in enumerate(state):
            bucket = by_fact.get(fact)
            if bucket:
                for act in bucket:
                    if all(state[v] == x for v, x in self._pre_rest[act.name]):
                        found.append(act)
        found.sort(key=lambda a: self._order[a.name])
        return found

    def __call__(self, state: State) -> list[tuple[Action, State]]:
        out = []
        for act in self.applicable(state):
            nxt = list(state)
            for var, val in act.eff:
                nxt[var] = val
            out.append((act, tuple(nxt)))
        return out
