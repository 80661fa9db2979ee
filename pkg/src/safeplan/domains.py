"""Ground-truth benchmark domains and the instance distribution used for training and evaluation."""

from __future__ import annotations

import string
from collections import deque
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .core import Action, ActionModel, Assignment, Problem, State, Successors, Trajectory, Variable, apply, holds
from .errors import SamplingError, ValidationError
from .planner import Limits, solve


@dataclass(frozen=True)
class LogisticsConfig:
    num_locations: int = 3
    num_trucks: int = 1
    num_packages: int = 1
    seed: int = 0  # generation is deterministic; kept for provenance

    def __post_init__(self):
        if self.num_locations < 2 or self.num_trucks < 1 or self.num_packages < 1:
            raise ValidationError("need >= 2 locations, >= 1 truck and >= 1 package")

    @property
    def label(self) -> str:
        return f"logistics(locations={self.num_locations},trucks={self.num_trucks},packages={self.num_packages})"


def _location_names(n: int) -> list[str]:
    # single letters read like the textbook example; "T" is reserved for "on truck"
    letters = [c for c in string.ascii_uppercase if c != "T"]
    if n <= len(letters):
        return letters[:n]
    return [f"L{i}" for i in range(n)]


def gen_logistics(cfg: LogisticsConfig) -> ActionModel:
    """Trucks move between locations; packages are picked up and unloaded.

    With one truck and one package the names match the classic example:
    variables ``TruckAt``/``PackageAt``, the on-truck value ``T``, and
    actions ``Move_A_B``, ``Pickup_B``, ``Unload_C``.
    """
    locs = _location_names(cfg.num_locations)
    single = cfg.num_trucks == 1 and cfg.num_packages == 1
    trucks = ["" if single else f"t{i}" for i in range(cfg.num_trucks)]
    packages = ["" if single else f"p{j}" for j in range(cfg.num_packages)]
    on_truck = ["T"] if single else [f"T{i}" for i in range(cfg.num_trucks)]

    variables = [Variable("TruckAt" + (f"_{t}" if t else ""), tuple(locs)) for t in trucks]
    variables += [Variable("PackageAt" + (f"_{p}" if p else ""), tuple(locs + on_truck)) for p in packages]
    n_t = cfg.num_trucks

    def tag(*parts: str) -> str:
        return "_".join(p for p in parts if p)

    actions = []
    for ti, t in enumerate(trucks):
        for xi, x in enumerate(locs):
            for yi, y in enumerate(locs):
                if xi != yi:
                    actions.append(Action(tag("Move", t, x, y), ((ti, xi),), ((ti, yi),)))
        for pi, p in enumerate(packages):
            pv = n_t + pi
            carried = len(locs) + ti
            for xi, x in enumerate(locs):
                actions.append(Action(tag("Pickup", p, t, x), ((ti, xi), (pv, xi)), ((pv, carried),)))
                actions.append(Action(tag("Unload", p, t, x), ((ti, xi), (pv, carried)), ((pv, xi),)))
    return ActionModel(tuple(variables), {a.name: a for a in actions})


def logistics_3loc() -> ActionModel:
    return gen_logistics(LogisticsConfig(3, 1, 1))


def example_trajectory(model: ActionModel | None = None) -> Trajectory:
    """The truck starts at A, drives to B, picks up the package, drives to C and unloads it."""
    model = model or logistics_3loc()
    names = ("Move_A_B", "Pickup_B", "Move_B_C", "Unload_C")
    states = [model.state({"TruckAt": "A", "PackageAt": "B"})]
    for name in names:
        states.append(apply(states[-1], model.actions[name]))
    return Trajectory(tuple(states), names, model.partial({"PackageAt": "C"}), "T1")


@dataclass(frozen=True)
class RandomDomainConfig:
    """Unstructured SAS+ domains for property tests."""

    num_vars: int = 3
    max_domain: int = 3
    num_actions: int = 6
    max_pre: int = 2
    max_eff: int = 2


def gen_random(cfg: RandomDomainConfig, rng: np.random.Generator) -> ActionModel:
    sizes = [int(rng.integers(2, cfg.max_domain + 1)) for _ in range(cfg.num_vars)]
    variables = tuple(Variable(f"v{i}", tuple(f"x{k}" for k in range(n))) for i, n in enumerate(sizes))
    actions = []
    for k in range(cfg.num_actions):
        n_pre = int(rng.integers(0, min(cfg.max_pre, cfg.num_vars) + 1))
        n_eff = int(rng.integers(1, min(cfg.max_eff, cfg.num_vars) + 1))
        pre_vars = rng.choice(cfg.num_vars, size=n_pre, replace=False)
        eff_vars = rng.choice(cfg.num_vars, size=n_eff, replace=False)
        pre = {int(v): int(rng.integers(sizes[v])) for v in pre_vars}
        eff = {int(v): int(rng.integers(sizes[v])) for v in eff_vars}
        actions.append(Action(f"a{k:02d}", tuple(pre.items()), tuple(eff.items())))
    return ActionModel(variables, {a.name: a for a in actions})


@dataclass(frozen=True)
class DistConfig:
    """Parameters of the start/goal/trajectory distribution.

    ``goal_source="reachable"`` copies goal values from a state reachable
    from the start, so every draw is solvable; ``"uniform"`` draws goal
    values independently and can produce unsolvable instances.

    ``mode`` picks the trajectory producer: ``"optimal"`` runs the planner
    on the true model, ``"random-tie"`` picks uniformly among all optimal
    plans, ``"walk"`` takes a bounded random walk and lets the planner finish.
    """

    goal_density: float = 0.5
    goal_source: Literal["reachable", "uniform"] = "reachable"
    solvable_only: bool = True
    mode: Literal["optimal", "random-tie", "walk"] = "optimal"
    walk_length: int = 8
    max_rejections: int = 10_000
    producer_limits: Limits = field(default_factory=Limits)

    def __post_init__(self):
        if not 0 <= self.goal_density <= 1:
            raise ValidationError("goal_density must lie in [0, 1]")
        if self.goal_source not in ("reachable", "uniform"):
            raise ValidationError(f"unknown goal_source {self.goal_source!r}")
        if self.mode not in ("optimal", "random-tie", "walk"):
            raise ValidationError(f"unknown trajectory mode {self.mode!r}")


@dataclass(frozen=True)
class InstanceTriple:
    """A start state, a goal and a trajectory reaching it.

    ``trajectory`` is None for draws the producer could not solve (only
    returned when unsolvable draws are not rejected). ``solvable`` is the
    exact answer from reachability; ``rejections`` counts discarded draws.
    """

    init: State
    goal: Assignment
    trajectory: Trajectory | None
    solvable: bool = True
    rejections: int = 0


class InstanceSampler:
    """Draws :class:`InstanceTriple` values for one ground-truth model.

    Caches transitions and reachable sets, so reuse one sampler for many
    draws over the same domain.
    """

    def __init__(self, truth: ActionModel, dist: DistConfig = DistConfig()):
        if not truth.actions:
            raise ValidationError("ground-truth model has no actions")
        self.truth = truth
        self.dist = dist
        self.succ = Successors(truth)
        self._sizes = [v.domain_size for v in truth.variables]
        self._edges: dict[State, list[tuple[str, State]]] = {}
        self._reach_sorted: dict[State, tuple[State, ...]] = {}

    def edges(self, state: State) -> list[tuple[str, State]]:
        out = self._edges.get(state)
        if out is None:
            out = self._edges[state] = [(a.name, nxt) for a, nxt in self.succ(state)]
        return out

    def graph(self, init: State) -> dict[State, list[tuple[str, State]]]:
        """Reachable transition graph from ``init``: state -> [(action, successor)]."""
        return {s: self.edges(s) for s in self.reachable(init)}

    def reachable(self, init: State) -> tuple[State, ...]:
        found = self._reach_sorted.get(init)
        if found is None:
            seen = {init}
            stack = [init]
            while stack:
                for _, nxt in self.edges(stack.pop()):
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            found = self._reach_sorted[init] = tuple(sorted(seen))
        return found

    def is_solvable(self, init: State, goal: Assignment) -> bool:
        return any(holds(goal, s) for s in self.reachable(init))

    def draw_start_goal(self, rng: np.random.Generator) -> tuple[State, Assignment]:
        n = len(self._sizes)
        init = tuple(int(rng.integers(k)) for k in self._sizes)
        picked = [i for i in range(n) if rng.random() < self.dist.goal_density]
        if not picked:
            picked = [int(rng.integers(n))]
        if self.dist.goal_source == "reachable":
            reach = self.reachable(init)
            target = reach[int(rng.integers(len(reach)))]
            goal = tuple((i, target[i]) for i in picked)
        else:
            goal = tuple((i, int(rng.integers(self._sizes[i]))) for i in picked)
        return init, goal

    def _replay(self, init: State, names: tuple[str, ...], goal: Assignment, tid: str) -> Trajectory:
        states = [init]
        for name in names:
            states.append(apply(states[-1], self.truth.actions[name]))
        return Trajectory(tuple(states), names, goal, tid)

    def _random_optimal(self, init: State, goal: Assignment, rng: np.random.Generator) -> tuple[str, ...]:
        g = self.graph(init)
        rev: dict[State, list[State]] = {}
        for s, edges in g.items():
            for _, nxt in edges:
                rev.setdefault(nxt, []).append(s)
        dist = {s: 0 for s in g if holds(goal, s)}
        queue = deque(dist)
        while queue:
            s = queue.popleft()
            for p in rev.get(s, ()):
                if p not in dist:
                    dist[p] = dist[s] + 1
                    queue.append(p)
        steps = []
        s = init
        while dist[s] > 0:
            options = [(a, nxt) for a, nxt in g[s] if dist.get(nxt) == dist[s] - 1]
            a, s = options[int(rng.integers(len(options)))]
            steps.append(a)
        return tuple(steps)

    def _produce(self, init: State, goal: Assignment, rng: np.random.Generator) -> tuple[str, ...] | None:
        mode = self.dist.mode
        if mode == "random-tie":
            return self._random_optimal(init, goal, rng)
        prefix: list[str] = []
        start = init
        if mode == "walk":
            for _ in range(int(rng.integers(self.dist.walk_length + 1))):
                options = self.succ(start)
                if not options:
                    break
                act, start = options[int(rng.integers(len(options)))]
                prefix.append(act.name)
            if not self.is_solvable(start, goal):
                prefix, start = [], init
        result = solve(Problem(self.truth, start, goal), self.dist.producer_limits, self.succ)
        if not result.solved:
            return None
        return tuple(prefix) + result.plan

    def sample(self, rng: np.random.Generator, tid: str = "") -> InstanceTriple:
        rejections = 0
        while True:
            init, goal = self.draw_start_goal(rng)
            solvable = self.is_solvable(init, goal)
            plan = self._produce(init, goal, rng) if solvable else None
            if plan is not None:
                return InstanceTriple(init, goal, self._replay(init, plan, goal, tid), True, rejections)
            if not self.dist.solvable_only:
                return InstanceTriple(init, goal, None, solvable, rejections)
            rejections += 1
            if rejections > self.dist.max_rejections:
                raise SamplingError(
                    f"no solvable draw after {rejections} attempts "
                    f"(goal_source={self.dist.goal_source}, goal_density={self.dist.goal_density})"
                )


def sample_instance(truth: ActionModel, dist: DistConfig, rng: np.random.Generator) -> InstanceTriple:
    return InstanceSampler(truth, dist).sample(rng)


def estimate_action_frequencies(
    truth: ActionModel, dist: DistConfig, n_samples: int, rng: np.random.Generator
) -> dict[str, float]:
    """Fraction of sampled trajectories that contain each action at least once."""
    if n_samples < 1:
        raise ValidationError("n_samples must be at least 1")
    sampler = InstanceSampler(truth, dist)
    hits = dict.fromkeys(truth.actions, 0)
    for _ in range(n_samples):
        triple = sampler.sample(rng)
        if triple.trajectory is not None:
            for name in set(triple.trajectory.actions):
                hits[name] += 1
    return {name: count / n_samples for name, count in hits.items()}


def bundled(name: str) -> str:
    """Text of a data file shipped with the package, e.g. ``"logistics_3loc.domain.json"``."""
    from importlib.resources import files

    return files("safeplan").joinpath("data", name).read_text(encoding="utf-8")
