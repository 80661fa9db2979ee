"""Empirical check of the trajectory-count guarantee.

For each run the harness draws one training stream and one evaluation set
from the same distribution, using disjoint random streams derived from the
master seed. Corpora for increasing ``m`` are prefixes of the same training
stream, so within a run the learned models only ever grow more permissive.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Literal, Sequence

from .compiler import compile_problem
from .core import ActionModel, Problem, Successors, validate_plan
from .domains import DistConfig, InstanceSampler, LogisticsConfig, gen_logistics
from .errors import ValidationError
from .learner import Learner
from .planner import Limits, solve
from .rng import stream

log = logging.getLogger(__name__)

MuMode = Literal["exact-solvable", "planner-relative"]


@dataclass(frozen=True)
class ExperimentConfig:
    domain: LogisticsConfig = field(default_factory=LogisticsConfig)
    dist: DistConfig = field(default_factory=DistConfig)
    m_values: tuple[int, ...] = (1, 10, 100)
    eval_instances: int = 200
    runs: int = 10
    epsilon: float = 0.25
    delta: float = 0.2
    seed: int = 0
    mu_mode: MuMode = "exact-solvable"
    eval_limits: Limits = field(default_factory=Limits)
    # replaces the generated logistics domain when given
    truth: ActionModel | None = None

    @property
    def label(self) -> str:
        if self.truth is None:
            return self.domain.label
        return f"custom(vars={len(self.truth.variables)},actions={len(self.truth.actions)})"

    def model(self) -> ActionModel:
        return gen_logistics(self.domain) if self.truth is None else self.truth

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(self.m_values))
        if not self.m_values or any(m < 0 for m in self.m_values):
            raise ValidationError("m_values must be a nonempty list of non-negative counts")
        if list(self.m_values) != sorted(set(self.m_values)):
            raise ValidationError("m_values must be strictly ascending")
        if self.eval_instances < 1 or self.runs < 1:
            raise ValidationError("eval_instances and runs must be at least 1")
        if self.mu_mode not in ("exact-solvable", "planner-relative"):
            raise ValidationError(f"unknown mu_mode {self.mu_mode!r}")


@dataclass(frozen=True)
class ExperimentRecord:
    """Outcome of one (m, run) cell.

    ``solve_rate`` is conditional on solvable evaluation instances, leaving
    out any that hit the planner's resource limits; ``plan_rate`` is the
    unconditional fraction of all draws (rejected ones included) that got a
    plan. ``empirical_mu`` is the solvable fraction of all draws.
    """

    label: str
    m: int
    run: int
    eval_instances: int
    solvable: int
    solved: int
    unsolved_solvable: int
    unsafe_plans: int
    resource_limits: int
    solve_rate: float
    plan_rate: float
    mean_plan_length: float | None
    empirical_mu: float
    actions_learned: int
    wall_time: float = 0.0
    seed: int = 0

    @property
    def failure_rate(self) -> float:
        return 0.0 if math.isnan(self.solve_rate) else 1.0 - self.solve_rate


def run_single(cfg: ExperimentConfig, run: int) -> list[ExperimentRecord]:
    truth = cfg.model()
    train = InstanceSampler(truth, replace(cfg.dist, solvable_only=True))
    evaluator = InstanceSampler(truth, cfg.dist)
    eval_rng = stream(cfg.seed, "eval", run)
    train_rng = stream(cfg.seed, "train", run)

    eval_set = [evaluator.sample(eval_rng, f"eval-{run}-{i}") for i in range(cfg.eval_instances)]
    draws = cfg.eval_instances + sum(t.rejections for t in eval_set)
    if cfg.mu_mode == "exact-solvable":
        solvable_flags = [t.solvable for t in eval_set]
    else:
        solvable_flags = [t.trajectory is not None for t in eval_set]
    truth_problems = [Problem(truth, t.init, t.goal) for t in eval_set]

    learner = Learner(truth.variables)
    seen = 0
    records = []
    for m in cfg.m_values:
        started = time.monotonic()
        for i in range(seen, m):
            triple = train.sample(train_rng, f"train-{run}-{i}")
            learner.observe_all([triple.trajectory])
        seen = m
        lm = learner.model()
        succ = None
        solved = unsolved = unsafe = limited = solved_solvable = 0
        lengths = []
        for inst, truth_problem, is_solvable in zip(eval_set, truth_problems, solvable_flags):
            compiled = compile_problem(lm, inst.init, inst.goal).problem
            succ = succ or Successors(compiled.model)
            result = solve(compiled, cfg.eval_limits, succ)
            if result.outcome == "resource_limit":
                limited += 1
                continue
            if result.outcome == "plan":
                if not validate_plan(result.plan, truth_problem).success:
                    unsafe += 1
                    log.error("unsafe plan at m=%d run=%d: %s", m, run, result.plan)
                    continue
                solved += 1
                lengths.append(len(result.plan))
                if is_solvable:
                    solved_solvable += 1
            elif is_solvable:
                unsolved += 1
        solvable = sum(solvable_flags)
        attempted = solved_solvable + unsolved
        records.append(
            ExperimentRecord(
                label=cfg.label,
                m=m,
                run=run,
                eval_instances=cfg.eval_instances,
                solvable=solvable,
                solved=solved,
                unsolved_solvable=unsolved,
                unsafe_plans=unsafe,
                resource_limits=limited,
                solve_rate=solved_solvable / attempted if attempted else math.nan,
                plan_rate=solved / draws,
                mean_plan_length=sum(lengths) / len(lengths) if lengths else None,
                empirical_mu=solvable / draws,
                actions_learned=len(lm.actions),
                wall_time=time.monotonic() - started,
                seed=cfg.seed,
            )
        )
        log.info("run %d m=%d solve_rate=%.4f", run, m, records[-1].solve_rate)
    return records


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> list[ExperimentRecord]:
    """All (m, run) records, sorted by (m, run); identical for any ``jobs``."""
    runs = range(cfg.runs)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(run_single, [cfg] * cfg.runs, runs))
    else:
        chunks = [run_single(cfg, r) for r in runs]
    return sorted((rec for chunk in chunks for rec in chunk), key=lambda r: (r.m, r.run))


@dataclass(frozen=True)
class PacVerdict:
    applicable: bool
    runs: int
    within_epsilon: int
    fraction_within: float
    passed: bool
    worst_failure_rate: float
    mean_failure_rate: float
    mean_unconditional_noplan_rate: float
    note: str = ""


def check_pac_claim(
    records: Sequence[ExperimentRecord], epsilon: float, delta: float, min_m: int | None = None
) -> PacVerdict:
    """Fraction of runs whose conditional failure rate is at most ``epsilon``.

    The claim passes when that fraction is at least ``1 - delta``. Records
    below ``min_m`` (normally the sample-complexity bound) make the verdict
    not applicable.
    """
    if not 0 < delta <= 1:
        raise ValidationError("delta must lie in (0, 1]")
    if not records:
        return PacVerdict(False, 0, 0, math.nan, False, math.nan, math.nan, math.nan, "no records")
    if min_m is not None and any(r.m < min_m for r in records):
        low = min(r.m for r in records)
        return PacVerdict(False, len(records), 0, math.nan, False, math.nan, math.nan, math.nan,
                          f"records at m={low} are below the required m={min_m}")
    failures = [r.failure_rate for r in records]
    within = sum(1 for f in failures if f <= epsilon)
    fraction = within / len(records)
    return PacVerdict(
        applicable=True,
        runs=len(records),
        within_epsilon=within,
        fraction_within=fraction,
        passed=fraction >= 1 - delta,
        worst_failure_rate=max(failures),
        mean_failure_rate=sum(failures) / len(failures),
        mean_unconditional_noplan_rate=sum(1 - r.plan_rate for r in records) / len(records),
    )


def mean_solve_rates(records: Iterable[ExperimentRecord]) -> dict[int, float]:
    """Average conditional solve rate per m over runs (runs without solvable instances skipped)."""
    sums: dict[int, list[float]] = {}
    for r in records:
        if not math.isnan(r.solve_rate):
            sums.setdefault(r.m, []).append(r.solve_rate)
    return {m: sum(v) / len(v) for m, v in sorted(sums.items())}
