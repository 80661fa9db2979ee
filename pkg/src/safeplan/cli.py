"""Command-line entry point: ``safeplan <subcommand> [flags]``.

Exit codes: 0 success, 1 negative answer (no plan found, invalid plan,
unsafe model), 2 usage or validation error, 3 resource limit.
Diagnostics go to stderr; data goes to files or stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import secrets
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from . import __version__
from .audit import audit_bounds, audit_safety
from .compiler import compile_problem
from .core import Problem, validate_plan
from .domains import DistConfig, InstanceSampler, LogisticsConfig, gen_logistics
from .errors import ResolutionError, SafePlanError
from .experiment import ExperimentConfig, check_pac_claim, mean_solve_rates, run_experiment
from .formats import (
    parse_domain,
    parse_learned_model,
    parse_plan,
    parse_problem,
    parse_trajectories,
    parse_variables,
    serialize_bounds_report,
    serialize_domain,
    serialize_learned_model,
    serialize_plan,
    serialize_problem,
    serialize_safety_report,
    serialize_trajectories,
    write_results_csv,
    write_sas,
)
from .learner import Learner, learned_to_model
from .pac import PacParams, epsilon_for_gamma, sample_complexity, sample_complexity_real, solvability_table
from .planner import Limits, solve, solve_bfs
from .rng import stream

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

log = logging.getLogger("safeplan")


class UsageError(Exception):
    pass


def _write(path: str | None, text: str) -> None:
    """Write to ``path`` atomically, or to stdout when ``path`` is None or ``-``."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        os.unlink(tmp)
        raise


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        args.seed = secrets.randbelow(2**31)
        log.warning("no --seed given; using generated seed %d", args.seed)
    return args.seed


def _named(text: str) -> dict[str, str]:
    """Parse ``"TruckAt=A,PackageAt=B"``."""
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in item:
            raise UsageError(f"expected VAR=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _dist(args: argparse.Namespace) -> DistConfig:
    return DistConfig(
        goal_density=args.goal_density,
        goal_source=args.goal_source,
        solvable_only=not args.allow_unsolvable,
        mode=args.mode,
        walk_length=args.walk_length,
    )


def _limits(args: argparse.Namespace) -> Limits:
    return Limits(max_generated=args.max_generated, time_limit=args.time_limit)


# ---------------------------------------------------------------- commands


def cmd_gen_domain(args) -> int:
    cfg = LogisticsConfig(args.locations, args.trucks, args.packages, args.seed or 0)
    _write(args.out, serialize_domain(gen_logistics(cfg)))
    return EXIT_OK


def cmd_sample(args) -> int:
    _need(args, "domain")
    seed = _seed(args)
    truth = parse_domain(_read(args.domain))
    sampler = InstanceSampler(truth, replace(_dist(args), solvable_only=True))
    rng = stream(seed, "sample")
    trajs = [sampler.sample(rng, f"s{seed}-{i}").trajectory for i in range(args.count)]
    _write(args.out, serialize_trajectories(trajs, truth.variables))
    if args.problem_out:
        held_out = InstanceSampler(truth, _dist(args)).sample(stream(seed, "held-out"))
        _write(args.problem_out, serialize_problem(Problem(truth, held_out.init, held_out.goal), {"seed": str(seed)}))
    return EXIT_OK


def cmd_learn(args) -> int:
    _need(args, "trajectories", "domain_vars")
    variables = parse_variables(_read(args.domain_vars))
    reference = parse_domain(_read(args.reference)) if args.reference else None
    trajs = parse_trajectories(_read(args.trajectories), variables, reference)
    start = parse_learned_model(_read(args.update)) if args.update else None
    lm = Learner(variables, start).observe_all(trajs).model()
    log.info("learned %d actions from %d trajectories", len(lm.actions), len(trajs))
    _write(args.out, serialize_learned_model(lm))
    return EXIT_OK


def cmd_compile(args) -> int:
    _need(args, "model")
    lm = parse_learned_model(_read(args.model))
    model = learned_to_model(lm)
    if args.problem:
        base = parse_problem(_read(args.problem))
        if base.model.variables != lm.variables:
            raise UsageError("problem and learned model use different variables")
        init, goal = base.init, base.goal
    else:
        _need(args, "init", "goal")
        init, goal = model.state(_named(args.init)), model.partial(_named(args.goal))
    compiled = compile_problem(lm, init, goal, corpus=args.corpus)
    _write(args.out, serialize_problem(compiled))
    if args.sas:
        _write(args.sas, write_sas(compiled.problem))
    return EXIT_OK


def cmd_plan(args) -> int:
    _need(args, "problem")
    problem = parse_problem(_read(args.problem))
    if args.sas:
        _write(args.sas, write_sas(problem))
    search = solve_bfs if args.algorithm == "bfs" else solve
    result = search(problem, _limits(args))
    st = result.stats
    log.info("expanded=%d generated=%d peak_frontier=%d time=%.3fs", st.expanded, st.generated,
             st.peak_frontier, st.wall_time)
    if result.outcome == "no_plan":
        print("no plan found", file=sys.stderr)
        return EXIT_NEGATIVE
    if result.outcome == "resource_limit":
        print("resource limit reached", file=sys.stderr)
        return EXIT_LIMIT
    _write(args.out, serialize_plan(result.plan))
    return EXIT_OK


def cmd_validate(args) -> int:
    _need(args, "problem", "plan")
    problem = parse_problem(_read(args.problem))
    plan = parse_plan(_read(args.plan))
    report = validate_plan(plan, problem)
    summary = {
        "success": report.success,
        "failed_step": report.failed_step,
        "reason": report.reason,
        "states": [problem.model.describe(s) for s in report.states],
    }
    sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if not report.success:
        print(f"plan invalid at step {report.failed_step}: {report.reason}", file=sys.stderr)
        return EXIT_NEGATIVE
    return EXIT_OK


def cmd_audit(args) -> int:
    _need(args, "model", "truth")
    lm = parse_learned_model(_read(args.model))
    truth = parse_domain(_read(args.truth))
    learned = learned_to_model(lm)
    report = audit_safety(learned, truth, args.audit_mode, samples=args.samples, seed=args.seed or 0)
    _write(args.out, serialize_safety_report(report, truth))
    ok = report.safe
    if args.trajectories:
        trajs = parse_trajectories(_read(args.trajectories), truth.variables)
        bounds = audit_bounds(lm, truth, trajs)
        _write(args.bounds_out, serialize_bounds_report(bounds, truth))
        ok = ok and bounds.clean
    print("safe" if report.safe else f"UNSAFE: {report.counterexample}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_bound(args) -> int:
    _need(args, "d", "actions", "vars", "delta")
    eps = args.epsilon
    if args.gamma is not None:
        _need(args, "mu")
        eps = min(1.0, epsilon_for_gamma(args.gamma, args.mu))
        print(f"epsilon {eps!r}")
    if eps is None:
        raise UsageError("give --epsilon, or --gamma with --mu")
    params = PacParams(args.d, args.actions, args.vars, eps, args.delta)
    print(f"m_real {sample_complexity_real(params)}")
    print(f"m {sample_complexity(params)}")
    return EXIT_OK


def cmd_table(args) -> int:
    _need(args, "mu", "epsilon")
    table = solvability_table(args.mu, args.epsilon)
    print(f"{'':<12}{'plan':>12}{'no plan':>12}{'prior':>12}")
    for label, p_plan, p_noplan, prior in table.rows():
        prior_cell = f"{prior:>12.6g}" if label != "marginal" else ""
        print(f"{label:<12}{p_plan:>12.6g}{p_noplan:>12.6g}{prior_cell}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    seed = _seed(args)
    try:
        m_values = tuple(int(x) for x in str(args.m).split(","))
    except ValueError:
        raise UsageError(f"--m expects comma-separated integers, got {args.m!r}") from None
    cfg = ExperimentConfig(
        domain=LogisticsConfig(args.locations, args.trucks, args.packages),
        truth=parse_domain(_read(args.domain)) if args.domain else None,
        dist=_dist(args),
        m_values=m_values,
        eval_instances=args.eval_instances,
        runs=args.runs,
        epsilon=args.epsilon,
        delta=args.delta,
        seed=seed,
        mu_mode=args.mu_mode,
        eval_limits=_limits(args),
    )
    records = run_experiment(cfg, jobs=args.jobs)
    _write(args.out, write_results_csv(records, timing=args.timing))
    truth = cfg.model()
    needed = sample_complexity(
        PacParams(truth.max_domain_size, len(truth.actions), len(truth.variables), cfg.epsilon, cfg.delta)
    )
    for m, rate in mean_solve_rates(records).items():
        print(f"m={m} mean_solve_rate={rate:.4f}", file=sys.stderr)
    top = [r for r in records if r.m == max(m_values)]
    verdict = check_pac_claim(top, cfg.epsilon, cfg.delta, min_m=needed)
    if verdict.applicable:
        print(f"pac claim at m={top[0].m}: {verdict.within_epsilon}/{verdict.runs} runs within epsilon, "
              f"{'pass' if verdict.passed else 'FAIL'}", file=sys.stderr)
    else:
        print(f"pac claim not checked: {verdict.note}", file=sys.stderr)
    unsafe = sum(r.unsafe_plans for r in records)
    if unsafe:
        print(f"{unsafe} unsafe plans", file=sys.stderr)
        return EXIT_NEGATIVE
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _add_dist_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--goal-density", type=float, default=0.5)
    p.add_argument("--goal-source", choices=["reachable", "uniform"], default="reachable")
    p.add_argument("--mode", choices=["optimal", "random-tie", "walk"], default="optimal")
    p.add_argument("--walk-length", type=int, default=8)
    p.add_argument("--allow-unsolvable", action="store_true",
                   help="keep unsolvable draws instead of rejecting them")


def _add_limit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-generated", type=int, default=10_000_000)
    p.add_argument("--time-limit", type=float, default=60.0)


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="safeplan", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="JSON file of flag values; command-line flags win")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    subs: dict[str, argparse.ArgumentParser] = {}

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--config", help=argparse.SUPPRESS)
        p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        subs[name] = p
        return p

    p = add("gen-domain", cmd_gen_domain, "write a logistics ground-truth domain")
    p.add_argument("--locations", type=int, default=3)
    p.add_argument("--trucks", type=int, default=1)
    p.add_argument("--packages", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")

    p = add("sample", cmd_sample, "sample training trajectories from a ground-truth domain")
    p.add_argument("--domain")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--problem-out", help="also write one held-out ground-truth problem")
    _add_dist_flags(p)

    p = add("learn", cmd_learn, "learn a conservative model from trajectories")
    p.add_argument("--trajectories")
    p.add_argument("--domain-vars", help="any JSON file with a 'variables' list")
    p.add_argument("--reference", help="domain file to check trajectory consistency against")
    p.add_argument("--update", help="existing learned model to extend")
    p.add_argument("--out")

    p = add("compile", cmd_compile, "build a planning problem from a learned model")
    p.add_argument("--model")
    p.add_argument("--problem", help="take the start state and goal from this problem file")
    p.add_argument("--init", help="VAR=VALUE,... (total)")
    p.add_argument("--goal", help="VAR=VALUE,...")
    p.add_argument("--corpus", help="identifier recorded as provenance")
    p.add_argument("--out")
    p.add_argument("--sas", help="also export Fast Downward translator output")

    p = add("plan", cmd_plan, "solve a problem file")
    p.add_argument("--problem")
    p.add_argument("--algorithm", choices=["astar", "bfs"], default="astar")
    p.add_argument("--out")
    p.add_argument("--sas", help="also export Fast Downward translator output")
    _add_limit_flags(p)

    p = add("validate", cmd_validate, "check a plan against a problem")
    p.add_argument("--problem")
    p.add_argument("--plan")

    p = add("audit", cmd_audit, "check a learned model against a ground-truth domain")
    p.add_argument("--model")
    p.add_argument("--truth")
    p.add_argument("--audit-mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--trajectories", help="corpus for the bounds audit")
    p.add_argument("--out")
    p.add_argument("--bounds-out")

    p = add("bound", cmd_bound, "trajectory count sufficient for the PAC guarantee")
    p.add_argument("--d", type=int)
    p.add_argument("--actions", type=int)
    p.add_argument("--vars", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--mu", type=float)

    p = add("table", cmd_table, "solvability/plan probability table")
    p.add_argument("--mu", type=float)
    p.add_argument("--epsilon", type=float)

    p = add("experiment", cmd_experiment, "sweep m and record solve rates")
    p.add_argument("--locations", type=int, default=3)
    p.add_argument("--trucks", type=int, default=1)
    p.add_argument("--packages", type=int, default=1)
    p.add_argument("--domain", help="domain file to use instead of a generated logistics domain")
    p.add_argument("--m", default="1,5,20,100")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--eval-instances", type=int, default=200)
    p.add_argument("--epsilon", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--seed", type=int)
    p.add_argument("--mu-mode", choices=["exact-solvable", "planner-relative"], default="exact-solvable")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="add a wall_time column")
    p.add_argument("--out")
    _add_dist_flags(p)
    _add_limit_flags(p)
    return parser, subs


def _config_defaults(argv: list[str]) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        data = json.loads(_read(known.config))
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {known.config}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        defaults = _config_defaults(argv)
        for p in subs.values():
            p.set_defaults(**defaults)
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"safeplan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, SafePlanError, ResolutionError) as exc:
        print(f"safeplan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
