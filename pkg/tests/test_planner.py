import pytest
from hypothesis import given, settings, strategies as st

from oracles import goal_reachable_naive, shortest_plan_length_naive
from safeplan.core import ActionModel, Problem, validate_plan
from safeplan.domains import RandomDomainConfig, gen_random
from safeplan.planner import Limits, reachable_states, solve, solve_bfs
from safeplan.rng import stream

SOLVERS = [solve, solve_bfs]


@pytest.mark.parametrize("search", SOLVERS)
def test_goal_in_init(search, logistics, named):
    prob = Problem(logistics, named(TruckAt="A", PackageAt="B"), logistics.partial({"PackageAt": "B"}))
    result = search(prob)
    assert result.plan == ()
    assert result.stats.expanded == 1


@pytest.mark.parametrize("search", SOLVERS)
def test_worked_instance(search, logistics, named):
    prob = Problem(logistics, named(TruckAt="A", PackageAt="B"), logistics.partial({"PackageAt": "C"}))
    result = search(prob)
    assert len(result.plan) == shortest_plan_length_naive(logistics, prob.init, prob.goal) == 4
    assert validate_plan(result.plan, prob).success
    if search is solve:
        assert result.plan == ("Move_A_B", "Pickup_B", "Move_B_C", "Unload_C")


@pytest.mark.parametrize("search", SOLVERS)
def test_no_actions(search, logistics, named):
    empty = ActionModel(logistics.variables)
    prob = Problem(empty, named(TruckAt="A", PackageAt="B"), logistics.partial({"PackageAt": "C"}))
    assert search(prob).outcome == "no_plan"


@pytest.mark.parametrize("search", SOLVERS)
def test_resource_limit_is_not_no_plan(search, logistics, named):
    prob = Problem(logistics, named(TruckAt="A", PackageAt="B"), logistics.partial({"PackageAt": "C"}))
    assert search(prob, Limits(max_generated=3)).outcome == "resource_limit"


def test_deterministic(logistics, named):
    prob = Problem(logistics, named(TruckAt="C", PackageAt="A"), logistics.partial({"PackageAt": "B", "TruckAt": "A"}))
    assert solve(prob).plan == solve(prob).plan


def random_problem(seed):
    rng = stream(seed, "planner")
    cfg = RandomDomainConfig(
        num_vars=int(rng.integers(2, 6)),
        max_domain=int(rng.integers(2, 5)),
        num_actions=int(rng.integers(1, 12)),
        max_pre=2,
        max_eff=int(rng.integers(1, 4)),
    )
    model = gen_random(cfg, rng)
    init = tuple(int(rng.integers(v.domain_size)) for v in model.variables)
    k = int(rng.integers(1, len(model.variables) + 1))
    goal_vars = rng.choice(len(model.variables), size=k, replace=False)
    goal = tuple((int(v), int(rng.integers(model.variables[v].domain_size))) for v in goal_vars)
    return Problem(model, init, goal)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_astar_matches_bfs_and_reachability(seed):
    prob = random_problem(seed)
    a, b = solve(prob), solve_bfs(prob)
    assert a.outcome == b.outcome
    expected = shortest_plan_length_naive(prob.model, prob.init, prob.goal)
    if a.outcome == "plan":
        assert len(a.plan) == len(b.plan) == expected
        assert validate_plan(a.plan, prob).success
        assert validate_plan(b.plan, prob).success
    else:
        assert expected is None
        assert not goal_reachable_naive(prob.model, prob.init, prob.goal)


def test_unreachable_goal_value(logistics, named):
    # without the moves into A the truck can never get there
    one_way = logistics.with_actions(a for n, a in logistics.actions.items() if not n.endswith("_A"))
    prob = Problem(one_way, named(TruckAt="B", PackageAt="B"), one_way.partial({"TruckAt": "A"}))
    assert solve(prob).outcome == solve_bfs(prob).outcome == "no_plan"
    assert all(s[0] != 0 for s in reachable_states(prob))
