import pytest

from safeplan.compiler import compile_problem
from safeplan.core import Problem, validate_plan
from safeplan.errors import ValidationError
from safeplan.learner import LearnedModel, learn
from safeplan.planner import solve


def test_no_trajectories_means_no_actions(logistics, named):
    lm = LearnedModel(logistics.variables)
    init = named(TruckAt="A", PackageAt="B")
    cp = compile_problem(lm, init, logistics.partial({"PackageAt": "C"}))
    assert cp.problem.model.actions == {}
    assert solve(cp.problem).outcome == "no_plan"
    cp = compile_problem(lm, init, logistics.partial({"PackageAt": "B"}))
    assert solve(cp.problem).plan == ()


def test_t1_compiled_problem_solved_by_t1(logistics, t1):
    lm = learn([t1], logistics.variables)
    cp = compile_problem(lm, t1.states[0], t1.goal, corpus="T1")
    assert validate_plan(t1.actions, cp.problem).success
    result = solve(cp.problem)
    assert result.plan == t1.actions
    assert cp.problem.goal == t1.goal
    assert cp.problem.init == t1.states[0]
    assert cp.provenance["corpus"] == "T1" and len(cp.provenance["model"]) == 16


def test_compiled_plans_are_sound(logistics, t1):
    lm = learn([t1], logistics.variables)
    cp = compile_problem(lm, t1.states[0], t1.goal)
    plan = solve(cp.problem).plan
    assert validate_plan(plan, Problem(logistics, t1.states[0], t1.goal)).success


def test_variable_mismatch(logistics, t1):
    lm = learn([t1], logistics.variables)
    with pytest.raises(ValidationError):
        compile_problem(lm, (0, 0, 0), ())
    with pytest.raises(ValidationError):
        compile_problem(lm, (0, 0), ((5, 0),))
