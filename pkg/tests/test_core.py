import pytest
from hypothesis import given, strategies as st

from safeplan.core import (
    Action,
    ActionModel,
    Problem,
    Trajectory,
    Variable,
    apply,
    assignment,
    is_applicable,
    satisfies_goal,
    validate_plan,
)
from safeplan.domains import logistics_3loc
from safeplan.errors import PreconditionError, ResolutionError, ValidationError

LOGISTICS = logistics_3loc()


def test_empty_precondition_always_applicable(named):
    a = Action("noop")
    assert is_applicable(named(TruckAt="C", PackageAt="T"), a)


def test_move_applicability(logistics, named):
    move = logistics.actions["Move_A_B"]
    assert is_applicable(named(TruckAt="A", PackageAt="B"), move)
    assert not is_applicable(named(TruckAt="C", PackageAt="B"), move)


def test_out_of_range_variable_is_a_validation_error():
    with pytest.raises(ValidationError):
        is_applicable((0,), Action("x", ((3, 0),)))


def test_apply_examples(logistics, named):
    s = named(TruckAt="A", PackageAt="B")
    assert apply(s, Action("noop")) == s
    assert apply(s, logistics.actions["Move_A_B"]) == named(TruckAt="B", PackageAt="B")
    assert apply(named(TruckAt="B", PackageAt="B"), logistics.actions["Pickup_B"]) == named(
        TruckAt="B", PackageAt="T"
    )


def test_apply_inapplicable_raises(logistics, named):
    with pytest.raises(PreconditionError):
        apply(named(TruckAt="C", PackageAt="B"), logistics.actions["Move_A_B"])


def test_goal_satisfaction(logistics, named):
    goal = logistics.partial({"PackageAt": "C"})
    assert satisfies_goal(named(TruckAt="A", PackageAt="B"), ())
    assert satisfies_goal(named(TruckAt="C", PackageAt="C"), goal)
    assert not satisfies_goal(named(TruckAt="C", PackageAt="T"), goal)


def test_validate_plan_examples(logistics, named):
    init = named(TruckAt="A", PackageAt="B")
    goal = logistics.partial({"PackageAt": "C"})
    prob = Problem(logistics, init, goal)

    report = validate_plan([], Problem(logistics, init, logistics.partial({"TruckAt": "A"})))
    assert report.success and report.states == (init,)

    plan = ["Move_A_B", "Pickup_B", "Move_B_C", "Unload_C"]
    report = validate_plan(plan, prob)
    assert report.success
    assert len(report.states) == 5
    assert satisfies_goal(report.states[-1], goal)

    report = validate_plan(["Move_B_C"] + plan[1:], prob)
    assert not report.success
    assert (report.failed_step, report.reason) == (0, "inapplicable")

    report = validate_plan(plan[:2], prob)
    assert (report.failed_step, report.reason) == (2, "goal-unsatisfied")


def test_validate_plan_unknown_action(logistics, named):
    prob = Problem(logistics, named(TruckAt="A", PackageAt="B"), ())
    with pytest.raises(ResolutionError):
        validate_plan(["Fly_A_B"], prob)


def test_effect_restating_precondition_is_stripped():
    a = Action("a", ((0, 1), (1, 0)), ((0, 1), (1, 1)))
    assert a.eff == ((1, 1),)
    assert not set(a.pre) & set(a.eff)


def test_conflicting_assignment_rejected():
    with pytest.raises(ValidationError):
        assignment([(0, 1), (0, 2)])


def test_model_rejects_dangling_values():
    v = (Variable("x", ("a", "b")),)
    with pytest.raises(ValidationError):
        ActionModel(v, {"a": Action("a", ((0, 2),))})
    with pytest.raises(ValidationError):
        ActionModel(v, {"a": Action("a", (), ((1, 0),))})


def test_variable_invariants():
    with pytest.raises(ValidationError):
        Variable("x", ())
    with pytest.raises(ValidationError):
        Variable("x", ("a", "a"))


def test_problem_validates_init_and_goal(logistics):
    with pytest.raises(ValidationError):
        Problem(logistics, (0,), ())
    with pytest.raises(ValidationError):
        Problem(logistics, (0, 9), ())
    with pytest.raises(ValidationError):
        Problem(logistics, (0, 0), ((1, 7),))


def test_trajectory_alternation():
    with pytest.raises(ValidationError):
        Trajectory(((0,), (0,)), ())
    assert len(Trajectory(((0,),), ())) == 0


def test_model_name_lookup_roundtrip(logistics, named):
    s = named(TruckAt="B", PackageAt="T")
    assert logistics.describe(s) == {"TruckAt": "B", "PackageAt": "T"}
    assert logistics.partial(logistics.describe(s)) == tuple(enumerate(s))


states = st.tuples(st.integers(0, 2), st.integers(0, 3))


@given(states, st.sampled_from(sorted(LOGISTICS.actions)))
def test_apply_is_deterministic_and_framed(s, name):
    a = LOGISTICS.actions[name]
    if not is_applicable(s, a):
        return
    out = apply(s, a)
    assert out == apply(s, a)
    touched = {v for v, _ in a.eff}
    for var in range(len(s)):
        if var not in touched:
            assert out[var] == s[var]


@given(
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 2)), max_size=4),
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 2)), max_size=4),
)
def test_normalization_invariant(pre, eff):
    try:
        a = Action("a", assignment(dict(pre)), assignment(dict(eff)))
    except ValidationError:
        return
    assert not set(a.pre) & set(a.eff)


@given(st.lists(st.sampled_from(["Move_A_B", "Move_B_C", "Pickup_B", "Unload_C", "Move_C_A", "Pickup_A"]), max_size=6))
def test_validation_report_is_self_consistent(plan):
    m = LOGISTICS
    prob = Problem(m, m.state({"TruckAt": "A", "PackageAt": "B"}), m.partial({"PackageAt": "C"}))
    report = validate_plan(plan, prob)
    if report.success:
        s = prob.init
        for name in plan:
            s = apply(s, m.actions[name])
        assert satisfies_goal(s, prob.goal)
        assert s == report.states[-1]
