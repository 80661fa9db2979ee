"""Safe planning from observed trajectories.

Learn a conservative SAS+ action model from successful executions, compile
it into an ordinary planning problem, and solve it with a complete planner.
Plans found this way never fail when executed in the real domain.
"""

__version__ = "0.1.0"

from .core import (
    Action,
    ActionModel,
    Problem,
    Trajectory,
    ValidationReport,
    Variable,
    apply,
    assignment,
    is_applicable,
    satisfies_goal,
    validate_plan,
)
from .learner import LearnedAction, LearnedModel, extract_triplets, learn, learned_to_model
from .compiler import CompiledProblem, compile_problem
from .planner import Limits, SearchResult, solve, solve_bfs

__all__ = [
    "Action",
    "ActionModel",
    "CompiledProblem",
    "LearnedAction",
    "LearnedModel",
    "Limits",
    "Problem",
    "SearchResult",
    "Trajectory",
    "ValidationReport",
    "Variable",
    "apply",
    "assignment",
    "compile_problem",
    "extract_triplets",
    "is_applicable",
    "learn",
    "learned_to_model",
    "satisfies_goal",
    "solve",
    "solve_bfs",
    "validate_plan",
]
