"""Turn a learned model plus a start/goal pair into an ordinary planning problem."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .core import Assignment, Problem, State, assignment, check_assignment, check_state
from .errors import ValidationError
from .learner import LearnedModel, learned_to_model


@dataclass(frozen=True)
class CompiledProblem:
    problem: Problem
    provenance: dict[str, str]


def model_digest(lm: LearnedModel) -> str:
    """Short content hash of the canonical learned-model file."""
    from .formats import serialize_learned_model

    return hashlib.sha256(serialize_learned_model(lm).encode()).hexdigest()[:16]


def compile_problem(
    lm: LearnedModel, init: State, goal: Assignment, corpus: str | None = None
) -> CompiledProblem:
    """Same variables, start state and goal; only the actions seen in the corpus.

    ``corpus`` is a free-form identifier recorded alongside the model digest.
    """
    init = tuple(init)
    goal = assignment(goal)
    try:
        check_state(init, lm.variables)
        check_assignment(goal, lm.variables, "goal")
    except ValidationError as exc:
        raise ValidationError(f"start/goal do not match the learned model's variables: {exc}") from None
    provenance = {"model": model_digest(lm)}
    if corpus is not None:
        provenance["corpus"] = corpus
    return CompiledProblem(Problem(learned_to_model(lm), init, goal), provenance)
