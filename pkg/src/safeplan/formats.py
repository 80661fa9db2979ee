"""Reading and writing safeplan's on-disk formats.

Domains, problems, learned models, plans and audit reports are UTF-8 JSON
documents carrying ``schema_version`` and ``kind``. Trajectory corpora are
JSON Lines, one trajectory per line. Experiment results are CSV. Compiled
problems can also be exported in the Fast Downward translator text format.

Files always use variable and value *names*; indices exist only in memory.
Every writer emits a canonical form (sorted keys, fixed layout), so
``serialize(parse(text))`` is stable.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import TYPE_CHECKING, Any, Iterable, Mapping, Sequence

import jsonschema

from .core import (
    Action,
    ActionModel,
    Assignment,
    Problem,
    State,
    Trajectory,
    Variable,
    apply,
    holds,
)
from .errors import (
    ConsistencyError,
    ParseError,
    SemanticError,
    StructureError,
    ValidationError,
)
from .learner import LearnedAction, LearnedModel

if TYPE_CHECKING:
    from .audit import BoundsReport, SafetyReport
    from .compiler import CompiledProblem
    from .experiment import ExperimentRecord

SCHEMA_VERSION = 1

_NAME = {"type": "string", "minLength": 1}
_ASSIGNMENT = {"type": "object", "additionalProperties": {"type": "string"}}
_VARIABLES = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["name", "values"],
        "additionalProperties": False,
        "properties": {
            "name": _NAME,
            "values": {"type": "array", "minItems": 1, "items": _NAME},
        },
    },
}


def _doc_schema(kind: str, props: dict, required: list[str]) -> dict:
    return {
        "type": "object",
        "required": ["schema_version", "kind", *required],
        "additionalProperties": False,
        "properties": {
            "schema_version": {"const": SCHEMA_VERSION},
            "kind": {"const": kind},
            **props,
        },
    }


_ACTION = {
    "type": "object",
    "required": ["name", "pre", "eff"],
    "additionalProperties": False,
    "properties": {"name": _NAME, "pre": _ASSIGNMENT, "eff": _ASSIGNMENT},
}

DOMAIN_SCHEMA = _doc_schema(
    "domain",
    {"variables": _VARIABLES, "actions": {"type": "array", "items": _ACTION}},
    ["variables", "actions"],
)
PROBLEM_SCHEMA = _doc_schema(
    "problem",
    {
        "variables": _VARIABLES,
        "actions": {"type": "array", "items": _ACTION},
        "init": _ASSIGNMENT,
        "goal": _ASSIGNMENT,
        "provenance": {"type": "object", "additionalProperties": {"type": "string"}},
    },
    ["variables", "actions", "init", "goal"],
)
LEARNED_SCHEMA = _doc_schema(
    "learned-model",
    {
        "variables": _VARIABLES,
        "actions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "pre_upper", "eff_lower", "observations"],
                "additionalProperties": False,
                "properties": {
                    "name": _NAME,
                    "pre_upper": _ASSIGNMENT,
                    "eff_lower": _ASSIGNMENT,
                    "observations": {"type": "integer", "minimum": 1},
                },
            },
        },
    },
    ["variables", "actions"],
)
PLAN_SCHEMA = _doc_schema("plan", {"steps": {"type": "array", "items": _NAME}}, ["steps"])
TRAJECTORY_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "id", "states", "actions"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "id": {"type": "string"},
        "states": {"type": "array", "minItems": 1, "items": _ASSIGNMENT},
        "actions": {"type": "array", "items": _NAME},
        "goal": {"oneOf": [_ASSIGNMENT, {"type": "null"}]},
    },
}


def _dump(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _load(text: str, schema: dict, line: int | None = None) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=line if line is not None else exc.lineno) from None
    error = jsonschema.exceptions.best_match(_validator(schema).iter_errors(doc))
    if error is not None:
        raise ParseError(f"schema violation: {error.message}", line=line, path=error.json_path)
    return doc


_VALIDATORS: dict[int, Any] = {}


def _validator(schema: dict):
    # schemas are module constants, so identity is a safe cache key
    found = _VALIDATORS.get(id(schema))
    if found is None:
        cls = jsonschema.validators.validator_for(schema)
        cls.check_schema(schema)
        found = _VALIDATORS[id(schema)] = (cls(schema), schema)
    return found[0]


# ---------------------------------------------------------------- variables


def _variables_out(variables: Sequence[Variable]) -> list[dict]:
    return [{"name": v.name, "values": list(v.values)} for v in variables]


def _variables_in(raw: list[dict]) -> tuple[Variable, ...]:
    try:
        variables = tuple(Variable(v["name"], tuple(v["values"])) for v in raw)
    except ValidationError as exc:
        raise SemanticError(str(exc), path="$.variables") from None
    names = [v.name for v in variables]
    if len(set(names)) != len(names):
        raise SemanticError("duplicate variable names", path="$.variables")
    return variables


_HAS_VARIABLES = {"type": "object", "required": ["variables"], "properties": {"variables": _VARIABLES}}


def parse_variables(text: str) -> tuple[Variable, ...]:
    """Variable declarations from any safeplan JSON document that has them."""
    return _variables_in(_load(text, _HAS_VARIABLES)["variables"])


def serialize_variables(variables: Sequence[Variable]) -> str:
    return _dump({"schema_version": SCHEMA_VERSION, "kind": "variables", "variables": _variables_out(variables)})


class _Names:
    """Name <-> index translation for one variable set."""

    def __init__(self, variables: Sequence[Variable]):
        self.variables = tuple(variables)
        self.var_ix = {v.name: i for i, v in enumerate(self.variables)}
        self.val_ix = [{name: k for k, name in enumerate(v.values)} for v in self.variables]

    def partial(self, raw: Mapping[str, str], path: str, line: int | None = None) -> Assignment:
        out = []
        for var_name, val_name in raw.items():
            var = self.var_ix.get(var_name)
            if var is None:
                raise SemanticError(f"unknown variable {var_name!r}", line=line, path=path)
            val = self.val_ix[var].get(val_name)
            if val is None:
                raise SemanticError(f"unknown value {val_name!r} for {var_name}", line=line, path=f"{path}.{var_name}")
            out.append((var, val))
        return tuple(sorted(out))

    def state(self, raw: Mapping[str, str], path: str, line: int | None = None) -> State:
        part = dict(self.partial(raw, path, line))
        if len(part) != len(self.variables):
            missing = [v.name for i, v in enumerate(self.variables) if i not in part]
            raise SemanticError(f"state is not total, missing {missing}", line=line, path=path)
        return tuple(part[i] for i in range(len(self.variables)))

    def named(self, part: Assignment) -> dict[str, str]:
        return {self.variables[var].name: self.variables[var].values[val] for var, val in part}

    def named_state(self, state: State) -> dict[str, str]:
        return self.named(tuple(enumerate(state)))


def _actions_in(raw: list[dict], names: _Names) -> dict[str, Action]:
    actions: dict[str, Action] = {}
    for i, a in enumerate(raw):
        if a["name"] in actions:
            raise SemanticError(f"duplicate action {a['name']!r}", path=f"$.actions[{i}]")
        actions[a["name"]] = Action(
            a["name"], names.partial(a["pre"], f"$.actions[{i}].pre"), names.partial(a["eff"], f"$.actions[{i}].eff")
        )
    return actions


def _actions_out(model: ActionModel, names: _Names) -> list[dict]:
    return [{"name": a.name, "pre": names.named(a.pre), "eff": names.named(a.eff)} for a in model.actions.values()]


# ------------------------------------------------------------------ domains


def parse_domain(text: str) -> ActionModel:
    doc = _load(text, DOMAIN_SCHEMA)
    variables = _variables_in(doc["variables"])
    return ActionModel(variables, _actions_in(doc["actions"], _Names(variables)))


def serialize_domain(model: ActionModel) -> str:
    names = _Names(model.variables)
    return _dump(
        {
            "schema_version": SCHEMA_VERSION,
            "kind": "domain",
            "variables": _variables_out(model.variables),
            "actions": _actions_out(model, names),
        }
    )


# ----------------------------------------------------------------- problems


def parse_compiled(text: str) -> "CompiledProblem":
    """A problem file together with its (possibly empty) provenance record."""
    from .compiler import CompiledProblem

    doc = _load(text, PROBLEM_SCHEMA)
    variables = _variables_in(doc["variables"])
    names = _Names(variables)
    model = ActionModel(variables, _actions_in(doc["actions"], names))
    problem = Problem(model, names.state(doc["init"], "$.init"), names.partial(doc["goal"], "$.goal"))
    return CompiledProblem(problem, dict(doc.get("provenance", {})))


def parse_problem(text: str) -> Problem:
    return parse_compiled(text).problem


def serialize_problem(problem: "Problem | CompiledProblem", provenance: Mapping[str, str] | None = None) -> str:
    if not isinstance(problem, Problem):
        provenance = problem.provenance if provenance is None else provenance
        problem = problem.problem
    names = _Names(problem.model.variables)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "problem",
        "variables": _variables_out(problem.model.variables),
        "actions": _actions_out(problem.model, names),
        "init": names.named_state(problem.init),
        "goal": names.named(problem.goal),
    }
    if provenance:
        doc["provenance"] = dict(provenance)
    return _dump(doc)


# ----------------------------------------------------------- learned models


def parse_learned_model(text: str) -> LearnedModel:
    doc = _load(text, LEARNED_SCHEMA)
    variables = _variables_in(doc["variables"])
    names = _Names(variables)
    actions: dict[str, LearnedAction] = {}
    for i, a in enumerate(doc["actions"]):
        if a["name"] in actions:
            raise SemanticError(f"duplicate action {a['name']!r}", path=f"$.actions[{i}]")
        pre = names.partial(a["pre_upper"], f"$.actions[{i}].pre_upper")
        eff = names.partial(a["eff_lower"], f"$.actions[{i}].eff_lower")
        if set(pre) & set(eff):
            raise SemanticError("effect restates a precondition value", path=f"$.actions[{i}]")
        actions[a["name"]] = LearnedAction(a["name"], pre, eff, a["observations"])
    return LearnedModel(variables, actions)


def serialize_learned_model(lm: LearnedModel) -> str:
    names = _Names(lm.variables)
    return _dump(
        {
            "schema_version": SCHEMA_VERSION,
            "kind": "learned-model",
            "variables": _variables_out(lm.variables),
            "actions": [
                {
                    "name": la.name,
                    "pre_upper": names.named(la.pre_upper),
                    "eff_lower": names.named(la.eff_lower),
                    "observations": la.observations,
                }
                for la in lm.actions.values()
            ],
        }
    )


# ------------------------------------------------------------- trajectories


def parse_trajectories(
    text: str, variables: Sequence[Variable], reference: ActionModel | None = None
) -> list[Trajectory]:
    """Parse a JSON Lines corpus. Blank lines are skipped.

    With a ``reference`` model every step must be applicable and produce the
    recorded successor, otherwise :class:`ConsistencyError` names the step.
    """
    names = _Names(variables)
    if reference is not None and tuple(reference.variables) != names.variables:
        raise ValidationError("reference model is over a different variable set")
    out = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        if not raw_line.strip():
            continue
        doc = _load(raw_line, TRAJECTORY_SCHEMA, line=lineno)
        if len(doc["states"]) != len(doc["actions"]) + 1:
            raise StructureError(
                f"{len(doc['states'])} states but {len(doc['actions'])} actions", line=lineno, path="$.states"
            )
        states = tuple(names.state(s, f"$.states[{i}]", lineno) for i, s in enumerate(doc["states"]))
        goal = doc.get("goal")
        goal = None if goal is None else names.partial(goal, "$.goal", lineno)
        traj = Trajectory(states, tuple(doc["actions"]), goal, doc["id"])
        if reference is not None:
            _check_consistent(traj, reference, lineno)
        out.append(traj)
    return out


def _check_consistent(traj: Trajectory, reference: ActionModel, lineno: int) -> None:
    for step, (pre, name, post) in enumerate(traj.triplets()):
        act = reference.actions.get(name)
        if act is None:
            raise ConsistencyError(f"unknown action {name!r}", step, lineno)
        if not holds(act.pre, pre):
            raise ConsistencyError(f"{name} is not applicable in the recorded state", step, lineno)
        if apply(pre, act) != post:
            raise ConsistencyError(f"{name} does not lead to the recorded successor", step, lineno)


def serialize_trajectories(trajs: Iterable[Trajectory], variables: Sequence[Variable]) -> str:
    names = _Names(variables)
    lines = []
    for traj in trajs:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "id": traj.id,
            "states": [names.named_state(s) for s in traj.states],
            "actions": list(traj.actions),
            "goal": None if traj.goal is None else names.named(traj.goal),
        }
        lines.append(json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n")
    return "".join(lines)


# -------------------------------------------------------------------- plans


def parse_plan(text: str) -> tuple[str, ...]:
    return tuple(_load(text, PLAN_SCHEMA)["steps"])


def serialize_plan(plan: Sequence[str]) -> str:
    return _dump({"schema_version": SCHEMA_VERSION, "kind": "plan", "steps": list(plan)})


# ------------------------------------------------------------------ reports


def serialize_safety_report(report: "SafetyReport", model: ActionModel) -> str:
    names = _Names(model.variables)
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "kind": "safety-report",
        "safe": report.safe,
        "mode": report.mode,
        "states_checked": report.states_checked,
    }
    if report.mode == "sampled":
        doc["samples"] = report.samples
        doc["seed"] = report.seed
    cex = report.counterexample
    if cex is not None:
        doc["counterexample"] = {
            "state": names.named_state(cex.state),
            "action": cex.action,
            "kind": cex.kind,
            "learned_next": names.named_state(cex.learned_next),
            "truth_next": None if cex.truth_next is None else names.named_state(cex.truth_next),
        }
    return _dump(doc)


def serialize_bounds_report(report: "BoundsReport", model: ActionModel) -> str:
    names = _Names(model.variables)
    return _dump(
        {
            "schema_version": SCHEMA_VERSION,
            "kind": "bounds-report",
            "clean": report.clean,
            "checked": list(report.checked),
            "violations": [
                {"action": v.action, "kind": v.kind, "entry": names.named((v.entry,))} for v in report.violations
            ],
            "post_intersection": {a: names.named(p) for a, p in report.post_intersection.items()},
        }
    )


# ------------------------------------------------------- translator export


def write_sas(problem: Problem) -> str:
    """Fast Downward translator format, version 3, unit costs, no mutexes or axioms."""
    model = problem.model
    out: list[str] = ["begin_version", "3", "end_version", "begin_metric", "0", "end_metric"]
    out.append(str(len(model.variables)))
    for i, var in enumerate(model.variables):
        out += ["begin_variable", f"var{i}", "-1", str(var.domain_size)]
        out += [f"Atom {var.name}({value})" for value in var.values]
        out.append("end_variable")
    out.append("0")
    out += ["begin_state", *(str(v) for v in problem.init), "end_state"]
    out += ["begin_goal", str(len(problem.goal)), *(f"{var} {val}" for var, val in problem.goal), "end_goal"]
    out.append(str(len(model.actions)))
    for name in sorted(model.actions):
        act = model.actions[name]
        pre = dict(act.pre)
        eff_vars = {var for var, _ in act.eff}
        prevail = [(var, val) for var, val in act.pre if var not in eff_vars]
        out += ["begin_operator", name, str(len(prevail)), *(f"{var} {val}" for var, val in prevail)]
        out.append(str(len(act.eff)))
        out += [f"0 {var} {pre.get(var, -1)} {val}" for var, val in act.eff]
        out += ["1", "end_operator"]
    out.append("0")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------ results

RESULT_COLUMNS = (
    "schema_version",
    "label",
    "seed",
    "m",
    "run",
    "eval_instances",
    "solvable",
    "solved",
    "unsolved_solvable",
    "unsafe_plans",
    "resource_limits",
    "solve_rate",
    "plan_rate",
    "mean_plan_length",
    "empirical_mu",
    "actions_learned",
)
TIMING_COLUMN = "wall_time"
_INT_COLUMNS = {"seed", "m", "run", "eval_instances", "solvable", "solved", "unsolved_solvable",
                "unsafe_plans", "resource_limits", "actions_learned"}


def _cell(value: Any) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def write_results_csv(records: Iterable["ExperimentRecord"], timing: bool = False) -> str:
    """One header row plus one row per record.

    Wall time varies between runs, so it is only written with ``timing=True``;
    without it the output is byte-identical for identical seeds.
    """
    columns = RESULT_COLUMNS + ((TIMING_COLUMN,) if timing else ())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        row = {"schema_version": SCHEMA_VERSION, **{c: getattr(rec, c) for c in columns if c != "schema_version"}}
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def parse_results_csv(text: str) -> list["ExperimentRecord"]:
    from .experiment import ExperimentRecord

    reader = csv.DictReader(io.StringIO(text))
    header = tuple(reader.fieldnames or ())
    if header not in (RESULT_COLUMNS, RESULT_COLUMNS + (TIMING_COLUMN,)):
        raise ParseError(f"unexpected CSV header {header}", line=1)
    records = []
    for lineno, row in enumerate(reader, start=2):
        if row["schema_version"] != str(SCHEMA_VERSION):
            raise ParseError(f"unsupported schema_version {row['schema_version']!r}", line=lineno)
        values: dict[str, Any] = {}
        try:
            for col in header[1:]:
                cell = row[col]
                if col == "label":
                    values[col] = cell
                elif col in _INT_COLUMNS:
                    values[col] = int(cell)
                else:
                    values[col] = None if cell == "" else float(cell)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad cell: {exc}", line=lineno) from None
        for col in ("solve_rate", "plan_rate", "empirical_mu"):
            if values[col] is None:
                values[col] = math.nan
        values.setdefault(TIMING_COLUMN, 0.0)
        records.append(ExperimentRecord(**values))
    return records
