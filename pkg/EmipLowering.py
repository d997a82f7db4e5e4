"""
Lowering of a normalized EmipModel to a MilpModel. Every convex term f(x) on
a left-hand side is replaced by a continuous w with

    z_l >= 0,  z_l >= x - rho(f,l),
    x*der(f,0) + sum_l z_l*(der(f,l) - der(f,l-1)) <= w

and every concave term g(x) on a right-hand side by a continuous u with

    y_l >= 0,  y_l >= x - rho(g,l),
    u <= x*der(g,0) + sum_l y_l*(der(g,l) - der(g,l-1)).

Linear terms stay on the main row. No integer variable is added.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import Config
from EmipModel import EmipModel, VariableKind, is_normalized, normalize, validate, InvalidModel
from MilpSolver import MilpModel, MilpSolver

logger = logging.getLogger(__name__)


class NotNormalized(ValueError):
    pass


class UnboundedIntegerVariable(ValueError):
    pass


class WitnessError(RuntimeError):
    pass


@dataclass(frozen=True)
class TermAuxiliaries:
    """Auxiliaries of one transformed term: w (or u) plus one z (or y) per breakpoint."""
    variable: str
    value: str
    breakpoint_variables: tuple
    function: object
    convex: bool


@dataclass
class LoweringMap:
    model: EmipModel
    # (constraint index, variable) -> TermAuxiliaries
    convex_terms: dict = field(default_factory=dict)
    concave_terms: dict = field(default_factory=dict)
    # constraint index -> name of its main row
    main_rows: dict = field(default_factory=dict)
    main_coefficients: dict = field(default_factory=dict)

    @property
    def original_variables(self):
        return [v.name for v in self.model.variables]

    def auxiliary_variables(self):
        names = []
        for term in list(self.convex_terms.values()) + list(self.concave_terms.values()):
            names.append(term.value)
            names.extend(term.breakpoint_variables)
        return names

    def is_empty(self):
        return not self.convex_terms and not self.concave_terms

    def load_expression(self, constraint_name):
        """Coefficients of the lowered lhs - rhs of a constraint, e.g. the cost of a budget row."""
        for j, constraint in enumerate(self.model.constraints):
            if constraint.name == constraint_name:
                return dict(self.main_coefficients[j])
        raise KeyError(constraint_name)


def _outward(bounds):
    lower, upper = bounds
    return Fraction(math.floor(lower)), Fraction(math.ceil(upper))


def lower(model):
    """Lower a normalized model; returns (MilpModel, LoweringMap)."""
    if not is_normalized(model):
        raise NotNormalized("Invalid input for lowering: model is not normalized")
    violations = validate(model)
    if violations:
        raise InvalidModel(violations)

    variables = model.variable_map()
    transformed = model.transformed_variables()
    milp = MilpModel()
    mapping = LoweringMap(model)
    for v in model.variables:
        if v.is_integer and v.name in transformed and v.upper is None:
            raise UnboundedIntegerVariable(f"Invalid model: transformed integer variable {v.name} needs an upper bound")
        milp.add_variable(v.name, v.kind, v.lower, v.upper)

    for j, constraint in enumerate(model.constraints):
        main = {}

        def add(name, coefficient):
            main[name] = main.get(name, Fraction(0)) + coefficient

        for name, f in constraint.lhs_terms.items():
            if f.is_linear:
                add(name, f.slopes[0])
                continue
            term = _lower_term(milp, constraint.name, name, variables[name], f, convex=True)
            mapping.convex_terms[(j, name)] = term
            add(term.value, Fraction(1))
        for name, g in constraint.rhs_terms.items():
            if g.is_linear:
                add(name, -g.slopes[0])
                continue
            term = _lower_term(milp, constraint.name, name, variables[name], g, convex=False)
            mapping.concave_terms[(j, name)] = term
            add(term.value, Fraction(-1))

        main = {v: a for v, a in main.items() if a != 0}
        milp.add_row(main, constraint.b, constraint.name)
        mapping.main_rows[j] = constraint.name
        mapping.main_coefficients[j] = main

    logger.info(f"lowered {len(model.constraints)} constraints: {len(milp.variables)} variables "
                f"({len(milp.integer_variables())} integer), {len(milp.rows)} rows")
    return milp, mapping


def _lower_term(milp, constraint_name, name, variable, f, convex):
    prefix = "w" if convex else "u"
    step_prefix = "z" if convex else "y"
    value = f"{prefix}.{constraint_name}.{name}"
    if variable.upper is not None:
        value_bounds = _outward(f.extremes_on(variable.lower, variable.upper))
    else:
        value_bounds = (None, None)
    milp.add_variable(value, VariableKind.CONTINUOUS, *value_bounds)

    linkage = {name: f.slopes[0]}
    steps = []
    for k, (rho, step) in enumerate(f.slope_steps(), start=1):
        step_name = f"{step_prefix}.{constraint_name}.{name}.{k}"
        upper = None
        if variable.upper is not None:
            upper = Fraction(math.ceil(max(Fraction(0), variable.upper - rho)))
        milp.add_variable(step_name, VariableKind.CONTINUOUS, Fraction(0), upper)
        # z >= x - rho
        milp.add_row({name: 1, step_name: -1}, rho, f"{step_name}.lb")
        linkage[step_name] = linkage.get(step_name, Fraction(0)) + step
        steps.append(step_name)

    if convex:
        # f(0) + x*der0 + sum z*step <= w
        milp.add_row({**linkage, value: -1}, -f.value_at_zero, f"{value}.link")
    else:
        # u <= g(0) + x*der0 + sum y*step
        milp.add_row({**{v: -a for v, a in linkage.items()}, value: 1}, f.value_at_zero, f"{value}.link")
    return TermAuxiliaries(name, value, tuple(steps), f, convex)


def witness_lift(mapping, milp_assignment):
    """Restrict a lowered solution to the model's own variables and re-check it by direct evaluation."""
    try:
        assignment = {name: Fraction(milp_assignment[name]) for name in mapping.original_variables}
    except KeyError as e:
        raise WitnessError(f"lowered solution lacks variable {e.args[0]}")
    problems = mapping.model.violated_constraints(assignment)
    if problems:
        raise WitnessError("lifted assignment is not feasible: " + "; ".join(problems))
    return assignment


def witness_embed(mapping, assignment):
    """Extend a feasible model assignment to all auxiliaries: w = f(x), u = g(x), z, y = max(0, x - rho)."""
    embedded = {name: Fraction(assignment[name]) for name in mapping.original_variables}
    for term in list(mapping.convex_terms.values()) + list(mapping.concave_terms.values()):
        x = embedded[term.variable]
        embedded[term.value] = term.function.eval(x)
        for step_name, rho in zip(term.breakpoint_variables, term.function.breakpoints):
            embedded[step_name] = max(Fraction(0), x - rho)
    return embedded


@dataclass
class EmipSolution:
    feasible: bool
    assignment: Optional[dict] = None
    objective_value: Optional[Fraction] = None
    nodes: int = 0
    pivots: int = 0
    lowered: Optional[MilpModel] = None
    mapping: Optional[LoweringMap] = None


def solve_emip(model, solver=None, minimize_load_of=None, load_bracket=None):
    """
    Decide the model, and optimize when asked: the model's own linear
    objective, or (minimize_load_of) the integral lhs - rhs load of one
    constraint within load_bracket, e.g. the cost side of a budget row.
    """
    solver = solver or MilpSolver(Config.DEFAULT_NODE_LIMIT)
    model.check()
    normalized = normalize(model)
    milp, mapping = lower(normalized)

    objective_value = None
    if minimize_load_of is not None:
        load = mapping.load_expression(minimize_load_of)
        lo, hi = load_bracket
        found = solver.minimize(milp, load, lo, hi)
        if found is None:
            return EmipSolution(False, nodes=solver.nodes, pivots=solver.pivots, lowered=milp, mapping=mapping)
        objective_value, milp_assignment = found
    elif normalized.objective is not None and normalized.objective.coefficients:
        lo, hi = model.objective_bracket()
        coefficients = normalized.objective.coefficients
        if normalized.objective.sense == "max":
            found = solver.maximize(milp, coefficients, lo, hi)
        else:
            found = solver.minimize(milp, coefficients, lo, hi)
        if found is None:
            return EmipSolution(False, nodes=solver.nodes, pivots=solver.pivots, lowered=milp, mapping=mapping)
        objective_value, milp_assignment = found
    else:
        result = solver.solve_feasibility(milp)
        if not result.feasible:
            return EmipSolution(False, nodes=solver.nodes, pivots=solver.pivots, lowered=milp, mapping=mapping)
        milp_assignment = result.assignment

    lifted = witness_lift(mapping, milp_assignment)
    assignment = normalized.restore_assignment(lifted)
    problems = model.violated_constraints(assignment)
    if problems:
        raise WitnessError("restored assignment is not feasible: " + "; ".join(problems))
    if objective_value is not None and minimize_load_of is None:
        objective_value = model.objective_value(assignment)
    return EmipSolution(True, assignment, objective_value, solver.nodes, solver.pivots, milp, mapping)
