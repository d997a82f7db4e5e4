"""
Model for mixed integer programs whose constraints have the form

    sum_i f_ij(x_i) <= sum_i g_ij(x_i) + b_j

with f_ij piecewise linear convex and g_ij piecewise linear concave.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from PwlFunction import PwlFunction, Shape
from RationalIO import SchemaError, format_rational, parse_rational

logger = logging.getLogger(__name__)

SCHEMA = "emip-v1"


class InvalidModel(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("Invalid model: " + "; ".join(self.violations))


class VariableKind(Enum):
    INTEGER = "integer"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VariableKind = VariableKind.INTEGER
    lower: Fraction = Fraction(0)
    upper: Optional[Fraction] = None

    @property
    def is_integer(self):
        return self.kind is VariableKind.INTEGER


@dataclass
class EmipConstraint:
    """lhs_terms and rhs_terms map a variable name to its transformation; an absent variable contributes zero."""
    lhs_terms: dict
    rhs_terms: dict
    b: Fraction
    name: str = ""

    def variables(self):
        return list(dict.fromkeys(list(self.lhs_terms) + list(self.rhs_terms)))

    def slack(self, assignment):
        """b + sum g(x) - sum f(x); the constraint holds iff this is >= 0."""
        lhs = sum((f.eval(assignment[v]) for v, f in self.lhs_terms.items()), Fraction(0))
        rhs = sum((g.eval(assignment[v]) for v, g in self.rhs_terms.items()), Fraction(0))
        return rhs + self.b - lhs


@dataclass
class Objective:
    coefficients: dict
    sense: str = "max"
    bracket: Optional[tuple] = None


@dataclass
class EmipModel:
    variables: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    objective: Optional[Objective] = None
    # original name -> (positive part, negative part) for variables split by normalize
    splits: dict = field(default_factory=dict)

    # builder helpers

    def add_variable(self, name, kind=VariableKind.INTEGER, lower=0, upper=None):
        if any(v.name == name for v in self.variables):
            raise ValueError(f"Invalid variable {name!r}: duplicate name")
        variable = Variable(name, kind, Fraction(lower), None if upper is None else Fraction(upper))
        self.variables.append(variable)
        return variable

    def add_constraint(self, lhs_terms=None, rhs_terms=None, b=0, name=None):
        """Add sum f(x) <= sum g(x) + b; a plain number as a term means a linear term with that slope."""
        constraint = EmipConstraint(_as_functions(lhs_terms or {}, Shape.CONVEX),
                                    _as_functions(rhs_terms or {}, Shape.CONCAVE),
                                    Fraction(b),
                                    name if name is not None else self.unused_constraint_name())
        self.constraints.append(constraint)
        return constraint

    def unused_constraint_name(self, reserved=()):
        """First free name c<k>, k counting up from the number of constraints."""
        taken = {c.name for c in self.constraints} | set(reserved)
        k = len(self.constraints)
        while f"c{k}" in taken:
            k += 1
        return f"c{k}"

    def add_ge_constraint(self, greater_terms=None, lesser_terms=None, b=0, name=None):
        """Add sum g(x) >= sum f(x) + b by swapping sides: sum f(x) <= sum g(x) - b."""
        return self.add_constraint(lesser_terms, greater_terms, -Fraction(b), name)

    def set_objective(self, coefficients, sense="max", bracket=None):
        if sense not in ("max", "min"):
            raise ValueError(f"Invalid objective sense {sense!r}")
        self.objective = Objective({v: Fraction(c) for v, c in coefficients.items()}, sense,
                                   None if bracket is None else (Fraction(bracket[0]), Fraction(bracket[1])))

    def variable(self, name):
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def variable_map(self):
        return {v.name: v for v in self.variables}

    def transformed_variables(self):
        """Names of variables that carry a non-linear function in some constraint."""
        names = set()
        for constraint in self.constraints:
            for terms in (constraint.lhs_terms, constraint.rhs_terms):
                names.update(v for v, f in terms.items() if not f.is_linear)
        return names

    # evaluation

    def violated_constraints(self, assignment):
        problems = []
        for v in self.variables:
            if v.name not in assignment:
                problems.append(f"variable {v.name}: missing from assignment")
                continue
            value = Fraction(assignment[v.name])
            if value < v.lower or (v.upper is not None and value > v.upper):
                problems.append(f"variable {v.name}: value {value} outside bounds")
            if v.is_integer and value.denominator != 1:
                problems.append(f"variable {v.name}: value {value} is not integral")
        if problems:
            return problems
        for constraint in self.constraints:
            slack = constraint.slack(assignment)
            if slack < 0:
                problems.append(f"constraint {constraint.name}: violated by {-slack}")
        return problems

    def is_feasible(self, assignment):
        return not self.violated_constraints(assignment)

    def objective_value(self, assignment):
        if self.objective is None:
            return Fraction(0)
        return sum((c * Fraction(assignment[v]) for v, c in self.objective.coefficients.items()), Fraction(0))

    def restore_assignment(self, assignment):
        """Recombine split variables x = x_pos - x_neg and drop the parts."""
        restored = dict(assignment)
        for original, (positive, negative) in self.splits.items():
            restored[original] = Fraction(restored.pop(positive)) - Fraction(restored.pop(negative))
        return restored

    def objective_bracket(self):
        """Bracket [lo, hi] for the objective, explicit or derived from variable bounds."""
        if self.objective is None:
            return Fraction(0), Fraction(0)
        if self.objective.bracket is not None:
            return self.objective.bracket
        variables = self.variable_map()
        lo = hi = Fraction(0)
        for name, c in self.objective.coefficients.items():
            v = variables[name]
            if v.upper is None:
                raise ValueError(f"Invalid objective: variable {name} is unbounded, give an explicit bracket")
            ends = (c * v.lower, c * v.upper)
            lo += min(ends)
            hi += max(ends)
        return lo, hi

    # serialization

    def to_json(self):
        document = {
            "schema": SCHEMA,
            "variables": [_variable_to_json(v) for v in self.variables],
            "constraints": [
                {
                    "name": c.name,
                    "lhs": {v: f.to_json() for v, f in c.lhs_terms.items()},
                    "rhs": {v: g.to_json() for v, g in c.rhs_terms.items()},
                    "b": format_rational(c.b),
                }
                for c in self.constraints
            ],
        }
        if self.objective is not None:
            objective = {
                "sense": self.objective.sense,
                "coefficients": {v: format_rational(c) for v, c in self.objective.coefficients.items()},
            }
            if self.objective.bracket is not None:
                objective["bracket"] = [format_rational(t) for t in self.objective.bracket]
            document["objective"] = objective
        return document

    @classmethod
    def from_json(cls, document, source="<model>"):
        model = cls()
        for k, entry in enumerate(document.get("variables", [])):
            where = f"variables[{k}]"
            if not isinstance(entry, dict) or "name" not in entry:
                raise SchemaError(f"Invalid variable at {where}: expected an object with a name", source=source)
            try:
                kind = VariableKind(entry.get("kind", "integer"))
            except ValueError:
                raise SchemaError(f"Invalid kind at {where}: {entry.get('kind')!r}", source=source)
            upper = entry.get("upper")
            try:
                model.add_variable(str(entry["name"]), kind,
                                   parse_rational(entry.get("lower", 0), f"{where}.lower"),
                                   None if upper is None else parse_rational(upper, f"{where}.upper"))
            except ValueError as e:
                raise SchemaError(str(e), source=source)
        explicit = {str(entry["name"]) for entry in document.get("constraints", [])
                    if isinstance(entry, dict) and entry.get("name") is not None}
        for k, entry in enumerate(document.get("constraints", [])):
            where = f"constraints[{k}]"
            if not isinstance(entry, dict):
                raise SchemaError(f"Invalid constraint at {where}: expected an object", source=source)
            lhs = {v: _term_from_json(t, f"{where}.lhs.{v}", Shape.CONVEX) for v, t in entry.get("lhs", {}).items()}
            rhs = {v: _term_from_json(t, f"{where}.rhs.{v}", Shape.CONCAVE) for v, t in entry.get("rhs", {}).items()}
            name = entry.get("name")
            model.add_constraint(lhs, rhs, parse_rational(entry.get("b", 0), f"{where}.b"),
                                 model.unused_constraint_name(explicit) if name is None else str(name))
        objective = document.get("objective")
        if objective is not None:
            coefficients = {v: parse_rational(c, f"objective.coefficients.{v}")
                            for v, c in objective.get("coefficients", {}).items()}
            bracket = objective.get("bracket")
            if bracket is not None:
                if not isinstance(bracket, list) or len(bracket) != 2:
                    raise SchemaError("Invalid objective.bracket: expected [lo, hi]", source=source)
                bracket = [parse_rational(t, "objective.bracket") for t in bracket]
            try:
                model.set_objective(coefficients, objective.get("sense", "max"), bracket)
            except ValueError as e:
                raise SchemaError(str(e), source=source)
        return model

    def check(self):
        violations = validate(self)
        if violations:
            raise InvalidModel(violations)
        return self


def _as_functions(terms, shape):
    functions = {}
    for name, term in terms.items():
        functions[name] = term if isinstance(term, PwlFunction) else PwlFunction.linear(Fraction(term), 0, shape)
    return functions


def _term_from_json(term, where, shape):
    if isinstance(term, dict):
        return PwlFunction.from_json(term, where)
    return PwlFunction.linear(parse_rational(term, where), 0, shape)


def _variable_to_json(v):
    entry = {"name": v.name, "kind": v.kind.value, "lower": format_rational(v.lower)}
    if v.upper is not None:
        entry["upper"] = format_rational(v.upper)
    return entry


def validate(model):
    """Return the list of violated model rules; empty iff the model is well formed."""
    violations = []
    variables = {}
    for v in model.variables:
        if v.name in variables:
            violations.append(f"variable {v.name}: duplicate name")
        variables[v.name] = v
        if v.upper is not None and v.lower > v.upper:
            violations.append(f"variable {v.name}: lower bound {v.lower} exceeds upper bound {v.upper}")

    names = set()
    for constraint in model.constraints:
        if constraint.name in names:
            violations.append(f"constraint {constraint.name}: duplicate name")
        names.add(constraint.name)

    for constraint in model.constraints:
        for name, f in constraint.lhs_terms.items():
            if name not in variables:
                violations.append(f"constraint {constraint.name}: unknown variable {name}")
            if not f.is_linear and f.shape is not Shape.CONVEX:
                violations.append(f"constraint {constraint.name}: lhs requires convex function for {name}")
        for name, g in constraint.rhs_terms.items():
            if name not in variables:
                violations.append(f"constraint {constraint.name}: unknown variable {name}")
            if not g.is_linear and g.shape is not Shape.CONCAVE:
                violations.append(f"constraint {constraint.name}: rhs requires concave function for {name}")

    for name in sorted(model.transformed_variables()):
        v = variables.get(name)
        if v is not None and v.is_integer and v.lower < 0:
            violations.append(f"variable {name}: transformed integer variable needs lower bound >= 0, got {v.lower}")

    if model.objective is not None:
        for name in model.objective.coefficients:
            if name not in variables:
                violations.append(f"objective: unknown variable {name}")
        if model.objective.bracket is not None and model.objective.bracket[0] > model.objective.bracket[1]:
            violations.append("objective: bracket lower end exceeds upper end")
    return violations


def is_normalized(model):
    variables = model.variable_map()
    for constraint in model.constraints:
        for terms in (constraint.lhs_terms, constraint.rhs_terms):
            for name, f in terms.items():
                if f.eval(0) != 0:
                    return False
                lower = variables[name].lower
                if lower >= 0 and f.breakpoints and f.breakpoints[0] <= lower:
                    return False
    return True


def normalize(model):
    """
    Equivalent model in canonical form: every transformation has f(0) = 0 and
    its zeroth piece reaches the variable's lower bound, constants live in b,
    each variable has at most one linear term per constraint, and variables
    used only linearly with a negative lower bound are split into
    nonnegative parts.
    """
    variables = model.variable_map()
    constraints = []
    for constraint in model.constraints:
        b = constraint.b
        lhs, rhs = {}, {}
        for name, f in constraint.lhs_terms.items():
            f = _canonical_piece(f, variables[name].lower)
            shift = f.eval(0)
            lhs[name] = f.shifted(-shift)
            b -= shift
        for name, g in constraint.rhs_terms.items():
            g = _canonical_piece(g, variables[name].lower)
            shift = g.eval(0)
            rhs[name] = g.shifted(-shift)
            b += shift

        # fold linear parts so a variable keeps one linear term at most
        for name in list(rhs):
            g = rhs[name]
            if name in lhs and g.is_linear:
                lhs[name] = lhs[name].plus_linear(-g.slopes[0])
                del rhs[name]
            elif name in lhs and lhs[name].is_linear:
                rhs[name] = g.plus_linear(-lhs[name].slopes[0])
                del lhs[name]
        lhs = {v: f for v, f in lhs.items() if not (f.is_linear and f.slopes[0] == 0)}
        rhs = {v: g for v, g in rhs.items() if not (g.is_linear and g.slopes[0] == 0)}
        constraints.append(EmipConstraint(lhs, rhs, b, constraint.name))

    normalized = EmipModel(list(model.variables), constraints,
                           None if model.objective is None else Objective(dict(model.objective.coefficients),
                                                                          model.objective.sense,
                                                                          model.objective.bracket),
                           dict(model.splits))
    _split_negative_linear_variables(normalized)
    logger.debug(f"normalized model: {len(normalized.variables)} variables, {len(normalized.constraints)} constraints")
    return normalized


def _canonical_piece(f, lower):
    if f.is_linear or lower < 0:
        return f
    return f.restricted_from(lower)


def _split_negative_linear_variables(model):
    transformed = model.transformed_variables()
    taken = {v.name for v in model.variables}
    variables = []
    for v in model.variables:
        if v.lower >= 0 or v.name in transformed:
            variables.append(v)
            continue
        positive, negative = _fresh_name(f"{v.name}_pos", taken), _fresh_name(f"{v.name}_neg", taken)
        upper = v.upper
        # x in [L, U] with L < 0: x_pos in [0, max(U,0)], x_neg in [max(-U,0), -L]
        variables.append(Variable(positive, v.kind, Fraction(0), None if upper is None else max(upper, Fraction(0))))
        variables.append(Variable(negative, v.kind, Fraction(0) if upper is None else max(-upper, Fraction(0)),
                                  -v.lower))
        model.splits[v.name] = (positive, negative)
        for constraint in model.constraints:
            for terms in (constraint.lhs_terms, constraint.rhs_terms):
                if v.name in terms:
                    f = terms.pop(v.name)
                    terms[positive] = f
                    terms[negative] = PwlFunction.linear(-f.slopes[0], 0, f.shape)
        if model.objective is not None and v.name in model.objective.coefficients:
            c = model.objective.coefficients.pop(v.name)
            model.objective.coefficients[positive] = c
            model.objective.coefficients[negative] = -c
        logger.debug(f"split {v.name} into {positive} - {negative}")
    model.variables = variables


def _fresh_name(base, taken):
    name, k = base, 1
    while name in taken:
        name, k = f"{base}{k}", k + 1
    taken.add(name)
    return name
