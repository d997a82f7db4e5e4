import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

import Config
from EmipModel import VariableKind
from RationalIO import denominator_lcm
from RationalSimplex import RationalSimplex

logger = logging.getLogger(__name__)


class ResourceExhausted(RuntimeError):
    pass


class SolverInconsistency(RuntimeError):
    pass


@dataclass(frozen=True)
class MilpVariable:
    name: str
    kind: VariableKind
    lower: Optional[Fraction]
    upper: Optional[Fraction]

    @property
    def is_integer(self):
        return self.kind is VariableKind.INTEGER


@dataclass(frozen=True)
class MilpRow:
    """sum(coefficients[v] * v) <= rhs, all numbers integral."""
    name: str
    coefficients: dict
    rhs: Fraction


@dataclass
class MilpModel:
    variables: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    def add_variable(self, name, kind=VariableKind.CONTINUOUS, lower=Fraction(0), upper=None):
        if any(v.name == name for v in self.variables):
            raise ValueError(f"Invalid variable {name!r}: duplicate name")
        lower = None if lower is None else Fraction(lower)
        upper = None if upper is None else Fraction(upper)
        if kind is VariableKind.INTEGER:
            # integer bounds are tightened inward
            lower = None if lower is None else Fraction(math.ceil(lower))
            upper = None if upper is None else Fraction(math.floor(upper))
            self.variables.append(MilpVariable(name, kind, lower, upper))
            return name
        # a fractional continuous bound becomes an integer bound plus an exact row
        exact_lower, exact_upper = lower, upper
        lower = None if lower is None else Fraction(math.floor(lower))
        upper = None if upper is None else Fraction(math.ceil(upper))
        self.variables.append(MilpVariable(name, kind, lower, upper))
        if exact_lower is not None and exact_lower != lower:
            self.add_row({name: -1}, -exact_lower, f"{name}.lb")
        if exact_upper is not None and exact_upper != upper:
            self.add_row({name: 1}, exact_upper, f"{name}.ub")
        return name

    def add_row(self, coefficients, rhs, name=None):
        coefficients = {v: Fraction(a) for v, a in coefficients.items() if a != 0}
        rhs = Fraction(rhs)
        scale = denominator_lcm(list(coefficients.values()) + [rhs])
        row = MilpRow(name if name is not None else f"r{len(self.rows)}",
                      {v: a * scale for v, a in coefficients.items()}, rhs * scale)
        self.rows.append(row)
        return row

    def with_row(self, coefficients, rhs, name):
        extended = MilpModel(list(self.variables), list(self.rows))
        extended.add_row(coefficients, rhs, name)
        return extended

    def variable(self, name):
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def integer_variables(self):
        return [v.name for v in self.variables if v.is_integer]

    def check_assignment(self, assignment):
        problems = []
        for v in self.variables:
            value = assignment.get(v.name)
            if value is None:
                problems.append(f"{v.name}: missing")
                continue
            if v.lower is not None and value < v.lower or v.upper is not None and value > v.upper:
                problems.append(f"{v.name}: value {value} outside [{v.lower}, {v.upper}]")
            if v.is_integer and Fraction(value).denominator != 1:
                problems.append(f"{v.name}: value {value} not integral")
        for row in self.rows:
            lhs = sum((a * assignment.get(v, 0) for v, a in row.coefficients.items()), Fraction(0))
            if lhs > row.rhs:
                problems.append(f"{row.name}: {lhs} > {row.rhs}")
        return problems


class Status(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass
class SolveResult:
    status: Status
    assignment: Optional[dict] = None
    nodes: int = 0
    pivots: int = 0

    @property
    def feasible(self):
        return self.status is Status.FEASIBLE


class MilpSolver:
    """
    Exact feasibility solver for MilpModel: LP relaxations by the rational
    simplex, depth-first branch-and-bound on the most fractional integer
    variable (floor branch first, ties to the lowest column).
    """

    def __init__(self, node_limit=Config.DEFAULT_NODE_LIMIT):
        self.node_limit = node_limit
        self.nodes = 0
        self.pivots = 0

    def solve_feasibility(self, model):
        for v in model.variables:
            if v.is_integer and (v.lower is None or v.upper is None):
                raise ValueError(f"Invalid model: integer variable {v.name} needs finite bounds")
            if not v.is_integer and v.lower is not None and v.upper is not None and v.lower > v.upper:
                return SolveResult(Status.INFEASIBLE)

        names = [v.name for v in model.variables]
        integer = [v.name for v in model.variables if v.is_integer]
        rows = [(row.coefficients, row.rhs) for row in model.rows]
        simplex = RationalSimplex()
        nodes = 0

        stack = [{v.name: (v.lower, v.upper) for v in model.variables}]
        while stack:
            nodes += 1
            if nodes > self.node_limit:
                self._account(nodes, simplex.pivots)
                raise ResourceExhausted(f"node limit {self.node_limit} reached")
            bounds = stack.pop()
            point = simplex.find_point(names, rows, bounds)
            if point is None:
                continue

            branch_on = None
            best_distance = None
            for name in integer:
                value = point[name]
                if value.denominator == 1:
                    continue
                distance = abs(value - math.floor(value) - Fraction(1, 2))
                if best_distance is None or distance < best_distance:
                    branch_on, best_distance = name, distance

            if branch_on is None:
                problems = model.check_assignment(point)
                if problems:
                    raise SolverInconsistency("Feasible point fails verification: " + "; ".join(problems))
                self._account(nodes, simplex.pivots)
                logger.debug(f"feasible after {nodes} nodes, {simplex.pivots} pivots")
                return SolveResult(Status.FEASIBLE, point, nodes, simplex.pivots)

            value = point[branch_on]
            lower, upper = bounds[branch_on]
            up_branch = dict(bounds)
            up_branch[branch_on] = (Fraction(math.ceil(value)), upper)
            down_branch = dict(bounds)
            down_branch[branch_on] = (lower, Fraction(math.floor(value)))
            # the stack pops the floor branch first
            stack.append(up_branch)
            stack.append(down_branch)

        self._account(nodes, simplex.pivots)
        logger.debug(f"infeasible after {nodes} nodes, {simplex.pivots} pivots")
        return SolveResult(Status.INFEASIBLE, None, nodes, simplex.pivots)

    def _account(self, nodes, pivots):
        self.nodes += nodes
        self.pivots += pivots

    def maximize(self, model, objective, t_lo, t_hi):
        """
        Largest T in [t_lo, t_hi] on the grid 1/s with model + {objective >= T}
        feasible, where s clears the objective's denominators. Found by
        binary search over the integer thresholds of s * objective.

        :return: (T, assignment) or None if infeasible already at t_lo
        """
        t_lo, t_hi = Fraction(t_lo), Fraction(t_hi)
        if t_lo > t_hi:
            raise ValueError(f"Invalid bracket [{t_lo}, {t_hi}]")
        scale = denominator_lcm(objective.values())
        objective = {v: Fraction(c) * scale for v, c in objective.items()}
        low, high = math.ceil(t_lo * scale), math.floor(t_hi * scale)
        if low > high:
            return None

        def attempt(threshold):
            constrained = model.with_row({v: -c for v, c in objective.items()}, -threshold, "objective")
            result = self.solve_feasibility(constrained)
            logger.debug(f"threshold {Fraction(threshold, scale)}: {result.status.value}")
            return result.assignment if result.feasible else None

        def value_of(assignment):
            return sum((c * assignment[v] for v, c in objective.items()), Fraction(0))

        best = attempt(low)
        if best is None:
            return None
        low = min(high, math.floor(value_of(best)))
        while low < high:
            middle = (low + high + 1) // 2
            found = attempt(middle)
            if found is None:
                high = middle - 1
            else:
                best = found
                low = min(high, math.floor(value_of(found)))
        logger.info(f"maximum threshold {Fraction(low, scale)}")
        return Fraction(low, scale), best

    def minimize(self, model, objective, t_lo, t_hi):
        """Smallest T in [t_lo, t_hi], on the same grid as maximize, with objective <= T feasible."""
        found = self.maximize(model, {v: -Fraction(c) for v, c in objective.items()}, -Fraction(t_hi), -Fraction(t_lo))
        if found is None:
            return None
        threshold, assignment = found
        return -threshold, assignment


def solve_feasibility(model, node_limit=Config.DEFAULT_NODE_LIMIT):
    return MilpSolver(node_limit).solve_feasibility(model)


def maximize(model, objective, t_lo, t_hi, node_limit=Config.DEFAULT_NODE_LIMIT):
    return MilpSolver(node_limit).maximize(model, objective, t_lo, t_hi)
