import itertools
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import Bounds, LinearConstraint, milp

from EmipModel import VariableKind
from MilpSolver import MilpModel, MilpSolver, ResourceExhausted, Status, maximize, solve_feasibility


def integer_model(bounds, rows):
    model = MilpModel()
    for k, (lower, upper) in enumerate(bounds):
        model.add_variable(f"x{k}", VariableKind.INTEGER, lower, upper)
    for coefficients, rhs in rows:
        model.add_row({f"x{k}": a for k, a in enumerate(coefficients)}, rhs)
    return model


def random_rows(rng, n, count):
    return [([int(a) for a in rng.integers(-3, 4, size=n)], int(rng.integers(-5, 11))) for _ in range(count)]


def test_feasible_interval():
    model = integer_model([(0, 10)], [([1], 3), ([-1], -1)])
    result = solve_feasibility(model)
    assert result.status is Status.FEASIBLE
    assert result.assignment["x0"] in (1, 2, 3)


def test_contradictory_rows():
    model = integer_model([(0, 10)], [([1], 0), ([-1], -1)])
    assert solve_feasibility(model).status is Status.INFEASIBLE


def test_half_integral_point_needs_branching():
    model = integer_model([(0, 1)], [([2], 1), ([-2], -1)])
    result = MilpSolver().solve_feasibility(model)
    assert not result.feasible
    assert result.nodes == 3
    with pytest.raises(ResourceExhausted):
        MilpSolver(node_limit=1).solve_feasibility(model)


def test_unbounded_integer_is_rejected():
    model = MilpModel()
    model.add_variable("x", VariableKind.INTEGER, 0, None)
    with pytest.raises(ValueError, match="finite bounds"):
        MilpSolver().solve_feasibility(model)


def test_add_row_clears_denominators():
    model = MilpModel()
    model.add_variable("x", VariableKind.CONTINUOUS)
    model.add_variable("y", VariableKind.CONTINUOUS)
    row = model.add_row({"x": Fraction(1, 2), "y": Fraction(1, 3), "z": 0}, 1, "mixed")
    assert row.coefficients == {"x": 3, "y": 2}
    assert row.rhs == 6


def test_fractional_bounds():
    model = MilpModel()
    model.add_variable("n", VariableKind.INTEGER, Fraction(1, 2), Fraction(7, 2))
    model.add_variable("y", VariableKind.CONTINUOUS, 0, Fraction(5, 2))
    assert (model.variable("n").lower, model.variable("n").upper) == (1, 3)
    assert model.variable("y").upper == 3
    assert model.rows[-1].name == "y.ub"
    assert (model.rows[-1].coefficients, model.rows[-1].rhs) == ({"y": 2}, 5)


def test_grid_oracle():
    rng = np.random.default_rng(7)
    for _ in range(500):
        bounds = [(0, int(rng.integers(0, 9))) for _ in range(2)]
        rows = random_rows(rng, 2, 3)
        model = integer_model(bounds, rows)
        expected = any(
            all(sum(a * x for a, x in zip(coefficients, point)) <= rhs for coefficients, rhs in rows)
            for point in itertools.product(*(range(lower, upper + 1) for lower, upper in bounds)))
        result = solve_feasibility(model)
        assert result.feasible == expected
        if result.feasible:
            assert model.check_assignment(result.assignment) == []


def test_maximize():
    model = integer_model([(0, 10)], [([1], 5)])
    value, assignment = maximize(model, {"x0": 1}, 0, 10)
    assert value == 5
    assert assignment["x0"] == 5


def test_maximize_infeasible():
    model = integer_model([(0, 10)], [([1], 0), ([-1], -1)])
    assert maximize(model, {"x0": 1}, 0, 10) is None


def test_minimize():
    model = integer_model([(0, 4), (0, 4)], [([-1, -1], -3)])
    value, assignment = MilpSolver().minimize(model, {"x0": 2, "x1": 3}, 0, 20)
    assert value == 6
    assert assignment == {"x0": 3, "x1": 0}


def test_maximize_fractional_objective():
    model = integer_model([(0, 5)], [])
    value, assignment = maximize(model, {"x0": Fraction(1, 2)}, 0, Fraction(5, 2))
    assert value == Fraction(5, 2)
    assert assignment["x0"] == 5

    model = integer_model([(0, 5), (0, 5)], [([1, 1], 4)])
    value, assignment = MilpSolver().minimize(model, {"x0": Fraction(-1, 3), "x1": Fraction(-1, 2)}, -5, 0)
    assert value == -2
    assert assignment == {"x0": 0, "x1": 4}


def test_maximum_threshold_is_tight():
    rng = np.random.default_rng(13)
    for _ in range(60):
        rows = random_rows(rng, 2, 3)
        model = integer_model([(0, 6), (0, 6)], rows)
        objective = {v: Fraction(int(rng.choice([-3, -2, -1, 1, 2, 3])), int(rng.integers(1, 4)))
                     for v in ("x0", "x1")}
        lo = sum(min(0, 6 * c) for c in objective.values())
        hi = sum(max(0, 6 * c) for c in objective.values())
        found = maximize(model, objective, lo, hi)
        if found is None:
            assert not solve_feasibility(model).feasible
            continue
        value, assignment = found
        assert model.check_assignment(assignment) == []
        assert sum(c * assignment[v] for v, c in objective.items()) >= value
        best = max(sum(c * x for c, x in zip(objective.values(), point))
                   for point in itertools.product(range(7), repeat=2)
                   if all(a * point[0] + b * point[1] <= rhs for (a, b), rhs in rows))
        assert value == best
        negated = {v: -c for v, c in objective.items()}
        assert solve_feasibility(model.with_row(negated, -value, "at")).feasible
        step = Fraction(1, max(c.denominator for c in objective.values()) * 6)
        assert not solve_feasibility(model.with_row(negated, -(value + step), "above")).feasible


def test_invalid_bracket():
    model = integer_model([(0, 1)], [])
    with pytest.raises(ValueError, match="bracket"):
        maximize(model, {"x0": 1}, 2, 1)


def test_against_scipy():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = 3
        rows = random_rows(rng, n, 3)
        objective = [int(c) for c in rng.integers(-3, 4, size=n)]
        model = integer_model([(0, 5)] * n, rows)
        lo = sum(min(0, 5 * c) for c in objective)
        hi = sum(max(0, 5 * c) for c in objective)
        found = maximize(model, {f"x{k}": c for k, c in enumerate(objective)}, lo, hi)

        reference = milp(c=-np.array(objective, dtype=float),
                         constraints=LinearConstraint(np.array([r for r, _ in rows], dtype=float),
                                                      -np.inf, np.array([b for _, b in rows], dtype=float)),
                         integrality=np.ones(n), bounds=Bounds(0, 5))
        if reference.status == 2:
            assert found is None
        else:
            assert reference.status == 0
            assert found[0] == round(-reference.fun)


def test_solver_is_deterministic():
    rng = np.random.default_rng(3)
    model = integer_model([(0, 8)] * 3, random_rows(rng, 3, 4))
    first, second = MilpSolver(), MilpSolver()
    a = first.solve_feasibility(model)
    b = second.solve_feasibility(model)
    assert a.assignment == b.assignment
    assert (first.nodes, first.pivots) == (second.nodes, second.pivots)
