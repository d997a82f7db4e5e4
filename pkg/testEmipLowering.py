from fractions import Fraction

import pytest
from hypothesis import given

from conftest import grid_feasible, grid_points, small_emip_models
from EmipLowering import NotNormalized, UnboundedIntegerVariable, WitnessError, lower, solve_emip, witness_embed, witness_lift
from EmipModel import EmipModel, VariableKind, normalize
from MilpSolver import MilpSolver
from PwlFunction import PwlFunction, Shape

TWO_PIECES = PwlFunction(Shape.CONVEX, 0, (2,), (1, 3))


def single_term_model(b=4):
    model = EmipModel()
    model.add_variable("x", upper=6)
    model.add_constraint({"x": TWO_PIECES}, {}, b)
    return model


def test_lower_single_convex_term():
    milp, mapping = lower(single_term_model())
    assert [v.name for v in milp.variables] == ["x", "w.c0.x", "z.c0.x.1"]
    assert milp.integer_variables() == ["x"]
    assert [row.name for row in milp.rows] == ["z.c0.x.1.lb", "w.c0.x.link", "c0"]
    z = milp.variable("z.c0.x.1")
    assert (z.lower, z.upper) == (0, 4)
    w = milp.variable("w.c0.x")
    assert (w.lower, w.upper) == (0, 14)
    assert mapping.auxiliary_variables() == ["w.c0.x", "z.c0.x.1"]
    assert mapping.load_expression("c0") == {"w.c0.x": 1}


def test_lower_linear_model_is_unchanged():
    model = EmipModel()
    model.add_variable("x", upper=6)
    model.add_variable("y", upper=6)
    model.add_constraint({"x": 2}, {"y": 1}, 3)
    milp, mapping = lower(normalize(model))
    assert mapping.is_empty()
    assert [v.name for v in milp.variables] == ["x", "y"]
    assert len(milp.rows) == 1
    assert milp.rows[0].coefficients == {"x": 2, "y": -1}
    assert milp.rows[0].rhs == 3


def test_lower_keeps_integer_count():
    model = EmipModel()
    model.add_variable("x", upper=6)
    model.add_variable("t", VariableKind.CONTINUOUS, upper=Fraction(7, 2))
    model.add_constraint({"x": TWO_PIECES}, {"t": PwlFunction(Shape.CONCAVE, 0, (1,), (2, 1))}, 1)
    milp, _ = lower(normalize(model))
    assert milp.integer_variables() == ["x"]


def test_lower_rejects_unnormalized_model():
    model = EmipModel()
    model.add_variable("x", upper=6)
    model.add_constraint({"x": TWO_PIECES.shifted(1)}, {}, 4)
    with pytest.raises(NotNormalized):
        lower(model)


def test_lower_rejects_unbounded_transformed_integer():
    model = EmipModel()
    model.add_variable("x")
    model.add_constraint({"x": TWO_PIECES}, {}, 4)
    with pytest.raises(UnboundedIntegerVariable):
        lower(model)


def test_witness_embed_by_formula():
    milp, mapping = lower(single_term_model(b=10))
    embedded = witness_embed(mapping, {"x": 3})
    assert embedded["w.c0.x"] == 5
    assert embedded["z.c0.x.1"] == 1
    assert milp.check_assignment(embedded) == []

    zero = witness_embed(mapping, {"x": 0})
    assert all(value == 0 for value in zero.values())


def test_witness_lift():
    _, mapping = lower(single_term_model())
    assert witness_lift(mapping, {"x": 2, "w.c0.x": 2, "z.c0.x.1": 0}) == {"x": 2}
    with pytest.raises(WitnessError, match="not feasible"):
        witness_lift(mapping, {"x": 3, "w.c0.x": 5, "z.c0.x.1": 1})
    with pytest.raises(WitnessError, match="lacks variable x"):
        witness_lift(mapping, {})

    _, empty = lower(EmipModel())
    assert witness_lift(empty, {}) == {}


@given(model=small_emip_models())
def test_solve_matches_grid(model):
    solution = solve_emip(model)
    assert solution.feasible == grid_feasible(model)
    if solution.feasible:
        assert model.is_feasible(solution.assignment)


@given(model=small_emip_models())
def test_embedded_points_satisfy_lowered_rows(model):
    normalized = normalize(model)
    milp, mapping = lower(normalized)
    for point in grid_points(model):
        if model.is_feasible(point):
            assert milp.check_assignment(witness_embed(mapping, point)) == []


def test_solve_empty_model():
    solution = solve_emip(EmipModel())
    assert solution.feasible
    assert solution.assignment == {}


def test_solve_maximize_objective():
    model = EmipModel()
    model.add_variable("x", upper=6)
    model.add_variable("y", VariableKind.CONTINUOUS, upper=Fraction(5, 2))
    model.add_constraint({"x": TWO_PIECES}, {"y": PwlFunction(Shape.CONCAVE, 0, (1,), (2, Fraction(1, 2)))}, 1)
    model.set_objective({"x": 1})
    solution = solve_emip(model)
    assert solution.feasible
    assert solution.objective_value == 2
    assert solution.assignment["x"] == 2


def test_solve_minimize_objective():
    model = EmipModel()
    model.add_variable("x", upper=5)
    model.add_variable("y", upper=5)
    model.add_ge_constraint({"x": 1, "y": 1}, {}, 4)
    model.set_objective({"x": 1, "y": 2}, "min")
    solution = solve_emip(model)
    assert solution.objective_value == 4
    assert solution.assignment == {"x": 4, "y": 0}


def test_solve_with_split_variable():
    model = EmipModel()
    model.add_variable("x", lower=-5, upper=5)
    model.add_ge_constraint({"x": 1}, {}, -3)
    model.set_objective({"x": 1}, "min")
    solution = solve_emip(model)
    assert solution.assignment == {"x": -3}
    assert solution.objective_value == -3


def test_solve_minimize_load():
    model = EmipModel()
    model.add_variable("x", upper=6)
    model.add_ge_constraint({"x": 1}, {}, 3, name="need")
    model.add_constraint({"x": TWO_PIECES}, {}, 20, name="cost")
    solution = solve_emip(model, MilpSolver(), minimize_load_of="cost", load_bracket=(0, 20))
    assert solution.objective_value == 5
    assert solution.assignment == {"x": 3}


def test_solve_infeasible():
    solution = solve_emip(single_term_model(b=-1))
    assert not solution.feasible
    assert solution.assignment is None


def test_auxiliaries_of_unnamed_and_named_constraints_stay_apart():
    model = EmipModel()
    model.add_variable("x", upper=3)
    model.add_constraint({"x": TWO_PIECES}, {}, 4, name="c1")
    model.add_constraint({"x": TWO_PIECES}, {}, 6)
    milp, _ = lower(normalize(model))
    names = [v.name for v in milp.variables]
    assert "w.c1.x" in names and "w.c2.x" in names
    solution = solve_emip(model)
    assert solution.feasible
    assert solution.assignment == {"x": 0}


def test_solve_fractional_objective():
    model = EmipModel()
    model.add_variable("x", upper=5)
    model.set_objective({"x": Fraction(1, 2)})
    solution = solve_emip(model)
    assert solution.objective_value == Fraction(5, 2)
    assert solution.assignment == {"x": 5}
