from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given

from conftest import grid_points, small_emip_models
from EmipModel import SCHEMA, EmipModel, InvalidModel, VariableKind, is_normalized, normalize, validate
from PwlFunction import PwlFunction, Shape
from RationalIO import SchemaError, load_document

FIXTURES = Path(__file__).parent / "fixtures"


def test_validate_shapes():
    model = EmipModel()
    model.add_variable("x", upper=5)
    model.add_constraint({"x": PwlFunction(Shape.CONCAVE, 0, (1,), (2, 1))}, {}, 3)
    violations = validate(model)
    assert len(violations) == 1
    assert "lhs requires convex" in violations[0]


def test_validate_negative_lower_bound():
    model = EmipModel()
    model.add_variable("x", lower=-2, upper=5)
    model.add_constraint({"x": PwlFunction(Shape.CONVEX, 0, (1,), (1, 2))}, {}, 3)
    assert any("needs lower bound >= 0" in v for v in validate(model))


def test_validate_unknown_names():
    model = EmipModel()
    model.add_variable("x", upper=1)
    model.add_constraint({"y": 1}, {}, 0)
    model.set_objective({"z": 1})
    violations = validate(model)
    assert any("unknown variable y" in v for v in violations)
    assert any("objective: unknown variable z" in v for v in violations)
    with pytest.raises(InvalidModel) as e:
        model.check()
    assert e.value.violations == violations


def test_duplicate_variable():
    model = EmipModel()
    model.add_variable("x")
    with pytest.raises(ValueError, match="duplicate"):
        model.add_variable("x")


def test_default_constraint_names_are_unique():
    model = EmipModel()
    model.add_variable("x", upper=3)
    model.add_constraint({"x": 1}, {}, 3, name="c1")
    model.add_constraint({"x": 1}, {}, 2)
    assert [c.name for c in model.constraints] == ["c1", "c2"]
    assert validate(model) == []

    loaded = EmipModel.from_json({"variables": [{"name": "x", "upper": 3}],
                                  "constraints": [{"lhs": {"x": 1}, "b": 3}, {"name": "c0", "lhs": {"x": 1}, "b": 2}]})
    assert [c.name for c in loaded.constraints] == ["c1", "c0"]


def test_validate_duplicate_constraint_names():
    model = EmipModel()
    model.add_variable("x", upper=3)
    model.add_constraint({"x": 1}, {}, 3, name="cap")
    model.add_constraint({"x": 1}, {}, 2, name="cap")
    assert validate(model) == ["constraint cap: duplicate name"]
    with pytest.raises(InvalidModel, match="duplicate"):
        model.check()


def test_normalize_shifts_constant_into_b():
    model = EmipModel()
    model.add_variable("x", upper=10)
    model.add_constraint({"x": PwlFunction(Shape.CONVEX, 2, (3,), (1, 2))}, {}, 5)
    normalized = normalize(model)
    constraint = normalized.constraints[0]
    assert constraint.b == 3
    assert constraint.lhs_terms["x"].eval(0) == 0
    assert is_normalized(normalized)


def test_normalize_rhs_constant():
    model = EmipModel()
    model.add_variable("x", upper=10)
    model.add_constraint({}, {"x": PwlFunction(Shape.CONCAVE, -1, (3,), (2, 1))}, 0)
    constraint = normalize(model).constraints[0]
    assert constraint.b == -1
    assert constraint.rhs_terms["x"].eval(0) == 0


def test_normalize_is_idempotent():
    model = EmipModel()
    model.add_variable("x", upper=10)
    model.add_variable("y", upper=4)
    model.add_constraint({"x": PwlFunction(Shape.CONVEX, 0, (3,), (1, 2)), "y": 2}, {"y": 1}, 7)
    once = normalize(model)
    twice = normalize(once)
    assert twice.constraints == once.constraints
    assert twice.variables == once.variables


def test_normalize_folds_linear_terms():
    model = EmipModel()
    model.add_variable("y", upper=4)
    model.add_constraint({"y": 3}, {"y": 1}, 7)
    constraint = normalize(model).constraints[0]
    assert constraint.rhs_terms == {}
    assert constraint.lhs_terms["y"].slopes == (Fraction(2),)


def test_normalize_splits_negative_linear_variable():
    model = EmipModel()
    model.add_variable("x", lower=-3, upper=2)
    model.add_constraint({"x": 1}, {}, 1)
    model.set_objective({"x": 1}, "min")
    normalized = normalize(model)
    assert normalized.splits == {"x": ("x_pos", "x_neg")}
    bounds = {v.name: (v.lower, v.upper) for v in normalized.variables}
    assert bounds == {"x_pos": (0, 2), "x_neg": (0, 3)}
    assert normalized.objective.coefficients == {"x_pos": 1, "x_neg": -1}
    assert normalized.restore_assignment({"x_pos": 0, "x_neg": 2}) == {"x": -2}
    # the input model is left alone
    assert model.constraints[0].lhs_terms.keys() == {"x"}


@given(model=small_emip_models())
def test_normalize_preserves_feasible_points(model):
    normalized = normalize(model)
    assert is_normalized(normalized)
    for point in grid_points(model):
        assert model.is_feasible(point) == normalized.is_feasible(point)


def test_add_ge_constraint():
    model = EmipModel()
    model.add_variable("x", upper=5)
    model.add_ge_constraint({"x": 1}, {}, 2, name="atleast2")
    assert model.constraints[0].name == "atleast2"
    assert not model.is_feasible({"x": 1})
    assert model.is_feasible({"x": 2})


def test_violated_constraints_messages():
    model = EmipModel()
    model.add_variable("x", upper=3)
    model.add_constraint({"x": 1}, {}, 1, name="small")
    assert model.violated_constraints({}) == ["variable x: missing from assignment"]
    assert model.violated_constraints({"x": Fraction(1, 2)}) == ["variable x: value 1/2 is not integral"]
    assert model.violated_constraints({"x": 2}) == ["constraint small: violated by 1"]


def test_objective_bracket():
    model = EmipModel()
    model.add_variable("x", upper=3)
    model.add_variable("y", lower=1, upper=4)
    model.set_objective({"x": 2, "y": -1})
    assert model.objective_bracket() == (-4, 5)
    model.set_objective({"x": 1}, bracket=(0, 1))
    assert model.objective_bracket() == (0, 1)

    unbounded = EmipModel()
    unbounded.add_variable("z")
    unbounded.set_objective({"z": 1})
    with pytest.raises(ValueError, match="explicit bracket"):
        unbounded.objective_bracket()


def test_from_json_fixture():
    model = EmipModel.from_json(load_document(FIXTURES / "lp1.json", SCHEMA))
    assert [v.name for v in model.variables] == ["x", "y"]
    assert model.variable("y").kind is VariableKind.CONTINUOUS
    assert model.variable("y").upper == Fraction(5, 2)
    constraint = model.constraints[0]
    assert constraint.name == "c0"
    assert constraint.lhs_terms["x"].shape is Shape.CONVEX
    assert constraint.rhs_terms["y"].eval(Fraction(5, 2)) == Fraction(11, 4)
    assert model.objective.sense == "max"
    assert EmipModel.from_json(model.to_json()).to_json() == model.to_json()


def test_from_json_errors():
    with pytest.raises(SchemaError, match="Invalid kind"):
        EmipModel.from_json({"variables": [{"name": "x", "kind": "boolean"}]})
    with pytest.raises(SchemaError, match="bracket"):
        EmipModel.from_json({"variables": [{"name": "x"}], "objective": {"coefficients": {"x": 1}, "bracket": [0]}})
