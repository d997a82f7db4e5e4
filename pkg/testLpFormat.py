from fractions import Fraction

import pytest

from EmipLowering import lower
from EmipModel import EmipModel, VariableKind, normalize
from LpFormat import LpParseError, export_lp, format_assignment, parse_lp
from MilpSolver import MilpModel
from PwlFunction import from_sorted_weights


def one_row_model():
    model = MilpModel()
    model.add_variable("x", VariableKind.INTEGER, 0, 10)
    model.add_row({"x": 1}, 3, "c0")
    return model


def lowered_wsm():
    # family model of the sets {a}/1, {a}/4, {a,b}/3, {b}/2
    model = EmipModel()
    model.add_variable("type0", upper=2)
    model.add_variable("type1", upper=1)
    model.add_variable("type2", upper=1)
    model.add_ge_constraint({"type0": 1, "type1": 1}, {}, 2, name="cover0")
    model.add_ge_constraint({"type1": 1, "type2": 1}, {}, 1, name="cover1")
    costs = {"type0": from_sorted_weights([1, 4]), "type1": from_sorted_weights([3]), "type2": from_sorted_weights([2])}
    model.add_constraint(costs, {}, 6, name="budget")
    milp, mapping = lower(normalize(model))
    assert not mapping.is_empty()
    return milp


def test_export_sections():
    text = export_lp(one_row_model(), {"x": 1})
    assert "Subject To" in text
    assert " c0: x <= 3" in text
    assert " 0 <= x <= 10" in text
    assert "General\n x\n" in text
    assert text.endswith("End\n")


def test_export_without_objective():
    text = export_lp(one_row_model())
    assert " obj: 0 x" in text


def test_export_scales_objective():
    text = export_lp(one_row_model(), {"x": Fraction(1, 2)}, "minimize")
    assert "Minimize\n obj: x\n" in text


def test_export_rejects_bad_names():
    model = MilpModel()
    model.add_variable("2x", VariableKind.CONTINUOUS)
    with pytest.raises(ValueError, match="Invalid LP variable name"):
        export_lp(model)


def test_round_trip_lowered_model():
    milp = lowered_wsm()
    text = export_lp(milp, {"type0": 1}, "maximize", title="wsm")
    parsed, objective, sense = parse_lp(text)
    assert parsed.variables == milp.variables
    assert parsed.rows == milp.rows
    assert objective == {"type0": 1}
    assert sense == "maximize"


def test_parse_greater_and_equal_rows():
    text = "\n".join([
        "Minimize",
        " obj: 2 x + y",
        "Subject To",
        " a: x + y >= 2",
        " b: x - y = 0",
        "Bounds",
        " y <= 4",
        "End",
    ])
    model, objective, sense = parse_lp(text)
    assert sense == "minimize"
    assert objective == {"x": 2, "y": 1}
    rows = {row.name: (row.coefficients, row.rhs) for row in model.rows}
    assert rows["a"] == ({"x": -1, "y": -1}, -2)
    assert rows["b"] == ({"x": 1, "y": -1}, 0)
    assert rows["b.ge"] == ({"x": -1, "y": 1}, 0)
    assert model.variable("y").upper == 4
    assert model.variable("x").lower == 0


def test_parse_errors():
    with pytest.raises(LpParseError, match="line 4: row without a name"):
        parse_lp("Maximize\n obj: x\nSubject To\n x <= 1\nEnd\n")
    with pytest.raises(LpParseError, match="outside any section"):
        parse_lp("x <= 1\n")


def test_format_assignment():
    assert format_assignment({"x": Fraction(5, 2), "y": Fraction(3)}) == {"x": "5/2", "y": "3"}
