from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import pwl_functions
from PwlFunction import (InvalidPwlFunction, PwlFunction, Shape, from_sorted_multiplicities,
                         from_sorted_weights)
from RationalIO import SchemaError

points = st.fractions(min_value=-8, max_value=12, max_denominator=6)


def test_eval_two_pieces():
    f = PwlFunction(Shape.CONVEX, 0, (2,), (1, 3))
    assert f.eval(1) == 1
    assert f.eval(3) == 5
    assert f(Fraction(5, 2)) == Fraction(7, 2)


def test_eval_concave_unit_pieces():
    f = PwlFunction(Shape.CONCAVE, 0, (1, 2), (5, 3, 1))
    assert f.eval(3) == 9


def test_equal_slopes_merge():
    f = PwlFunction(Shape.CONVEX, 0, (1, 2), (1, 1, 2))
    assert f.breakpoints == (Fraction(2),)
    assert f.slopes == (Fraction(1), Fraction(2))


def test_invalid_functions():
    with pytest.raises(InvalidPwlFunction, match="not increasing"):
        PwlFunction(Shape.CONVEX, 0, (1,), (2, 1))
    with pytest.raises(InvalidPwlFunction, match="not decreasing"):
        PwlFunction(Shape.CONCAVE, 0, (1,), (1, 2))
    with pytest.raises(InvalidPwlFunction, match="piece count"):
        PwlFunction(Shape.CONVEX, 0, (1, 2), (1, 2))
    with pytest.raises(InvalidPwlFunction, match="strictly ascending"):
        PwlFunction(Shape.CONVEX, 0, (2, 1), (1, 2, 3))


def test_from_sorted_weights():
    f = from_sorted_weights([5, 2, 7])
    assert [f.eval(j) for j in range(4)] == [0, 2, 7, 14]
    assert f.shape is Shape.CONVEX

    empty = from_sorted_weights([])
    assert empty.is_linear
    assert empty.eval(3) == 0

    flat = from_sorted_weights([4, 4, 4])
    assert flat.is_linear
    assert flat.eval(2) == 8


def test_from_sorted_weights_negative():
    with pytest.raises(InvalidPwlFunction):
        from_sorted_weights([1, -1])


def test_from_sorted_multiplicities():
    f = from_sorted_multiplicities([1, 3, 2])
    assert [f.eval(j) for j in range(1, 4)] == [3, 5, 6]
    assert f.shape is Shape.CONCAVE

    g = from_sorted_multiplicities([2, 2])
    assert g.is_linear and g.slopes == (Fraction(2),)
    assert from_sorted_multiplicities([7]).eval(1) == 7

    with pytest.raises(InvalidPwlFunction):
        from_sorted_multiplicities([0])


@given(f=pwl_functions(), x=points)
def test_eval_matches_locate_eval(f, x):
    assert f.eval(x) == f.locate_eval(x)


@given(f=pwl_functions(), a=points, b=points)
def test_shape_against_chords(f, a, b):
    middle = f.eval((a + b) / 2)
    chord = (f.eval(a) + f.eval(b)) / 2
    if f.shape is Shape.CONVEX:
        assert middle <= chord
    else:
        assert middle >= chord


@given(f=pwl_functions(), lower=points, x=points)
def test_restricted_from_keeps_values(f, lower, x):
    g = f.restricted_from(lower)
    assert all(rho > lower for rho in g.breakpoints)
    if x >= lower:
        assert g.eval(x) == f.eval(x)


@given(f=pwl_functions(), a=points, b=points)
def test_extremes_on(f, a, b):
    lower, upper = min(a, b), max(a, b)
    low, high = f.extremes_on(lower, upper)
    for x in (lower, upper, (lower + upper) / 2) + tuple(r for r in f.breakpoints if lower <= r <= upper):
        assert low <= f.eval(x) <= high


def test_plus_linear_and_shifted():
    f = PwlFunction(Shape.CONCAVE, 1, (2,), (3, 1))
    g = f.plus_linear(-1).shifted(2)
    assert g.shape is Shape.CONCAVE
    assert g.eval(4) == f.eval(4) - 4 + 2


def test_json():
    f = PwlFunction(Shape.CONVEX, Fraction(-1, 2), (Fraction(3, 2),), (1, 4))
    data = f.to_json()
    assert data == {"shape": "convex", "value_at_zero": "-1/2", "breakpoints": ["3/2"], "slopes": ["1", "4"]}
    assert PwlFunction.from_json(data) == f


def test_from_json_errors():
    with pytest.raises(SchemaError, match="missing slopes"):
        PwlFunction.from_json({"shape": "convex"})
    with pytest.raises(SchemaError, match="Invalid shape"):
        PwlFunction.from_json({"shape": "wavy", "slopes": [1]})
    with pytest.raises(SchemaError, match="Invalid rational"):
        PwlFunction.from_json({"shape": "convex", "slopes": [0.5]})
