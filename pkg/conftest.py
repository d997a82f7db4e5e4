import itertools
from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from Covering import CoverInstance
from EmipModel import EmipModel, VariableKind
from PwlFunction import PwlFunction, Shape

# exact solvers are slow enough that per-example deadlines only add noise
settings.register_profile("pwlmip", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("pwlmip")

small_rationals = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def pwl_functions(draw, shape=None, max_pieces=3, integral_breakpoints=False):
    shape = shape or draw(st.sampled_from(list(Shape)))
    k = draw(st.integers(0, max_pieces - 1))
    if integral_breakpoints:
        points = draw(st.sets(st.integers(1, 5), min_size=k, max_size=k))
    else:
        points = draw(st.sets(st.fractions(min_value=-3, max_value=6, max_denominator=4), min_size=k, max_size=k))
    steps = draw(st.lists(st.fractions(min_value=Fraction(1, 4), max_value=3, max_denominator=4),
                          min_size=k, max_size=k))
    slope = draw(small_rationals)
    slopes = [slope]
    for step in steps:
        slope = slope + step if shape is Shape.CONVEX else slope - step
        slopes.append(slope)
    return PwlFunction(shape, draw(small_rationals), tuple(sorted(points)), tuple(slopes))


@st.composite
def small_emip_models(draw, max_variables=3, max_upper=6, max_constraints=3):
    """All-integer models small enough for grid enumeration."""
    model = EmipModel()
    n = draw(st.integers(1, max_variables))
    for k in range(n):
        lower = draw(st.integers(0, 2))
        upper = draw(st.integers(lower, max_upper))
        model.add_variable(f"x{k}", VariableKind.INTEGER, lower, upper)
    names = [v.name for v in model.variables]
    for _ in range(draw(st.integers(1, max_constraints))):
        lhs_names = draw(st.lists(st.sampled_from(names), unique=True, max_size=n))
        rhs_names = draw(st.lists(st.sampled_from(names), unique=True, max_size=n))
        lhs = {v: draw(pwl_functions(Shape.CONVEX, integral_breakpoints=True)) for v in lhs_names}
        rhs = {v: draw(pwl_functions(Shape.CONCAVE, integral_breakpoints=True)) for v in rhs_names}
        model.add_constraint(lhs, rhs, draw(st.integers(-6, 12)))
    return model


def grid_points(model):
    """Every integer assignment within the variable bounds."""
    names = [v.name for v in model.variables]
    ranges = [range(int(v.lower), int(v.upper) + 1) for v in model.variables]
    for values in itertools.product(*ranges):
        yield {name: Fraction(value) for name, value in zip(names, values)}


def grid_feasible(model):
    return any(model.is_feasible(point) for point in grid_points(model))


@st.composite
def cover_instances(draw, max_n=6, max_m=3, max_multiplicity=1, max_weight=5, uniform=False):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(0, max_n))
    sets = []
    for _ in range(n):
        support = draw(st.lists(st.integers(0, m - 1), unique=True, max_size=m))
        if uniform:
            t = draw(st.integers(1, max_multiplicity))
            sets.append({x: t for x in support})
        else:
            sets.append({x: draw(st.integers(1, max_multiplicity)) for x in support})
    weights = draw(st.lists(st.integers(1, max_weight), min_size=n, max_size=n))
    requirements = draw(st.lists(st.integers(0, max(1, n * max_multiplicity // 2)), min_size=m, max_size=m))
    budget = draw(st.integers(0, max(sum(weights), 1)))
    return CoverInstance(m, sets, requirements, budget, weights)


def random_pwl_function(rng, shape, max_pieces=3, integral_breakpoints=False):
    """numpy-seeded counterpart of pwl_functions for the fixed-size suites."""
    k = int(rng.integers(0, max_pieces))
    if integral_breakpoints:
        points = sorted(Fraction(int(p)) for p in rng.choice(np.arange(1, 6), size=k, replace=False))
    else:
        points = sorted(Fraction(int(p), 4) for p in rng.choice(np.arange(-12, 25), size=k, replace=False))
    slope = Fraction(int(rng.integers(-12, 13)), 3)
    slopes = [slope]
    for _ in range(k):
        step = Fraction(int(rng.integers(1, 13)), 4)
        slope = slope + step if shape is Shape.CONVEX else slope - step
        slopes.append(slope)
    return PwlFunction(shape, Fraction(int(rng.integers(-12, 13)), 3), tuple(points), tuple(slopes))


def random_emip_model(rng, max_variables=3, max_upper=6, max_constraints=3):
    """All-integer model for grid enumeration, drawn like small_emip_models."""
    model = EmipModel()
    n = int(rng.integers(1, max_variables + 1))
    for k in range(n):
        lower = int(rng.integers(0, 3))
        model.add_variable(f"x{k}", VariableKind.INTEGER, lower, int(rng.integers(lower, max_upper + 1)))
    names = [v.name for v in model.variables]
    for _ in range(int(rng.integers(1, max_constraints + 1))):
        lhs = {v: random_pwl_function(rng, Shape.CONVEX, integral_breakpoints=True)
               for v in names if rng.random() < 0.5}
        rhs = {v: random_pwl_function(rng, Shape.CONCAVE, integral_breakpoints=True)
               for v in names if rng.random() < 0.5}
        model.add_constraint(lhs, rhs, int(rng.integers(-6, 13)))
    return model


def check_jump_chains(emitted, params):
    """
    Growth along one set's emissions, before rounding: after a jump the
    next emission starts at least (Y - Z) times the element before the
    jump, which bounds it below by every earlier emission's total.
    """
    m = params.m
    totals = Fraction(0)
    for current, following in zip(emitted, emitted[1:]):
        assert current.jump_element is not None
        before = current.beta * current.raw_shape[current.previous_element]
        at_jump = current.beta * current.raw_shape[current.jump_element]
        total = current.beta * sum(current.raw_shape)
        totals += total
        start = following.beta * following.raw_shape[current.jump_element]
        assert start >= (params.Y - params.Z) * before
        assert (params.Y - params.Z) * before == Fraction(params.Y - params.Z, params.Z) * at_jump
        assert start >= Fraction(params.Y - params.Z, params.Z * m) * total
        assert start >= Fraction(params.Y - params.Z, params.Z * m * m) * totals
        if following.jump_element is not None:
            assert following.beta * following.raw_shape[following.jump_element] >= start
