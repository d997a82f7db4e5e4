"""
Full-size randomized comparisons against the brute-force oracles. Slow,
run with  pytest -m slow
"""
import math
from fractions import Fraction

import numpy as np
import pytest

from AlmostCover import ApproxParams, almost_cover, decompose
from conftest import check_jump_chains, grid_feasible, random_emip_model, random_pwl_function
from Covering import CoverInstance, solve_umm, solve_wsm
from ElectionControl import solve_control, solve_scoring_ccdv
from Elections import borda, k_approval, plurality
from EmipLowering import solve_emip
from Oracle import (brute_cover, brute_manipulate, brute_scoring_ccdv, random_approval_election,
                    random_cover_instance, random_ordinal_election)
from PwlFunction import Shape

pytestmark = pytest.mark.slow


def test_lowering_matches_grid():
    rng = np.random.default_rng(97)
    for _ in range(2000):
        model = random_emip_model(rng)
        solution = solve_emip(model)
        assert solution.feasible == grid_feasible(model)
        if solution.feasible:
            assert model.is_feasible(solution.assignment)


def test_pwl_identity_and_chords():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        f = random_pwl_function(rng, Shape.CONVEX if rng.random() < 0.5 else Shape.CONCAVE)
        x = Fraction(int(rng.integers(-40, 81)), int(rng.integers(1, 9)))
        assert f.eval(x) == f.locate_eval(x)
        for rho in f.breakpoints:
            assert f.eval(rho) == f.locate_eval(rho)

        a, b, c = sorted(Fraction(int(t), 4) for t in rng.choice(np.arange(-24, 49), size=3, replace=False))
        chord = f.eval(a) + (f.eval(c) - f.eval(a)) * (b - a) / (c - a)
        if f.shape is Shape.CONVEX:
            assert f.eval(b) <= chord
        else:
            assert f.eval(b) >= chord


def test_wsm_suite():
    rng = np.random.default_rng(101)
    for _ in range(500):
        instance = random_cover_instance(rng, int(rng.integers(0, 13)), int(rng.integers(1, 5)), max_weight=10)
        found = brute_cover(instance)
        cover = solve_wsm(instance, minimize_cost=True)
        assert (cover is None) == (found is None)
        if cover is not None:
            assert cover.cost == found[0]


def test_umm_suite():
    rng = np.random.default_rng(103)
    for _ in range(500):
        instance = random_cover_instance(rng, int(rng.integers(0, 13)), int(rng.integers(1, 4)), max_multiplicity=5,
                                         uniform=True)
        found = brute_cover(instance)
        cover = solve_umm(instance, minimize_cost=True)
        assert (cover is None) == (found is None)
        if cover is not None:
            assert len(cover.chosen) == found[0]


@pytest.mark.parametrize("kind,seed,generator", [
    ("ccdv", 107, {"max_price": 8}),
    ("ccav", 109, {"max_price": 8, "addable": 5}),
    ("bribery", 113, {"max_price": 8}),
    ("ccdv", 127, {"max_weight": 8}),
    ("ccav", 131, {"max_weight": 8, "addable": 5}),
])
def test_control_suite(kind, seed, generator):
    rng = np.random.default_rng(seed)
    for _ in range(300):
        n = int(rng.integers(1, 11 - generator.get("addable", 0)))
        election = random_approval_election(rng, n, int(rng.integers(2, 5)), **generator)
        found = brute_manipulate(election, kind)
        result = solve_control(election, kind, minimize_cost=True)
        assert result.feasible == (found is not None)
        if found is not None:
            assert result.cost == found[0]


@pytest.mark.parametrize("m", [3, 4])
@pytest.mark.parametrize("rule", [borda, lambda m: k_approval(m, 2), plurality], ids=["borda", "2-approval", "plurality"])
def test_scoring_suite(m, rule):
    rng = np.random.default_rng(137 + m)
    for _ in range(200):
        election = random_ordinal_election(rng, int(rng.integers(1, 10)), m, rule(m), max_price=4)
        found = brute_scoring_ccdv(election)
        result = solve_scoring_ccdv(election, minimize_cost=True)
        assert result.feasible == (found is not None)
        if found is not None:
            assert result.cost == found[0]


def test_decomposition_suite():
    rng = np.random.default_rng(139)
    for _ in range(1000):
        m = int(rng.integers(1, 5))
        epsilon = Fraction(1, int(rng.integers(1, 9)))
        # log-uniform multiplicities so that large ratios, and therefore jumps, occur
        multiplicities = [int(t) for t in np.floor(np.exp(rng.uniform(0, 14, size=m)))]
        params = ApproxParams(epsilon, m)
        emitted = decompose(multiplicities, params)
        assert len(emitted) <= m
        for x, t in enumerate(multiplicities):
            assert sum(v.realized()[x] for v in emitted) <= t
        for v in emitted:
            if v.jump_element is not None:
                assert v.raw_shape[v.jump_element] == params.Z * v.raw_shape[v.previous_element]
        check_jump_chains(emitted, params)


def floor_loss(instance, epsilon):
    """Whether some emitted vector loses multiplicity to flooring beta * shape."""
    params = ApproxParams(epsilon, instance.universe_size)
    return any(v.beta * s != math.floor(v.beta * s)
               for j in range(instance.n) for v in decompose(instance.vector(j), params, j) for s in v.shape)


def certified_instance(rng, n, m):
    """Random multiset instance whose requirements a random K-subfamily meets."""
    sets = []
    for _ in range(n):
        support = [x for x in range(m) if rng.random() < 0.6]
        sets.append({x: int(rng.integers(1, 9)) for x in support})
    k = int(rng.integers(1, n + 1))
    picked = rng.choice(n, size=k, replace=False)
    coverage = [sum(sets[j].get(x, 0) for j in picked) for x in range(m)]
    requirements = [int(math.floor(c * rng.uniform(0.3, 1))) for c in coverage]
    return CoverInstance(m, sets, requirements, k)


@pytest.mark.parametrize("epsilon", [Fraction(1, 2), Fraction(1, 4)])
def test_almost_cover_suite(epsilon):
    rng = np.random.default_rng(149)
    solved = 0
    for _ in range(200):
        instance = certified_instance(rng, int(rng.integers(1, 11)), int(rng.integers(1, 4)))
        assert brute_cover(instance) is not None
        solution = almost_cover(instance, epsilon)
        if solution is None:
            # only flooring beta * shape can push the misses up to the bound
            assert floor_loss(instance, epsilon)
            continue
        solved += 1
        assert len(solution.chosen) <= instance.budget
        assert solution.total_misses < solution.bound or solution.total_misses == 0
    assert solved > 100
