from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from AlmostCover import (ApproxParams, AlmostCoverSolution, almost_cover, decompose, decomposition_to_json,
                         miss_budget, shape_groups)
from Covering import CoverInstance, VariantError
from conftest import check_jump_chains
from Oracle import brute_cover, gen_hard_instances

HALF = ApproxParams(Fraction(1, 2), 2)

multisets = st.lists(st.integers(0, 6000), min_size=1, max_size=4)


def test_params():
    assert (HALF.Z, HALF.Y) == (16, 1040)
    assert HALF.grid == Fraction(1, 4)
    assert HALF.round_down(Fraction(4, 3)) == Fraction(5, 4)
    with pytest.raises(ValueError):
        ApproxParams(0, 2)
    with pytest.raises(ValueError):
        ApproxParams(Fraction(1, 2), 0)


def test_single_element():
    emitted = decompose([1], ApproxParams(Fraction(1, 3), 1))
    assert len(emitted) == 1
    assert emitted[0].beta == 1
    assert emitted[0].shape == (1,)
    assert emitted[0].jump_element is None


def test_single_jump():
    first, second = decompose([1, 5000], HALF, origin=7)
    assert first.raw_shape == (1, 16)
    assert first.shape == (1, 16)
    assert (first.previous_element, first.jump_element) == (0, 1)
    assert second.beta == 4984
    assert second.shape == (0, 1)
    assert first.origin == second.origin == 7
    assert [a + b for a, b in zip(first.realized(), second.realized())] == [1, 5000]


def test_zero_set_emits_nothing():
    assert decompose([0, 0], HALF) == []


@given(multiplicities=multisets, epsilon=st.sampled_from([Fraction(1, 2), Fraction(1, 4), Fraction(1, 3)]))
def test_emitted_vectors_fit_inside_the_set(multiplicities, epsilon):
    params = ApproxParams(epsilon, len(multiplicities))
    emitted = decompose(multiplicities, params)
    totals = [sum(v.realized()[x] for v in emitted) for x in range(len(multiplicities))]
    assert all(total <= t for total, t in zip(totals, multiplicities))
    assert len(emitted) <= len(multiplicities)
    for v in emitted:
        assert all(s % params.grid == 0 for s in v.shape)
        assert all(0 <= s <= r for s, r in zip(v.shape, v.raw_shape))
        if v.jump_element is not None:
            # the jump coordinate is capped at Z times its predecessor
            assert v.raw_shape[v.jump_element] == params.Z * v.raw_shape[v.previous_element]


def test_shape_groups_order():
    emitted = decompose([2, 2], HALF, 0) + decompose([5, 5], HALF, 1) + decompose([1, 3], HALF, 2)
    groups = shape_groups(emitted)
    assert list(groups) == [(1, 1), (1, 3)]
    assert [v.origin for v in groups[(1, 1)]] == [1, 0]


def test_miss_budget():
    assert miss_budget(Fraction(1, 2), [4, 4]) == 3
    assert miss_budget(Fraction(1, 3), [2, 2]) == 1
    assert miss_budget(Fraction(1, 2), [0, 0]) == 0


def test_nothing_required():
    instance = CoverInstance(2, [{0: 3, 1: 1}], [0, 0], 1)
    solution = almost_cover(instance, Fraction(1, 2))
    assert solution.chosen == []
    assert solution.total_misses == 0


def test_empty_universe():
    solution = almost_cover(CoverInstance(0, [{}], [], 1), Fraction(1, 2))
    assert solution == AlmostCoverSolution([], [], [], 0)


def test_rejects_weights():
    with pytest.raises(VariantError):
        almost_cover(CoverInstance(1, [{0: 1}], [1], 1, [2]), Fraction(1, 2))


def test_exact_cover_on_lossless_sets():
    instance = CoverInstance(3, [{0: 4, 1: 5, 2: 4}, {0: 3, 1: 3}, {1: 2, 2: 6}, {0: 5, 2: 5}], [8, 5, 9], 2)
    solution = almost_cover(instance, Fraction(1, 2), minimize_misses=True)
    assert solution.total_misses == 0
    assert solution.origins() == [0, 3]
    assert solution.coverage == [9, 5, 9]


def test_rounding_loss_can_exceed_the_bound():
    # the set covers the requirement exactly, but its shape 4/3 rounds down to 5/4
    instance = CoverInstance(2, [{0: 3, 1: 4}], [0, 4], 1)
    assert brute_cover(instance) is not None
    assert almost_cover(instance, Fraction(1, 4)) is None


def test_decomposition_json():
    document = decomposition_to_json(decompose([1, 5000], HALF), HALF)
    assert document["Z"] == 16 and document["Y"] == 1040
    assert document["vectors"][0] == {"origin": 0, "beta": "1", "shape": ["1", "16"], "realized": [1, 16],
                                      "jump": [0, 1]}


def lossless_instance(rng, n, m, epsilon):
    """Sets whose decomposition is exact: smallest entry 2^k with 2^k dividing 2/epsilon."""
    limit = int(Fraction(2) / epsilon).bit_length() - 1
    sets = []
    for _ in range(n):
        support = [x for x in range(m) if rng.random() < 0.6]
        base = 1 << int(rng.integers(0, limit + 1))
        sets.append({x: base * int(rng.integers(1, 4)) for x in support})
        if support:
            sets[-1][support[0]] = base
    requirements = [int(r) for r in rng.integers(0, 2 * n + 1, size=m)]
    return CoverInstance(m, sets, requirements, int(rng.integers(1, n + 1)))


@pytest.mark.parametrize("epsilon", [Fraction(1, 2), Fraction(1, 4)])
def test_miss_bound_against_oracle(epsilon):
    rng = np.random.default_rng(17)
    checked = 0
    for _ in range(40):
        instance = lossless_instance(rng, 5, 3, epsilon)
        if brute_cover(instance) is None:
            continue
        checked += 1
        solution = almost_cover(instance, epsilon)
        assert solution is not None
        assert solution.total_misses < solution.bound or solution.bound == 0
        assert len(solution.chosen) <= instance.budget
    assert checked > 0


@given(multiplicities=multisets, epsilon=st.sampled_from([Fraction(1, 2), Fraction(1, 4), Fraction(1)]))
def test_emissions_grow_across_jumps(multiplicities, epsilon):
    params = ApproxParams(epsilon, len(multiplicities))
    check_jump_chains(decompose(multiplicities, params), params)


def test_jump_chain_on_three_levels():
    params = ApproxParams(Fraction(1), 3)
    emitted = decompose([1, 2000, 2000 * 2000], params)
    assert [v.jump_element for v in emitted] == [1, 2, None]
    check_jump_chains(emitted, params)


@pytest.mark.parametrize("seed", range(4))
def test_subset_sum_family(seed):
    instance = gen_hard_instances("subsetsum-mmc", seed=seed, size=2)
    assert (instance.n, instance.universe_size) == (4, 2)
    assert brute_cover(instance) is not None
    solution = almost_cover(instance, Fraction(1, 4))
    assert solution is not None
    assert len(solution.chosen) <= instance.budget
    assert solution.total_misses < solution.bound


def test_subset_sum_family_without_cover():
    instance = gen_hard_instances("subsetsum-mmc", numbers=[1, 2, 3, 4], target=8)
    assert brute_cover(instance) is None
    solution = almost_cover(instance, Fraction(1, 4))
    if solution is not None:
        assert solution.total_misses < solution.bound
