"""
Almost-cover scheme for Multiset Multicover: every set is decomposed into
scaled copies of shape vectors whose entries stay within a bounded ratio of
each other, equal shapes become one integer variable, and continuous miss
variables absorb the rounding loss.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from Covering import VariantError
from EmipLowering import WitnessError, solve_emip
from EmipModel import EmipModel, VariableKind
from PwlFunction import PwlFunction, Shape
from RationalIO import format_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ApproxParams:
    epsilon: Fraction
    m: int

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.epsilon <= 0:
            raise ValueError(f"Invalid epsilon {self.epsilon}: must be positive")
        if self.m < 1:
            raise ValueError(f"Invalid universe size {self.m}: need at least one element")
        assert Fraction(self.m, self.Z) <= self.epsilon / 4
        assert Fraction(self.Z * self.m ** 3, self.Y - self.Z) <= self.epsilon / 4

    @property
    def Z(self):
        return math.ceil(4 * self.m / self.epsilon)

    @property
    def Y(self):
        return self.Z + math.ceil(4 * self.Z * self.m ** 3 / self.epsilon)

    @property
    def grid(self):
        return self.epsilon / 2

    def round_down(self, value):
        """Largest multiple of epsilon/2 not above value."""
        return math.floor(value / self.grid) * self.grid


@dataclass(frozen=True)
class EmittedVector:
    """
    beta * shape, realized as floor(beta * shape) per element.

    raw_shape is the shape before rounding to the epsilon/2 grid;
    jump_element/previous_element name the two consecutive elements of the
    sorted order whose multiplicities differ by the factor Y that caused the
    emission (None for the final emission of a set).
    """
    beta: Fraction
    shape: tuple
    origin: int
    raw_shape: tuple
    jump_element: Optional[int] = None
    previous_element: Optional[int] = None

    def realized(self):
        return tuple(math.floor(self.beta * s) for s in self.shape)

    def to_json(self):
        entry = {
            "origin": self.origin,
            "beta": format_rational(self.beta),
            "shape": [format_rational(s) for s in self.shape],
            "realized": list(self.realized()),
        }
        if self.jump_element is not None:
            entry["jump"] = [self.previous_element, self.jump_element]
        return entry


def decompose(multiplicities, params, origin=0):
    """
    Replace one set, given as its multiplicity vector, by scaled shape
    vectors that together add to at most the set.
    """
    multiplicities = [int(t) for t in multiplicities]
    m = len(multiplicities)
    # ascending by multiplicity, ties by element index
    order = sorted(range(m), key=lambda x: (multiplicities[x], x))
    remaining = [multiplicities[x] for x in order]
    i = 0
    while i < m and remaining[i] == 0:
        i += 1

    emitted = []
    while i < m:
        beta = Fraction(remaining[i])
        shape = [Fraction(0)] * m
        shape[order[i]] = Fraction(1)
        start = i
        i += 1
        jump = None
        while i < m:
            if remaining[i] < params.Y * remaining[i - 1]:
                shape[order[i]] = remaining[i] / beta
                i += 1
                continue
            jump = i
            cap = params.Z * remaining[i - 1] / beta
            for j in range(i, m):
                shape[order[j]] = cap
            break

        vector = _round_and_emit(beta, shape, params, origin,
                                 None if jump is None else order[jump],
                                 None if jump is None else order[jump - 1])
        emitted.append(vector)
        if jump is None:
            break
        realized = vector.realized()
        for j in range(start, m):
            remaining[j] -= realized[order[j]]
        i = jump
    logger.debug(f"set {origin}: {len(emitted)} emitted vectors")
    return emitted


def _round_and_emit(beta, shape, params, origin, jump_element, previous_element):
    rounded = tuple(params.round_down(s) for s in shape)
    return EmittedVector(beta, rounded, origin, tuple(shape), jump_element, previous_element)


def decomposition_to_json(emitted, params):
    return {
        "epsilon": format_rational(params.epsilon),
        "Z": params.Z,
        "Y": params.Y,
        "vectors": [v.to_json() for v in emitted],
    }


@dataclass
class AlmostCoverSolution:
    chosen: list
    coverage: list
    misses: list
    bound: Fraction

    @property
    def total_misses(self):
        return sum(self.misses)

    def origins(self):
        return sorted(v.origin for v in self.chosen)

    def to_json(self):
        return {
            "chosen": [v.to_json() for v in self.chosen],
            "coverage": list(self.coverage),
            "misses": list(self.misses),
            "total_misses": self.total_misses,
            "bound": format_rational(self.bound),
        }


def miss_budget(epsilon, requirements):
    """Largest integer strictly below epsilon * sum(requirements), or 0 when nothing is required."""
    total = sum(requirements)
    if total == 0:
        return 0
    return math.ceil(Fraction(epsilon) * total) - 1


def shape_groups(emitted):
    """Emitted vectors grouped by identical shape, first-seen order, each group by (-beta, origin)."""
    groups = {}
    for k, v in enumerate(emitted):
        groups.setdefault(v.shape, []).append((k, v))
    return {shape: [v for k, v in sorted(members, key=lambda item: (-item[1].beta, item[1].origin, item[0]))]
            for shape, members in groups.items()}


def almost_cover(instance, epsilon, minimize_misses=False, solver=None, emitted=None):
    """
    Select at most instance.budget emitted vectors whose total shortfall
    sum(max(0, r - r')) is strictly below epsilon * sum(r); None when the
    miss program is infeasible.
    """
    if not instance.has_unit_weights():
        raise VariantError("Invalid almost-cover instance: weights must all be 1")
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError(f"Invalid epsilon {epsilon}: must be positive")
    m = instance.universe_size
    bound = epsilon * sum(instance.requirements)
    if m == 0:
        return AlmostCoverSolution([], [], [], bound)

    params = ApproxParams(epsilon, m)
    if emitted is None:
        emitted = [v for j in range(instance.n) for v in decompose(instance.vector(j), params, j)]
    groups = shape_groups(emitted)
    logger.info(f"almost cover: {len(emitted)} emitted vectors in {len(groups)} shapes, Z={params.Z}, Y={params.Y}")

    model = EmipModel()
    names = []
    for k, (shape, members) in enumerate(groups.items()):
        names.append(model.add_variable(f"shape{k}", VariableKind.INTEGER, 0, len(members)).name)
    misses = {}
    for x, need in enumerate(instance.requirements):
        if need > 0:
            misses[x] = model.add_variable(f"miss{x}", VariableKind.CONTINUOUS, 0, need).name

    model.add_constraint({name: 1 for name in names}, {}, instance.budget, name="budget")
    allowed = miss_budget(epsilon, instance.requirements)
    model.add_constraint({name: 1 for name in misses.values()}, {}, allowed, name="misses")
    for x, need in enumerate(instance.requirements):
        if need == 0:
            continue
        covering = {misses[x]: 1}
        for name, members in zip(names, groups.values()):
            prefix = [0]
            for v in members:
                prefix.append(prefix[-1] + v.realized()[x])
            if prefix[-1] > 0:
                covering[name] = PwlFunction.from_integer_values(prefix, Shape.CONCAVE)
        model.add_ge_constraint(covering, {}, need, name=f"cover{x}")

    solution = solve_emip(model, solver, minimize_load_of="misses" if minimize_misses else None,
                          load_bracket=(0, allowed))
    if not solution.feasible:
        logger.info("almost cover: infeasible")
        return None

    chosen = []
    for name, members in zip(names, groups.values()):
        chosen.extend(members[:int(solution.assignment[name])])
    coverage = [sum(v.realized()[x] for v in chosen) for x in range(m)]
    shortfall = [max(0, need - have) for need, have in zip(instance.requirements, coverage)]
    result = AlmostCoverSolution(chosen, coverage, shortfall, bound)
    _verify(instance, result, allowed)
    logger.info(f"almost cover: {len(chosen)} vectors, {result.total_misses} misses, bound {bound}")
    return result


def _verify(instance, result, allowed):
    problems = []
    if len(result.chosen) > instance.budget:
        problems.append(f"{len(result.chosen)} vectors exceed budget {instance.budget}")
    if result.total_misses > allowed:
        problems.append(f"{result.total_misses} misses exceed {allowed}")
    # the chosen vectors of one set never give more than the set itself
    for origin in set(result.origins()):
        taken = [v.realized() for v in result.chosen if v.origin == origin]
        for x, have in enumerate(instance.vector(origin)):
            if sum(r[x] for r in taken) > have:
                problems.append(f"set {origin} overdrawn on element {x}")
    if problems:
        raise WitnessError("Invalid almost cover: " + "; ".join(problems))
