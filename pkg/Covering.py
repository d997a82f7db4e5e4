"""
Multicover instances and the exact solvers for Weighted Set Multicover and
Uniform Multiset Multicover. Sets are grouped into type families by their
support; one integer variable per family counts how many of its members
are taken, and the per-family cost (resp. coverage) is a piecewise linear
function of that count.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from EmipLowering import WitnessError, solve_emip
from EmipModel import EmipModel, VariableKind
from PwlFunction import from_sorted_multiplicities, from_sorted_weights
from RationalIO import SchemaError, parse_integer

logger = logging.getLogger(__name__)

SCHEMA = "cover-v1"


class VariantError(ValueError):
    pass


@dataclass
class CoverInstance:
    """
    :param universe_size: number of elements m, elements are 0..m-1
    :param sets: one dict element -> multiplicity per set
    :param weights: one nonnegative integer per set, default all 1
    :param requirements: one nonnegative integer per element
    :param budget: bound on total weight (WSM) or on the number of sets (UMM)
    """
    universe_size: int
    sets: list
    requirements: list
    budget: int
    weights: list = field(default=None)

    def __post_init__(self):
        if self.universe_size < 0:
            raise ValueError(f"Invalid universe size {self.universe_size}")
        self.sets = [{int(x): int(t) for x, t in s.items() if t != 0} for s in self.sets]
        if self.weights is None:
            self.weights = [1] * len(self.sets)
        self.weights = [int(w) for w in self.weights]
        self.requirements = [int(r) for r in self.requirements]
        if len(self.weights) != len(self.sets):
            raise ValueError(f"Invalid weights: {len(self.weights)} weights for {len(self.sets)} sets")
        if len(self.requirements) != self.universe_size:
            raise ValueError(f"Invalid requirements: {len(self.requirements)} values for {self.universe_size} elements")
        for j, s in enumerate(self.sets):
            for x, t in s.items():
                if not 0 <= x < self.universe_size:
                    raise ValueError(f"Invalid set {j}: element {x} outside the universe")
                if t < 0:
                    raise ValueError(f"Invalid set {j}: negative multiplicity {t} for element {x}")
        if any(w < 0 for w in self.weights):
            raise ValueError("Invalid weights: must be nonnegative")
        if any(r < 0 for r in self.requirements):
            raise ValueError("Invalid requirements: must be nonnegative")
        if self.budget < 0:
            raise ValueError(f"Invalid budget {self.budget}")

    @property
    def n(self):
        return len(self.sets)

    def vector(self, j):
        return [self.sets[j].get(x, 0) for x in range(self.universe_size)]

    def incidence(self):
        """n x m matrix of multiplicities."""
        matrix = np.zeros((self.n, self.universe_size), dtype=np.int64)
        for j, s in enumerate(self.sets):
            for x, t in s.items():
                matrix[j, x] = t
        return matrix

    def support_masks(self):
        """Bitmask of each set's support, bit x for element x."""
        if self.n == 0 or self.universe_size == 0:
            return [0] * self.n
        # object dtype keeps the masks exact past 63 elements
        bits = (self.incidence() > 0).astype(object)
        powers = np.array([1 << x for x in range(self.universe_size)], dtype=object)
        return [int(mask) for mask in bits.dot(powers)]

    def is_set_variant(self):
        return all(t == 1 for s in self.sets for t in s.values())

    def multiplicity(self, j):
        """The common multiplicity of a uniform set, 0 for an empty one."""
        values = set(self.sets[j].values())
        if len(values) > 1:
            raise VariantError(f"Invalid uniform set {j}: multiplicities {sorted(values)}")
        return values.pop() if values else 0

    def is_uniform_variant(self):
        return all(len(set(s.values())) <= 1 for s in self.sets)

    def has_unit_weights(self):
        return all(w == 1 for w in self.weights)

    def coverage_of(self, chosen):
        coverage = [0] * self.universe_size
        for j in chosen:
            for x, t in self.sets[j].items():
                coverage[x] += t
        return coverage

    def to_json(self):
        return {
            "schema": SCHEMA,
            "m": self.universe_size,
            "sets": [{str(x): t for x, t in sorted(s.items())} for s in self.sets],
            "weights": list(self.weights),
            "requirements": list(self.requirements),
            "budget": self.budget,
        }

    @classmethod
    def from_json(cls, document, source="<instance>"):
        try:
            m = parse_integer(document.get("m"), "m", 0)
            sets = []
            for j, entry in enumerate(document.get("sets", [])):
                if not isinstance(entry, dict):
                    raise SchemaError(f"Invalid set at sets[{j}]: expected an object element -> multiplicity")
                sets.append({parse_integer(x, f"sets[{j}] element", 0): parse_integer(t, f"sets[{j}].{x}", 0)
                             for x, t in entry.items()})
            weights = document.get("weights")
            if weights is not None:
                weights = [parse_integer(w, f"weights[{j}]", 0) for j, w in enumerate(weights)]
            requirements = [parse_integer(r, f"requirements[{i}]", 0)
                            for i, r in enumerate(document.get("requirements", [0] * m))]
            budget = parse_integer(document.get("budget", 0), "budget", 0)
            return cls(m, sets, requirements, budget, weights)
        except ValueError as e:
            if isinstance(e, SchemaError) and e.source is not None:
                raise
            raise SchemaError(str(e), source=source)


@dataclass
class CoverSolution:
    chosen: list
    cost: int
    coverage: list

    def verify(self, instance, cost_is_count=False):
        problems = []
        if self.coverage != instance.coverage_of(self.chosen):
            problems.append("coverage does not match the chosen sets")
        expected = len(self.chosen) if cost_is_count else sum(instance.weights[j] for j in self.chosen)
        if self.cost != expected:
            problems.append(f"cost {self.cost} differs from {expected}")
        if self.cost > instance.budget:
            problems.append(f"cost {self.cost} exceeds budget {instance.budget}")
        for x, (have, need) in enumerate(zip(self.coverage, instance.requirements)):
            if have < need:
                problems.append(f"element {x} covered {have} < {need} times")
        if problems:
            raise WitnessError("Invalid cover: " + "; ".join(problems))
        return self

    def to_json(self):
        return {"chosen": list(self.chosen), "cost": self.cost, "coverage": list(self.coverage)}


def type_families(instance, by="weight"):
    """
    Group set indices by support. Keys are element tuples in ascending
    bitmask order; members are sorted by (weight, index) for by="weight"
    and by (-multiplicity, index) for by="multiplicity". Empty supports
    are left out.
    """
    if by not in ("weight", "multiplicity"):
        raise ValueError(f"Invalid family order {by!r}")
    groups = {}
    for j, mask in enumerate(instance.support_masks()):
        if mask:
            groups.setdefault(mask, []).append(j)
    families = {}
    for mask in sorted(groups):
        members = groups[mask]
        if by == "weight":
            members.sort(key=lambda j: (instance.weights[j], j))
        else:
            members.sort(key=lambda j: (-instance.multiplicity(j), j))
        elements = tuple(x for x in range(instance.universe_size) if mask >> x & 1)
        families[elements] = members
    return families


def _family_model(instance, families):
    model = EmipModel()
    names = []
    for k, (elements, members) in enumerate(families.items()):
        names.append(model.add_variable(f"type{k}", VariableKind.INTEGER, 0, len(members)).name)
    return model, names


def solve_wsm(instance, minimize_cost=False, solver=None):
    """
    Weighted Set Multicover: a cover of weight <= budget, or None. With
    minimize_cost the returned cover has the least weight.
    """
    if not instance.is_set_variant():
        raise VariantError("Invalid WSM instance: multiplicities must be 0 or 1")
    families = type_families(instance, by="weight")
    model, names = _family_model(instance, families)
    for x, need in enumerate(instance.requirements):
        if need == 0:
            continue
        covering = {name: 1 for name, elements in zip(names, families) if x in elements}
        model.add_ge_constraint(covering, {}, need, name=f"cover{x}")
    costs = {name: from_sorted_weights(instance.weights[j] for j in members)
             for name, members in zip(names, families.values())}
    model.add_constraint(costs, {}, instance.budget, name="budget")
    logger.info(f"WSM: {instance.n} sets in {len(families)} type families over {instance.universe_size} elements")

    bracket = (0, min(instance.budget, sum(instance.weights)))
    solution = solve_emip(model, solver, minimize_load_of="budget" if minimize_cost else None, load_bracket=bracket)
    if not solution.feasible:
        logger.info("WSM: infeasible")
        return None
    chosen = []
    for name, members in zip(names, families.values()):
        # the cheapest members of a family are always the best pick
        chosen.extend(members[:int(solution.assignment[name])])
    chosen.sort()
    cover = CoverSolution(chosen, sum(instance.weights[j] for j in chosen), instance.coverage_of(chosen))
    logger.info(f"WSM: {len(chosen)} sets, cost {cover.cost}")
    return cover.verify(instance)


def solve_umm(instance, minimize_cost=False, solver=None):
    """
    Uniform Multiset Multicover with unit weights: at most budget sets, or
    None. With minimize_cost the returned cover uses the fewest sets.
    """
    if not instance.is_uniform_variant():
        raise VariantError("Invalid UMM instance: each set needs one multiplicity on its support")
    if not instance.has_unit_weights():
        raise VariantError("Invalid UMM instance: weights must all be 1")
    families = type_families(instance, by="multiplicity")
    model, names = _family_model(instance, families)
    for x, need in enumerate(instance.requirements):
        if need == 0:
            continue
        covering = {name: from_sorted_multiplicities(instance.multiplicity(j) for j in members)
                    for name, (elements, members) in zip(names, families.items()) if x in elements}
        model.add_ge_constraint(covering, {}, need, name=f"cover{x}")
    model.add_constraint({name: 1 for name in names}, {}, instance.budget, name="budget")
    logger.info(f"UMM: {instance.n} sets in {len(families)} type families over {instance.universe_size} elements")

    solution = solve_emip(model, solver, minimize_load_of="budget" if minimize_cost else None,
                          load_bracket=(0, instance.budget))
    if not solution.feasible:
        logger.info("UMM: infeasible")
        return None
    chosen = []
    for name, members in zip(names, families.values()):
        chosen.extend(members[:int(solution.assignment[name])])
    chosen.sort()
    cover = CoverSolution(chosen, len(chosen), instance.coverage_of(chosen))
    logger.info(f"UMM: {len(chosen)} sets")
    return cover.verify(instance, cost_is_count=True)
