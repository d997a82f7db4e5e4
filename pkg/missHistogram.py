import argparse
import logging
from fractions import Fraction

import numpy as np
import matplotlib
import matplotlib.pyplot as plt

from AlmostCover import almost_cover
from Oracle import brute_cover, random_cover_instance

logger = logging.getLogger(__name__)


def collect_miss_ratios(epsilon, instances=50, seed=0, n=6, m=2, max_multiplicity=6):
    """
    Run the almost-cover scheme on random instances that have an exact cover
    within budget and return total misses / (epsilon * total requirement).
    """
    epsilon = Fraction(epsilon)
    rng = np.random.default_rng(seed)
    ratios = []
    tried = 0
    while len(ratios) < instances and tried < 20 * instances:
        tried += 1
        instance = random_cover_instance(rng, n, m, max_multiplicity=max_multiplicity)
        exact = brute_cover(instance)
        if exact is None or sum(instance.requirements) == 0:
            continue
        # the budget counts sets here, so use the size of the exact cover
        instance.budget = len(exact[1])
        solution = almost_cover(instance, epsilon)
        if solution is None:
            logger.warning(f"instance {tried}: no almost cover with {instance.budget} sets")
            continue
        ratios.append(float(Fraction(solution.total_misses) / solution.bound))
    logger.info(f"{len(ratios)} ratios from {tried} instances")
    return ratios


def plot_miss_ratios(ratios, epsilon, path=None):
    plt.figure(figsize=(10, 3))

    plt.hist(ratios, bins=np.linspace(0, 1, 21), edgecolor="black")
    plt.xlabel("Misses / (epsilon * total requirement)")
    plt.ylabel("Instances")
    plt.title(f"Almost-cover misses, epsilon = {epsilon}")
    if path is None:
        plt.show()
    else:
        plt.savefig(path, bbox_inches="tight")
        plt.close()


def main():
    parser = argparse.ArgumentParser(description="Histogram of almost-cover miss ratios on random instances")
    parser.add_argument("--epsilon", default="1/2")
    parser.add_argument("--instances", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("-o", "--output", default=None, help="image file, shown on screen when omitted")
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO)
    if args.output is not None:
        matplotlib.use("Agg")
    ratios = collect_miss_ratios(Fraction(args.epsilon), args.instances, args.seed)
    print(f"instances = {len(ratios)}, mean ratio = {np.mean(ratios) if ratios else 0:.3f}")
    plot_miss_ratios(ratios, args.epsilon, args.output)


if __name__ == "__main__":
    main()
