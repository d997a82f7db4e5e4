from fractions import Fraction

import matplotlib

matplotlib.use("Agg")

from missHistogram import collect_miss_ratios, plot_miss_ratios  # noqa: E402


def test_ratios_stay_below_one():
    ratios = collect_miss_ratios(Fraction(1, 2), instances=4, seed=1, n=5, m=2, max_multiplicity=4)
    assert len(ratios) <= 4
    assert all(0 <= r < 1 for r in ratios)


def test_collection_is_seeded():
    first = collect_miss_ratios(Fraction(1, 2), instances=3, seed=2, n=4, m=2, max_multiplicity=3)
    second = collect_miss_ratios(Fraction(1, 2), instances=3, seed=2, n=4, m=2, max_multiplicity=3)
    assert first == second


def test_plot_to_file(tmp_path):
    target = tmp_path / "misses.png"
    plot_miss_ratios([0.0, 0.25, 0.5, 0.5], "1/2", target)
    assert target.stat().st_size > 0
