"""Reference values for the statistics tests.

Re-implements the SplitMix64 generator from tests/support.hpp and feeds the
resulting samples to scipy. The printed numbers are frozen into
tests/stats_test.cpp and tests/acceptance_test.cpp; rerun this script after
changing a seed or a sample recipe.
"""

import math

import numpy as np
from scipy import stats

MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def uniform(self):
        return (self.next() >> 11) * 2.0**-53

    def normal(self):
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def exponential(self):
        return -math.log(1.0 - self.uniform())


def ad_sample(kind, seed, n=200):
    rng = SplitMix64(seed)
    draw = rng.normal if kind == "normal" else rng.exponential
    return [draw() for _ in range(n)]


def spearman_sample(seed, n=53):
    """x ~ N(0,1); y = coupling * x + noise, floored to quarters on odd seeds to force ties."""
    rng = SplitMix64(seed)
    coupling = (seed % 7) / 10.0
    xs, ys = [], []
    for _ in range(n):
        x = rng.normal()
        y = coupling * x + rng.normal()
        if seed % 2:
            y = math.floor(y * 4.0) / 4.0
        xs.append(x)
        ys.append(y)
    return xs, ys


def main():
    for kind, seed in (("normal", 20240601), ("exponential", 20240602)):
        sample = ad_sample(kind, seed)
        res = stats.anderson(np.array(sample), dist="norm")
        print(f"AD {kind} seed={seed} A2={res.statistic:.17g} "
              f"crit={list(res.critical_values)}")
    for seed in range(1, 21):
        xs, ys = spearman_sample(seed)
        res = stats.spearmanr(xs, ys)
        print(f"    {{{seed}, {res.statistic:.17g}, {res.pvalue:.17g}}},")


if __name__ == "__main__":
    main()
