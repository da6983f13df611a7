"""Between-group one-way F-test with a permutation p-value.

The F statistic is the classical between/within mean-square ratio. Instead
of the parametric F distribution, significance comes from permuting group
membership: exact enumeration when the two-group split count fits the
permutation budget, otherwise Monte-Carlo sampling with add-one smoothing.
Groups are canonically ordered internally so results do not depend on the
order the caller lists them in.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations as _index_combinations
from math import comb

import numpy as np


@dataclass(frozen=True)
class FTestResult:
    f_statistic: float
    p_value: float
    df_between: int
    df_within: int
    n_permutations: int


def _f_from_groups(pooled: np.ndarray, sizes: np.ndarray) -> float:
    bounds = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    sums = np.add.reduceat(pooled, bounds)
    means = sums / sizes
    grand = pooled.mean()
    ssb = float(np.sum(sizes * (means - grand) ** 2))
    sst = float(np.sum((pooled - grand) ** 2))
    ssw = sst - ssb
    df1 = len(sizes) - 1
    df2 = len(pooled) - len(sizes)
    if ssb <= 0.0:
        return 0.0
    if ssw <= 0.0:
        return np.inf
    return (ssb / df1) / (ssw / df2)


def one_way_f_test(
    groups,
    n_permutations: int = 10000,
    rng: np.random.Generator | int = 0,
) -> FTestResult:
    """F statistic between groups and its permutation p-value.

    Every group needs at least two values. A zero within-group variance with
    unequal means yields an infinite F and the smallest reportable p. For two
    groups whose distinct label assignments fit within ``n_permutations`` the
    null distribution is enumerated exactly; otherwise it is sampled with
    (1 + hits) / (1 + draws) smoothing.
    """
    arrays = [np.asarray(g, dtype=float).ravel() for g in groups]
    if len(arrays) < 2:
        raise ValueError("need at least two groups")
    if any(len(a) < 2 for a in arrays):
        raise ValueError("every group needs at least 2 values")
    if n_permutations < 1:
        raise ValueError("n_permutations must be >= 1")

    # canonical order: results must not depend on caller's group ordering
    arrays.sort(key=lambda a: (-len(a), a.tolist()))
    sizes = np.array([len(a) for a in arrays])
    pooled = np.concatenate(arrays)
    n = len(pooled)
    df1 = len(arrays) - 1
    df2 = n - len(arrays)

    f_obs = _f_from_groups(pooled, sizes)
    if np.isinf(f_obs):
        return FTestResult(np.inf, 1.0 / (n_permutations + 1), df1, df2, n_permutations)
    if f_obs == 0.0:
        return FTestResult(0.0, 1.0, df1, df2, n_permutations)

    if len(arrays) == 2 and comb(n, int(sizes[0])) <= n_permutations:
        total = comb(n, int(sizes[0]))
        hits = 0
        idx_all = frozenset(range(n))
        for first in _index_combinations(range(n), int(sizes[0])):
            rest = sorted(idx_all - set(first))
            perm = np.concatenate([pooled[list(first)], pooled[rest]])
            if _f_from_groups(perm, sizes) >= f_obs:
                hits += 1
        return FTestResult(f_obs, hits / total, df1, df2, total)

    rng = np.random.default_rng(rng) if isinstance(rng, int) else rng
    bounds = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    grand = pooled.mean()
    sst = float(np.sum((pooled - grand) ** 2))
    hits = 0
    done = 0
    while done < n_permutations:
        block = min(2048, n_permutations - done)
        perms = rng.permuted(np.broadcast_to(pooled, (block, n)), axis=1)
        sums = np.add.reduceat(perms, bounds, axis=1)
        ssb = ((sums / sizes - grand) ** 2 * sizes).sum(axis=1)
        ssw = sst - ssb
        with np.errstate(divide="ignore", invalid="ignore"):
            f_perm = np.where(ssw > 0, (ssb / df1) / (ssw / df2), np.inf)
        hits += int(np.sum(f_perm >= f_obs))
        done += block
    p = (1 + hits) / (1 + n_permutations)
    return FTestResult(f_obs, p, df1, df2, n_permutations)
