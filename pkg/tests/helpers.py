"""Instance builders and brute-force oracles shared by the test modules."""

import itertools

import numpy as np

from parallel_metric.construction import DeltaTable
from parallel_metric.cover import Partition
from parallel_metric.generators import generate
from parallel_metric.instances import space_from_instance
from parallel_metric.metric_core import FiniteMetricSpace, euclidean_from_points

# criterion name -> (passed, detail); printed in the terminal summary
ACCEPTANCE_RESULTS = {}


def random_labels(rng, n, k):
    k = min(k, n)
    labels = np.concatenate([np.arange(k), rng.integers(0, k, n - k)])
    return rng.permutation(labels).tolist()


def random_space(rng, n, kind="euclidean", scale=1.0):
    pts = rng.random((n, 2)) * scale
    if kind == "l1":
        d = np.abs(pts[:, None, :] - pts[None, :, :]).sum(-1)
        return FiniteMetricSpace(d)
    return euclidean_from_points(pts)


def mixed_instance(seed):
    """One instance from a rotating mix of generators, at most 64 points and 8 blocks."""
    rng = np.random.default_rng(seed)
    kind = seed % 5
    if kind == 0:
        n = int(rng.integers(2, 65))
        inst = generate("random_partition", {"points": n, "blocks": int(rng.integers(1, min(8, n) + 1)),
                                             "scale": float(rng.uniform(0.3, 3))}, seed)
    elif kind == 1:
        c = int(rng.integers(2, 5))
        radii = sorted(rng.uniform(0.2, 2.0, c).round(3).tolist())
        if len(set(radii)) < c:
            radii = [0.5 + 0.3 * i for i in range(c)]
        inst = generate("circles", {"radii": radii, "points": int(rng.integers(2, 64 // c + 1))}, seed)
    elif kind == 2:
        inst = generate("segments", {"count": int(rng.integers(2, 9)), "points": int(rng.integers(1, 8)),
                                     "separation": float(rng.uniform(0.05, 1.5)),
                                     "length": float(rng.uniform(0.1, 2)), "jitter": 0.01}, seed)
    elif kind == 3:
        inst = generate("product_fibers", {"fiber_points": int(rng.integers(1, 9)),
                                           "base_points": int(rng.integers(1, 9)),
                                           "fiber_spacing": float(rng.uniform(0.05, 0.5)),
                                           "jitter": 0.02}, seed)
    else:
        n = int(rng.integers(2, 41))
        m = random_space(rng, n, "l1", float(rng.uniform(0.2, 2)))
        return m, Partition.from_labels(random_labels(rng, n, int(rng.integers(1, 9))))
    return space_from_instance(inst)


def delta_from_exps(exps):
    e = np.array(exps, dtype=np.int64)
    np.fill_diagonal(e, -1)
    n_max = int(e.max())
    minus = np.full(e.shape, -1, dtype=np.int64)
    return DeltaTable(e, n_max, minus, minus)


def brute_closure(w, x, y):
    """Cheapest chain over every ordering of every subset of intermediate points."""
    n = len(w)
    others = [v for v in range(n) if v not in (x, y)]
    best = w[x][y]
    for k in range(1, len(others) + 1):
        for mid in itertools.permutations(others, k):
            path = (x,) + mid + (y,)
            best = min(best, sum(w[a][b] for a, b in zip(path, path[1:])))
    return best
