"""Deterministic instance generators.

Every generator is a pure function of ``(params, seed)``; the seed only
matters when the instance has random parts (jitter, randomly sampled circle
angles, or the ``random_partition`` kind).
"""

from __future__ import annotations

import numpy as np

from .instances import InstanceFile

KINDS = ("circles", "segments", "product_fibers", "random_partition")

DEFAULTS = {
    "circles": {"radii": [1.0, 1.2], "points": 32, "sampling": "random", "jitter": 0.0},
    "segments": {"count": 2, "points": 5, "separation": 1.0, "length": 1.0, "jitter": 0.0},
    "product_fibers": {"fiber_points": 4, "base_points": 3, "fiber_spacing": 0.25,
                       "base_spacing": 1.0, "jitter": 0.0},
    "random_partition": {"points": 20, "blocks": 3, "dim": 2, "scale": 1.0},
}


def _round(a: np.ndarray) -> list:
    # 12 significant digits keep files short and still reload exactly.
    return [[float("%.12g" % v) for v in row] for row in a]


def _check(cond, msg):
    if not cond:
        raise ValueError(msg)


def circles(rng, radii, points, sampling, jitter):
    """Concentric circles, one block each.

    With ``sampling="uniform"`` every circle gets the same equally spaced
    angles; the rotational symmetry then makes the circles parallel in the
    plane.  ``"random"`` draws sorted uniform angles per circle, which breaks
    the symmetry.
    """
    _check(len(radii) >= 1 and all(r > 0 for r in radii), "radii must be positive")
    _check(len(set(radii)) == len(radii), "radii must be distinct")
    _check(points >= 1, "need at least one point per circle")
    _check(sampling in ("random", "uniform"), "sampling must be 'random' or 'uniform'")
    coords, labels = [], []
    for k, r in enumerate(radii):
        if sampling == "uniform":
            t = 2 * np.pi * np.arange(points) / points
        else:
            t = np.sort(rng.random(points)) * 2 * np.pi
        xy = np.column_stack([r * np.cos(t), r * np.sin(t)])
        coords.append(xy)
        labels += ["C%d" % k] * points
    return np.vstack(coords), labels


def segments(rng, count, points, separation, length, jitter):
    _check(count >= 1 and points >= 1, "count and points must be positive")
    _check(separation > 0 and length >= 0, "separation must be positive")
    _check(points == 1 or length > 0, "several points on a segment need positive length")
    xs = np.linspace(0.0, length, points)
    coords = np.vstack([np.column_stack([xs, np.full(points, j * separation)]) for j in range(count)])
    labels = ["S%d" % (i // points) for i in range(count * points)]
    return coords, labels


def product_fibers(rng, fiber_points, base_points, fiber_spacing, base_spacing, jitter):
    _check(fiber_points >= 1 and base_points >= 1, "grid sizes must be positive")
    _check(fiber_spacing > 0 and base_spacing > 0, "spacings must be positive")
    coords, labels = [], []
    for q in range(base_points):
        for f in range(fiber_points):
            coords.append([f * fiber_spacing, q * base_spacing])
            labels.append("F%d" % q)
    return np.array(coords), labels


def random_partition(rng, points, blocks, dim, scale):
    _check(points >= 1 and 1 <= blocks <= points, "need 1 <= blocks <= points")
    _check(dim >= 1 and scale > 0, "dim and scale must be positive")
    coords = rng.random((points, dim)) * scale
    labels = np.concatenate([np.arange(blocks), rng.integers(0, blocks, points - blocks)])
    labels = rng.permutation(labels)
    return coords, ["B%d" % k for k in labels]


_BUILDERS = {
    "circles": circles,
    "segments": segments,
    "product_fibers": product_fibers,
    "random_partition": random_partition,
}


def generate(kind: str, params: dict | None = None, seed: int = 0) -> InstanceFile:
    if kind not in _BUILDERS:
        raise ValueError("unknown kind %r; choose from %s" % (kind, ", ".join(KINDS)))
    params = dict(params or {})
    unknown = set(params) - set(DEFAULTS[kind])
    if unknown:
        raise ValueError("unknown parameters for %s: %s" % (kind, ", ".join(sorted(unknown))))
    full = {**DEFAULTS[kind], **params}
    if not 0 <= int(seed) < 2 ** 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    rng = np.random.default_rng(int(seed))
    coords, labels = _BUILDERS[kind](rng, **full)
    jitter = full.get("jitter", 0.0)
    if jitter:
        _check(jitter > 0, "jitter must be non-negative")
        coords = coords + rng.normal(scale=jitter, size=coords.shape)
    coords = _round(coords)
    if len({tuple(c) for c in coords}) != len(coords):
        raise ValueError("generated points coincide; adjust the parameters")
    name = "%s-%d" % (kind, seed)
    return InstanceFile(name=name, coords=coords, labels=labels)
