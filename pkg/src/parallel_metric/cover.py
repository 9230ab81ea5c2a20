"""Covers, partitions and the star operator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import ValidationFailed
from .metric_core import DyadicMetric, Metric, ValidationReport


@dataclass(frozen=True)
class Cover:
    """A family of point sets over ``range(n_points)``, not necessarily disjoint."""

    n_points: int
    blocks: tuple[frozenset, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(frozenset(int(x) for x in b) for b in self.blocks))
        names = tuple(str(s) for s in self.names) or tuple(str(i) for i in range(len(self.blocks)))
        if len(names) != len(self.blocks):
            raise ValueError("need one name per block")
        object.__setattr__(self, "names", names)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class Partition(Cover):
    """A cover whose blocks are nonempty, pairwise disjoint and cover every point.

    Build one with :meth:`from_labels` or :meth:`from_cover`; both refuse
    anything that is not a partition.
    """

    block_of: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        super().__post_init__()
        report = validate_partition(self)
        if not report.ok:
            raise ValidationFailed("not a partition", report)
        owner = [0] * self.n_points
        for k, b in enumerate(self.blocks):
            for x in b:
                owner[x] = k
        object.__setattr__(self, "block_of", tuple(owner))

    @classmethod
    def from_labels(cls, labels: Sequence[Hashable]) -> "Partition":
        """Blocks in order of first appearance of each label."""
        order: dict = {}
        for x, lab in enumerate(labels):
            order.setdefault(lab, []).append(x)
        return cls(len(labels), tuple(order.values()), tuple(str(k) for k in order))

    @classmethod
    def from_cover(cls, cover: Cover) -> "Partition":
        return cls(cover.n_points, cover.blocks, cover.names)

    @classmethod
    def singletons(cls, n_points: int) -> "Partition":
        return cls(n_points, tuple([x] for x in range(n_points)))

    def labels(self) -> list[str]:
        return [self.names[k] for k in self.block_of]


def validate_partition(c: Cover) -> ValidationReport:
    report = ValidationReport("partition")
    seen: dict[int, int] = {}
    for k, b in enumerate(c.blocks):
        if not b:
            report.add("empty_block", (k,), "block %s is empty" % c.names[k])
        for x in sorted(b):
            if not 0 <= x < c.n_points:
                report.add("out_of_range", (x, k), "point %d in block %s" % (x, c.names[k]))
            elif x in seen:
                report.add("overlap", (x, seen[x], k),
                           "point %d lies in blocks %s and %s" % (x, c.names[seen[x]], c.names[k]))
            else:
                seen[x] = k
    for x in range(c.n_points):
        if x not in seen:
            report.add("uncovered", (x,), "point %d is in no block" % x)
    return report


def star(p: Cover, S: Iterable[int]) -> frozenset:
    """Union of all blocks of ``p`` that meet ``S``."""
    S = frozenset(S)
    if isinstance(p, Partition):
        return frozenset().union(*(p.blocks[p.block_of[x]] for x in S))
    return frozenset().union(*(b for b in p.blocks if b & S))


def is_saturated(p: Cover, S: Iterable[int]) -> bool:
    S = frozenset(S)
    return star(p, S) == S


@dataclass(frozen=True)
class ModulusReport:
    scales: tuple[float, ...]
    modulus: tuple[float, ...]
    witnesses: tuple[tuple[int, int] | None, ...]

    def rows(self):
        return list(zip(self.scales, self.modulus, self.witnesses))


def semicontinuity_diagnostic(m: Metric, p: Partition, scales: Sequence[float]) -> ModulusReport:
    """Quantitative stand-in for continuity of a sampled cover.

    For each scale ``eps`` this reports the largest one-sided Hausdorff gap
    ``max_{a in A} d(a, B)`` over ordered pairs ``x in A``, ``y in B`` with
    ``d(x, y) <= eps``.  Both sides are covered because the pair set is
    symmetric.  A modulus that shrinks with ``eps`` suggests the sampled
    cover comes from a continuous one.
    """
    d = m.to_float() if isinstance(m, DyadicMetric) else m.dist
    nb = p.n_blocks
    members = [np.fromiter(sorted(b), dtype=np.intp) for b in p.blocks]
    # gap[A, B] = max_{a in A} d(a, B)
    gap = np.zeros((nb, nb))
    for i in range(nb):
        rows = d[members[i]]
        for j in range(nb):
            if i != j:
                gap[i, j] = rows[:, members[j]].min(axis=1).max()
    bo = np.asarray(p.block_of)
    pair_gap = gap[bo[:, None], bo[None, :]]
    out, wit = [], []
    for eps in scales:
        mask = d <= eps
        if not mask.any():
            out.append(0.0)
            wit.append(None)
            continue
        vals = np.where(mask, pair_gap, -np.inf)
        k = int(np.argmax(vals))
        x, y = divmod(k, d.shape[0])
        out.append(float(vals[x, y]))
        wit.append((x, y))
    return ModulusReport(tuple(float(e) for e in scales), tuple(out), tuple(wit))
