"""Construction of a metric under which all blocks of a partition are parallel.

Pipeline, for a metric ``rho`` and a partition ``P``:

1. truncate ``rho`` to ``rho_hat = min(rho, 1)``;
2. for each level ``n = 1..N`` cover ``X`` by greedy ``rho_hat``-balls of
   radius ``2**-(n+2)`` and refine that cover, block by block, into a family
   ``U_n(C)`` that every block meets either completely or not at all;
3. set ``delta(x, y) = 2**-n`` for the finest level ``n`` at which ``x`` and
   ``y`` share a member of some ``U_n(C)`` (level 0 is the whole space);
4. close ``delta`` under chains (all-pairs shortest paths) in exact dyadic
   arithmetic.

Every distance of the result is an integer multiple of ``2**-N``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cover import Cover, Partition, star
from .errors import InternalConsistencyError, ValidationFailed
from .metric_core import (
    DyadicMetric,
    DyadicValue,
    FiniteMetricSpace,
    diameter,
    min_positive_distance,
    truncate_to_unit,
    validate_metric,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LevelPlan:
    n_max: int

    @property
    def radii(self) -> tuple[float, ...]:
        return tuple(net_radius(n) for n in range(1, self.n_max + 1))


def net_radius(n: int) -> float:
    return 2.0 ** -(n + 2)


def plan_levels(m: FiniteMetricSpace) -> LevelPlan:
    """Number of levels needed before every base ball is a singleton.

    ``N = ceil(log2(1 / min_distance)) + 1``, computed without logarithms so
    that exact powers of two land on the right side.
    """
    md = min_positive_distance(m)
    if md > 1:
        raise ValueError("plan_levels expects a metric bounded by 1")
    k = 0
    while 2.0 ** -k > md:
        k += 1
    return LevelPlan(k + 1)


def build_base_cover(m: FiniteMetricSpace, n: int) -> tuple[frozenset, ...]:
    """Greedy net: balls of radius ``2**-(n+2)`` around the lowest uncovered point."""
    if n < 1:
        raise ValueError("levels start at 1")
    r = net_radius(n)
    uncovered = set(range(m.n_points))
    cover = []
    while uncovered:
        p = min(uncovered)
        ball = frozenset(np.flatnonzero(m.dist[p] <= r).tolist())
        cover.append(ball)
        uncovered -= ball
    return tuple(cover)


@dataclass(frozen=True)
class ScaleCoverLevel:
    """One level of the scale covers.

    All per-block fields are tuples indexed by block id.  ``v_of[k]`` holds
    indices into ``base_cover``; ``members[k][j]`` is ``W(C_k)`` intersected
    with ``base_cover[v_of[k][j]]``.
    """

    n: int
    base_cover: tuple[frozenset, ...]
    v_of: tuple[tuple[int, ...], ...]
    F: tuple[frozenset, ...]
    W: tuple[frozenset, ...]
    members: tuple[tuple[frozenset, ...], ...]


def build_scale_cover(m: FiniteMetricSpace, p: Partition, n: int, check: bool = True) -> ScaleCoverLevel:
    base = build_base_cover(m, n)
    X = frozenset(range(m.n_points))
    stars = [star(p, V) for V in base]
    v_of, Fs, Ws, members = [], [], [], []
    for C in p.blocks:
        idx = tuple(i for i, V in enumerate(base) if V & C)
        reach = frozenset().union(*(base[i] for i in idx))
        F = star(p, X - reach)
        W = frozenset.intersection(*(stars[i] for i in idx)) - F
        # W contains C, which meets every V in V(C), so no member is empty;
        # the filter only guards the all-members check below.
        U = tuple(u for u in (W & base[i] for i in idx) if u)
        v_of.append(idx)
        Fs.append(F)
        Ws.append(W)
        members.append(U)
    level = ScaleCoverLevel(n, base, tuple(v_of), tuple(Fs), tuple(Ws), tuple(members))
    if check:
        bad = check_claim_diameter(m, level) + check_claim_saturation(p, level)
        if bad:
            raise InternalConsistencyError("scale cover at level %d violates its defining properties" % n,
                                           witness=bad[0])
    return level


def check_claim_diameter(m: FiniteMetricSpace, level: ScaleCoverLevel) -> list[tuple]:
    """Members of ``U_n(C)`` whose ``rho_hat``-diameter exceeds ``2**-n``."""
    bound = 2.0 ** -level.n
    return [("diameter", level.n, k, j)
            for k, U in enumerate(level.members)
            for j, u in enumerate(U)
            if diameter(m, u) > bound]


def check_claim_saturation(p: Partition, level: ScaleCoverLevel) -> list[tuple]:
    """Blocks that meet some member of ``U_n(C)`` but not all, or are not inside their union.

    Exhaustive over blocks times members.
    """
    bad = []
    for k, U in enumerate(level.members):
        union = frozenset().union(*U)
        for a, A in enumerate(p.blocks):
            hits = [bool(A & u) for u in U]
            if not any(hits):
                continue
            if not A <= union:
                bad.append(("not_contained", level.n, k, a))
            if not all(hits):
                bad.append(("misses_member", level.n, k, a, hits.index(False)))
    return bad


@dataclass(frozen=True)
class DeltaTable:
    """Gauge exponents: ``delta(x, y) = 2**-exps[x, y]`` for ``x != y``.

    The diagonal holds -1 and stands for ``delta(x, x) = 0``.  ``src_block``
    and ``src_member`` record a member of ``U_e(C)`` containing both points
    (``-1`` when only level 0 does).
    """

    exps: np.ndarray
    n_max: int
    src_block: np.ndarray
    src_member: np.ndarray

    @property
    def n_points(self) -> int:
        return self.exps.shape[0]

    def scaled(self, scale_exp: int | None = None) -> np.ndarray:
        """Integer weights ``delta * 2**scale_exp``."""
        s = self.n_max if scale_exp is None else scale_exp
        n = self.n_points
        dtype = np.int64 if s <= 60 else object
        w = np.zeros((n, n), dtype=dtype)
        for x in range(n):
            for y in range(n):
                if x != y:
                    w[x, y] = 1 << (s - int(self.exps[x, y]))
        return w

    def value(self, x: int, y: int) -> DyadicValue:
        if x == y:
            return DyadicValue(0, self.n_max)
        return DyadicValue.power_of_half(int(self.exps[x, y]), self.n_max)


def build_delta(levels: Sequence[ScaleCoverLevel], plan: LevelPlan, n_points: int) -> DeltaTable:
    exps = np.zeros((n_points, n_points), dtype=np.int64)
    src_block = np.full((n_points, n_points), -1, dtype=np.int64)
    src_member = np.full((n_points, n_points), -1, dtype=np.int64)
    for level in sorted(levels, key=lambda lv: lv.n):
        for k, U in enumerate(level.members):
            for j, u in enumerate(U):
                if len(u) < 2:
                    continue
                idx = np.fromiter(sorted(u), dtype=np.intp)
                sel = np.ix_(idx, idx)
                upd = exps[sel] < level.n
                exps[sel] = np.where(upd, level.n, exps[sel])
                src_block[sel] = np.where(upd, k, src_block[sel])
                src_member[sel] = np.where(upd, j, src_member[sel])
    np.fill_diagonal(exps, -1)
    np.fill_diagonal(src_block, -1)
    np.fill_diagonal(src_member, -1)
    for a in (exps, src_block, src_member):
        a.setflags(write=False)
    return DeltaTable(exps, plan.n_max, src_block, src_member)


def chain_closure(delta: DeltaTable) -> DyadicMetric:
    """All-pairs shortest chains over the complete graph weighted by ``delta``.

    Floyd-Warshall on integers scaled by ``2**n_max``, so the result is exact.
    """
    d = delta.scaled()
    for k in range(delta.n_points):
        d = np.minimum(d, d[:, k:k + 1] + d[k:k + 1, :])
    return DyadicMetric(d, delta.n_max)


@dataclass(frozen=True)
class ChainStep:
    level: int
    block: int
    member: int


@dataclass(frozen=True)
class ChainWitness:
    """A chain ``x_0, ..., x_m`` with, per step, the cover member it was charged to."""

    points: tuple[int, ...]
    steps: tuple[ChainStep, ...]
    scale_exp: int

    @property
    def cost(self) -> DyadicValue:
        return DyadicValue(sum(1 << (self.scale_exp - s.level) for s in self.steps), self.scale_exp)

    def to_dict(self) -> dict:
        return {
            "points": list(self.points),
            "steps": [[s.level, s.block, s.member] for s in self.steps],
            "cost_scaled": self.cost.numerator,
        }


@dataclass(frozen=True)
class ConstructionTrace:
    metric: FiniteMetricSpace
    partition: Partition
    plan: LevelPlan
    levels: tuple[ScaleCoverLevel, ...]
    delta: DeltaTable
    d: DyadicMetric

    def member(self, step: ChainStep) -> frozenset:
        if step.level == 0:
            return frozenset(range(self.metric.n_points))
        return self.levels[step.level - 1].members[step.block][step.member]


def validate_chain(trace: ConstructionTrace, chain: ChainWitness, require_simple: bool = True) -> list[str]:
    problems = []
    if len(chain.points) != len(chain.steps) + 1:
        problems.append("point/step count mismatch")
        return problems
    for i, s in enumerate(chain.steps):
        if not 0 <= s.level <= len(trace.levels):
            problems.append("step %d: level %d out of range" % (i, s.level))
            continue
        u = trace.member(s)
        if chain.points[i] not in u or chain.points[i + 1] not in u:
            problems.append("step %d: points %d, %d do not share the recorded member"
                            % (i, chain.points[i], chain.points[i + 1]))
    if require_simple and len(set(chain.points)) != len(chain.points):
        problems.append("chain revisits a point")
    return problems


def optimal_chain(trace: ConstructionTrace, x: int, y: int) -> ChainWitness:
    """A simple chain from ``x`` to ``y`` whose cost equals ``d(x, y)``."""
    w = trace.delta.scaled()
    d = trace.d.scaled
    pts, steps = [x], []
    cur = x
    while cur != y:
        target = d[cur, y]
        nxt = next(v for v in range(trace.d.n_points)
                   if v != cur and w[cur, v] + d[v, y] == target)
        e = int(trace.delta.exps[cur, nxt])
        if e == 0:
            steps.append(ChainStep(0, trace.partition.block_of[cur], 0))
        else:
            steps.append(ChainStep(e, int(trace.delta.src_block[cur, nxt]),
                                   int(trace.delta.src_member[cur, nxt])))
        pts.append(nxt)
        cur = nxt
    return ChainWitness(tuple(pts), tuple(steps), trace.plan.n_max)


def transport_chain(trace: ConstructionTrace, p: Partition, chain: ChainWitness, a: int) -> ChainWitness:
    """Move ``chain`` so that it starts at ``a``, keeping every step's level.

    ``a`` must lie in the block of ``chain.points[0]``.  Step ``i`` is replaced
    by a step inside a member of the same ``U_{n_i}(C_i)`` that lands in the
    block of the original ``x'_i``, so the charged cost is unchanged.
    """
    if p.block_of[a] != p.block_of[chain.points[0]]:
        raise ValueError("a must lie in the block where the chain starts")
    pts = [a]
    steps = []
    for i, s in enumerate(chain.steps):
        prev = pts[-1]
        target = p.blocks[p.block_of[chain.points[i + 1]]]
        if s.level == 0:
            steps.append(ChainStep(0, p.block_of[prev], 0))
            pts.append(min(target))
            continue
        family = trace.levels[s.level - 1].members[s.block]
        j = next((j for j, u in enumerate(family) if prev in u), None)
        if j is None:
            raise InternalConsistencyError("point %d is outside the scale cover at step %d" % (prev, i),
                                           witness=(s.level, s.block, prev))
        landing = target & family[j]
        if not landing:
            raise InternalConsistencyError("block of point %d misses a cover member at step %d"
                                           % (chain.points[i + 1], i),
                                           witness=(s.level, s.block, j))
        steps.append(ChainStep(s.level, s.block, j))
        pts.append(min(landing))
    return ChainWitness(tuple(pts), tuple(steps), chain.scale_exp)


def dominates(d: DyadicMetric, rho: FiniteMetricSpace) -> list[tuple[int, int]]:
    """Pairs where ``rho(x, y) > d(x, y)``, compared exactly."""
    f = 2.0 ** d.scale_exp
    n = d.n_points
    return [(x, y) for x in range(n) for y in range(n)
            if float(rho.dist[x, y]) * f > int(d.scaled[x, y])]


def construct_parallel_metric(m: FiniteMetricSpace, p: Cover, max_level: int | None = None,
                              check: bool = True) -> tuple[DyadicMetric, ConstructionTrace]:
    """Build the exact metric for which every pair of blocks of ``p`` is parallel.

    ``max_level`` may raise the number of levels above the planned one; the
    extra levels consist of singletons and leave the result unchanged.
    """
    report = validate_metric(m)
    if not report.ok:
        raise ValidationFailed("input is not a metric", report)
    if not isinstance(p, Partition):
        p = Partition.from_cover(p)
    if p.n_points != m.n_points:
        raise ValidationFailed("partition has %d points, metric has %d" % (p.n_points, m.n_points))

    rho = truncate_to_unit(m)
    plan = plan_levels(rho) if m.n_points > 1 else LevelPlan(0)
    if max_level is not None:
        if max_level < plan.n_max:
            raise ValueError("max_level %d is below the %d levels this instance needs"
                             % (max_level, plan.n_max))
        plan = LevelPlan(max_level)
    log.debug("building %d levels for %d points, %d blocks", plan.n_max, m.n_points, p.n_blocks)
    levels = tuple(build_scale_cover(rho, p, n, check=check) for n in range(1, plan.n_max + 1))
    delta = build_delta(levels, plan, m.n_points)
    d = chain_closure(delta)
    if check:
        bad = dominates(d, rho)
        if bad:
            raise InternalConsistencyError("constructed metric is below the truncated input", witness=bad[0])
    return d, ConstructionTrace(rho, p, plan, levels, delta, d)
