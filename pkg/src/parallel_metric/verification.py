"""Parallelism certificates, necessity checks, quotient metrics and brute-force oracles.

Two sets ``A``, ``B`` are parallel when ``d(a, B) = d(A, B) = d(A, b)`` for
every ``a`` in ``A`` and ``b`` in ``B``.  For a :class:`DyadicMetric` the
equalities are checked exactly; for float metrics up to an absolute ``tol``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .construction import ChainWitness, ConstructionTrace, ScaleCoverLevel, optimal_chain, transport_chain
from .cover import Partition
from .errors import CertificationFailed, EmptySetError
from .metric_core import (
    DyadicMetric,
    DyadicValue,
    FiniteMetricSpace,
    Metric,
    ValidationReport,
    _scalar,
    _table,
    set_distance_pair,
    validate_metric,
)

DEFAULT_TOL = 1e-9
ORACLE_MAX_POINTS = 12


@dataclass(frozen=True)
class ParallelViolation:
    blocks: tuple[int, int]
    point: int
    side: str  # "A" when point is in the first set, "B" otherwise
    point_distance: object
    set_distance: object

    def describe(self) -> str:
        other = "B" if self.side == "A" else "A"
        return "blocks %s: d(%d, %s) = %s but d(A, B) = %s" % (
            self.blocks, self.point, other, _fmt(self.point_distance), _fmt(self.set_distance))

    def to_dict(self) -> dict:
        return {
            "blocks": list(self.blocks),
            "point": self.point,
            "side": self.side,
            "point_distance": _jsonable(self.point_distance),
            "set_distance": _jsonable(self.set_distance),
        }


def _fmt(v) -> str:
    if isinstance(v, DyadicValue):
        return "%d/2^%d" % (v.numerator, v.scale_exp)
    return repr(v)


def _jsonable(v):
    if isinstance(v, DyadicValue):
        return {"scaled": v.numerator, "scale_exp": v.scale_exp}
    return float(v)


def _effective_tol(m: Metric, tol: float | None) -> float:
    if isinstance(m, DyadicMetric):
        return 0
    return DEFAULT_TOL if tol is None else tol


def _pair_scan(m: Metric, A: Iterable[int], B: Iterable[int], tol, blocks=(0, 1)):
    """Set distance, per-point distances and all violations for one pair."""
    ia = np.fromiter(sorted(set(A)), dtype=np.intp)
    ib = np.fromiter(sorted(set(B)), dtype=np.intp)
    if ia.size == 0 or ib.size == 0:
        raise EmptySetError("parallelism needs nonempty sets")
    sub = _table(m)[np.ix_(ia, ib)]
    to_a, to_b = sub.min(axis=1), sub.min(axis=0)
    dab = min(to_a)
    exact = isinstance(m, DyadicMetric)

    def off(v):
        return v != dab if exact else abs(float(v) - float(dab)) > tol

    per_point = []
    violations = []
    for side, pts, vals in (("A", ia, to_a), ("B", ib, to_b)):
        for x, v in zip(pts, vals):
            ok = not off(v)
            per_point.append((side, int(x), _scalar(m, v), ok))
            if not ok:
                violations.append(ParallelViolation(blocks, int(x), side, _scalar(m, v), _scalar(m, dab)))
    return _scalar(m, dab), per_point, violations


def is_parallel_pair(m: Metric, A: Iterable[int], B: Iterable[int],
                     tol: float | None = None) -> ParallelViolation | None:
    """``None`` when ``A`` and ``B`` are parallel, else the first violation.

    Points of ``A`` are scanned before points of ``B``, each in index order.
    """
    _, _, bad = _pair_scan(m, list(A), list(B), _effective_tol(m, tol))
    return bad[0] if bad else None


@dataclass
class PairRecord:
    blocks: tuple[int, int]
    distance: object
    attained_by: tuple[int, int]
    per_point: list[tuple[str, int, object, bool]]
    violations: list[ParallelViolation]
    witnesses: dict[int, ChainWitness] = field(default_factory=dict)


@dataclass
class ParallelCertificate:
    tol: float
    pairs: list[PairRecord]

    @property
    def violations(self) -> list[ParallelViolation]:
        return [v for rec in self.pairs for v in rec.violations]

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def first_violation(self) -> ParallelViolation | None:
        bad = self.violations
        return bad[0] if bad else None

    def distance(self, i: int, j: int):
        if i == j:
            return None
        i, j = min(i, j), max(i, j)
        for rec in self.pairs:
            if rec.blocks == (i, j):
                return rec.distance
        raise KeyError((i, j))


def certify_parallel(m: Metric, p: Partition, tol: float | None = None,
                     trace: ConstructionTrace | None = None) -> ParallelCertificate:
    """Check every pair of blocks for parallelism.

    Pairs are scanned lexicographically.  With a construction ``trace`` each
    point also gets a chain witness: the optimal chain between the closest
    pair, transported to start at that point.
    """
    tol = _effective_tol(m, tol)
    pairs = []
    for i in range(p.n_blocks):
        for j in range(i + 1, p.n_blocks):
            A, B = p.blocks[i], p.blocks[j]
            dab, per_point, bad = _pair_scan(m, A, B, tol, (i, j))
            _, (a0, b0) = set_distance_pair(m, A, B)
            rec = PairRecord((i, j), dab, (a0, b0), per_point, bad)
            if trace is not None:
                rec.witnesses = pair_witnesses(trace, p, i, j)
            pairs.append(rec)
    return ParallelCertificate(tol, pairs)


def pair_witnesses(trace: ConstructionTrace, p: Partition, i: int, j: int) -> dict[int, ChainWitness]:
    """Transported chains from every point of blocks ``i`` and ``j`` into the other block."""
    A, B = p.blocks[i], p.blocks[j]
    _, (a0, b0) = set_distance_pair(trace.d, A, B)
    forward = optimal_chain(trace, a0, b0)
    backward = optimal_chain(trace, b0, a0)
    out = {}
    for a in sorted(A):
        out[a] = transport_chain(trace, p, forward, a)
    for b in sorted(B):
        out[b] = transport_chain(trace, p, backward, b)
    return out


@dataclass(frozen=True)
class DichotomyVerdict:
    kind: str  # "disjoint", "coincide" or "violation"
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.kind != "violation"


def disjoint_or_coincide(m: Metric, A: Iterable[int], B: Iterable[int],
                         tol: float | None = None) -> DichotomyVerdict:
    """Parallel closed sets are either disjoint or equal; check which.

    Raises ``ValueError`` when the sets are not parallel to begin with.
    A verdict of kind ``"violation"`` means the pair passed the parallelism
    test yet overlaps without coinciding, or is disjoint at distance zero.
    Both are impossible for a genuine metric, so they point at inconsistent
    input, typically a tolerance that hides nonzero distances.
    """
    A, B = frozenset(A), frozenset(B)
    tol_ = _effective_tol(m, tol)
    v = is_parallel_pair(m, A, B, tol_)
    if v is not None:
        raise ValueError("sets are not parallel: " + v.describe())
    if A == B:
        return DichotomyVerdict("coincide")
    if A & B:
        return DichotomyVerdict("violation", "parallel sets share %s but differ" % sorted(A & B)[:5])
    dab, _ = set_distance_pair(m, A, B)
    if float(dab) <= tol_:
        return DichotomyVerdict("violation", "disjoint parallel sets at distance %s" % _fmt(dab))
    return DichotomyVerdict("disjoint")


def dichotomy_report(m: Metric, p: Partition, tol: float | None = None) -> list[tuple[int, int, DichotomyVerdict]]:
    return [(i, j, disjoint_or_coincide(m, p.blocks[i], p.blocks[j], tol))
            for i in range(p.n_blocks) for j in range(i + 1, p.n_blocks)]


def star_surrogates(m: Metric, p: Partition, tol: float | None = None) -> ValidationReport:
    """Finite content of the lower and upper semicontinuity arguments.

    lower: for ``s`` and ``u`` in one block, every ``x`` in the open ball
    ``B(s, eps)`` has its block inside ``St(B(u, eps))``; equivalently
    ``d(u, block(x)) <= d(s, x)``.

    upper: for ``s`` outside ``St({z})``, the ball ``B(s, d(block(s), z))``
    misses the block of ``z``.  Singletons suffice because the radius for a
    closed set ``F`` is the smallest of the radii for its points.
    """
    tol = _effective_tol(m, tol)
    d = _table(m)
    n = d.shape[0]
    bo = p.block_of
    members = [np.fromiter(sorted(b), dtype=np.intp) for b in p.blocks]
    # to_block[x, k] = d(x, block k)
    to_block = np.stack([d[:, idx].min(axis=1) for idx in members], axis=1)
    report = ValidationReport("star_surrogates")

    def gt(a, b):
        return a > b if tol == 0 else float(a) > float(b) + tol

    def lt(a, b):
        return a < b if tol == 0 else float(a) < float(b) - tol

    for s in range(n):
        for x in range(n):
            if bo[x] == bo[s]:
                continue
            col = to_block[members[bo[s]], bo[x]]
            k = int(np.argmax(col))
            if gt(col[k], d[s, x]):
                u = int(members[bo[s]][k])
                report.add("lower", (s, x, u), "d(%d, block(%d)) > d(%d, %d)" % (u, x, s, x))
    for z in range(n):
        for s in range(n):
            if bo[s] == bo[z]:
                continue
            r = d[members[bo[s]], z].min()
            row = d[s, members[bo[z]]]
            k = int(np.argmin(row))
            if lt(row[k], r):
                x = int(members[bo[z]][k])
                report.add("upper", (s, z, x), "B(%d, d(block(%d), %d)) meets block(%d)" % (s, s, z, z))
    return report


@dataclass(frozen=True)
class QuotientMetric:
    names: tuple[str, ...]
    metric: Metric
    report: ValidationReport

    @property
    def n_blocks(self) -> int:
        return len(self.names)


def quotient_metric(m: Metric, p: Partition, cert: ParallelCertificate) -> QuotientMetric:
    """Distances between blocks, ``D(A, B) = d(A, B)``; a metric when ``cert`` passed."""
    if not cert.passed:
        raise CertificationFailed("quotient needs a passing parallelism certificate", cert)
    k = p.n_blocks
    exact = isinstance(m, DyadicMetric)
    table = np.zeros((k, k), dtype=object if exact else float)
    for rec in cert.pairs:
        i, j = rec.blocks
        v = rec.distance.numerator if exact else rec.distance
        table[i, j] = table[j, i] = v
    q = DyadicMetric(table.tolist(), m.scale_exp) if exact else FiniteMetricSpace(table)
    return QuotientMetric(p.names, q, validate_metric(q, cert.tol if not exact else 0))


def oracle_chain_infimum(delta, x: int, y: int) -> DyadicValue:
    """Cheapest simple chain from ``x`` to ``y`` by explicit enumeration.

    Depth-first over simple chains with cost pruning (weights are positive,
    so a partial chain costing at least the best complete one can be cut).
    """
    n = delta.n_points
    if n > ORACLE_MAX_POINTS:
        raise ValueError("chain oracle is limited to %d points" % ORACLE_MAX_POINTS)
    N = delta.n_max
    if x == y:
        return DyadicValue(0, N)
    w = [[0 if i == j else 1 << (N - int(delta.exps[i, j])) for j in range(n)] for i in range(n)]
    best = [w[x][y]]
    visited = [False] * n
    visited[x] = True

    def walk(cur, cost):
        for v in range(n):
            if visited[v]:
                continue
            c = cost + w[cur][v]
            if c >= best[0]:
                continue
            if v == y:
                best[0] = c
                continue
            visited[v] = True
            walk(v, c)
            visited[v] = False

    walk(x, 0)
    return DyadicValue(best[0], N)


def oracle_delta(levels: Sequence[ScaleCoverLevel], x: int, y: int) -> int:
    """Finest level at which ``x`` and ``y`` share a cover member; 0 if none."""
    best = 0
    for level in levels:
        for family in level.members:
            for u in family:
                if x in u and y in u:
                    best = max(best, level.n)
    return best


def oracle_cross_check(trace: ConstructionTrace) -> tuple[list[tuple], bool]:
    """Compare the gauge and the closure against the brute-force oracles.

    Returns the mismatches and whether the chain oracle was skipped because
    the instance is over its size limit.
    """
    n = trace.d.n_points
    bad = []
    for x in range(n):
        for y in range(x + 1, n):
            e = oracle_delta(trace.levels, x, y)
            if e != int(trace.delta.exps[x, y]):
                bad.append(("delta", x, y, e, int(trace.delta.exps[x, y])))
    if n > ORACLE_MAX_POINTS:
        return bad, True
    for x in range(n):
        for y in range(x + 1, n):
            v = oracle_chain_infimum(trace.delta, x, y)
            if v != trace.d[x, y]:
                bad.append(("closure", x, y, v.numerator, int(trace.d.scaled[x, y])))
    return bad, False
