"""Acceptance criteria, one test each.

Every test records ``(passed, detail)`` in ``helpers.ACCEPTANCE_RESULTS``
before asserting, so the terminal summary prints a PASS or FAIL line per
criterion even when a test fails.  Run just this file with

    python3 -m pytest -m acceptance -v
"""

import numpy as np
import pytest

from parallel_metric.construction import (
    check_claim_diameter,
    check_claim_saturation,
    construct_parallel_metric,
    dominates,
    validate_chain,
)
from parallel_metric.cover import Cover, Partition
from parallel_metric.errors import ValidationFailed
from parallel_metric.generators import generate
from parallel_metric.instances import space_from_instance
from parallel_metric.metric_core import DyadicMetric, point_set_distance, set_distance, validate_metric
from parallel_metric.verification import (
    certify_parallel,
    dichotomy_report,
    oracle_chain_infimum,
    oracle_delta,
    quotient_metric,
)

from helpers import ACCEPTANCE_RESULTS, brute_closure, mixed_instance, random_labels, random_space

pytestmark = pytest.mark.acceptance

REAL_TOL = 1e-9


def record(key, failures, checked, what):
    ok = not failures
    detail = "%d %s checked" % (checked, what)
    if failures:
        detail += ", %d failed; first: %s" % (len(failures), failures[0])
    ACCEPTANCE_RESULTS[key] = (ok, detail)
    assert ok, detail


def small_instance(seed):
    rng = np.random.default_rng(10_000 + seed)
    n = int(rng.integers(2, 9))
    m = random_space(rng, n, "l1" if seed % 2 else "euclidean", float(rng.uniform(0.05, 2)))
    return m, Partition.from_labels(random_labels(rng, n, int(rng.integers(1, n + 1))))


def test_ac1_constructed_metric_is_parallel_and_dominates():
    failures, count = [], 200
    for seed in range(count):
        m, p = mixed_instance(seed)
        d, trace = construct_parallel_metric(m, p)
        if not certify_parallel(d, p, tol=0).passed:
            failures.append((seed, "not parallel"))
        if not validate_metric(d).ok:
            failures.append((seed, "not a metric"))
        if dominates(d, trace.metric):
            failures.append((seed, "input exceeds constructed"))
        if np.any(np.asarray(d.scaled) > (1 << d.scale_exp)):
            failures.append((seed, "distance above 1"))
    record("AC1 parallel, metric, capped input <= d <= 1", failures, count, "instances")


def test_ac2_scale_cover_claims_hold_at_every_level():
    failures, levels = [], 0
    for seed in range(200):
        m, p = mixed_instance(seed)
        _, trace = construct_parallel_metric(m, p, check=False)
        for lv in trace.levels:
            levels += 1
            bad = check_claim_diameter(trace.metric, lv) + check_claim_saturation(p, lv)
            failures += [(seed,) + b for b in bad]
    record("AC2 diameter and saturation claims", failures, levels, "levels")


def test_ac3_closure_and_gauge_match_oracles():
    failures, pairs, count = [], 0, 120
    for seed in range(count):
        m, p = small_instance(seed)
        _, trace = construct_parallel_metric(m, p)
        w = trace.delta.scaled().tolist()
        n = m.n_points
        for x in range(n):
            for y in range(x + 1, n):
                pairs += 1
                got = trace.d[x, y]
                chain = oracle_chain_infimum(trace.delta, x, y)
                brute = brute_closure(w, x, y)
                if chain != got or brute != int(trace.d.scaled[x, y]):
                    failures.append((seed, x, y, "closure"))
    for seed in range(count, count + 30):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(9, 17))
        m = random_space(rng, n, scale=float(rng.uniform(0.1, 1.5)))
        p = Partition.from_labels(random_labels(rng, n, int(rng.integers(1, 6))))
        _, trace = construct_parallel_metric(m, p)
        for x in range(n):
            for y in range(x + 1, n):
                pairs += 1
                if oracle_delta(trace.levels, x, y) != int(trace.delta.exps[x, y]):
                    failures.append((seed, x, y, "gauge"))
    record("AC3 closure and gauge equal brute-force oracles", failures, pairs, "pairs")


def test_ac4_transported_witnesses_realise_the_block_distance():
    failures, witnesses, count = [], 0, 60
    for seed in range(count):
        m, p = mixed_instance(seed)
        d, trace = construct_parallel_metric(m, p)
        cert = certify_parallel(d, p, trace=trace)
        for rec in cert.pairs:
            i, j = rec.blocks
            A, B = p.blocks[i], p.blocks[j]
            dAB = set_distance(d, A, B)
            for a in A:
                if point_set_distance(d, a, B) != dAB:
                    failures.append((seed, rec.blocks, a, "d(a, B)"))
            for b in B:
                if point_set_distance(d, b, A) != dAB:
                    failures.append((seed, rec.blocks, b, "d(A, b)"))
            for x, wit in rec.witnesses.items():
                witnesses += 1
                other = B if x in A else A
                problems = validate_chain(trace, wit)
                if wit.points[0] != x or wit.points[-1] not in other or problems or wit.cost != dAB:
                    failures.append((seed, rec.blocks, x, problems or "cost %s" % wit.cost))
    record("AC4 transported chains cost exactly d(A, B)", failures, witnesses, "witnesses")


def parallel_real_inputs():
    yield "segments", space_from_instance(generate("segments", {"count": 4, "points": 7}))
    yield "segments-long", space_from_instance(generate("segments", {"count": 3, "points": 12,
                                                                      "separation": 0.3, "length": 2.0}))
    yield "fibers", space_from_instance(generate("product_fibers"))
    yield "fibers-wide", space_from_instance(generate("product_fibers", {"fiber_points": 6, "base_points": 5,
                                                                          "base_spacing": 0.4}))
    yield "circles-uniform", space_from_instance(generate("circles", {"radii": [1, 1.5, 2.5], "points": 20,
                                                                       "sampling": "uniform"}))


def test_ac5_dichotomy_and_quotient():
    failures, checked = [], 0
    for seed in range(60):
        m, p = mixed_instance(seed)
        d, _ = construct_parallel_metric(m, p)
        cert = certify_parallel(d, p)
        q = quotient_metric(d, p, cert)
        checked += 1
        if not isinstance(q.metric, DyadicMetric) or not q.report.ok:
            failures.append((seed, "quotient"))
        failures += [(seed, i, j, v.kind) for i, j, v in dichotomy_report(d, p) if not v.ok]
    for name, (m, p) in parallel_real_inputs():
        cert = certify_parallel(m, p, tol=REAL_TOL)
        checked += 1
        if not cert.passed:
            failures.append((name, "not parallel"))
            continue
        if not quotient_metric(m, p, cert).report.ok:
            failures.append((name, "quotient"))
        failures += [(name, i, j, v.kind) for i, j, v in dichotomy_report(m, p, REAL_TOL) if not v.ok]
    record("AC5 disjoint-or-coincide and quotient metric", failures, checked, "instances")


def test_ac6_extra_levels_leave_the_metric_unchanged():
    failures, count = [], 60
    for seed in range(count):
        m, p = mixed_instance(seed)
        d, trace = construct_parallel_metric(m, p)
        d3, _ = construct_parallel_metric(m, p, max_level=trace.plan.n_max + 3)
        if not d.same_values(d3):
            failures.append(seed)
    record("AC6 stable under max_level = N_max + 3", failures, count, "instances")


def test_ac7_failures_carry_concrete_witnesses():
    failures, checked = [], 0
    for seed in range(10):
        m, p = space_from_instance(generate("circles", {"radii": [1.0, 1.2], "points": 32}, seed))
        checked += 1
        v = certify_parallel(m, p).first_violation
        if v is None:
            failures.append((seed, "no violation"))
            continue
        A, B = (p.blocks[k] for k in v.blocks)
        other = B if v.side == "A" else A
        if (point_set_distance(m, v.point, other) != v.point_distance
                or set_distance(m, A, B) != v.set_distance
                or abs(v.point_distance - v.set_distance) <= REAL_TOL):
            failures.append((seed, "witness does not reproduce"))

    m = random_space(np.random.default_rng(7), 5)
    checked += 1
    try:
        construct_parallel_metric(m, Cover(5, ({0, 1, 2}, {2, 3}, {4})))
        failures.append("overlapping cover accepted")
    except ValidationFailed as exc:
        witnesses = [v.witness for v in exc.report.violations if v.kind == "overlap"]
        if witnesses != [(2, 0, 1)]:
            failures.append(("overlap witness", witnesses))
    record("AC7 non-parallel input and overlapping cover are rejected with witnesses",
           failures, checked, "cases")
