"""Command line interface.

Exit codes: 0 success, 2 parse or usage error, 3 validation failure,
4 certification failure, 5 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .construction import construct_parallel_metric
from .cover import semicontinuity_diagnostic, validate_partition
from .errors import CertificationFailed, InternalConsistencyError, ParallelMetricError, ValidationFailed
from .generators import KINDS, generate
from .instances import (
    InstanceFile,
    certificate_dict,
    coords_of,
    dumps,
    is_certificate,
    load_any,
    read_certificate,
    read_json,
    space_from_instance,
    validate_instance,
)
from .metric_core import DEFAULT_TAU, validate_metric
from .verification import certify_parallel, oracle_cross_check, quotient_metric

log = logging.getLogger("parallel_metric")

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_CERT, EXIT_INTERNAL = 0, 2, 3, 4, 5


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    data = read_json(args.input)
    if is_certificate(data):
        d, p = read_certificate(data)
        reports = [validate_metric(d), validate_partition(p)]
    else:
        reports = validate_instance(InstanceFile.from_dict(data), args.tau)
    ok = all(r.ok for r in reports)
    _emit(dumps({"ok": ok, "reports": [r.to_dict() for r in reports]}), args.out)
    for r in reports:
        for v in r.violations:
            print("%s violation %s: %s" % (v.kind, list(v.witness), v.detail), file=sys.stderr)
    return EXIT_OK if ok else EXIT_VALIDATION


def _construct(args):
    inst = InstanceFile.from_dict(read_json(args.input))
    m, p = space_from_instance(inst, args.tau)
    d, trace = construct_parallel_metric(m, p, max_level=args.max_level)
    return inst, m, p, d, trace


def cmd_construct(args) -> int:
    inst, m, p, d, trace = _construct(args)
    cert = certify_parallel(d, p, trace=trace if args.witnesses else None)
    if args.oracle:
        mismatches, skipped = oracle_cross_check(trace)
        if skipped:
            log.warning("chain oracle skipped: %d points exceeds its size limit", m.n_points)
        if mismatches:
            raise InternalConsistencyError("oracle disagrees with the construction", mismatches[0])
    _emit(dumps(certificate_dict(d, p, cert, trace, inst.name)), args.out)
    print("levels: %d, verdict: %s" % (trace.plan.n_max, "pass" if cert.passed else "fail"), file=sys.stderr)
    if not cert.passed:
        raise CertificationFailed(cert.first_violation.describe(), cert)
    return EXIT_OK


def _summary(cert, p) -> dict:
    def num(v):
        return {"scaled": v.numerator, "scale_exp": v.scale_exp} if hasattr(v, "numerator") else v

    return {
        "verdict": "pass" if cert.passed else "fail",
        "tol": cert.tol,
        "block_names": list(p.names),
        "block_distances": [{"blocks": list(r.blocks), "distance": num(r.distance)} for r in cert.pairs],
        "violations": [v.to_dict() for v in cert.violations],
    }


def cmd_certify(args) -> int:
    m, p, _ = load_any(args.input, args.tau)
    cert = certify_parallel(m, p, args.tol)
    _emit(dumps(_summary(cert, p)), args.out)
    if not cert.passed:
        raise CertificationFailed(cert.first_violation.describe(), cert)
    return EXIT_OK


def cmd_quotient(args) -> int:
    m, p, exact = load_any(args.input, args.tau)
    cert = certify_parallel(m, p, args.tol)
    if not cert.passed:
        raise CertificationFailed(cert.first_violation.describe(), cert)
    q = quotient_metric(m, p, cert)
    out = {"block_names": list(q.names), "ok": q.report.ok, "report": q.report.to_dict()}
    if exact:
        out["scale_exp"] = q.metric.scale_exp
        out["D_scaled"] = q.metric.as_int_lists()
    else:
        out["D"] = q.metric.dist.tolist()
    _emit(dumps(out), args.out)
    if not q.report.ok:
        if exact:
            raise InternalConsistencyError("quotient of a parallel dyadic metric is not a metric")
        raise ValidationFailed("quotient fails the metric axioms", q.report)
    return EXIT_OK


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        if "=" not in item:
            raise ValueError("parameter %r is not of the form key=value" % item)
        key, raw = item.split("=", 1)
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params


def cmd_gen(args) -> int:
    inst = generate(args.kind, _parse_params(args.param), args.seed)
    _emit(dumps(inst.to_dict()), args.out)
    return EXIT_OK


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_plot_data(args) -> int:
    inst, m, p, d, trace = _construct(args)
    rho = trace.metric
    df = d.to_float()
    n = m.n_points
    bo = p.block_of

    pairs = [(i, j, p.names[bo[i]], p.names[bo[j]], repr(float(rho.dist[i, j])), repr(float(df[i, j])),
              int(d.scaled[i, j]))
             for i in range(n) for j in range(i + 1, n)]
    pairs_csv = _csv(pairs, ["i", "j", "block_i", "block_j", "input_capped", "constructed", "constructed_scaled"])
    if not args.out:
        sys.stdout.write(pairs_csv)
        return EXIT_OK

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "pairs.csv").write_text(pairs_csv)

    coords = coords_of(inst)
    pts = []
    for x in range(n):
        xy = list(coords[x]) if coords is not None else []
        pts.append([x, bo[x], p.names[bo[x]]] + [repr(float(c)) for c in xy])
    dims = coords.shape[1] if coords is not None else 0
    (outdir / "points.csv").write_text(_csv(pts, ["point", "block", "label"] + ["x%d" % k for k in range(dims)]))

    cert_in = certify_parallel(rho, p)
    cert_d = certify_parallel(d, p)
    k = p.n_blocks
    D_out = np.zeros((k, k))
    rows = []
    for r_in, r_out in zip(cert_in.pairs, cert_d.pairs):
        i, j = r_in.blocks
        D_out[i, j] = D_out[j, i] = float(r_out.distance)
        rows.append([p.names[i], p.names[j], repr(float(r_in.distance)), repr(float(r_out.distance)),
                     not r_in.violations, not r_out.violations])
    (outdir / "blocks.csv").write_text(_csv(rows, ["block_a", "block_b", "input_capped", "constructed",
                                                   "input_parallel", "constructed_parallel"]))

    scales = [2.0 ** -s for s in range(trace.plan.n_max + 1)][::-1]
    mod_in = semicontinuity_diagnostic(rho, p, scales)
    mod_d = semicontinuity_diagnostic(d, p, scales)
    (outdir / "modulus.csv").write_text(_csv(
        [[repr(s), repr(a), repr(b)] for s, a, b in zip(scales, mod_in.modulus, mod_d.modulus)],
        ["scale", "input_modulus", "constructed_modulus"]))

    if args.figures:
        from . import plotting

        if coords is not None:
            plotting.plot_points(coords, bo, p.names, outdir / "points.png")
        same = np.equal.outer(np.asarray(bo), np.asarray(bo))
        plotting.plot_distance_comparison(rho.dist, df, same, outdir / "distances.png")
        if k > 1:
            plotting.plot_block_distances(D_out, p.names, outdir / "block_distances.png")
        plotting.plot_modulus(scales, mod_in.modulus, mod_d.modulus, outdir / "modulus.png")
    print("wrote %s" % outdir, file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parallel-metric",
                                     description="Construct and certify metrics with parallel partition blocks.")
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, tol=False):
        sp.add_argument("input")
        sp.add_argument("--out", help="output file (directory for plot-data)")
        sp.add_argument("--tau", type=float, default=DEFAULT_TAU,
                        help="relative tolerance for metric axioms on float input")
        if tol:
            sp.add_argument("--tol", type=float, default=None,
                            help="absolute tolerance for parallelism on float metrics (dyadic: always 0)")

    sp = sub.add_parser("validate", help="check metric axioms and the partition")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("construct", help="build the parallel metric and write a certificate")
    common(sp)
    sp.add_argument("--max-level", type=int, default=None)
    sp.add_argument("--oracle", action="store_true", help="cross-check against brute-force oracles")
    sp.add_argument("--witnesses", action="store_true", help="include transported chain witnesses")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("certify", help="check parallelism of an instance or certificate metric")
    common(sp, tol=True)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("quotient", help="distance table between blocks of a parallel metric")
    common(sp, tol=True)
    sp.set_defaults(func=cmd_quotient)

    sp = sub.add_parser("gen", help="generate an instance file")
    sp.add_argument("kind", choices=KINDS)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--param", action="append", metavar="KEY=VALUE")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("plot-data", help="CSV tables (and figures) comparing input and constructed metrics")
    common(sp)
    sp.add_argument("--max-level", type=int, default=None)
    sp.add_argument("--figures", action="store_true", help="also render PNG figures into --out")
    sp.set_defaults(func=cmd_plot_data)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "figures", False) and not args.out:
        parser.error("--figures needs --out")
    try:
        return args.func(args)
    except ParallelMetricError as exc:
        print("error: %s" % exc, file=sys.stderr)
        report = getattr(exc, "report", None)
        if report is not None:
            for v in report.violations:
                print("  %s %s: %s" % (v.kind, list(v.witness), v.detail), file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
