"""Instance and certificate files (JSON).

Instance file::

    {"name": "...", "coords": [[x, y], ...], "labels": ["A", "B", ...]}

``coords`` may be replaced by ``dist``: a full square table, a lower
triangle given row by row (row ``i`` holding ``i`` entries, the empty first
row optional), or the condensed lower triangle as one flat list.  ``labels``
may be replaced by ``blocks``, a list of point-index lists; this is the only
way to describe an overlapping cover, which validation then rejects.

Certificate files store the constructed metric as ``scale_exp`` plus a table
of integers ``d_scaled``, so they reload without any rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .construction import ConstructionTrace
from .cover import Cover, Partition, validate_partition
from .errors import DuplicatePointError, InputParseError, MetricStructureError, ValidationFailed
from .metric_core import DEFAULT_TAU, DyadicMetric, FiniteMetricSpace, ValidationReport, euclidean_from_points, validate_metric
from .verification import ParallelCertificate

CERTIFICATE_FORMAT = "parallel-metric-certificate"


@dataclass
class InstanceFile:
    name: str = ""
    coords: list | None = None
    dist: list | None = None
    labels: list | None = None
    blocks: list | None = None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"name": self.name}
        if self.coords is not None:
            out["coords"] = self.coords
        if self.dist is not None:
            out["dist"] = self.dist
        if self.labels is not None:
            out["labels"] = self.labels
        if self.blocks is not None:
            out["blocks"] = self.blocks
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "InstanceFile":
        if not isinstance(data, dict):
            raise InputParseError("instance must be a JSON object")
        has_c, has_d = "coords" in data, "dist" in data
        if has_c == has_d:
            raise InputParseError("instance needs exactly one of 'coords' and 'dist'")
        has_l, has_b = "labels" in data, "blocks" in data
        if has_l == has_b:
            raise InputParseError("instance needs exactly one of 'labels' and 'blocks'")
        return cls(str(data.get("name", "")), data.get("coords"), data.get("dist"),
                   data.get("labels"), data.get("blocks"))

    @property
    def n_points(self) -> int:
        """Point count implied by the geometry (``coords`` or ``dist``)."""
        if self.coords is not None:
            return len(self.coords)
        raw = self.dist
        if not isinstance(raw, list) or not raw:
            return 0
        if all(isinstance(r, (int, float)) for r in raw):
            return int(round((1 + math.sqrt(1 + 8 * len(raw))) / 2))
        lengths = [len(r) if isinstance(r, list) else -1 for r in raw]
        if lengths == list(range(1, len(raw) + 1)) and raw != [[0]]:
            return len(raw) + 1
        return len(raw)


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputParseError("%s: %s" % (path, exc)) from None
    except OSError as exc:
        raise InputParseError(str(exc)) from None


def save_instance(inst: InstanceFile, path) -> None:
    Path(path).write_text(dumps(inst.to_dict()))


def read_instance(path) -> InstanceFile:
    return InstanceFile.from_dict(read_json(path))


def _dist_table(raw, n: int) -> np.ndarray:
    """Square table from full, row-wise lower-triangular, or condensed input."""
    if not isinstance(raw, list):
        raise MetricStructureError("'dist' must be a list")
    if all(isinstance(r, (int, float)) for r in raw):
        if len(raw) != n * (n - 1) // 2:
            raise MetricStructureError("condensed 'dist' needs %d entries for %d points, got %d"
                                       % (n * (n - 1) // 2, n, len(raw)))
        d = np.zeros((n, n))
        d[np.tril_indices(n, -1)] = raw
        return d + d.T
    if not all(isinstance(r, list) for r in raw):
        raise MetricStructureError("'dist' mixes numbers and rows")
    lengths = [len(r) for r in raw]
    if lengths == [n] * n:
        return np.array(raw, dtype=float)
    if lengths == list(range(n)) or lengths == list(range(1, n)):
        rows = raw if lengths[0] == 0 else [[]] + raw
        d = np.zeros((n, n))
        for i, r in enumerate(rows):
            d[i, :i] = r
        return d + d.T
    raise MetricStructureError("'dist' is neither a full %dx%d table nor a lower triangle" % (n, n))


def instance_to_space(inst: InstanceFile) -> tuple[FiniteMetricSpace, Cover]:
    """Metric and cover of an instance, without checking axioms or disjointness."""
    n = inst.n_points
    try:
        if inst.coords is not None:
            m = euclidean_from_points(inst.coords)
        else:
            m = FiniteMetricSpace(_dist_table(inst.dist, n))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DuplicatePointError):
            raise
        raise MetricStructureError(str(exc)) from None
    if inst.labels is not None and len(inst.labels) != n:
        raise ValidationFailed("%d points but %d labels" % (n, len(inst.labels)),
                               _mismatch(n, len(inst.labels)))
    if inst.labels is not None:
        order: dict = {}
        for x, lab in enumerate(inst.labels):
            order.setdefault(str(lab), []).append(x)
        cover = Cover(n, tuple(order.values()), tuple(order))
    else:
        try:
            cover = Cover(m.n_points, tuple(inst.blocks))
        except (TypeError, ValueError) as exc:
            raise InputParseError("bad 'blocks': %s" % exc) from None
    return m, cover


def _mismatch(got: int, want: int) -> ValidationReport:
    r = ValidationReport("instance")
    r.add("size_mismatch", (got, want), "%d points but %d labels" % (got, want))
    return r


def validate_instance(inst: InstanceFile, tau: float = DEFAULT_TAU) -> list[ValidationReport]:
    """Every report for an instance, whether or not it is valid."""
    try:
        m, cover = instance_to_space(inst)
    except DuplicatePointError as exc:
        r = ValidationReport("metric")
        r.add("duplicate_point", exc.pair, str(exc))
        return [r]
    except ValidationFailed as exc:
        return [exc.report]
    return [validate_metric(m, tau), validate_partition(cover)]


def load_instance(path, tau: float = DEFAULT_TAU) -> tuple[FiniteMetricSpace, Partition]:
    """Validated metric and partition; raises with every violation listed."""
    inst = read_instance(path)
    return space_from_instance(inst, tau)


def space_from_instance(inst: InstanceFile, tau: float = DEFAULT_TAU) -> tuple[FiniteMetricSpace, Partition]:
    reports = validate_instance(inst, tau)
    bad = [r for r in reports if not r.ok]
    if bad:
        merged = ValidationReport("instance", [v for r in bad for v in r.violations])
        raise ValidationFailed("invalid instance: %s" % ", ".join(sorted(merged.kinds())), merged)
    m, cover = instance_to_space(inst)
    return m, Partition.from_cover(cover)


def instance_from_space(m: FiniteMetricSpace, p: Partition, name: str = "") -> InstanceFile:
    return InstanceFile(name=name, dist=m.dist.tolist(), labels=p.labels())


def certificate_dict(d: DyadicMetric, p: Partition, cert: ParallelCertificate,
                     trace: ConstructionTrace | None = None, name: str = "") -> dict:
    out: dict[str, Any] = {
        "format": CERTIFICATE_FORMAT,
        "name": name,
        "labels": p.labels(),
        "block_names": list(p.names),
        "scale_exp": d.scale_exp,
        "d_scaled": d.as_int_lists(),
        "block_distances": [
            {"blocks": list(rec.blocks), "scaled": rec.distance.numerator,
             "attained_by": list(rec.attained_by)}
            for rec in cert.pairs
        ],
        "verdict": "pass" if cert.passed else "fail",
        "violations": [v.to_dict() for v in cert.violations],
        "witnesses": [
            dict(blocks=list(rec.blocks), point=x, **w.to_dict())
            for rec in cert.pairs for x, w in sorted(rec.witnesses.items())
        ],
    }
    if trace is not None:
        out["trace"] = {
            "n_max": trace.plan.n_max,
            "levels": [
                {"n": lv.n, "base_cover_size": len(lv.base_cover),
                 "members_per_block": [len(U) for U in lv.members]}
                for lv in trace.levels
            ],
            "delta_exps": trace.delta.exps.tolist(),
        }
    return out


def is_certificate(data: dict) -> bool:
    return isinstance(data, dict) and data.get("format") == CERTIFICATE_FORMAT


def read_certificate(data: dict) -> tuple[DyadicMetric, Partition]:
    try:
        scale = int(data["scale_exp"])
        table = data["d_scaled"]
        if not all(isinstance(v, int) for row in table for v in row):
            raise InputParseError("'d_scaled' must hold integers only")
        d = DyadicMetric(table, scale)
        p = Partition.from_labels(data["labels"])
    except (KeyError, TypeError) as exc:
        raise InputParseError("malformed certificate: %s" % exc) from None
    if p.n_points != d.n_points:
        raise ValidationFailed("certificate labels do not match its table", _mismatch(d.n_points, p.n_points))
    return d, p


def load_any(path, tau: float = DEFAULT_TAU):
    """``(metric, partition, is_dyadic)`` from an instance or certificate file."""
    data = read_json(path)
    if is_certificate(data):
        d, p = read_certificate(data)
        return d, p, True
    m, p = space_from_instance(InstanceFile.from_dict(data), tau)
    return m, p, False


def coords_of(inst: InstanceFile) -> np.ndarray | None:
    return None if inst.coords is None else np.asarray(inst.coords, dtype=float)
