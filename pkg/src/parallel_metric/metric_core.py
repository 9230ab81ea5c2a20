"""Finite metric spaces, exact dyadic metrics and elementary distance functionals.

Two metric representations are used throughout the package:

* :class:`FiniteMetricSpace` holds a float distance table, as read from user
  input or computed from coordinates.
* :class:`DyadicMetric` holds a table of integers sharing one power-of-two
  denominator ``2**scale_exp``.  All arithmetic on it is exact.

The functionals (:func:`set_distance`, :func:`diameter`, ...) accept either
one and return a ``float`` or a :class:`DyadicValue` accordingly.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DuplicatePointError, EmptySetError, MetricStructureError

DEFAULT_TAU = 1e-9

# int64 holds every entry (<= 2**scale_exp) and every pairwise sum of entries
# as long as scale_exp stays at or below this bound.
_INT64_SCALE_LIMIT = 60


@functools.total_ordering
@dataclass(frozen=True, eq=False)
class DyadicValue:
    """The exact rational ``numerator * 2**-scale_exp``."""

    numerator: int
    scale_exp: int

    def __post_init__(self):
        if self.scale_exp < 0:
            raise ValueError("scale_exp must be non-negative")
        if self.numerator < 0:
            raise ValueError("dyadic values are non-negative")
        object.__setattr__(self, "numerator", int(self.numerator))
        object.__setattr__(self, "scale_exp", int(self.scale_exp))

    @classmethod
    def power_of_half(cls, n: int, scale_exp: int | None = None) -> "DyadicValue":
        """``2**-n`` expressed with denominator ``2**scale_exp`` (default ``n``)."""
        if scale_exp is None:
            scale_exp = n
        if n > scale_exp:
            raise ValueError("2**-%d is not representable at scale %d" % (n, scale_exp))
        return cls(1 << (scale_exp - n), scale_exp)

    def rescale(self, scale_exp: int) -> "DyadicValue":
        if scale_exp >= self.scale_exp:
            return DyadicValue(self.numerator << (scale_exp - self.scale_exp), scale_exp)
        shift = self.scale_exp - scale_exp
        if self.numerator & ((1 << shift) - 1):
            raise ValueError("value is not representable at scale %d" % scale_exp)
        return DyadicValue(self.numerator >> shift, scale_exp)

    def normalized(self) -> "DyadicValue":
        """Same value with the smallest possible scale exponent."""
        if self.numerator == 0:
            return DyadicValue(0, 0)
        tz = (self.numerator & -self.numerator).bit_length() - 1
        shift = min(tz, self.scale_exp)
        return DyadicValue(self.numerator >> shift, self.scale_exp - shift)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.scale_exp)

    def __float__(self):
        return math.ldexp(self.numerator, -self.scale_exp)

    def _aligned(self, other: "DyadicValue"):
        s = max(self.scale_exp, other.scale_exp)
        return (self.numerator << (s - self.scale_exp),
                other.numerator << (s - other.scale_exp), s)

    def __add__(self, other):
        if not isinstance(other, DyadicValue):
            return NotImplemented
        a, b, s = self._aligned(other)
        return DyadicValue(a + b, s)

    def __eq__(self, other):
        if isinstance(other, DyadicValue):
            a, b, _ = self._aligned(other)
            return a == b
        if isinstance(other, (int, float, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, DyadicValue):
            a, b, _ = self._aligned(other)
            return a < b
        if isinstance(other, (int, float, Fraction)):
            return self.to_fraction() < other
        return NotImplemented

    def __hash__(self):
        v = self.normalized()
        return hash((v.numerator, v.scale_exp))

    def __repr__(self):
        return "DyadicValue(%d/2^%d)" % (self.numerator, self.scale_exp)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FiniteMetricSpace:
    """A finite point set ``{0, ..., n_points-1}`` with a float distance table.

    Construction only checks the table's shape; metric axioms are checked by
    :func:`validate_metric`, which reports every violation.
    """

    dist: np.ndarray

    def __post_init__(self):
        try:
            d = np.array(self.dist, dtype=float)
        except (TypeError, ValueError) as exc:
            raise MetricStructureError("distance table is not numeric: %s" % exc) from None
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise MetricStructureError("distance table must be square, got shape %s" % (d.shape,))
        if d.shape[0] < 1:
            raise MetricStructureError("a metric space needs at least one point")
        if not np.all(np.isfinite(d)):
            raise MetricStructureError("distance table has missing or non-finite entries")
        object.__setattr__(self, "dist", _readonly(d))

    @property
    def n_points(self) -> int:
        return self.dist.shape[0]

    def __getitem__(self, ij):
        return float(self.dist[ij])


@dataclass(frozen=True)
class DyadicMetric:
    """Distance table of integers ``k`` standing for ``k * 2**-scale_exp``."""

    scaled: np.ndarray
    scale_exp: int

    def __post_init__(self):
        dtype = np.int64 if self.scale_exp <= _INT64_SCALE_LIMIT else object
        a = np.array(self.scaled, dtype=dtype)
        if dtype is object:
            a = np.vectorize(int, otypes=[object])(a) if a.size else a
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise MetricStructureError("dyadic table must be square, got shape %s" % (a.shape,))
        object.__setattr__(self, "scaled", _readonly(a))

    @property
    def n_points(self) -> int:
        return self.scaled.shape[0]

    def __getitem__(self, ij) -> DyadicValue:
        return DyadicValue(int(self.scaled[ij]), self.scale_exp)

    def to_float(self) -> np.ndarray:
        return np.array([[math.ldexp(int(v), -self.scale_exp) for v in row] for row in self.scaled])

    def to_fractions(self) -> list[list[Fraction]]:
        den = 1 << self.scale_exp
        return [[Fraction(int(v), den) for v in row] for row in self.scaled]

    def as_int_lists(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.scaled]

    def rescale(self, scale_exp: int) -> "DyadicMetric":
        if scale_exp == self.scale_exp:
            return self
        rows = [[DyadicValue(int(v), self.scale_exp).rescale(scale_exp).numerator
                 for v in row] for row in self.scaled]
        return DyadicMetric(rows, scale_exp)

    def normalized(self) -> "DyadicMetric":
        """Same metric at the smallest shared exponent that keeps entries integral."""
        s = 0
        for row in self.scaled:
            for v in row:
                s = max(s, DyadicValue(int(v), self.scale_exp).normalized().scale_exp)
        return self.rescale(s)

    def same_values(self, other: "DyadicMetric") -> bool:
        a, b = self.normalized(), other.normalized()
        return a.scale_exp == b.scale_exp and a.as_int_lists() == b.as_int_lists()


Metric = Union[FiniteMetricSpace, DyadicMetric]
Scalar = Union[float, DyadicValue]


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple
    detail: str = ""


@dataclass
class ValidationReport:
    """Collected violations; an empty report means the object is valid."""

    subject: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, witness: tuple, detail: str = ""):
        self.violations.append(Violation(kind, tuple(int(w) for w in witness), detail))

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "violations": [
                {"kind": v.kind, "witness": list(v.witness), "detail": v.detail}
                for v in self.violations
            ],
        }


def _table(m: Metric) -> np.ndarray:
    return m.scaled if isinstance(m, DyadicMetric) else m.dist


def _scalar(m: Metric, v) -> Scalar:
    if isinstance(m, DyadicMetric):
        return DyadicValue(int(v), m.scale_exp)
    return float(v)


def validate_metric(m: Metric, tau: float = DEFAULT_TAU) -> ValidationReport:
    """Check the metric axioms and list every violation with its witness.

    ``tau`` is relative to the largest entry of the table.  It is ignored for
    a :class:`DyadicMetric`, which is checked exactly.
    """
    exact = isinstance(m, DyadicMetric)
    d = _table(m)
    n = d.shape[0]
    report = ValidationReport("metric")
    if exact:
        slack = 0
    else:
        scale = float(np.max(np.abs(d))) if d.size else 0.0
        slack = tau * max(scale, 1.0)

    for x in range(n):
        if (d[x, x] != 0) if exact else (abs(d[x, x]) > slack):
            report.add("identity", (x,), "d(%d,%d)=%s" % (x, x, d[x, x]))
    for x in range(n):
        for y in range(x + 1, n):
            dxy, dyx = d[x, y], d[y, x]
            if (dxy != dyx) if exact else (abs(dxy - dyx) > slack):
                report.add("symmetry", (x, y), "d(%d,%d)=%s != d(%d,%d)=%s" % (x, y, dxy, y, x, dyx))
            if dxy <= 0 or dyx <= 0:
                report.add("positivity", (x, y), "d(%d,%d)=%s" % (x, y, dxy))
    for y in range(n):
        bound = d[:, [y]] + d[[y], :]
        bad = np.argwhere(d > bound + slack) if not exact else np.argwhere(d > bound)
        for x, z in bad:
            if x == y or z == y:
                continue
            report.add("triangle", (x, y, z),
                       "d(%d,%d)=%s > d(%d,%d)+d(%d,%d)=%s" % (x, z, d[x, z], x, y, y, z, bound[x, z]))
    return report


def truncate_to_unit(m: FiniteMetricSpace) -> FiniteMetricSpace:
    return FiniteMetricSpace(np.minimum(m.dist, 1.0))


def euclidean_from_points(coords: Sequence[Sequence[float]]) -> FiniteMetricSpace:
    pts = np.asarray(coords, dtype=float)
    if pts.ndim != 2:
        raise MetricStructureError("coordinates must be a list of equal-length vectors")
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=-1))
    off = ~np.eye(len(pts), dtype=bool)
    if np.any(d[off] == 0):
        i, j = np.argwhere((d == 0) & off)[0]
        raise DuplicatePointError(i, j)
    return FiniteMetricSpace(d)


def _nonempty(S: Iterable[int], name: str) -> np.ndarray:
    idx = np.fromiter(sorted(set(int(s) for s in S)), dtype=np.intp)
    if idx.size == 0:
        raise EmptySetError("%s must be nonempty" % name)
    return idx


def set_distance_pair(m: Metric, A: Iterable[int], B: Iterable[int]) -> tuple[Scalar, tuple[int, int]]:
    """``d(A, B)`` together with a pair ``(a, b)`` attaining it.

    Ties are broken by the lowest ``a``, then the lowest ``b``.
    """
    ia, ib = _nonempty(A, "A"), _nonempty(B, "B")
    sub = _table(m)[np.ix_(ia, ib)]
    k = int(np.argmin(sub))
    i, j = divmod(k, len(ib))
    return _scalar(m, sub[i, j]), (int(ia[i]), int(ib[j]))


def set_distance(m: Metric, A: Iterable[int], B: Iterable[int]) -> Scalar:
    return set_distance_pair(m, A, B)[0]


def point_set_distance(m: Metric, x: int, B: Iterable[int]) -> Scalar:
    return set_distance_pair(m, [x], B)[0]


def diameter(m: Metric, S: Iterable[int]) -> Scalar:
    idx = _nonempty(S, "S")
    return _scalar(m, np.max(_table(m)[np.ix_(idx, idx)]))


def min_positive_distance(m: Metric) -> Scalar:
    n = m.n_points
    if n < 2:
        raise ValueError("need at least two points")
    d = _table(m)
    iu = np.triu_indices(n, 1)
    return _scalar(m, np.min(d[iu]))
