"""Exact construction of metrics under which the blocks of a partition are parallel."""

__version__ = "0.1.0"

from .construction import construct_parallel_metric, transport_chain
from .cover import Cover, Partition, star, validate_partition
from .metric_core import (
    DyadicMetric,
    DyadicValue,
    FiniteMetricSpace,
    euclidean_from_points,
    set_distance,
    validate_metric,
)
from .verification import certify_parallel, disjoint_or_coincide, is_parallel_pair, quotient_metric

__all__ = [
    "Cover",
    "DyadicMetric",
    "DyadicValue",
    "FiniteMetricSpace",
    "Partition",
    "certify_parallel",
    "construct_parallel_metric",
    "disjoint_or_coincide",
    "euclidean_from_points",
    "is_parallel_pair",
    "quotient_metric",
    "set_distance",
    "star",
    "transport_chain",
    "validate_metric",
    "validate_partition",
]
