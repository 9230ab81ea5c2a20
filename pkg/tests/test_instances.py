import json

import numpy as np
import pytest

from parallel_metric.construction import construct_parallel_metric
from parallel_metric.cover import Partition
from parallel_metric.errors import (
    DuplicatePointError,
    InputParseError,
    MetricStructureError,
    ValidationFailed,
)
from parallel_metric.generators import DEFAULTS, KINDS, generate
from parallel_metric.instances import (
    InstanceFile,
    certificate_dict,
    dumps,
    instance_from_space,
    load_any,
    load_instance,
    read_certificate,
    read_instance,
    save_instance,
    space_from_instance,
    validate_instance,
)
from parallel_metric.metric_core import DyadicMetric, set_distance
from parallel_metric.verification import certify_parallel

from helpers import random_labels, random_space


def write(tmp_path, data, name="inst.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


# loading

def test_load_coords(tmp_path):
    m, p = load_instance(write(tmp_path, {"coords": [[0, 0], [3, 4]], "labels": ["A", "B"]}))
    assert m[0, 1] == 5.0
    assert p.names == ("A", "B")


def test_load_single_lower_triangle_entry(tmp_path):
    m, p = load_instance(write(tmp_path, {"dist": [[1]], "labels": ["A", "A"]}))
    assert m.dist.tolist() == [[0, 1], [1, 0]]
    assert p.n_blocks == 1


@pytest.mark.parametrize("dist", [
    [[0, 1, 2], [1, 0, 1.5], [2, 1.5, 0]],
    [[], [1], [2, 1.5]],
    [[1], [2, 1.5]],
    [1, 2, 1.5],
])
def test_distance_formats_agree(tmp_path, dist):
    m, _ = load_instance(write(tmp_path, {"dist": dist, "labels": [0, 1, 2]}))
    assert m.dist.tolist() == [[0, 1, 2], [1, 0, 1.5], [2, 1.5, 0]]


def test_blocks_field(tmp_path):
    _, p = load_instance(write(tmp_path, {"dist": [1, 1, 1], "blocks": [[0, 2], [1]]}))
    assert p.block_of == (0, 1, 0)


def test_label_count_mismatch(tmp_path):
    with pytest.raises(ValidationFailed) as exc:
        load_instance(write(tmp_path, {"coords": [[0, 0], [1, 0]], "labels": ["A"]}))
    assert exc.value.report.kinds() == {"size_mismatch"}


def test_overlapping_blocks_rejected(tmp_path):
    with pytest.raises(ValidationFailed) as exc:
        load_instance(write(tmp_path, {"dist": [1, 1, 1], "blocks": [[0, 1], [1, 2]]}))
    v = exc.value.report.violations[0]
    assert (v.kind, v.witness) == ("overlap", (1, 0, 1))


def test_metric_violation_rejected(tmp_path):
    with pytest.raises(ValidationFailed) as exc:
        load_instance(write(tmp_path, {"dist": [1, 5, 1], "labels": [0, 1, 2]}))
    assert "triangle" in exc.value.report.kinds()


def test_duplicate_point_reported():
    inst = InstanceFile(coords=[[0, 0], [1, 1], [0, 0]], labels=[0, 1, 2])
    [report] = validate_instance(inst)
    assert [(v.kind, v.witness) for v in report.violations] == [("duplicate_point", (0, 2))]
    with pytest.raises(ValidationFailed):
        space_from_instance(inst)


@pytest.mark.parametrize("data, error", [
    ({"labels": [0]}, InputParseError),
    ({"coords": [[0]], "dist": [[0]], "labels": [0]}, InputParseError),
    ({"coords": [[0], [1]]}, InputParseError),
    ({"dist": [[0, 1], [1, 0, 2]], "labels": [0, 1]}, MetricStructureError),
    ({"dist": [[0, "a"], ["a", 0]], "labels": [0, 1]}, MetricStructureError),
    ({"dist": [1, 2], "labels": [0, 1]}, MetricStructureError),
])
def test_parse_errors(tmp_path, data, error):
    with pytest.raises(error):
        load_instance(write(tmp_path, data))


def test_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InputParseError):
        read_instance(path)
    with pytest.raises(InputParseError):
        read_instance(tmp_path / "missing.json")


def test_error_classes_are_distinct():
    classes = [InputParseError, MetricStructureError, DuplicatePointError, ValidationFailed]
    assert len(set(classes)) == 4
    assert not issubclass(ValidationFailed, InputParseError)
    assert not issubclass(DuplicatePointError, InputParseError)


# round trips

def test_save_load_round_trip(tmp_path, rng):
    for kind in ("euclidean", "l1"):
        m = random_space(rng, 9, kind)
        p = Partition.from_labels(random_labels(rng, 9, 3))
        save_instance(instance_from_space(m, p, "rt"), tmp_path / "rt.json")
        m2, p2 = load_instance(tmp_path / "rt.json")
        assert np.array_equal(m2.dist, m.dist)
        assert p2 == p


def test_generated_instances_round_trip(tmp_path):
    for kind in KINDS:
        inst = generate(kind, seed=5)
        save_instance(inst, tmp_path / "g.json")
        assert read_instance(tmp_path / "g.json") == inst


def test_certificate_round_trip_is_exact(tmp_path):
    m, p = space_from_instance(generate("random_partition", {"points": 25, "blocks": 4}, seed=2))
    d, trace = construct_parallel_metric(m, p)
    cert = certify_parallel(d, p, trace=trace)
    (tmp_path / "c.json").write_text(dumps(certificate_dict(d, p, cert, trace, "c")))
    d2, p2, exact = load_any(tmp_path / "c.json")
    assert exact and isinstance(d2, DyadicMetric)
    assert np.array_equal(np.asarray(d2.scaled), np.asarray(d.scaled)) and d2.scale_exp == d.scale_exp
    assert p2 == p
    assert certify_parallel(d2, p2, tol=0).passed


def test_certificate_rejects_float_entries():
    data = {"format": "parallel-metric-certificate", "scale_exp": 1, "d_scaled": [[0, 1.0], [1.0, 0]],
            "labels": [0, 1]}
    with pytest.raises(InputParseError):
        read_certificate(data)


def test_certificate_fields():
    m, p = space_from_instance(generate("segments", seed=0))
    d, trace = construct_parallel_metric(m, p)
    c = certificate_dict(d, p, certify_parallel(d, p, trace=trace), trace, "s")
    assert c["verdict"] == "pass" and c["violations"] == []
    assert c["trace"]["n_max"] == trace.plan.n_max
    [bd] = c["block_distances"]
    assert bd["blocks"] == [0, 1]
    a, b = bd["attained_by"]
    assert d.scaled[a, b] == bd["scaled"]
    assert len(c["witnesses"]) == 10


# generators

@pytest.mark.parametrize("kind", KINDS)
def test_generators_are_deterministic(kind):
    a = dumps(generate(kind, seed=11).to_dict())
    assert a == dumps(generate(kind, seed=11).to_dict())


def test_random_kinds_depend_on_seed():
    assert generate("random_partition", seed=1) != generate("random_partition", seed=2)
    assert generate("circles", seed=1) != generate("circles", seed=2)


def test_segments_example():
    inst = generate("segments", {"count": 2, "points": 5, "separation": 1.0})
    m, p = space_from_instance(inst)
    assert m.n_points == 10 and p.n_blocks == 2
    assert set_distance(m, p.blocks[0], p.blocks[1]) >= 1.0
    assert certify_parallel(m, p).passed


def test_product_fibers_are_parallel():
    m, p = space_from_instance(generate("product_fibers", seed=0))
    assert p.n_blocks == DEFAULTS["product_fibers"]["base_points"]
    assert certify_parallel(m, p).passed


def test_circles_example():
    m, p = space_from_instance(generate("circles", {"radii": [1.0, 1.2], "points": 32}, seed=0))
    assert not certify_parallel(m, p).passed
    d, _ = construct_parallel_metric(m, p)
    assert certify_parallel(d, p).passed


def test_uniform_circles_are_parallel():
    m, p = space_from_instance(generate("circles", {"points": 16, "sampling": "uniform"}))
    assert certify_parallel(m, p).passed


def test_random_partition_uses_every_block():
    _, p = space_from_instance(generate("random_partition", {"points": 6, "blocks": 6}, seed=4))
    assert p.n_blocks == 6


@pytest.mark.parametrize("kind, params, seed", [
    ("nope", {}, 0),
    ("segments", {"bogus": 1}, 0),
    ("segments", {"separation": 0}, 0),
    ("segments", {"separation": 0.0, "length": 0.0, "points": 1}, 0),
    ("circles", {"radii": [1, 1]}, 0),
    ("circles", {"sampling": "spiral"}, 0),
    ("random_partition", {"blocks": 50}, 0),
    ("product_fibers", {"jitter": -1}, 0),
    ("segments", {}, -1),
    ("segments", {}, 2 ** 64),
])
def test_invalid_generator_params(kind, params, seed):
    with pytest.raises(ValueError):
        generate(kind, params, seed)
