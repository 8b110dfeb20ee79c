import math
import random

import numpy as np
import pytest

from tabanon import (
    Distribution,
    EquivalenceClass,
    Partition,
    PrivacyRequirement,
    achieved_delta,
    achieved_k,
    achieved_l,
    achieved_t,
    audit,
    dist_equal,
    emd_ordered,
    partition_classes,
    satisfies,
)
from tabanon.privacy import equal_distance_rows, ordered_distance_rows

from conftest import make_dataset, oracle_audit, random_dataset


def dist(support, mass):
    return Distribution(tuple(support), np.array(mass, dtype=float))


def partition_of(class_specs):
    """Build a partition from [(signature, {label: count}), ...]."""
    classes = []
    start = 0
    for sig, counts in class_specs:
        size = sum(counts.values())
        classes.append(
            EquivalenceClass((sig,), tuple(range(start, start + size)), dict(counts))
        )
        start += size
    return Partition(tuple(classes), (), start)


def test_achieved_k_single_class():
    assert achieved_k(partition_of([("a", {"x": 7})])) == 7


def test_achieved_k_min_oracle():
    p = partition_of([("a", {"x": 5}), ("b", {"x": 3}), ("c", {"x": 9})])
    assert achieved_k(p) == min(5, 3, 9)


def test_achieved_k_empty_errors():
    with pytest.raises(ValueError):
        achieved_k(Partition((), (), 0))


def test_achieved_l_single_labeled():
    p = partition_of([("a", {"x": 3}), ("b", {"y": 2})])
    assert achieved_l(p) == 1


def test_achieved_l_hand_count():
    p = partition_of([
        ("a", {"x": 1, "y": 1}),
        ("b", {"x": 1, "y": 1, "z": 1}),
        ("c", {"y": 2, "z": 2}),
    ])
    assert achieved_l(p) == 2


def test_achieved_l_binary_bound():
    rng = random.Random(3)
    for _ in range(10):
        d, _ = random_dataset(rng, max_rows=40)
        assert achieved_l(partition_classes(d)) <= 2


def test_dist_equal_identity_and_extremes():
    assert dist_equal(dist("ab", [1, 0]), dist("ab", [1, 0])) == 0.0
    assert dist_equal(dist("ab", [1, 0]), dist("ab", [0, 1])) == 1.0
    assert dist_equal(dist("ab", [1, 0]), dist("ab", [0.5, 0.5])) == pytest.approx(0.5, abs=1e-12)


def test_distribution_invariants_enforced():
    with pytest.raises(ValueError):
        dist("ab", [0.7, 0.7])
    with pytest.raises(ValueError):
        dist("ab", [1.5, -0.5])
    with pytest.raises(ValueError):
        dist("abc", [0.5, 0.5])


def test_dist_equal_support_mismatch():
    with pytest.raises(ValueError):
        dist_equal(dist("ab", [1, 0]), dist("ac", [1, 0]))


def test_emd_ordered_examples():
    assert emd_ordered(dist("ab", [1, 0]), dist("ab", [1, 0])) == 0.0
    assert emd_ordered(dist("ab", [1, 0]), dist("ab", [0, 1])) == pytest.approx(1.0, abs=1e-12)
    p = dist("abc", [0.5, 0.5, 0.0])
    q = dist("abc", [1 / 3, 1 / 3, 1 / 3])
    # cumulative differences 1/6, 1/3, 0 -> sum 1/2 -> divided by m-1=2
    assert emd_ordered(p, q) == pytest.approx(0.25, abs=1e-12)


def test_emd_single_point_support_is_zero():
    assert emd_ordered(dist("a", [1.0]), dist("a", [1.0])) == 0.0


def test_binary_support_distances_coincide():
    rng = random.Random(17)
    for _ in range(200):
        a = rng.random()
        b = rng.random()
        p = dist("ab", [a, 1 - a])
        q = dist("ab", [b, 1 - b])
        assert dist_equal(p, q) == pytest.approx(emd_ordered(p, q), abs=1e-12)
        assert dist_equal(p, q) == pytest.approx(abs(a - b), abs=1e-12)


def test_achieved_t_single_class_is_zero():
    assert achieved_t(partition_of([("a", {"x": 3, "y": 5})])) == 0.0


def test_achieved_t_two_disjoint_classes():
    p = partition_of([("a", {"x": 2}), ("b", {"y": 2})])
    # global (0.5, 0.5); each class distance 0.5 under the equal distance
    assert achieved_t(p, "categorical") == pytest.approx(0.5, abs=1e-12)


def test_achieved_t_ordered_uses_support_order():
    p = partition_of([("a", {"1": 1, "2": 1}), ("b", {"10": 2})])
    fast = achieved_t(p, "numeric_ordinal")
    assert oracle_audit_from_partition(p, "numeric_ordinal")["t"] == pytest.approx(fast, abs=1e-9)


def oracle_audit_from_partition(p, kind):
    rows = []
    for ec in p.classes:
        for label, count in ec.sa_counts.items():
            rows.extend([(ec.signature[0], label)] * count)
    d = make_dataset(rows)
    schema = list(d.schema)
    schema[-1] = type(schema[-1])("label", "sensitive", kind)
    d = type(d)(tuple(schema), d.rows)
    return oracle_audit(d)


def test_achieved_delta_single_class_zero():
    assert achieved_delta(partition_of([("a", {"x": 1, "y": 3})])) == 0.0


def test_achieved_delta_direct_formula():
    p = partition_of([("a", {"x": 3, "y": 1}), ("b", {"x": 1, "y": 3})])
    # global (0.5, 0.5), class (0.75, 0.25): max(|ln 1.5|, |ln 0.5|) = ln 2
    assert achieved_delta(p) == pytest.approx(math.log(2), abs=1e-12)


def test_achieved_delta_skips_absent_values():
    p = partition_of([("a", {"x": 2}), ("b", {"x": 2, "y": 4})])
    # class a lacks y entirely: only present pairs contribute
    global_x = 4 / 8
    expected = max(abs(math.log(1.0 / global_x)),
                   abs(math.log((2 / 6) / global_x)), abs(math.log((4 / 6) / (4 / 8))))
    assert achieved_delta(p) == pytest.approx(expected, abs=1e-12)


def test_audit_single_class_balanced():
    d = make_dataset([("a", "x", "hi"), ("a", "x", "lo")] * 3, n_qi=2)
    report = audit(d)
    assert (report.achieved_k, report.achieved_l) == (6, 2)
    assert report.achieved_t == 0.0 and report.achieved_delta == 0.0
    assert report.class_count == 1 and report.record_count == 6


def test_audit_matches_brute_force_oracle():
    rng = random.Random(23)
    for _ in range(25):
        d, _ = random_dataset(rng, max_rows=50)
        got = audit(d)
        want = oracle_audit(d)
        assert got.achieved_k == want["k"]
        assert got.achieved_l == want["l"]
        assert got.achieved_t == pytest.approx(want["t"], abs=1e-9)
        assert got.achieved_delta == pytest.approx(want["delta"], abs=1e-9)
        assert got.class_count == want["classes"]


def test_audit_empty_errors():
    d = make_dataset([("a", "x")])
    empty = type(d)(d.schema, ())
    with pytest.raises(ValueError):
        audit(empty)


def test_satisfies_k1_any_nonempty():
    p = partition_of([("a", {"x": 1})])
    assert satisfies(p, PrivacyRequirement(k=1))


def test_satisfies_l_requirement():
    p = partition_of([("a", {"x": 5}), ("b", {"x": 3, "y": 3})])
    assert not satisfies(p, PrivacyRequirement(k=3, l=2))
    assert satisfies(p, PrivacyRequirement(k=3))


def test_satisfies_t_bound_inclusive_delta_strict():
    p = partition_of([("a", {"x": 2}), ("b", {"y": 2})])
    assert not satisfies(p, PrivacyRequirement(k=2, t=0.3))
    assert satisfies(p, PrivacyRequirement(k=2, t=0.5))  # inclusive bound
    single = partition_of([("a", {"x": 1, "y": 3})])
    assert satisfies(single, PrivacyRequirement(k=1, delta=0.001))  # achieved 0 < bound
    exact = achieved_delta(p)
    assert not satisfies(p, PrivacyRequirement(k=2, delta=exact))  # strict bound


def test_satisfies_empty_partition_false():
    assert not satisfies(Partition((), (), 0), PrivacyRequirement(k=1))


def test_t_delta_invariant_under_permutation():
    rng = random.Random(31)
    d, _ = random_dataset(rng, max_rows=60)
    p = partition_classes(d)
    perm = list(range(len(p.classes)))
    rng.shuffle(perm)
    shuffled = Partition(tuple(p.classes[i] for i in perm), (), p.source_count)
    assert achieved_t(shuffled) == achieved_t(p)
    assert achieved_delta(shuffled) == achieved_delta(p)


def test_merging_classes_never_raises_t_above_parents():
    rng = random.Random(37)
    for kind in ("categorical", "numeric_ordinal"):
        rows_fn = equal_distance_rows if kind == "categorical" else ordered_distance_rows
        for _ in range(50):
            m = rng.randint(2, 5)
            a = np.array([rng.randint(0, 7) for _ in range(m)], dtype=float)
            b = np.array([rng.randint(0, 7) for _ in range(m)], dtype=float)
            if a.sum() == 0 or b.sum() == 0:
                continue
            q = np.array([rng.randint(1, 7) for _ in range(m)], dtype=float)
            q = q / q.sum()
            merged = (a + b) / (a + b).sum()
            stack = np.vstack([a / a.sum(), b / b.sum(), merged])
            d_a, d_b, d_m = rows_fn(stack, q)
            assert d_m <= max(d_a, d_b) + 1e-12
