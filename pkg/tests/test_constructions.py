import math

import numpy as np
import pytest

from ksvi.assignment import propagate
from ksvi.constructions import (
    build_corollary1_instance,
    build_theorem1_instance,
    certify_value_indefinite,
    reduce_to_equality,
)
from ksvi.errors import OutOfRange
from ksvi.geometry import WINDOW_HIGH, WINDOW_LOW, ExactRay, NumRay, overlap_magnitude
from ksvi.hypergraph import save_hypergraph, validate

from oracles import random_pair_in, reduction_problems

A = NumRay((1, 0, 0))
SZ0 = NumRay((0, 1, 0))
SX_PLUS = NumRay((0.5, math.sqrt(2) / 2, 0.5))
SX_MINUS = NumRay((0.5, -math.sqrt(2) / 2, 0.5))


def pq(p):
    return NumRay((p, math.sqrt(1 - p * p), 0))


def test_reduce_boundary_rejected():
    with pytest.raises(OutOfRange):
        reduce_to_equality(A, pq(WINDOW_HIGH))
    with pytest.raises(OutOfRange):
        reduce_to_equality(A, NumRay((0, 1, 0)))
    with pytest.raises(OutOfRange):
        reduce_to_equality(A, pq(0.9))


def test_reduce_half_sqrt2():
    red = reduce_to_equality(A, pq(1 / math.sqrt(2)))
    assert red.y ** 2 < 1 - red.x ** 2
    assert red.z > 0 and math.isfinite(red.z)
    assert reduction_problems(A, pq(1 / math.sqrt(2)), red) == []


def test_reduce_point_seven():
    b = pq(0.7)
    red = reduce_to_equality(A, b)
    assert overlap_magnitude(A, red.c) == pytest.approx(0.801784, abs=1e-6)
    assert abs(overlap_magnitude(A, red.c) - 3 / math.sqrt(14)) < 1e-9
    assert red.p == pytest.approx(0.7)
    assert reduction_problems(A, b, red) == []


@pytest.mark.parametrize("complex_", [False, True])
def test_reduce_random(complex_):
    rng = np.random.default_rng(21 + complex_)
    for _ in range(200):
        a, b = random_pair_in(rng, 1e-6, WINDOW_HIGH - 1e-6, complex_)
        red = reduce_to_equality(a, b)
        assert reduction_problems(a, b, red) == []


@pytest.mark.parametrize("p", [0.05, 0.3, 0.6, 0.75, 0.8])
def test_reduction_instance_contradicts(p):
    inst = build_theorem1_instance(A, pq(p))
    assert [v for v in validate(inst.hypergraph)] == []
    _, trace = propagate(inst.hypergraph, inst.seeds())
    assert trace.is_contradiction
    b_slot = inst.hypergraph.ray(inst.ids["c"])
    assert abs(overlap_magnitude(A, b_slot) - WINDOW_HIGH) < 1e-9


def test_equality_instance():
    b = NumRay(tuple(np.array([3, 2, 1]) / math.sqrt(14)))
    inst = build_theorem1_instance(ExactRay((1, 0, 0)), b)
    assert inst.reduction is None and inst.seed_contexts == ("C1", "C2")
    _, trace = propagate(inst.hypergraph, inst.seeds())
    assert trace.conflict_context == "C24"


@pytest.mark.parametrize("p", [WINDOW_HIGH, 1 / math.sqrt(2), WINDOW_LOW, 0.65])
def test_corollary1_instance(p):
    inst = build_corollary1_instance(A, pq(p))
    h = inst.hypergraph
    assert validate(h) == []
    ids = inst.ids
    assert set(ids) == {"P_a", "P_b", "P_c", "P_alpha", "P_beta", "C_1", "C_2"}
    assert set(h.contexts["C1"].members) == {ids["P_a"], ids["P_alpha"], ids["P_beta"]}
    assert set(h.contexts["C2"].members) == {ids["P_b"], ids["P_c"], ids["P_beta"]}
    q = math.sqrt(1 - p * p)
    assert overlap_magnitude(h.ray(ids["P_a"]), h.ray(ids["P_c"])) == pytest.approx(q, abs=1e-9)
    assert q <= WINDOW_HIGH + 1e-12
    assert any(c.startswith("Ob:") for c in h.contexts) and any(c.startswith("Oc:") for c in h.contexts)


@pytest.mark.parametrize("p", [0.5, 0.9, 0.0])
def test_corollary1_out_of_range(p):
    with pytest.raises(OutOfRange):
        build_corollary1_instance(A, pq(p))


@pytest.mark.parametrize("phi", [SX_PLUS, SX_MINUS])
def test_certify_spin(phi):
    cert = certify_value_indefinite(SZ0, phi)
    assert cert.outcome == "ValueIndefinite"
    assert cert.window_ok
    assert cert.overlap == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert [w.value for w in cert.witness] == [1, 0]
    assert all(w.refuted for w in cert.witness)


@pytest.mark.parametrize("phi", [NumRay((1, 0, 0)), SZ0])
def test_certify_window_violated(phi):
    cert = certify_value_indefinite(SZ0, phi)
    assert cert.outcome == "WindowViolated" and not cert.window_ok and cert.witness == []


def test_certificate_branches_replay():
    cert = certify_value_indefinite(SZ0, SX_PLUS)
    from ksvi.assignment import Seed

    h = cert.instance
    for w in cert.witness:
        seeds = [Seed(cert.ids["P_a"], "C1", 1), Seed(cert.ids["P_b"], "C2", w.value)]
        _, trace = propagate(h, seeds)
        assert trace.to_json() == w.trace.to_json()
        assert trace.is_contradiction


def test_certify_projective_invariance():
    base = certify_value_indefinite(SZ0, SX_PLUS)
    rotated = certify_value_indefinite(NumRay((0, 1j, 0)), NumRay(tuple(-3j * SX_PLUS.vector)))
    scaled = certify_value_indefinite(ExactRay((0, 5, 0)), NumRay(tuple(2.5 * SX_PLUS.vector)))
    assert base.outcome == rotated.outcome == scaled.outcome == "ValueIndefinite"
    assert rotated.overlap == pytest.approx(base.overlap)


def test_certify_random_window_pairs():
    rng = np.random.default_rng(4)
    for _ in range(10):
        a, b = random_pair_in(rng, WINDOW_LOW, WINDOW_HIGH)
        cert = certify_value_indefinite(a, b)
        assert cert.outcome == "ValueIndefinite"


def test_certificate_json():
    cert = certify_value_indefinite(SZ0, SX_PLUS)
    doc = cert.to_json()
    assert doc["outcome"] == "ValueIndefinite"
    assert len(doc["branches"]) == 2 and doc["branches"][0]["trace"]["status"] == "Contradiction"
    assert save_hypergraph(cert.instance)
