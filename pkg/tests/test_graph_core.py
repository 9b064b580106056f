import random

import pytest
from hypothesis import given, settings, strategies as st

from tropteich.contraction import enumerate_stable_graphs
from tropteich.graph_core import (
    AxiomViolation,
    Disconnected,
    WeightedGraph,
    are_isomorphic,
    automorphisms,
    certificate,
    from_document,
    from_edges,
    genus,
    is_stable,
    to_canonical,
    to_document,
    validate,
    valence,
)

from oracles import brute_automorphism_count

THETA = from_edges([0, 0], [(0, 1)] * 3)
DUMBBELL = from_edges([0, 0], [(0, 0), (0, 1), (1, 1)])
ROSE2 = from_edges([0], [(0, 0), (0, 0)])
LOOP_W1 = from_edges([1], [(0, 0)])
POINT2 = from_edges([2], [])

GENUS2 = enumerate_stable_graphs(2)
GENUS3 = enumerate_stable_graphs(3)


def shuffled(g: WeightedGraph, rng: random.Random) -> WeightedGraph:
    perm = list(range(g.half_edge_count))
    rng.shuffle(perm)
    return g.relabel(perm)


def test_validate_examples():
    validate(THETA)
    validate(WeightedGraph([0], [0], {0: 2}))
    with pytest.raises(AxiomViolation):
        validate(WeightedGraph([0, 0, 0], [0, 2, 0], {}))


def test_validate_rejects_moved_vertex_and_disconnected():
    with pytest.raises(AxiomViolation):
        validate(WeightedGraph([0, 1], [1, 0], {}))
    with pytest.raises(Disconnected):
        validate(from_edges([1, 1], []))


def test_genus_valence_stability():
    assert genus(THETA) == 2 and genus(POINT2) == 2 and genus(ROSE2) == 2
    assert valence(ROSE2, 0) == 4
    assert valence(THETA, 0) == valence(THETA, 1) == 3
    assert valence(POINT2, 0) == 0
    assert is_stable(THETA)
    assert not is_stable(from_edges([1], []))
    assert not is_stable(from_edges([0], [(0, 0)]))
    assert is_stable(LOOP_W1)


def test_certificates_distinguish_and_match():
    assert certificate(THETA) != certificate(DUMBBELL)
    assert certificate(THETA) == certificate(THETA)
    assert are_isomorphic(THETA, DUMBBELL) is None
    assert are_isomorphic(ROSE2, LOOP_W1) is None


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(GENUS3), st.randoms(use_true_random=False))
def test_certificate_is_label_invariant(g, rng):
    h = shuffled(g, rng)
    validate(h)
    assert certificate(h) == certificate(g)
    iso = are_isomorphic(h, g)
    assert iso is not None and iso.is_valid()
    assert genus(h) == genus(g)


def test_certificate_equality_iff_isomorphic():
    rng = random.Random(3)
    graphs = GENUS2 + [shuffled(g, rng) for g in GENUS2]
    for a in graphs:
        for b in graphs:
            assert (certificate(a) == certificate(b)) == (are_isomorphic(a, b) is not None)


def test_to_canonical_lands_on_canonical_graph():
    rng = random.Random(5)
    for g in GENUS3:
        h = shuffled(g, rng)
        iso = to_canonical(h)
        assert iso.is_valid() and iso.target == g


@pytest.mark.parametrize("g,expected", [(THETA, 12), (DUMBBELL, 8), (POINT2, 1), (ROSE2, 8)])
def test_automorphism_counts_match_brute_force(g, expected):
    assert len(automorphisms(g)) == expected
    assert brute_automorphism_count(g.root, g.involution, g.weights) == expected


@pytest.mark.parametrize("g", GENUS2)
def test_automorphisms_form_a_group(g):
    auts = automorphisms(g)
    maps = {a.half_edge_map for a in auts}
    assert auts[0].half_edge_map == tuple(range(g.half_edge_count))
    for a in auts:
        assert a.is_valid()
        assert a.inverse().half_edge_map in maps
        for b in auts:
            assert a.compose(b).half_edge_map in maps


def test_half_edge_count_law():
    for g in GENUS3:
        assert g.half_edge_count == len(g.vertices) + 2 * len(g.edges) + len(g.legs)


def test_document_round_trip():
    for g in GENUS2:
        assert from_document(to_document(g)) == g
    with pytest.raises(AxiomViolation):
        from_document({"root": [0]})
