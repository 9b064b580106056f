import itertools
import time

import pytest
from hypothesis import given, settings, strategies as st

from tropteich.contraction import (
    EdgeContraction,
    Incomposable,
    check_contraction,
    compose,
    contract,
    contraction_poset,
    contractions_to_canonical,
    enumerate_by_splitting,
    enumerate_stable_graphs,
    identity_contraction,
    source_orbits,
    uncontractions,
    UnsupportedGenus,
)
from tropteich.graph_core import are_isomorphic, certificate, genus, is_stable, valence

from oracles import iso_key, stable_graph_classes
from test_graph_core import DUMBBELL, LOOP_W1, POINT2, ROSE2, THETA


def as_pairs(g):
    index = {v: k for k, v in enumerate(g.vertices)}
    weights = [g.weight(v) for v in g.vertices]
    edges = [tuple(sorted((index[a], index[b]))) for a, b in (g.ends(e) for e in g.edges)]
    return weights, edges


@pytest.mark.parametrize("g,count", [(2, 7), (3, 42)])
def test_enumeration_matches_oracle_and_second_path(g, count):
    start = time.perf_counter()
    first = enumerate_stable_graphs(g)
    elapsed = time.perf_counter() - start
    assert len(first) == count
    assert {iso_key(*as_pairs(x)) for x in first} == stable_graph_classes(g)
    assert [certificate(x) for x in enumerate_by_splitting(g)] == [certificate(x) for x in first]
    assert elapsed < (10 if g == 2 else 300)


def test_genus_4_paths_agree():
    first = enumerate_stable_graphs(4)
    assert len(first) == 379
    assert [certificate(x) for x in enumerate_by_splitting(4)] == [certificate(x) for x in first]


def test_genus_out_of_range():
    with pytest.raises(UnsupportedGenus):
        enumerate_stable_graphs(1)
    with pytest.raises(UnsupportedGenus):
        contraction_poset(5)


def test_contract_examples():
    tgt, c = contract(DUMBBELL, [e for e in DUMBBELL.edges if not DUMBBELL.is_loop(e)])
    assert are_isomorphic(tgt, ROSE2)
    tgt, c = contract(ROSE2, [ROSE2.edges[1]])
    assert are_isomorphic(tgt, LOOP_W1)
    tgt, c = contract(THETA, THETA.edges)
    assert are_isomorphic(tgt, POINT2)
    assert check_contraction(c) is None


def test_zero_edge_graphs():
    assert [len(x.edges) for x in enumerate_stable_graphs(2)].count(0) == 1


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(enumerate_stable_graphs(3)), st.data())
def test_contraction_preserves_genus_and_stability(g, data):
    subset = data.draw(st.sets(st.sampled_from(g.edges))) if g.edges else set()
    tgt, c = contract(g, subset)
    assert c.is_valid()
    assert genus(tgt) == genus(g)
    assert is_stable(tgt)
    assert c.contracted == frozenset(subset)


def test_compose_examples():
    bridge = [e for e in DUMBBELL.edges if not DUMBBELL.is_loop(e)]
    rose, c1 = contract(DUMBBELL, bridge)
    loop_w1, c2 = contract(rose, [rose.edges[0]])
    both = compose(c2, c1)
    assert both.is_valid() and len(both.contracted) == 2
    assert are_isomorphic(both.target, LOOP_W1)
    assert compose(identity_contraction(c1.target), c1) == c1
    assert compose(c1, identity_contraction(DUMBBELL)) == c1
    with pytest.raises(Incomposable):
        compose(c1, c2)


def test_theta_two_step_composite_contracts_two_edges():
    two, c1 = contract(THETA, [THETA.edges[0]])
    one, c2 = contract(two, [two.edges[0]])
    assert len(compose(c2, c1).contracted) == 2


def test_theta_to_rose_morphisms():
    poset = contraction_poset(2)
    i, j = poset.index_of(THETA), poset.index_of(ROSE2)
    # three contractions, distinct up to automorphisms of the rose
    assert len(poset.morphisms[(i, j)]) == 3
    # one orbit under automorphisms of theta
    assert len(source_orbits(poset, i, j)) == 1


def test_poset_shape():
    for g in (2, 3):
        poset = contraction_poset(g)
        dims = [poset.dimension(k) for k in range(len(poset.objects))]
        assert max(dims) == 3 * g - 3 and dims.count(0) == 1
        for x in poset.objects:
            top = len(x.edges) == 3 * g - 3
            trivalent_weightless = all(x.weight(v) == 0 and valence(x, v) == 3 for v in x.vertices)
            assert top == trivalent_weightless
        for (a, b), cs in poset.morphisms.items():
            for c in cs:
                assert c.is_valid()
                assert poset.dimension(b) < poset.dimension(a) or a == b


def test_composition_associative_on_genus_2_poset():
    poset = contraction_poset(2)
    objs = range(len(poset.objects))
    hom = poset.morphisms
    for a, b, c, d in itertools.product(objs, repeat=4):
        for f in hom.get((a, b), []):
            for g in hom.get((b, c), []):
                for h in hom.get((c, d), []):
                    assert compose(h, compose(g, f)) == compose(compose(h, g), f)


def test_uncontractions():
    found = {certificate(big) for big, _ in uncontractions(POINT2)}
    assert certificate(LOOP_W1) in found
    assert b"v2;w1,1;e0-1;l" in found
    assert uncontractions(THETA) == []
    for g in enumerate_stable_graphs(3):
        for big, c in uncontractions(g):
            assert c.is_valid() and len(c.contracted) == 1
            assert are_isomorphic(contract(big, c.contracted)[0], g)


def test_contractions_to_canonical_cover_all_subsets():
    out = contractions_to_canonical(THETA)
    assert len(out) == 2 ** 3
    assert all(isinstance(c, EdgeContraction) and c.is_valid() for _, c in out)
