import json

import pytest

from tropteich import free_group as fg
from tropteich.cone_complex import check_diagram, coarse_space, cone_complex_violations, is_cone_complex
from tropteich.contraction import UnsupportedGenus, contraction_poset, enumerate_stable_graphs
from tropteich.graph_core import certificate, valence
from tropteich.marking import act, top_class
from tropteich.moduli import (
    build_Mg,
    build_Tg_chart,
    canonical_seed,
    cv_locus,
    forget_marking,
    marked_object,
    random_seeds,
    verify_quotient,
)

from oracles import stable_graph_classes
from test_contraction import as_pairs
from test_graph_core import DUMBBELL, POINT2, ROSE2, THETA

W1_EDGE_W1 = b"v2;w1,1;e0-1;l"


def test_mg_objects_are_the_enumeration():
    for g in (2, 3):
        d = build_Mg(g)
        assert [certificate(o.payload) for o in d.objects] == [certificate(x) for x in enumerate_stable_graphs(g)]
        assert sum(1 for o in d.objects if o.dimension == 0) == 1
        assert not is_cone_complex(d)


def test_unsupported_genus():
    with pytest.raises(UnsupportedGenus):
        build_Mg(1)
    with pytest.raises(UnsupportedGenus):
        verify_quotient(4, 1, 0)


def test_cv_locus_genus_2():
    d = build_Mg(2)
    ids = cv_locus(2, d)
    certs = {certificate(d.object(k).payload) for k in ids}
    assert certs == {certificate(THETA), certificate(DUMBBELL), certificate(ROSE2)}
    top = {certificate(d.object(k).payload) for k in ids if d.object(k).dimension == 3}
    assert top == {certificate(THETA), certificate(DUMBBELL)}


def test_cv_locus_genus_3_matches_oracle():
    d = build_Mg(3)
    weightless = [k for k in stable_graph_classes(3) if not any(k[0])]
    ids = cv_locus(3, d)
    assert len(ids) == len(weightless) == 15
    for k in ids:
        G = d.object(k).payload
        assert all(valence(G, v) >= 3 for v in G.vertices)
    assert all(certificate(d.object(k).payload) != b"v1;w3;e;l" for k in ids)


def test_theta_chart_is_a_cone_complex():
    chart = build_Tg_chart(2, [canonical_seed(THETA)], 0)
    assert is_cone_complex(chart)
    assert check_diagram(chart) == []
    assert len(chart.objects) == 8
    for o in chart.objects:
        assert [f.is_identity() for f in chart.automorphisms(o.id)] == [True]
    assert coarse_space(chart).homs == chart.homs


def test_chart_objects_are_faces_of_the_seed():
    chart = build_Tg_chart(2, [canonical_seed(THETA)], 0)
    seed = next(o.id for o in chart.objects if o.payload.graph == THETA)
    assert all(chart.hom(o.id, seed) for o in chart.objects)
    # forgetting the marking lands in the unmarked diagram and respects morphisms
    poset = contraction_poset(2)
    for (a, b), maps in chart.homs.items():
        ga, gb = forget_marking(chart.object(a).payload), forget_marking(chart.object(b).payload)
        assert maps and (poset.index_of(gb), poset.index_of(ga)) in poset.morphisms


def test_inner_twist_gives_the_same_chart():
    seed = canonical_seed(THETA)
    twisted = marked_object(act(seed.marking, fg.conjugation(fg.parse_word("x1*x2^-1", 2))))
    assert twisted.key == seed.key
    a = build_Tg_chart(2, [seed], 0)
    b = build_Tg_chart(2, [twisted], 0)
    assert [o.label for o in a.objects] == [o.label for o in b.objects]
    assert a.homs == b.homs


def test_marked_object_invariants():
    for s in random_seeds(3, 10, 1):
        assert top_class(s.marking) == s.marking_class
        assert s.graph == forget_marking(s)
        assert not s.graph.legs


def test_radius_expands_the_chart():
    seed = canonical_seed(ROSE2)
    small = build_Tg_chart(2, [seed], 0)
    big = build_Tg_chart(2, [seed], 1)
    assert len(big.objects) > len(small.objects)
    assert {o.label for o in small.objects} <= {o.label for o in big.objects}
    assert check_diagram(big) == []


def test_symmetric_class_fixing_swap_breaks_strictness():
    # two weight-1 vertices joined by an edge: the vertex swap fixes the only marking class
    chart = build_Tg_chart(2, [canonical_seed(DUMBBELL)], 0)
    bad = cone_complex_violations(chart)
    labels = {chart.object(s).label.split("|")[0].encode() for s, _, _ in bad}
    assert labels == {W1_EDGE_W1}
    assert is_cone_complex(coarse_space(chart))


def test_verify_quotient_genus_2():
    report = verify_quotient(2, 10, 3)
    assert report["passed"]
    assert set(report["checks"]) == {"transitivity", "pushforward", "equivariance", "fullness"}
    assert report["checks"]["transitivity"]["passed"] == 10 * 7
    assert [r["graph"] for r in report["objects"]] == sorted(r["graph"] for r in report["objects"])
    again = verify_quotient(2, 10, 3, workers=1)
    assert json.dumps(report, sort_keys=True) == json.dumps(again, sort_keys=True)


def test_verify_quotient_empty_and_genus_3():
    empty = verify_quotient(2, 0, 0)
    assert empty["passed"] and empty["checks"] == {}
    assert verify_quotient(3, 2, 0)["passed"]


def test_poset_objects_match_oracle_keys():
    from oracles import iso_key

    assert {iso_key(*as_pairs(x)) for x in enumerate_stable_graphs(2)} == stable_graph_classes(2)
    assert POINT2 in enumerate_stable_graphs(2)
