import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tropteich.cone_complex import INF
from tropteich.graph_core import Disconnected, certificate, genus
from tropteich.moduli import build_Mg
from tropteich.tropicalize import (
    ZERO,
    ExplicitValuation,
    ModelSyntaxError,
    NoMatchingCell,
    NotPrime,
    PadicValuation,
    PrimePower,
    StableModel,
    TadicValuation,
    UnstableDualGraph,
    ZeroLengthNode,
    curve_to_document,
    dual_tropical_curve,
    locate_cell,
    location_to_document,
    model_from_document,
    model_to_document,
    padic_valuation,
    parse_model,
    parse_parameter,
    tropical_curve,
)

from oracles import is_padic_valuation
from test_graph_core import LOOP_W1, THETA

PRIMES = [2, 3, 5, 7, 11, 13]


def test_padic_examples():
    assert padic_valuation(Fraction(4, 6), 2) == 1
    assert padic_valuation(7, 7) == 1
    assert padic_valuation(Fraction(1, 49), 7) == -2
    assert padic_valuation(0, 5) is INF
    for p in (1, 4, 0, -3):
        with pytest.raises(NotPrime):
            padic_valuation(3, p)


def nonzero_rationals():
    ints = st.integers(-10**6, 10**6).filter(bool)
    return st.builds(Fraction, ints, st.integers(1, 10**6))


@given(nonzero_rationals(), st.sampled_from(PRIMES))
def test_padic_matches_characterisation(q, p):
    assert is_padic_valuation(q, p, padic_valuation(q, p))


def test_padic_homomorphism_on_random_pairs():
    rng = random.Random(99)
    for _ in range(1000):
        p = rng.choice(PRIMES)
        a = Fraction(rng.choice([-1, 1]) * rng.randint(1, 10**9), rng.randint(1, 10**9))
        b = Fraction(rng.choice([-1, 1]) * rng.randint(1, 10**9), rng.randint(1, 10**9))
        assert padic_valuation(a * b, p) == padic_valuation(a, p) + padic_valuation(b, p)


def test_two_elliptic_components_one_node():
    m = StableModel([("A", 1), ("B", 1)], [("A", "B", Fraction(7))], PadicValuation(7))
    c = dual_tropical_curve(m)
    assert certificate(c.graph) == b"v2;w1,1;e0-1;l"
    assert [x for _, x in c.lengths] == [1]


def test_three_self_nodes():
    m = StableModel([("C", 0)], [("C", "C", PrimePower(k)) for k in (1, 2, 3)], PadicValuation(3))
    c = dual_tropical_curve(m)
    assert genus(c.graph) == 3 and len(c.graph.vertices) == 1
    assert all(c.graph.is_loop(e) for e in c.graph.edges)
    assert [x for _, x in c.lengths] == [1, 2, 3]


def test_zero_parameter_gives_infinite_length():
    m = StableModel([("E", 1)], [("E", "E", ZERO)], PadicValuation(5))
    c = dual_tropical_curve(m)
    assert [x for _, x in c.lengths] == [INF]
    assert c.infinite_edges() == list(c.graph.edges)


def test_dual_graph_errors():
    with pytest.raises(ZeroLengthNode):
        dual_tropical_curve(StableModel([("A", 1), ("B", 1)], [("A", "B", Fraction(3))], PadicValuation(2)))
    with pytest.raises(UnstableDualGraph):
        dual_tropical_curve(StableModel([("A", 0), ("B", 2)], [("A", "B", Fraction(2))], PadicValuation(2)))
    with pytest.raises(Disconnected):
        dual_tropical_curve(StableModel([("A", 1), ("B", 1)], [], PadicValuation(2)))
    with pytest.raises(ZeroLengthNode):
        tropical_curve(LOOP_W1, {LOOP_W1.edges[0]: 0})


def test_explicit_and_tadic_valuations():
    comps = [("A", 0), ("B", 0)]
    nodes = [("A", "B", ZERO), ("A", "B", Fraction(1)), ("A", "B", Fraction(1))]
    c = dual_tropical_curve(StableModel(comps, nodes, TadicValuation(((0, 2), (1, 1), (2, 5)))))
    # a ZERO parameter persists as an infinite edge whatever the valuation kind
    assert sorted(x for _, x in c.lengths) == [1, 5, INF]
    c = dual_tropical_curve(StableModel(comps, nodes, ExplicitValuation(((0, Fraction(1, 2)), (1, INF), (2, 3)))))
    assert sorted(x for _, x in c.lengths) == [3, INF, INF]


@given(st.lists(st.integers(0, 3), min_size=1, max_size=4), st.data())
def test_genus_formula(weights, data):
    n = len(weights)
    extra = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3))
    pairs = [(k, k + 1) for k in range(n - 1)] + extra
    comps = [(f"c{k}", h) for k, h in enumerate(weights)]
    nodes = [(f"c{a}", f"c{b}", PrimePower(1)) for a, b in pairs]
    try:
        c = dual_tropical_curve(StableModel(comps, nodes, PadicValuation(2)))
    except UnstableDualGraph:
        return
    assert genus(c.graph) == sum(weights) + len(pairs) - n + 1
    assert all(x > 0 for _, x in c.lengths)


def test_locate_theta_points():
    space = build_Mg(2)
    e = THETA.edges
    sym = locate_cell(tropical_curve(THETA, dict(zip(e, [1, 1, 1]))), space)
    assert len(sym.orbit) == 1 and sym.orbit[0] == (1, 1, 1)
    gen = locate_cell(tropical_curve(THETA, dict(zip(e, [1, 2, 3]))), space)
    assert len(gen.orbit) == 6
    assert {tuple(sorted(v)) for v in gen.orbit} == {(1, 2, 3)}
    assert space.object(gen.object_id).payload == THETA


def test_locate_infinite_loop():
    space = build_Mg(2)
    loc = locate_cell(tropical_curve(LOOP_W1, {LOOP_W1.edges[0]: INF}), space)
    assert space.object(loc.object_id).dimension == 1
    assert len(loc.at_infinity) == 1
    assert location_to_document(loc)["face_at_infinity"] == list(loc.at_infinity)


def test_model_then_locate_never_fails_at_genus_2():
    space = build_Mg(2)
    m = StableModel([("C", 0)], [("C", "C", Fraction(4)), ("C", "C", ZERO)], PadicValuation(2))
    loc = locate_cell(dual_tropical_curve(m), space)
    assert sorted(location_to_document(loc)["coordinates"].values()) == ["2", "inf"]


def test_locate_wrong_genus():
    m = StableModel([("C", 0)], [("C", "C", Fraction(2))] * 3, PadicValuation(2))
    with pytest.raises(NoMatchingCell):
        locate_cell(dual_tropical_curve(m), build_Mg(2))


def test_parameter_literals():
    assert parse_parameter("p^3") == PrimePower(3)
    assert parse_parameter("2*p") == PrimePower(1, Fraction(2))
    assert parse_parameter("ZERO") is ZERO
    assert parse_parameter("3/4") == Fraction(3, 4)
    with pytest.raises(ModelSyntaxError):
        parse_parameter("q^2")


def test_document_round_trip():
    doc = {
        "components": [{"id": "A", "genus": 1}, {"id": "B", "genus": 0}],
        "nodes": [
            {"between": ["A", "B"], "parameter": "p"},
            {"between": ["B", "B"], "parameter": "3*p^2"},
            {"between": ["A", "B"], "parameter": "ZERO"},
        ],
        "valuation": {"kind": "padic", "prime": 3},
    }
    m = model_from_document(doc)
    assert model_to_document(m) == doc
    c = dual_tropical_curve(m)
    assert sorted(curve_to_document(c)["lengths"].values()) == ["1", "3", "inf"]
    assert dual_tropical_curve(model_from_document(doc, prime=2)).length_map.keys() == c.length_map.keys()


@pytest.mark.parametrize(
    "doc,field",
    [
        ({"nodes": [], "valuation": {"kind": "padic", "prime": 2}}, "components"),
        ({"components": [{"id": "A", "genus": "one"}], "nodes": [], "valuation": {}}, "components[0].genus"),
        ({"components": [{"id": "A", "genus": 1}], "nodes": [{"between": ["A"]}], "valuation": {}}, "nodes[0].between"),
        ({"components": [{"id": "A", "genus": 1}], "nodes": [{"between": ["A", "Z"]}], "valuation": {}}, "nodes[0].between"),
        ({"components": [{"id": "A", "genus": 1}], "nodes": [], "valuation": {"kind": "fuzzy"}}, "valuation.kind"),
        (
            {"components": [{"id": "A", "genus": 1}], "nodes": [{"between": ["A", "A"]}], "valuation": {"kind": "tadic", "exponents": {}}},
            "valuation.exponents",
        ),
    ],
)
def test_malformed_documents_name_the_field(doc, field):
    with pytest.raises(ModelSyntaxError) as info:
        model_from_document(doc)
    assert info.value.field == field


def test_json_errors_carry_position():
    with pytest.raises(ModelSyntaxError) as info:
        parse_model('{"components": [\n  {"id": "A",, }]}')
    assert info.value.line == 2 and info.value.column is not None
    with pytest.raises(NotPrime):
        parse_model(json.dumps({"components": [], "nodes": [], "valuation": {"kind": "padic", "prime": 9}}))
