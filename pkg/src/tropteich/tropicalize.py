"""Dual tropical curves of stable models over a discretely valued base, and
their position in the extended cone complex of tropical curves."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

from .cone_complex import INF, ConeDiagram, ExtendedPoint, extended_value, format_extended
from .graph_core import (
    Disconnected,
    WeightedGraph,
    _components,
    certificate,
    from_edges,
    genus as graph_genus,
    is_stable,
    to_canonical,
)


class TropicalizationError(ValueError):
    pass


class NotPrime(TropicalizationError):
    pass


class ZeroLengthNode(TropicalizationError):
    pass


class UnstableDualGraph(TropicalizationError):
    pass


class NoMatchingCell(TropicalizationError):
    pass


class ModelSyntaxError(TropicalizationError):
    """Malformed model document; `field` names the offending entry."""

    def __init__(self, field: str, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{field}: {message}{where}")
        self.field = field
        self.line = line
        self.column = column


class _Zero:
    """A node parameter that vanishes identically: the node persists in the generic fibre."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ZERO"

    def __reduce__(self):
        return (_Zero, ())


ZERO = _Zero()


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def padic_valuation(q, p: int):
    """Exact p-adic valuation of a rational number; the valuation of 0 is INF."""
    if not isinstance(p, int) or not _is_prime(p):
        raise NotPrime(p)
    q = Fraction(q)
    if q == 0:
        return INF
    return _int_valuation(abs(q.numerator), p) - _int_valuation(q.denominator, p)


# models


@dataclass(frozen=True)
class PadicValuation:
    prime: int

    def __post_init__(self):
        if not _is_prime(self.prime):
            raise NotPrime(self.prime)


@dataclass(frozen=True)
class ExplicitValuation:
    values: tuple  # node index -> Fraction or INF


@dataclass(frozen=True)
class TadicValuation:
    exponents: tuple  # node index -> natural


@dataclass(frozen=True)
class PrimePower:
    """The parameter c * p^k, written before a prime is chosen."""

    exponent: int
    unit: Fraction = Fraction(1)


@dataclass
class StableModel:
    components: list[tuple[str, int]]
    nodes: list[tuple[str, str, Any]]
    valuation: PadicValuation | ExplicitValuation | TadicValuation


@dataclass(frozen=True)
class TropicalCurveExt:
    graph: WeightedGraph
    lengths: tuple  # sorted (edge, Fraction or INF)

    def __post_init__(self):
        ls = dict(self.lengths)
        if set(ls) != set(self.graph.edges):
            raise TropicalizationError("lengths must be given on exactly the edges")
        for e, x in ls.items():
            if x is not INF and not x > 0:
                raise ZeroLengthNode(f"edge {e} has length {x}")

    @property
    def length_map(self) -> dict:
        return dict(self.lengths)

    def infinite_edges(self) -> list[int]:
        return sorted(e for e, x in self.lengths if x is INF)


def tropical_curve(graph: WeightedGraph, lengths: Mapping[int, Any]) -> TropicalCurveExt:
    return TropicalCurveExt(graph, tuple(sorted((e, extended_value(x)) for e, x in lengths.items())))


def _node_length(model: StableModel, k: int):
    param = model.nodes[k][2]
    val = model.valuation
    if param is ZERO:
        return INF
    if isinstance(val, PadicValuation):
        if isinstance(param, PrimePower):
            return param.exponent + padic_valuation(param.unit, val.prime)
        return padic_valuation(param, val.prime)
    if isinstance(val, TadicValuation):
        return Fraction(dict(val.exponents)[k])
    return dict(val.values)[k]


def dual_tropical_curve(model: StableModel) -> TropicalCurveExt:
    """One vertex per component weighted by its geometric genus, one edge per node."""
    index = {cid: k for k, (cid, _) in enumerate(model.components)}
    n = len(model.components)
    edges = []
    for a, b, _ in model.nodes:
        if a not in index or b not in index:
            raise TropicalizationError(f"node between unknown components {a}, {b}")
        edges.append((index[a], index[b]))
    g = from_edges([h for _, h in model.components], edges)
    if len(_components(g)) != 1:
        raise Disconnected("dual graph is not connected")
    if not is_stable(g):
        raise UnstableDualGraph(certificate(g).decode())
    lengths = {}
    for k in range(len(model.nodes)):
        x = _node_length(model, k)
        if x is not INF and x <= 0:
            raise ZeroLengthNode(f"node {k} has valuation {x}")
        lengths[n + 2 * k] = Fraction(x) if x is not INF else INF
    return tropical_curve(g, lengths)


# locating a curve


@dataclass(frozen=True)
class CellLocation:
    object_id: int
    point: ExtendedPoint
    orbit: tuple  # coordinate vectors (in cone label order) under the object's automorphisms
    at_infinity: tuple[int, ...]


def _graph_of(payload) -> WeightedGraph:
    return payload if isinstance(payload, WeightedGraph) else payload.graph


def locate_cell(curve: TropicalCurveExt, space: ConeDiagram) -> CellLocation:
    g = curve.graph
    want = space.meta.get("genus")
    if not is_stable(g) or (want is not None and graph_genus(g) != want):
        raise NoMatchingCell(certificate(g).decode())
    iso = to_canonical(g)
    cert = certificate(g)
    matches = [o for o in space.objects if certificate(_graph_of(o.payload)) == cert]
    if not matches:
        raise NoMatchingCell(cert.decode())
    if len(matches) > 1:
        raise NoMatchingCell(f"{cert.decode()} matches {len(matches)} marked cells")
    obj = matches[0]
    target = _graph_of(obj.payload)
    if target != iso.target:
        raise NoMatchingCell("space object is not in canonical form")
    ls = curve.length_map
    coords = {iso.target.edge_of(iso(e)): x for e, x in ls.items()}
    labels = obj.cone.labels
    orbit = set()
    for f in space.automorphisms(obj.id):
        moved = f.pushforward_point(coords)
        orbit.add(tuple(moved[a] for a in labels))
    if not orbit:
        orbit.add(tuple(coords[a] for a in labels))
    point = ExtendedPoint(obj.id, tuple(sorted(coords.items())))
    return CellLocation(obj.id, point, tuple(sorted(orbit, key=_vector_key)), tuple(point.at_infinity()))


def _vector_key(v):
    return tuple((1, 0) if x is INF else (0, x) for x in v)


# documents


_POWER = re.compile(r"^\s*(?:(?P<unit>[-+]?\d+(?:/\d+)?)\s*\*\s*)?p(?:\s*\^\s*(?P<exp>-?\d+))?\s*$")


def parse_parameter(text, where: str = "parameter"):
    """A node parameter: a rational, ZERO, or a prime power written p, p^k or c*p^k."""
    if isinstance(text, bool):
        raise ModelSyntaxError(where, "expected a rational, ZERO or p^k")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ModelSyntaxError(where, "expected a rational, ZERO or p^k")
    if text.strip() == "ZERO":
        return ZERO
    m = _POWER.match(text)
    if m:
        unit = Fraction(m.group("unit")) if m.group("unit") else Fraction(1)
        if unit == 0:
            return Fraction(0)
        return PrimePower(int(m.group("exp") or 1), unit)
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ModelSyntaxError(where, f"cannot read {text!r}") from None


def format_parameter(x) -> str:
    if x is ZERO:
        return "ZERO"
    if isinstance(x, PrimePower):
        head = "" if x.unit == 1 else f"{x.unit}*"
        return f"{head}p" if x.exponent == 1 else f"{head}p^{x.exponent}"
    return str(x)


def _require(doc: Mapping, key: str, kind, where: str):
    if key not in doc:
        raise ModelSyntaxError(f"{where}{key}", "missing")
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ModelSyntaxError(f"{where}{key}", f"expected {getattr(kind, '__name__', kind)}")
    return value


def _node_map(raw, n_nodes: int, where: str, reader):
    if not isinstance(raw, Mapping):
        raise ModelSyntaxError(where, "expected an object keyed by node index")
    out = {}
    for key, value in raw.items():
        try:
            k = int(key)
        except ValueError:
            raise ModelSyntaxError(f"{where}.{key}", "node index must be an integer") from None
        if not 0 <= k < n_nodes:
            raise ModelSyntaxError(f"{where}.{key}", "no such node")
        out[k] = reader(value, f"{where}.{key}")
    missing = sorted(set(range(n_nodes)) - set(out))
    if missing:
        raise ModelSyntaxError(where, f"no value for nodes {missing}")
    return tuple(sorted(out.items()))


def _read_extended(value, where):
    try:
        return extended_value(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ModelSyntaxError(where, f"cannot read {value!r} as a value in [0, inf]") from None


def _read_exponent(value, where):
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ModelSyntaxError(where, "expected a natural exponent")
    return value


def model_from_document(doc: Mapping, prime: int | None = None) -> StableModel:
    """Read a model document; `prime` forces p-adic valuation at that prime."""
    if not isinstance(doc, Mapping):
        raise ModelSyntaxError("document", "expected an object")
    comps = []
    for k, c in enumerate(_require(doc, "components", list, "")):
        where = f"components[{k}]."
        if not isinstance(c, Mapping):
            raise ModelSyntaxError(f"components[{k}]", "expected an object")
        cid = c.get("id")
        if not isinstance(cid, (str, int)) or isinstance(cid, bool):
            raise ModelSyntaxError(f"{where}id", "expected a string or integer")
        h = _require(c, "genus", int, where)
        if h < 0:
            raise ModelSyntaxError(f"{where}genus", "must be nonnegative")
        comps.append((str(cid), h))
    if len({cid for cid, _ in comps}) != len(comps):
        raise ModelSyntaxError("components", "duplicate component id")
    ids = {cid for cid, _ in comps}
    nodes = []
    for k, nd in enumerate(_require(doc, "nodes", list, "")):
        where = f"nodes[{k}]."
        if not isinstance(nd, Mapping):
            raise ModelSyntaxError(f"nodes[{k}]", "expected an object")
        ends = _require(nd, "between", list, where)
        if len(ends) != 2:
            raise ModelSyntaxError(f"{where}between", "expected two component ids")
        a, b = (str(x) for x in ends)
        for x in (a, b):
            if x not in ids:
                raise ModelSyntaxError(f"{where}between", f"unknown component {x!r}")
        param = parse_parameter(nd.get("parameter", "ZERO"), f"{where}parameter")
        nodes.append((a, b, param))
    if prime is not None:
        valuation = PadicValuation(prime)
    else:
        raw = _require(doc, "valuation", Mapping, "")
        kind = raw.get("kind")
        if kind == "padic":
            p = _require(raw, "prime", int, "valuation.")
            if not _is_prime(p):
                raise NotPrime(p)
            valuation = PadicValuation(p)
        elif kind == "explicit":
            valuation = ExplicitValuation(_node_map(raw.get("values"), len(nodes), "valuation.values", _read_extended))
        elif kind == "tadic":
            valuation = TadicValuation(_node_map(raw.get("exponents"), len(nodes), "valuation.exponents", _read_exponent))
        else:
            raise ModelSyntaxError("valuation.kind", "expected padic, explicit or tadic")
    if isinstance(valuation, PadicValuation):
        for k, (_, _, param) in enumerate(nodes):
            if not (param is ZERO or isinstance(param, (Fraction, PrimePower))):
                raise ModelSyntaxError(f"nodes[{k}].parameter", "p-adic mode needs a rational parameter")
    return StableModel(comps, nodes, valuation)


def model_to_document(m: StableModel) -> dict:
    doc: dict = {
        "components": [{"id": cid, "genus": h} for cid, h in m.components],
        "nodes": [{"between": [a, b], "parameter": format_parameter(x)} for a, b, x in m.nodes],
    }
    v = m.valuation
    if isinstance(v, PadicValuation):
        doc["valuation"] = {"kind": "padic", "prime": v.prime}
    elif isinstance(v, ExplicitValuation):
        doc["valuation"] = {"kind": "explicit", "values": {str(k): format_extended(x) for k, x in v.values}}
    else:
        doc["valuation"] = {"kind": "tadic", "exponents": {str(k): x for k, x in v.exponents}}
    return doc


def parse_model(text: str, prime: int | None = None) -> StableModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelSyntaxError("document", exc.msg, exc.lineno, exc.colno) from None
    return model_from_document(doc, prime)


def curve_to_document(c: TropicalCurveExt) -> dict:
    from .graph_core import to_document

    return {
        "graph": to_document(c.graph),
        "certificate": certificate(c.graph).decode(),
        "lengths": {str(e): format_extended(x) for e, x in c.lengths},
        "infinite_edges": c.infinite_edges(),
    }


def location_to_document(loc: CellLocation) -> dict:
    return {
        "object": loc.object_id,
        "coordinates": {str(a): format_extended(x) for a, x in loc.point.coordinates},
        "orbit": [[format_extended(x) for x in v] for v in loc.orbit],
        "orbit_size": len(loc.orbit),
        "face_at_infinity": list(loc.at_infinity),
    }
