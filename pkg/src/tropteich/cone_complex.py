"""Orthant cones, face maps and diagrams of cones.

Every cone here is an orthant R_{>=0}^L for a finite label set L, so a face
morphism is an injective map of labels. A generalized cone complex is kept as
its defining diagram; nothing is glued.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping


class UnknownObject(KeyError):
    pass


class _Infinity:
    """The extra point of the extended half-line; compares above every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    __str__ = __repr__

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("INF")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def extended_value(x) -> Fraction | _Infinity:
    if x is INF or x in ("inf", "INF", "oo"):
        return INF
    q = Fraction(x)
    if q < 0:
        raise ValueError(f"negative extended value {x}")
    return q


def format_extended(x) -> str:
    return "inf" if x is INF else str(x)


@dataclass(frozen=True)
class OrthantCone:
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("cone labels must be distinct")

    @property
    def dimension(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class FaceMap:
    source: OrthantCone
    target: OrthantCone
    coordinate_map: tuple[tuple[int, int], ...]

    def __post_init__(self):
        m = dict(self.coordinate_map)
        if set(m) != set(self.source.labels):
            raise ValueError("coordinate map must be defined on every source label")
        if len(set(m.values())) != len(m) or not set(m.values()) <= set(self.target.labels):
            raise ValueError("coordinate map must be injective into the target labels")

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.coordinate_map)

    def __call__(self, label: int) -> int:
        return self.mapping[label]

    def compose(self, inner: "FaceMap") -> "FaceMap":
        """self after inner."""
        if inner.target != self.source:
            raise ValueError("face maps are not composable")
        m = self.mapping
        return make_face_map(inner.source, self.target, {a: m[b] for a, b in inner.coordinate_map})

    def is_identity(self) -> bool:
        return self.source == self.target and all(a == b for a, b in self.coordinate_map)

    def pushforward_point(self, coords: Mapping[int, Any]) -> dict[int, Any]:
        """A point of the source cone as a point of the target (zeros off the face)."""
        out = {b: Fraction(0) for b in self.target.labels}
        for a, b in self.coordinate_map:
            out[b] = coords[a]
        return out


def make_face_map(source: OrthantCone, target: OrthantCone, mapping: Mapping[int, int]) -> FaceMap:
    return FaceMap(source, target, tuple(sorted(mapping.items())))


def identity_face_map(cone: OrthantCone) -> FaceMap:
    return make_face_map(cone, cone, {a: a for a in cone.labels})


def face_map_from_contraction(c) -> FaceMap:
    """sigma_target -> sigma_source, including the uncontracted edges."""
    src = OrthantCone(tuple(c.target.edges))
    tgt = OrthantCone(tuple(c.source.edges))
    inverse = {t: s for s, t in c.edge_map().items()}
    return make_face_map(src, tgt, inverse)


def face_map_from_isomorphism(iso) -> FaceMap:
    """An isomorphism G -> G' induces sigma_G' -> sigma_G."""
    src = OrthantCone(tuple(iso.target.edges))
    tgt = OrthantCone(tuple(iso.source.edges))
    return make_face_map(src, tgt, {iso.target.edge_of(iso(e)): e for e in iso.source.edges})


@dataclass
class ConeObject:
    id: int
    cone: OrthantCone
    payload: Any = None
    label: str = ""

    @property
    def dimension(self) -> int:
        return self.cone.dimension


@dataclass
class ConeDiagram:
    objects: list[ConeObject]
    homs: dict[tuple[int, int], list[FaceMap]]
    marked: bool = False
    meta: dict = field(default_factory=dict)

    def object(self, oid: int) -> ConeObject:
        for o in self.objects:
            if o.id == oid:
                return o
        raise UnknownObject(oid)

    def hom(self, s: int, t: int) -> list[FaceMap]:
        return self.homs.get((s, t), [])

    def automorphisms(self, oid: int) -> list[FaceMap]:
        return self.hom(oid, oid)

    @property
    def ids(self) -> list[int]:
        return [o.id for o in self.objects]


def check_diagram(d: ConeDiagram) -> list[str]:
    """Structural problems: mismatched cones, missing identities, missing composites."""
    problems = []
    cones = {o.id: o.cone for o in d.objects}
    for (s, t), maps in d.homs.items():
        for f in maps:
            if f.source != cones[s] or f.target != cones[t]:
                problems.append(f"hom {s}->{t} has a face map with wrong cones")
    for o in d.objects:
        if identity_face_map(o.cone) not in d.hom(o.id, o.id):
            problems.append(f"object {o.id} lacks its identity")
    coords = {k: {f.coordinate_map for f in v} for k, v in d.homs.items()}
    outgoing: dict[int, list[int]] = {}
    for (b, c) in d.homs:
        outgoing.setdefault(b, []).append(c)
    for (a, b), fs in d.homs.items():
        for c in outgoing.get(b, ()):
            have = coords.get((a, c), set())
            for f in {f.coordinate_map for f in fs}:
                fm = dict(f)
                missing = False
                for g in coords[(b, c)]:
                    gm = dict(g)
                    if tuple(sorted((x, gm[y]) for x, y in fm.items())) not in have:
                        missing = True
                        break
                if missing:
                    problems.append(f"composite {a}->{b}->{c} missing")
                    break
    return problems


def is_cone_complex(d: ConeDiagram) -> bool:
    """At most one morphism between any two objects and only identities as automorphisms."""
    return not cone_complex_violations(d)


def cone_complex_violations(d: ConeDiagram) -> list[tuple[int, int, int]]:
    """(source, target, hom-set size) for every offending hom-set."""
    bad = []
    for (s, t), maps in sorted(d.homs.items()):
        if len(maps) > 1:
            bad.append((s, t, len(maps)))
        elif s == t and maps and not maps[0].is_identity():
            bad.append((s, t, len(maps)))
    return bad


def coarse_space(d: ConeDiagram) -> ConeDiagram:
    """Replace every hom-set by the distinct face maps it induces."""
    homs = {}
    for key, maps in d.homs.items():
        seen = {}
        for f in maps:
            seen.setdefault(f.coordinate_map, f)
        homs[key] = [seen[k] for k in sorted(seen)]
    return ConeDiagram(list(d.objects), homs, d.marked, dict(d.meta, coarse=True))


def has_faithful_monodromy(d: ConeDiagram) -> bool:
    return all(len({f.coordinate_map for f in maps}) == len(maps) for maps in d.homs.values())


def f_vector(d: ConeDiagram) -> list[int]:
    if not d.objects:
        return []
    top = max(o.dimension for o in d.objects)
    counts = [0] * (top + 1)
    for o in d.objects:
        counts[o.dimension] += 1
    return counts


def faces(d: ConeDiagram, oid: int) -> list[tuple[int, FaceMap]]:
    """Every (object, face map) with a morphism into the cone of oid, itself included."""
    d.object(oid)
    out = []
    for (s, t), maps in sorted(d.homs.items()):
        if t == oid:
            out.extend((s, f) for f in maps)
    return out


def face_ids(d: ConeDiagram, oid: int) -> list[int]:
    return sorted({s for s, _ in faces(d, oid)})


def cofaces(d: ConeDiagram, oid: int, radius: int) -> list[int]:
    """Objects of which oid is a proper face, reached within `radius` steps.

    A step goes from an object to a strictly larger cone of dimension exactly
    one more that it maps into.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    d.object(oid)
    dims = {o.id: o.dimension for o in d.objects}
    up: dict[int, set[int]] = {}
    for (s, t), maps in d.homs.items():
        if maps and dims[t] == dims[s] + 1:
            up.setdefault(s, set()).add(t)
    found: set[int] = set()
    frontier = {oid}
    for _ in range(radius):
        frontier = {t for s in frontier for t in up.get(s, ())} - found - {oid}
        found |= frontier
    return sorted(found)


@dataclass(frozen=True)
class ExtendedPoint:
    object_id: int
    coordinates: tuple[tuple[int, Any], ...]

    @property
    def values(self) -> dict[int, Any]:
        return dict(self.coordinates)

    def at_infinity(self) -> list[int]:
        return sorted(a for a, x in self.coordinates if x is INF)


def to_document(d: ConeDiagram) -> dict:
    objs = []
    for o in d.objects:
        objs.append({"id": o.id, "label": o.label, "dimension": o.dimension, "cone": list(o.cone.labels)})
    homs = []
    for (s, t) in sorted(d.homs):
        for f in d.homs[(s, t)]:
            homs.append({"source": s, "target": t, "map": [[a, b] for a, b in f.coordinate_map]})
    return {"marked": d.marked, "objects": objs, "homs": homs, "f_vector": f_vector(d)}


def to_dot(d: ConeDiagram, name: str = "cones") -> str:
    """Hasse-style DOT of the object poset: one arc per face relation of codimension one."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for o in d.objects:
        text = o.label or str(o.id)
        lines.append(f'  n{o.id} [label="{text}\\ndim {o.dimension}"];')
    dims = {o.id: o.dimension for o in d.objects}
    for (s, t) in sorted(d.homs):
        if s != t and d.homs[(s, t)] and dims[t] == dims[s] + 1:
            lines.append(f"  n{s} -> n{t};")
    lines.append("}")
    return "\n".join(lines) + "\n"
