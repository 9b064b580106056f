"""Half-edge weighted graphs.

A graph is a finite set X = {0, ..., n-1} with an idempotent root map r and
an involution i fixing every vertex (i o r = r). Vertices are the fixed points of r, legs
are half-edges fixed by i, finite edges are pairs {h, i(h)} with h != i(h).
Edges are identified by their smaller half-edge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence


class GraphError(ValueError):
    pass


class AxiomViolation(GraphError):
    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class Disconnected(GraphError):
    pass


class UnknownVertex(GraphError):
    pass


class WeightedGraph:
    """Immutable weighted graph in half-edge form.

    ``weights`` maps vertices (root fixed points) to natural numbers; missing
    vertices get weight 0. ``legs`` lists the legs in their marking order.
    """

    __slots__ = ("root", "involution", "_weights", "legs", "_hash")

    def __init__(
        self,
        root: Sequence[int],
        involution: Sequence[int],
        weights: Mapping[int, int] | None = None,
        legs: Sequence[int] = (),
    ):
        self.root = tuple(int(x) for x in root)
        self.involution = tuple(int(x) for x in involution)
        w = dict(weights or {})
        self._weights = tuple(sorted((int(v), int(k)) for v, k in w.items() if k))
        self.legs = tuple(int(x) for x in legs)
        self._hash = None

    # structural accessors

    @property
    def half_edge_count(self) -> int:
        return len(self.root)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(x for x in range(len(self.root)) if self.root[x] == x)

    @property
    def half_edges(self) -> tuple[int, ...]:
        return tuple(x for x in range(len(self.root)) if self.root[x] != x)

    @property
    def edges(self) -> tuple[int, ...]:
        """Finite edges, each named by its smaller half-edge."""
        return tuple(
            h for h in self.half_edges if self.involution[h] != h and h < self.involution[h]
        )

    @property
    def weights(self) -> dict[int, int]:
        return {v: self.weight(v) for v in self.vertices}

    def weight(self, v: int) -> int:
        for u, k in self._weights:
            if u == v:
                return k
        return 0

    def ends(self, e: int) -> tuple[int, int]:
        """Endpoints (r(e), r(i(e))) of the edge named e."""
        return self.root[e], self.root[self.involution[e]]

    def edge_of(self, h: int) -> int:
        return min(h, self.involution[h])

    def is_loop(self, e: int) -> bool:
        a, b = self.ends(e)
        return a == b

    def half_edges_at(self, v: int) -> tuple[int, ...]:
        return tuple(h for h in self.half_edges if self.root[h] == v)

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.root == other.root
            and self.involution == other.involution
            and self._weights == other._weights
            and self.legs == other.legs
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.root, self.involution, self._weights, self.legs))
        return self._hash

    def __repr__(self):
        return (
            f"WeightedGraph(root={list(self.root)}, involution={list(self.involution)}, "
            f"weights={self.weights}, legs={list(self.legs)})"
        )

    def relabel(self, perm: Sequence[int]) -> "WeightedGraph":
        """Image of the graph under the bijection x -> perm[x] of X."""
        n = len(self.root)
        inv = [0] * n
        for x, y in enumerate(perm):
            inv[y] = x
        root = [perm[self.root[inv[y]]] for y in range(n)]
        invol = [perm[self.involution[inv[y]]] for y in range(n)]
        weights = {perm[v]: k for v, k in self._weights}
        return WeightedGraph(root, invol, weights, [perm[h] for h in self.legs])


def from_edges(
    weights: Sequence[int], edges: Sequence[tuple[int, int]], legs: Sequence[int] = ()
) -> WeightedGraph:
    """Build a graph from a vertex weight list and an edge list on 0..n-1.

    Vertex k becomes half-edge label k; edge j contributes the half-edges
    n + 2j (at its first end) and n + 2j + 1 (at its second end); legs come
    last, attached to the listed vertices in order.
    """
    n = len(weights)
    root = list(range(n))
    invol = list(range(n))
    for a, b in edges:
        h = len(root)
        root += [a, b]
        invol += [h + 1, h]
    leg_ids = []
    for v in legs:
        h = len(root)
        root.append(v)
        invol.append(h)
        leg_ids.append(h)
    return WeightedGraph(root, invol, {v: w for v, w in enumerate(weights)}, leg_ids)


def validate(g: WeightedGraph) -> None:
    n = g.half_edge_count
    r, i = g.root, g.involution
    if len(i) != n:
        raise AxiomViolation("root and involution have different lengths")
    for x in range(n):
        if not (0 <= r[x] < n and 0 <= i[x] < n):
            raise AxiomViolation(f"label out of range at {x}")
    for x in range(n):
        if r[r[x]] != r[x]:
            raise AxiomViolation(f"root map not idempotent at {x}")
    for x in range(n):
        if i[i[x]] != x:
            raise AxiomViolation(f"involution does not square to identity at {x}")
    # i o r = r: the involution fixes every vertex
    for x in range(n):
        if i[r[x]] != r[x]:
            raise AxiomViolation(f"involution moves vertex {r[x]}")
    verts = set(g.vertices)
    for v, k in g._weights:
        if v not in verts:
            raise AxiomViolation(f"weight assigned to non-vertex {v}")
        if k < 0:
            raise AxiomViolation(f"negative weight at {v}")
    actual_legs = {h for h in g.half_edges if i[h] == h}
    if len(set(g.legs)) != len(g.legs) or set(g.legs) != actual_legs:
        raise AxiomViolation("leg order is not a total order on the legs")
    if not verts:
        raise AxiomViolation("graph has no vertices")
    if len(_components(g)) != 1:
        raise Disconnected("graph is not connected")


def _components(g: WeightedGraph) -> list[set[int]]:
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in g.edges:
        a, b = g.ends(e)
        parent[find(a)] = find(b)
    comps: dict[int, set[int]] = {}
    for v in g.vertices:
        comps.setdefault(find(v), set()).add(v)
    return list(comps.values())


def betti(g: WeightedGraph) -> int:
    return len(g.edges) - len(g.vertices) + len(_components(g))


def genus(g: WeightedGraph) -> int:
    return betti(g) + sum(g.weights.values())


def valence(g: WeightedGraph, v: int) -> int:
    if v not in g.vertices:
        raise UnknownVertex(v)
    return sum(1 for h in g.half_edges if g.root[h] == v)


def loop_count(g: WeightedGraph, v: int) -> int:
    return sum(1 for e in g.edges if g.ends(e) == (v, v))


def is_stable(g: WeightedGraph) -> bool:
    return all(2 * g.weight(v) - 2 + valence(g, v) > 0 for v in g.vertices)


# isomorphisms


@dataclass(frozen=True)
class Isomorphism:
    source: WeightedGraph
    target: WeightedGraph
    half_edge_map: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.half_edge_map[x]

    def compose(self, inner: "Isomorphism") -> "Isomorphism":
        """self after inner."""
        return Isomorphism(
            inner.source, self.target, tuple(self.half_edge_map[y] for y in inner.half_edge_map)
        )

    def inverse(self) -> "Isomorphism":
        inv = [0] * len(self.half_edge_map)
        for x, y in enumerate(self.half_edge_map):
            inv[y] = x
        return Isomorphism(self.target, self.source, tuple(inv))

    def is_valid(self) -> bool:
        return is_isomorphism(self.source, self.target, self.half_edge_map)


def identity_isomorphism(g: WeightedGraph) -> Isomorphism:
    return Isomorphism(g, g, tuple(range(g.half_edge_count)))


def is_isomorphism(g1: WeightedGraph, g2: WeightedGraph, f: Sequence[int]) -> bool:
    n = g1.half_edge_count
    if n != g2.half_edge_count or sorted(f) != list(range(n)):
        return False
    for x in range(n):
        if f[g1.root[x]] != g2.root[f[x]] or f[g1.involution[x]] != g2.involution[f[x]]:
            return False
    if any(g1.weight(v) != g2.weight(f[v]) for v in g1.vertices):
        return False
    return tuple(f[h] for h in g1.legs) == g2.legs


def _vertex_invariant(g: WeightedGraph, v: int) -> tuple:
    legs = tuple(k for k, h in enumerate(g.legs) if g.root[h] == v)
    return (g.weight(v), valence(g, v), loop_count(g, v), legs)


def _refined_classes(g: WeightedGraph) -> list[tuple[tuple, list[int]]]:
    """Vertices grouped by colour, refined by neighbour colours until stable.

    Colours are nested tuples rather than per-graph ranks so that they compare
    meaningfully across graphs.
    """
    colour = {v: _vertex_invariant(g, v) for v in g.vertices}
    nbrs: dict[int, list[int]] = {v: [] for v in g.vertices}
    for e in g.edges:
        a, b = g.ends(e)
        if a != b:
            nbrs[a].append(b)
            nbrs[b].append(a)
    count = len(set(colour.values()))
    while True:
        new = {v: (colour[v], tuple(sorted(colour[u] for u in nbrs[v]))) for v in g.vertices}
        new_count = len(set(new.values()))
        if new_count == count:
            break
        colour, count = new, new_count
    classes: dict[tuple, list[int]] = {}
    for v in g.vertices:
        classes.setdefault(colour[v], []).append(v)
    return sorted(classes.items())


def _edge_multiset(g: WeightedGraph, pos: Mapping[int, int]) -> tuple:
    pairs = []
    for e in g.edges:
        a, b = g.ends(e)
        pa, pb = pos[a], pos[b]
        pairs.append((min(pa, pb), max(pa, pb)))
    return tuple(sorted(pairs))


def _encoding(g: WeightedGraph, order: Sequence[int]) -> tuple:
    pos = {v: k for k, v in enumerate(order)}
    return (
        len(order),
        tuple(g.weight(v) for v in order),
        _edge_multiset(g, pos),
        tuple(pos[g.root[h]] for h in g.legs),
    )


def _orderings(g: WeightedGraph) -> Iterator[tuple[int, ...]]:
    """Vertex orderings compatible with the refined colour classes."""
    classes = [vs for _, vs in _refined_classes(g)]
    for parts in itertools.product(*(itertools.permutations(vs) for vs in classes)):
        yield tuple(itertools.chain.from_iterable(parts))


@dataclass(frozen=True)
class CanonicalForm:
    canonical_labeling: tuple[int, ...]
    certificate: bytes
    graph: WeightedGraph = field(compare=False)


def _encode_bytes(enc: tuple) -> bytes:
    n, weights, pairs, legs = enc
    parts = [f"v{n}", "w" + ",".join(map(str, weights))]
    parts.append("e" + ",".join(f"{a}-{b}" for a, b in pairs))
    parts.append("l" + ",".join(map(str, legs)))
    return ";".join(parts).encode()


def _graph_from_encoding(enc: tuple) -> WeightedGraph:
    n, weights, pairs, legs = enc
    return from_edges(list(weights), list(pairs), list(legs))


def _labeling_for(g: WeightedGraph, order: Sequence[int], enc: tuple) -> tuple[int, ...]:
    """Half-edge bijection from g onto the graph built from enc under order."""
    pos = {v: k for k, v in enumerate(order)}
    n = len(order)
    perm = [0] * g.half_edge_count
    for v in g.vertices:
        perm[v] = pos[v]
    # canonical edge j has half-edges n+2j (smaller end) and n+2j+1
    slots: dict[tuple[int, int], list[int]] = {}
    for j, pair in enumerate(enc[2]):
        slots.setdefault(pair, []).append(j)
    for e in sorted(g.edges):
        a, b = g.ends(e)
        pa, pb = pos[a], pos[b]
        j = slots[(min(pa, pb), max(pa, pb))].pop(0)
        if pa <= pb:
            perm[e], perm[g.involution[e]] = n + 2 * j, n + 2 * j + 1
        else:
            perm[e], perm[g.involution[e]] = n + 2 * j + 1, n + 2 * j
    base = n + 2 * len(enc[2])
    for k, h in enumerate(g.legs):
        perm[h] = base + k
    return tuple(perm)


_CANON_CACHE: dict[WeightedGraph, CanonicalForm] = {}


def canonical_form(g: WeightedGraph) -> CanonicalForm:
    """Lexicographically least encoding over colour-compatible vertex orders."""
    cached = _CANON_CACHE.get(g)
    if cached is not None:
        return cached
    best = None
    best_order = None
    for order in _orderings(g):
        enc = _encoding(g, order)
        if best is None or enc < best:
            best, best_order = enc, order
    canon = _graph_from_encoding(best)
    form = CanonicalForm(_labeling_for(g, best_order, best), _encode_bytes(best), canon)
    if len(_CANON_CACHE) > 200_000:
        _CANON_CACHE.clear()
    _CANON_CACHE[g] = form
    return form


def certificate(g: WeightedGraph) -> bytes:
    return canonical_form(g).certificate


def canonical_graph(g: WeightedGraph) -> WeightedGraph:
    return canonical_form(g).graph


def to_canonical(g: WeightedGraph) -> Isomorphism:
    """Isomorphism from g onto its canonical representative."""
    form = canonical_form(g)
    return Isomorphism(g, form.graph, form.canonical_labeling)


def are_isomorphic(g1: WeightedGraph, g2: WeightedGraph) -> Isomorphism | None:
    f1, f2 = canonical_form(g1), canonical_form(g2)
    if f1.certificate != f2.certificate:
        return None
    return to_canonical(g2).inverse().compose(to_canonical(g1))


def _extensions(g1: WeightedGraph, g2: WeightedGraph, vmap: Mapping[int, int]) -> Iterator[tuple[int, ...]]:
    """All half-edge bijections g1 -> g2 extending a vertex bijection."""
    groups1: dict[tuple[int, int], list[int]] = {}
    for e in g1.edges:
        a, b = g1.ends(e)
        groups1.setdefault((min(a, b), max(a, b)), []).append(e)
    groups2: dict[tuple[int, int], list[int]] = {}
    for e in g2.edges:
        a, b = g2.ends(e)
        groups2.setdefault((min(a, b), max(a, b)), []).append(e)
    base = [None] * g1.half_edge_count
    for v, w in vmap.items():
        base[v] = w
    for k, h in enumerate(g1.legs):
        base[h] = g2.legs[k]
    choices = []
    for (a, b), es in sorted(groups1.items()):
        fa, fb = vmap[a], vmap[b]
        tgt = groups2.get((min(fa, fb), max(fa, fb)), [])
        if len(tgt) != len(es):
            return
        options = []
        for p in itertools.permutations(tgt):
            for flips in itertools.product((False, True), repeat=len(es) if a == b else 0):
                assign = []
                for k, (e, t) in enumerate(zip(es, p)):
                    he, he2 = e, g1.involution[e]
                    ht, ht2 = t, g2.involution[t]
                    if a == b:
                        if flips[k]:
                            ht, ht2 = ht2, ht
                    elif g2.root[ht] != vmap[g1.root[he]]:
                        ht, ht2 = ht2, ht
                    assign.append((he, ht))
                    assign.append((he2, ht2))
                options.append(assign)
        choices.append(options)
    for combo in itertools.product(*choices):
        f = list(base)
        for assign in combo:
            for x, y in assign:
                f[x] = y
        yield tuple(f)


def _vertex_bijections(g1: WeightedGraph, g2: WeightedGraph) -> Iterator[dict[int, int]]:
    c1 = _refined_classes(g1)
    c2 = _refined_classes(g2)
    if [(k, len(v)) for k, v in c1] != [(k, len(v)) for k, v in c2]:
        return
    src = [v for _, vs in c1 for v in vs]
    for parts in itertools.product(*(itertools.permutations(vs) for _, vs in c2)):
        tgt = list(itertools.chain.from_iterable(parts))
        vmap = dict(zip(src, tgt))
        pos1 = {v: k for k, v in enumerate(src)}
        pos2 = {w: k for k, w in enumerate(tgt)}
        if _edge_multiset(g1, pos1) != _edge_multiset(g2, pos2):
            continue
        yield vmap


def isomorphisms(g1: WeightedGraph, g2: WeightedGraph) -> list[Isomorphism]:
    out = []
    for vmap in _vertex_bijections(g1, g2):
        for f in _extensions(g1, g2, vmap):
            out.append(Isomorphism(g1, g2, f))
    return out


_AUT_CACHE: dict[WeightedGraph, list[Isomorphism]] = {}


def automorphisms(g: WeightedGraph) -> list[Isomorphism]:
    """The full automorphism group, identity first, remaining in sorted order."""
    cached = _AUT_CACHE.get(g)
    if cached is None:
        auts = sorted(isomorphisms(g, g), key=lambda a: a.half_edge_map)
        ident = tuple(range(g.half_edge_count))
        auts.sort(key=lambda a: a.half_edge_map != ident)
        cached = _AUT_CACHE[g] = auts
    return list(cached)


# serialization


def to_document(g: WeightedGraph) -> dict:
    return {
        "half_edges": g.half_edge_count,
        "root": list(g.root),
        "involution": list(g.involution),
        "weights": {str(v): g.weight(v) for v in g.vertices},
        "legs": list(g.legs),
    }


def from_document(doc: Mapping) -> WeightedGraph:
    for key in ("half_edges", "root", "involution"):
        if key not in doc:
            raise AxiomViolation(f"missing field '{key}'")
    n = doc["half_edges"]
    if len(doc["root"]) != n or len(doc["involution"]) != n:
        raise AxiomViolation("field 'half_edges' does not match array lengths")
    weights = {int(v): int(k) for v, k in doc.get("weights", {}).items()}
    g = WeightedGraph(doc["root"], doc["involution"], weights, doc.get("legs", []))
    validate(g)
    return g
