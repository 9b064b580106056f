"""Weighted edge contractions, the category of stable graphs of fixed genus,
and enumeration of its isomorphism classes."""

from __future__ import annotations

import itertools
from functools import lru_cache
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph_core import (
    GraphError,
    Isomorphism,
    WeightedGraph,
    are_isomorphic,
    automorphisms,
    canonical_form,
    canonical_graph,
    certificate,
    from_edges,
    is_stable,
    to_canonical,
)


class UnknownEdge(GraphError):
    pass


class Incomposable(GraphError):
    pass


class UnsupportedGenus(ValueError):
    pass


@dataclass(frozen=True)
class EdgeContraction:
    """A contraction pi: X(source) -> X(target).

    ``pi`` sends every vertex to a vertex, every uncontracted half-edge to a
    half-edge and both half-edges of a contracted edge to the vertex they
    collapse into.
    """

    source: WeightedGraph
    target: WeightedGraph
    pi: tuple[int, ...]

    @property
    def contracted(self) -> frozenset[int]:
        tv = set(self.target.vertices)
        return frozenset(e for e in self.source.edges if self.pi[e] in tv)

    @property
    def vertex_map(self) -> dict[int, int]:
        return {v: self.pi[v] for v in self.source.vertices}

    @property
    def half_edge_map(self) -> dict[int, int]:
        """Target half-edge -> its unique preimage half-edge."""
        tv = set(self.target.vertices)
        return {y: x for x, y in enumerate(self.pi) if y not in tv and x not in self.source.vertices}

    def edge_map(self) -> dict[int, int]:
        """Uncontracted source edge -> target edge."""
        return {
            e: self.target.edge_of(self.pi[e])
            for e in self.source.edges
            if e not in self.contracted
        }

    def then(self, iso: Isomorphism) -> "EdgeContraction":
        """Post-compose with an isomorphism of the target."""
        if iso.source != self.target:
            raise Incomposable("isomorphism source is not the contraction target")
        return EdgeContraction(self.source, iso.target, tuple(iso(y) for y in self.pi))

    def is_valid(self) -> bool:
        return check_contraction(self) is None


def check_contraction(c: EdgeContraction) -> str | None:
    """Return None if c satisfies the contraction axioms, else a description."""
    s, t, pi = c.source, c.target, c.pi
    if len(pi) != s.half_edge_count:
        return "pi has wrong length"
    tv = set(t.vertices)
    for x in range(s.half_edge_count):
        if pi[s.root[x]] != t.root[pi[x]]:
            return f"pi does not commute with r at {x}"
        if pi[x] not in tv and pi[s.involution[x]] != t.involution[pi[x]]:
            return f"pi does not commute with i at {x}"
    for v in s.vertices:
        if pi[v] not in tv:
            return f"vertex {v} not sent to a vertex"
    pre: dict[int, list[int]] = {}
    for x, y in enumerate(pi):
        pre.setdefault(y, []).append(x)
    for h in t.half_edges:
        if len(pre.get(h, [])) != 1:
            return f"target half-edge {h} has {len(pre.get(h, []))} preimages"
    if tuple(pi[h] for h in s.legs) != t.legs:
        return "legs not matched in order"
    for w in t.vertices:
        verts = [x for x in pre[w] if x in s.vertices]
        edges = [e for e in s.edges if pi[e] == w]
        if not verts:
            return f"vertex {w} has empty preimage"
        if not _connected(verts, [s.ends(e) for e in edges]):
            return f"preimage of {w} is disconnected"
        b1 = len(edges) - len(verts) + 1
        if b1 + sum(s.weight(v) for v in verts) != t.weight(w):
            return f"preimage of {w} has the wrong genus"
    return None


def _connected(verts: Sequence[int], pairs: Iterable[tuple[int, int]]) -> bool:
    parent = {v: v for v in verts}

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for a, b in pairs:
        parent[find(a)] = find(b)
    return len({find(v) for v in verts}) == 1


def contract(g: WeightedGraph, s: Iterable[int]) -> tuple[WeightedGraph, EdgeContraction]:
    s = frozenset(s)
    edges = set(g.edges)
    bad = s - edges
    if bad:
        raise UnknownEdge(sorted(bad))
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for e in sorted(s):
        a, b = g.ends(e)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    rep = {v: find(v) for v in g.vertices}
    comp_weight: dict[int, int] = {}
    comp_verts: dict[int, int] = {}
    comp_edges: dict[int, int] = {}
    for v in g.vertices:
        comp_weight[rep[v]] = comp_weight.get(rep[v], 0) + g.weight(v)
        comp_verts[rep[v]] = comp_verts.get(rep[v], 0) + 1
    for e in s:
        r = rep[g.ends(e)[0]]
        comp_edges[r] = comp_edges.get(r, 0) + 1

    contracted_halves = {h for e in s for h in (e, g.involution[e])}
    survivors = [x for x in range(g.half_edge_count) if x not in contracted_halves and (g.root[x] != x or rep[x] == x)]
    new_id = {x: k for k, x in enumerate(survivors)}
    root = [new_id[rep[g.root[x]]] for x in survivors]
    invol = [new_id[g.involution[x]] if g.root[x] != x else new_id[x] for x in survivors]
    weights = {
        new_id[r]: comp_weight[r] + comp_edges.get(r, 0) - comp_verts[r] + 1 for r in comp_weight
    }
    target = WeightedGraph(root, invol, weights, [new_id[h] for h in g.legs])
    pi = tuple(new_id[rep[g.root[x]]] if x in contracted_halves else new_id[x if g.root[x] != x else rep[x]] for x in range(g.half_edge_count))
    return target, EdgeContraction(g, target, pi)


def identity_contraction(g: WeightedGraph) -> EdgeContraction:
    return EdgeContraction(g, g, tuple(range(g.half_edge_count)))


def compose(outer: EdgeContraction, inner: EdgeContraction) -> EdgeContraction:
    """outer after inner."""
    if inner.target != outer.source:
        raise Incomposable("inner target differs from outer source")
    return EdgeContraction(inner.source, outer.target, tuple(outer.pi[y] for y in inner.pi))


# enumeration


def _check_genus(g: int, lo: int = 2, hi: int | None = None) -> None:
    if g < lo or (hi is not None and g > hi):
        raise UnsupportedGenus(g)


def _weight_vectors(n: int, total: int) -> Iterable[tuple[int, ...]]:
    """Non-increasing weight vectors of length n with sum <= total."""

    def rec(prefix, remaining, cap):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for w in range(min(cap, remaining), -1, -1):
            yield from rec(prefix + [w], remaining - w, w)

    yield from rec([], total, total)


def _adjacencies(weights: Sequence[int], n_edges: int) -> Iterable[list[tuple[int, int]]]:
    """Edge multisets on len(weights) vertices meeting the stability valence bounds."""
    n = len(weights)
    need = [max(0, 3 - 2 * w) for w in weights]
    pairs = [(a, b) for a in range(n) for b in range(a, n)]
    deg = [0] * n
    chosen: list[tuple[int, int]] = []
    # index of the last pair touching each vertex: its valence is final after that
    last = {v: max(k for k, (a, b) in enumerate(pairs) if v in (a, b)) for v in range(n)}

    def rec(k, remaining):
        if remaining == 0:
            if all(deg[v] >= need[v] for v in range(n)):
                yield list(chosen)
            return
        if k == len(pairs):
            return
        slack = 2 * remaining
        if sum(max(0, need[v] - deg[v]) for v in range(n)) > slack:
            return
        a, b = pairs[k]
        for m in range(remaining, -1, -1):
            deg[a] += m
            deg[b] += m
            if all(last[v] != k or deg[v] >= need[v] for v in (a, b)):
                chosen.extend([(a, b)] * m)
                yield from rec(k + 1, remaining - m)
                del chosen[len(chosen) - m:]
            deg[a] -= m
            deg[b] -= m

    yield from rec(0, n_edges)


def _is_connected_edges(n: int, edges: Sequence[tuple[int, int]]) -> bool:
    return _connected(list(range(n)), edges)


def enumerate_stable_graphs(g: int) -> list[WeightedGraph]:
    """One canonical representative per class of stable genus-g graphs without legs.

    Generated by vertex count and weight vector, then by edge multisets, and
    deduplicated by certificate. Sorted by certificate.
    """
    _check_genus(g)
    found: dict[bytes, WeightedGraph] = {}
    for n in range(1, 2 * g - 1):
        for weights in _weight_vectors(n, g):
            b1 = g - sum(weights)
            n_edges = b1 + n - 1
            for edges in _adjacencies(weights, n_edges):
                if not _is_connected_edges(n, edges):
                    continue
                graph = from_edges(weights, edges)
                if not is_stable(graph):
                    continue
                form = canonical_form(graph)
                found.setdefault(form.certificate, form.graph)
    return [found[c] for c in sorted(found)]


def uncontractions(g: WeightedGraph) -> list[tuple[WeightedGraph, EdgeContraction]]:
    """Stable one-edge expansions of g up to isomorphism.

    Each expansion comes with the contraction of its new edge, post-composed
    with an isomorphism so that the contraction lands exactly on g.
    """
    results: dict[bytes, tuple[WeightedGraph, EdgeContraction]] = {}
    n = g.half_edge_count
    for v in g.vertices:
        h = g.weight(v)
        at_v = list(g.half_edges_at(v))
        # add a loop, lowering the weight by one
        if h > 0:
            root = list(g.root) + [v, v]
            invol = list(g.involution) + [n + 1, n]
            weights = dict(g.weights)
            weights[v] = h - 1
            _record(results, g, WeightedGraph(root, invol, weights, g.legs), n)
        # split v into v and a new vertex joined by a new edge
        for mask in range(1 << len(at_v)):
            moved = [x for k, x in enumerate(at_v) if mask >> k & 1]
            for h_new in range(h + 1):
                root = list(g.root) + [n, v, n]
                invol = list(g.involution) + [n, n + 2, n + 1]
                for x in moved:
                    root[x] = n
                weights = dict(g.weights)
                weights[v] = h - h_new
                weights[n] = h_new
                _record(results, g, WeightedGraph(root, invol, weights, g.legs), n + 1)
    return [results[c] for c in sorted(results)]


def _record(results, g, big: WeightedGraph, new_edge: int) -> None:
    if not is_stable(big):
        return
    form = canonical_form(big)
    if form.certificate in results:
        return
    small, c = contract(big, [new_edge])
    iso = are_isomorphic(small, g)
    results[form.certificate] = (big, c.then(iso))


def enumerate_by_splitting(g: int) -> list[WeightedGraph]:
    """Second enumeration path: closure of the weight-g point under uncontractions."""
    _check_genus(g)
    start = from_edges([g], [])
    seen = {certificate(start): canonical_graph(start)}
    frontier = [start]
    while frontier:
        nxt = []
        for graph in frontier:
            for big, _ in uncontractions(graph):
                form = canonical_form(big)
                if form.certificate not in seen:
                    seen[form.certificate] = form.graph
                    nxt.append(form.graph)
        frontier = nxt
    return [seen[c] for c in sorted(seen)]


# the poset


@dataclass
class ContractionPoset:
    genus: int
    objects: list[WeightedGraph]
    morphisms: dict[tuple[int, int], list[EdgeContraction]]

    def dimension(self, k: int) -> int:
        return len(self.objects[k].edges)

    def index_of(self, g: WeightedGraph) -> int:
        return self._index[certificate(g)]

    def __post_init__(self):
        self._index = {certificate(o): k for k, o in enumerate(self.objects)}


def contractions_to_canonical(g: WeightedGraph) -> list[tuple[frozenset[int], EdgeContraction]]:
    """For every edge subset, the contraction of g onto the canonical target."""
    out = []
    edges = g.edges
    for r in range(len(edges) + 1):
        for s in itertools.combinations(edges, r):
            tgt, c = contract(g, s)
            out.append((frozenset(s), c.then(to_canonical(tgt))))
    return out


def _class_key(c: EdgeContraction, auts: Sequence[Isomorphism]) -> tuple[int, ...]:
    return min(tuple(a(y) for y in c.pi) for a in auts)


@lru_cache(maxsize=None)
def contraction_poset(g: int) -> ContractionPoset:
    """Objects and contractions modulo automorphisms of the target (cached, treat as read-only)."""
    _check_genus(g, 2, 4)
    objects = enumerate_stable_graphs(g)
    index = {certificate(o): k for k, o in enumerate(objects)}
    morphisms: dict[tuple[int, int], list[EdgeContraction]] = {}
    for i, obj in enumerate(objects):
        by_target: dict[int, dict[tuple, EdgeContraction]] = {}
        for _, c in contractions_to_canonical(obj):
            j = index[certificate(c.target)]
            key = _class_key(c, automorphisms(objects[j]))
            by_target.setdefault(j, {}).setdefault(key, c)
        for j, classes in by_target.items():
            morphisms[(i, j)] = [classes[k] for k in sorted(classes)]
    return ContractionPoset(g, objects, morphisms)


def source_orbits(poset: ContractionPoset, i: int, j: int) -> list[list[EdgeContraction]]:
    """Morphisms i -> j grouped into orbits of Aut(source) acting by precomposition."""
    src = poset.objects[i]
    tgt_auts = automorphisms(poset.objects[j])
    remaining = {_class_key(c, tgt_auts): c for c in poset.morphisms.get((i, j), [])}
    orbits = []
    while remaining:
        key = min(remaining)
        c = remaining[key]
        orbit_keys = set()
        for a in automorphisms(src):
            moved = EdgeContraction(src, c.target, tuple(c.pi[a.inverse()(x)] for x in range(src.half_edge_count)))
            orbit_keys.add(_class_key(moved, tgt_auts))
        orbits.append([remaining.pop(k) for k in sorted(orbit_keys) if k in remaining])
    return orbits
