"""Graphs of groups with free vertex groups, spanning-tree presentations of
their fundamental groups, and Teichmueller markings.

A groupoid word is a sequence of steps. An edge step is an int h and means
"traverse half-edge h from r(h) to r(i(h))". A vertex step is a tuple
(v, j, s): the j-th generator of the free vertex group at v, to the power s.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence, Union

from . import free_group as fg
from .contraction import EdgeContraction
from .free_group import GroupMap, Word
from .graph_core import GraphError, Isomorphism, UnknownVertex, WeightedGraph


class MarkingError(ValueError):
    pass


class PresentationMismatch(MarkingError):
    pass


class SourceMismatch(MarkingError):
    pass


class BadPath(MarkingError):
    pass


@dataclass(frozen=True, order=True)
class LoopGen:
    edge: int

    def __str__(self):
        return f"L{self.edge}"


@dataclass(frozen=True, order=True)
class VertexGen:
    vertex: int
    index: int

    def __str__(self):
        return f"V{self.vertex}.{self.index}"


BasisElement = Union[LoopGen, VertexGen]
Step = Union[int, tuple]


def reverse_path(g: WeightedGraph, path: Sequence[int]) -> list[int]:
    return [g.involution[h] for h in reversed(path)]


def _reduce_steps(g: WeightedGraph, steps: Sequence[Step]) -> list[Step]:
    out: list[Step] = []
    for s in steps:
        if out:
            t = out[-1]
            if isinstance(s, int) and isinstance(t, int) and g.involution[t] == s:
                out.pop()
                continue
            if isinstance(s, tuple) and isinstance(t, tuple) and s[:2] == t[:2] and s[2] == -t[2]:
                out.pop()
                continue
        out.append(s)
    return out


def invert_steps(g: WeightedGraph, steps: Sequence[Step]) -> list[Step]:
    out: list[Step] = []
    for s in reversed(steps):
        out.append(g.involution[s] if isinstance(s, int) else (s[0], s[1], -s[2]))
    return out


@dataclass(frozen=True)
class Pi1Presentation:
    graph: WeightedGraph
    base: int
    tree: frozenset
    basis: tuple
    paths: tuple = field(compare=False, repr=False)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def path_table(self) -> dict[int, tuple[int, ...]]:
        return dict(self.paths)

    def path_to(self, v: int) -> tuple[int, ...]:
        for u, p in self.paths:
            if u == v:
                return p
        raise UnknownVertex(v)

    @property
    def b1(self) -> int:
        return sum(1 for b in self.basis if isinstance(b, LoopGen))

    def index_of(self, b: BasisElement) -> int:
        """1-based generator index of a basis element."""
        return self.basis.index(b) + 1

    def basis_word(self, k: int) -> list[Step]:
        """Closed groupoid word at the base for basis[k] (0-based)."""
        g = self.graph
        b = self.basis[k]
        if isinstance(b, LoopGen):
            a = b.edge
            to_start = list(self.path_to(g.root[a]))
            back = reverse_path(g, self.path_to(g.root[g.involution[a]]))
            return to_start + [a] + back
        p = list(self.path_to(b.vertex))
        return p + [(b.vertex, b.index, 1)] + reverse_path(g, p)

    def collapse(self, steps: Sequence[Step]) -> Word:
        """Image of a closed groupoid word at the base in the free group on the basis."""
        g = self.graph
        letters = []
        loop_idx = {b.edge: k + 1 for k, b in enumerate(self.basis) if isinstance(b, LoopGen)}
        vert_idx = {(b.vertex, b.index): k + 1 for k, b in enumerate(self.basis) if isinstance(b, VertexGen)}
        for s in steps:
            if isinstance(s, int):
                e = g.edge_of(s)
                if e in self.tree:
                    continue
                letters.append(loop_idx[e] if s == e else -loop_idx[e])
            else:
                k = vert_idx[(s[0], s[1])]
                letters.extend([k if s[2] > 0 else -k] * abs(s[2]))
        return fg.reduce(letters, self.rank)


def bfs_tree(g: WeightedGraph, base: int) -> tuple[frozenset, dict[int, tuple[int, ...]]]:
    """Breadth-first spanning tree, edges tried in id order; paths as half-edge lists."""
    if base not in g.vertices:
        raise UnknownVertex(base)
    paths = {base: ()}
    tree = set()
    queue = deque([base])
    edges = g.edges
    while queue:
        v = queue.popleft()
        for e in edges:
            for h in (e, g.involution[e]):
                if g.root[h] == v:
                    w = g.root[g.involution[h]]
                    if w not in paths:
                        paths[w] = paths[v] + (h,)
                        tree.add(e)
                        queue.append(w)
    return frozenset(tree), paths


def presentation(g: WeightedGraph, base: int | None = None) -> Pi1Presentation:
    if g.legs:
        raise GraphError("markings are only defined for graphs without legs")
    if base is None:
        base = min(g.vertices)
    tree, paths = bfs_tree(g, base)
    basis: list[BasisElement] = [LoopGen(e) for e in g.edges if e not in tree]
    basis += [VertexGen(v, j) for v in g.vertices for j in range(1, g.weight(v) + 1)]
    return Pi1Presentation(g, base, tree, tuple(basis), tuple(sorted(paths.items())))


_STD_CACHE: dict[WeightedGraph, Pi1Presentation] = {}


def standard_presentation(g: WeightedGraph) -> Pi1Presentation:
    """The presentation based at the smallest vertex."""
    p = _STD_CACHE.get(g)
    if p is None:
        p = _STD_CACHE[g] = presentation(g)
    return p


@dataclass(frozen=True)
class Marking:
    presentation: Pi1Presentation
    images: GroupMap

    @property
    def graph(self) -> WeightedGraph:
        return self.presentation.graph

    @property
    def genus(self) -> int:
        return self.presentation.rank

    def is_valid(self) -> bool:
        r = self.presentation.rank
        return (
            self.images.domain_rank == r
            and self.images.codomain_rank == r
            and fg.is_automorphism(self.images)
        )


@dataclass(frozen=True)
class TopClass:
    rank_b: int
    words: tuple[Word, ...]

    def __str__(self):
        return "(" + ", ".join(fg.format_word(w) for w in self.words) + ")"


_inverse = lru_cache(maxsize=100_000)(fg.invert_automorphism)


def canonical_marking(p: Pi1Presentation) -> Marking:
    return Marking(p, fg.identity_map(p.rank))


def act(m: Marking, a: GroupMap, check: bool = True) -> Marking:
    """Post-compose the marking with an automorphism of F_g."""
    if a.domain_rank != m.genus or a.codomain_rank != m.genus:
        raise fg.RankMismatch("automorphism rank differs from the genus")
    if check and not fg.is_automorphism(a):
        raise fg.NotAnAutomorphism(str(a))
    return Marking(m.presentation, a.compose(m.images))


def _quotient_map(p: Pi1Presentation) -> GroupMap:
    """Kill vertex generators; loop generators become x_1..x_b in basis order."""
    b = p.b1
    images = []
    k = 0
    for elem in p.basis:
        if isinstance(elem, LoopGen):
            k += 1
            images.append(fg.generator(k, b))
        else:
            images.append(fg.identity_word(b))
    return GroupMap(p.rank, b, tuple(images))


def induced_surjection(m: Marking) -> tuple[Word, ...]:
    """Images of x_1..x_g under q o phi^-1, before any normalisation."""
    psi = _inverse(m.images)
    q = _quotient_map(m.presentation)
    return tuple(q(w) for w in psi.images)


def top_class(m: Marking) -> TopClass:
    words = induced_surjection(m)
    return TopClass(m.presentation.b1, fg.conjugacy_normal_form(words))


def top_equivalent(m1: Marking, m2: Marking, strict: bool = False) -> bool:
    """Topological equivalence; strict=True compares the surjections without conjugation."""
    if m1.presentation != m2.presentation:
        raise PresentationMismatch("markings live on different presentations")
    if strict:
        return induced_surjection(m1) == induced_surjection(m2)
    w1, w2 = induced_surjection(m1), induced_surjection(m2)
    if m1.presentation.b1 == 0:
        return True
    return fg.tuples_conjugate(list(w1), list(w2)) is not None


def marking_difference(m1: Marking, m2: Marking) -> GroupMap:
    """The automorphism a with act(m1, a) == m2."""
    if m1.presentation != m2.presentation:
        raise PresentationMismatch("markings live on different presentations")
    return m2.images.compose(_inverse(m1.images))


def _check_path(g: WeightedGraph, start: int, path: Sequence[int]) -> int:
    cur = start
    edges = set(g.edges)
    for h in path:
        if h < 0 or h >= g.half_edge_count or g.edge_of(h) not in edges:
            raise BadPath(f"{h} is not a half-edge of a finite edge")
        if g.root[h] != cur:
            raise BadPath(f"half-edge {h} does not start at {cur}")
        cur = g.root[g.involution[h]]
    return cur


def change_basepoint(m: Marking, path: Sequence[int]) -> Marking:
    """Move the base along a path (half-edges, each traversed from its root)."""
    p = m.presentation
    g = p.graph
    end = _check_path(g, p.base, path)
    if not path:
        return m
    q = presentation(g, end)
    back = invert_steps(g, list(path))
    images = []
    for k in range(q.rank):
        loop = list(path) + q.basis_word(k) + back
        images.append(m.images(p.collapse(loop)))
    return Marking(q, GroupMap(q.rank, q.rank, tuple(images)))


def transfer(m: Marking, q: Pi1Presentation) -> Marking:
    """Re-express m on another presentation of the same graph (tree path between bases)."""
    p = m.presentation
    if q.graph != p.graph:
        raise PresentationMismatch("different graphs")
    if q == p:
        return m
    g = p.graph
    gamma = list(p.path_to(q.base))
    back = invert_steps(g, gamma)
    images = []
    for k in range(q.rank):
        loop = gamma + q.basis_word(k) + back
        images.append(m.images(p.collapse(loop)))
    return Marking(q, GroupMap(q.rank, q.rank, tuple(images)))


def transport(m: Marking, iso: Isomorphism, q: Pi1Presentation | None = None) -> Marking:
    """Carry a marking along a graph isomorphism onto a presentation of the target."""
    p = m.presentation
    if iso.source != p.graph:
        raise SourceMismatch("isomorphism source differs from the marked graph")
    g2 = iso.target
    if q is None:
        q = presentation(g2, iso(p.base))
    back = iso.inverse()
    pulled_base = back(q.base)
    gamma = list(p.path_to(pulled_base))
    gamma_inv = invert_steps(p.graph, gamma)
    images = []
    for k in range(q.rank):
        steps = [back(s) if isinstance(s, int) else (back(s[0]), s[1], s[2]) for s in q.basis_word(k)]
        images.append(m.images(p.collapse(gamma + steps + gamma_inv)))
    return Marking(q, GroupMap(q.rank, q.rank, tuple(images)))


class _ComponentData:
    """Spanning forests and vertex-group generators of a contraction's fibres."""

    def __init__(self, c: EdgeContraction, source_base: int):
        s = c.source
        self.c = c
        pi = c.pi
        contracted = sorted(c.contracted)
        self.fibre_base: dict[int, int] = {}
        self.paths: dict[int, tuple[int, ...]] = {}
        self.generators: dict[int, list[list[Step]]] = {}
        for w in c.target.vertices:
            verts = sorted(v for v in s.vertices if pi[v] == w)
            b = source_base if pi[source_base] == w else verts[0]
            self.fibre_base[w] = b
            es = [e for e in contracted if pi[e] == w]
            paths = {b: ()}
            forest = set()
            queue = deque([b])
            while queue:
                v = queue.popleft()
                for e in es:
                    for h in (e, s.involution[e]):
                        if s.root[h] == v:
                            u = s.root[s.involution[h]]
                            if u not in paths:
                                paths[u] = paths[v] + (h,)
                                forest.add(e)
                                queue.append(u)
            self.paths.update(paths)
            gens: list[list[Step]] = []
            for v in verts:
                for j in range(1, s.weight(v) + 1):
                    p = list(paths[v])
                    gens.append(p + [(v, j, 1)] + reverse_path(s, p))
            for e in es:
                if e not in forest:
                    a = e
                    gens.append(list(paths[s.root[a]]) + [a] + reverse_path(s, paths[s.root[s.involution[a]]]))
            if len(gens) != c.target.weight(w):
                raise GraphError(f"fibre over {w} has {len(gens)} generators, weight {c.target.weight(w)}")
            self.generators[w] = gens

    def path_between(self, x: int, y: int) -> list[Step]:
        s = self.c.source
        return _reduce_steps(s, reverse_path(s, self.paths[x]) + list(self.paths[y]))

    def lift(self, steps: Sequence[Step], start: int) -> list[Step]:
        """Lift a closed target groupoid word at pi(start) to a closed source word at start."""
        c = self.c
        s = c.source
        pre = c.half_edge_map
        cur = start
        out: list[Step] = []
        for st in steps:
            if isinstance(st, int):
                h = pre[st]
                out += self.path_between(cur, s.root[h])
                out.append(h)
                cur = s.root[s.involution[h]]
            else:
                w, j, sign = st
                b = self.fibre_base[w]
                out += self.path_between(cur, b)
                gen = self.generators[w][j - 1]
                if sign > 0:
                    out += gen * sign
                else:
                    out += invert_steps(s, gen) * (-sign)
                cur = b
        out += self.path_between(cur, start)
        return _reduce_steps(s, out)


def contraction_isomorphism(c: EdgeContraction, source_p: Pi1Presentation) -> tuple[Pi1Presentation, GroupMap]:
    """Target presentation and the induced isomorphism F(target basis) -> F(source basis)."""
    if source_p.graph != c.source:
        raise SourceMismatch("presentation is not on the contraction source")
    target_p = presentation(c.target, c.pi[source_p.base])
    data = _ComponentData(c, source_p.base)
    images = tuple(source_p.collapse(data.lift(target_p.basis_word(k), source_p.base)) for k in range(target_p.rank))
    return target_p, GroupMap(target_p.rank, source_p.rank, images)


def pushforward(m: Marking, c: EdgeContraction) -> Marking:
    """The induced marking on the contraction target (based at the image of the base)."""
    if m.graph != c.source:
        raise SourceMismatch("marking is not on the contraction source")
    target_p, theta = contraction_isomorphism(c, m.presentation)
    return Marking(target_p, m.images.compose(theta))


def lift_marking(m: Marking, c: EdgeContraction) -> Marking:
    """A marking on c.source whose pushforward along c is m."""
    if m.graph != c.target:
        raise SourceMismatch("marking is not on the contraction target")
    base = min(v for v in c.source.vertices if c.pi[v] == m.presentation.base)
    source_p = presentation(c.source, base)
    target_p, theta = contraction_isomorphism(c, source_p)
    m = transfer(m, target_p)
    return Marking(source_p, m.images.compose(_inverse(theta)))


def random_automorphism(rank: int, rng, max_length: int = 8) -> GroupMap:
    """Product of at most max_length random Nielsen generators."""
    gens = fg.nielsen_generators(rank)
    a = fg.identity_map(rank)
    for _ in range(rng.randint(0, max_length)):
        a = rng.choice(gens).compose(a)
    return a


def format_marking(m: Marking) -> dict:
    p = m.presentation
    return {
        "base": p.base,
        "tree": sorted(p.tree),
        "basis": [str(b) for b in p.basis],
        "images": [fg.format_word(w) for w in m.images.images],
    }


@lru_cache(maxsize=200_000)
def loop_map(c: EdgeContraction) -> GroupMap:
    """The map pi_1(source) -> pi_1(target) of underlying graphs, on standard loop bases.

    Defined up to one overall conjugation (the base of the target presentation
    need not be the image of the source base), which is all that topological
    classes see.
    """
    sp = standard_presentation(c.source)
    tp = standard_presentation(c.target)
    t = c.target
    tv = set(t.vertices)
    gamma = list(tp.path_to(c.pi[sp.base]))
    gamma_inv = invert_steps(t, gamma)
    q = _quotient_map(tp)
    images = []
    for k, b in enumerate(sp.basis):
        if not isinstance(b, LoopGen):
            continue
        steps = [c.pi[s] for s in sp.basis_word(k) if isinstance(s, int) and c.pi[s] not in tv]
        images.append(q(tp.collapse(gamma + steps + gamma_inv)))
    return GroupMap(sp.b1, tp.b1, tuple(images))


def class_after(c: EdgeContraction, cls: TopClass) -> TopClass:
    """Topological class of the pushforward along c of a marking with class cls."""
    f = loop_map(c)
    return TopClass(f.codomain_rank, fg.conjugacy_normal_form([f(w) for w in cls.words]))


def standard_top_class(m: Marking) -> TopClass:
    """Top class computed on the standard presentation of the marked graph."""
    return top_class(transfer(m, standard_presentation(m.graph)))
