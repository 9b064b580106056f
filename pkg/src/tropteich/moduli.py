"""Tropical moduli: the coarse cone complex of stable graphs, finite charts of
marked graphs, the Outer space locus, and desk-scale checks of the quotient
by Out(F_g)."""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import free_group as fg
from .cone_complex import (
    ConeDiagram,
    ConeObject,
    FaceMap,
    OrthantCone,
    coarse_space,
    face_map_from_contraction,
)
from .contraction import (
    EdgeContraction,
    UnsupportedGenus,
    contraction_poset,
    contractions_to_canonical,
    uncontractions,
)
from .graph_core import (
    WeightedGraph,
    automorphisms,
    certificate,
    to_canonical,
)
from .marking import (
    Marking,
    TopClass,
    act,
    canonical_marking,
    class_after,
    lift_marking,
    marking_difference,
    pushforward,
    random_automorphism,
    standard_presentation,
    top_class,
    transfer,
    transport,
)


def label_of(g: WeightedGraph) -> str:
    return certificate(g).decode()


def build_Mg(g: int, coarse: bool = True) -> ConeDiagram:
    """Diagram of cones sigma_G over the contraction poset.

    Hom-sets hold one face map per contraction (all target automorphisms
    included); with coarse=True they are reduced to distinct face maps.
    """
    if g not in (2, 3, 4):
        raise UnsupportedGenus(g)
    poset = contraction_poset(g)
    objects = [
        ConeObject(k, OrthantCone(tuple(G.edges)), G, label_of(G)) for k, G in enumerate(poset.objects)
    ]
    homs: dict[tuple[int, int], list] = {}
    for (i, j), cs in sorted(poset.morphisms.items()):
        maps = []
        seen = set()
        src, tgt = OrthantCone(tuple(poset.objects[j].edges)), OrthantCone(tuple(poset.objects[i].edges))
        for c in cs:
            em = c.edge_map()
            for tau in automorphisms(poset.objects[j]):
                coords = tuple(sorted((c.target.edge_of(tau(t)), s) for s, t in em.items()))
                if coarse:
                    if coords in seen:
                        continue
                    seen.add(coords)
                maps.append(FaceMap(src, tgt, coords))
        homs[(j, i)] = maps
    d = ConeDiagram(objects, homs, marked=False, meta={"genus": g, "kind": "Mg"})
    return coarse_space(d) if coarse else d


def cv_locus(g: int, d: ConeDiagram | None = None) -> list[int]:
    """Objects whose graph has all vertex weights zero."""
    if d is None:
        d = build_Mg(g)
    return [o.id for o in d.objects if all(w == 0 for w in o.payload.weights.values())]


# marked objects


def _class_key(c: TopClass) -> tuple:
    return fg._tuple_key(c.words)


@dataclass(frozen=True)
class MarkedObject:
    graph: WeightedGraph
    marking: Marking = field(compare=False)
    marking_class: TopClass

    @property
    def key(self) -> tuple[bytes, TopClass]:
        return certificate(self.graph), self.marking_class


def _automorphism_contraction(tau) -> EdgeContraction:
    return EdgeContraction(tau.source, tau.target, tau.half_edge_map)


def _orbit(graph: WeightedGraph, cls: TopClass, cache: dict) -> dict[TopClass, list]:
    """Classes in the Aut(graph)-orbit of cls, each with the automorphisms producing it."""
    key = (graph, cls)
    out = cache.get(key)
    if out is None:
        out = {}
        for tau in automorphisms(graph):
            out.setdefault(class_after(_automorphism_contraction(tau), cls), []).append(tau)
        cache[key] = out
    return out


def marked_object(m: Marking, cache: dict | None = None) -> MarkedObject:
    """Normal form of a marked graph: canonical graph, class least in its Aut-orbit."""
    cache = {} if cache is None else cache
    to_can = to_canonical(m.graph)
    G = to_can.target
    std = standard_presentation(G)
    m = transport(m, to_can, std) if m.graph != G else transfer(m, std)
    cls = top_class(m)
    orbit = _orbit(G, cls, cache)
    best = min(orbit, key=_class_key)
    tau = orbit[best][0]
    rep = transport(m, tau, std)
    return MarkedObject(G, rep, best)


def forget_marking(obj: MarkedObject) -> WeightedGraph:
    return obj.graph


def canonical_seed(G: WeightedGraph) -> MarkedObject:
    return marked_object(canonical_marking(standard_presentation(to_canonical(G).target)))


def random_seeds(g: int, count: int, seed: int, max_length: int = 8) -> list[MarkedObject]:
    """Random marked objects: random stable graph, canonical marking moved by Nielsen products."""
    rng = random.Random(seed)
    objects = contraction_poset(g).objects
    cache: dict = {}
    seeds = []
    for _ in range(count):
        G = rng.choice(objects)
        m = canonical_marking(standard_presentation(G))
        m = act(m, random_automorphism(g, rng, max_length), check=False)
        seeds.append(marked_object(m, cache))
    return seeds


def build_Tg_chart(g: int, seeds: list[MarkedObject], radius: int = 0) -> ConeDiagram:
    """Full sub-diagram of marked graphs spanned by seeds, their cofaces within
    radius (one canonical lift per one-edge expansion) and all their faces.

    Objects are isomorphism classes of marked graphs. The hom-set from A to B
    holds one face map per contraction of graphs pushing A's class to B's;
    automorphisms are the graph automorphisms fixing the class.
    """
    cache: dict = {}
    objs: dict[tuple, MarkedObject] = {}

    def add(o: MarkedObject) -> bool:
        if o.key in objs:
            return False
        objs[o.key] = o
        return True

    for s in seeds:
        add(s)
    frontier = list(seeds)
    for _ in range(radius):
        nxt = []
        for o in frontier:
            for big, c in uncontractions(o.graph):
                lifted = lift_marking(o.marking, c)
                new = marked_object(lifted, cache)
                if add(new):
                    nxt.append(new)
        frontier = nxt
    # faces
    for o in list(objs.values()):
        for _, c in contractions_to_canonical(o.graph):
            cls = class_after(c, o.marking_class)
            orbit = _orbit(c.target, cls, cache)
            best = min(orbit, key=_class_key)
            if (certificate(c.target), best) in objs:
                continue
            m = transfer(pushforward(o.marking, c), standard_presentation(c.target))
            add(marked_object(m, cache))

    ordered = sorted(objs.values(), key=lambda o: (len(o.graph.edges), o.key[0], _class_key(o.marking_class)))
    ids = {o.key: k for k, o in enumerate(ordered)}
    objects = [
        ConeObject(k, OrthantCone(tuple(o.graph.edges)), o, f"{label_of(o.graph)}|{o.marking_class}")
        for k, o in enumerate(ordered)
    ]
    homs: dict[tuple[int, int], list] = {}
    for a, o in enumerate(ordered):
        for _, c in contractions_to_canonical(o.graph):
            cls = class_after(c, o.marking_class)
            orbit = _orbit(c.target, cls, cache)
            cert = certificate(c.target)
            for target_cls, taus in orbit.items():
                b = ids.get((cert, target_cls))
                if b is None:
                    continue
                for tau in taus:
                    homs.setdefault((b, a), []).append(face_map_from_contraction(c.then(tau)))
    for key in homs:
        homs[key].sort(key=lambda f: f.coordinate_map)
    return ConeDiagram(objects, homs, marked=True, meta={"genus": g, "kind": "Tg-chart", "radius": radius})


# the quotient by Out(F_g)


_CHECKS = ("transitivity", "pushforward", "equivariance", "fullness")


def _verify_object(g: int, i: int, sample_count: int, seed: int) -> dict:
    poset = contraction_poset(g)
    G = poset.objects[i]
    label = label_of(G)
    rng = random.Random(f"{seed}:{label}")
    base = canonical_marking(standard_presentation(G))
    targets = [c for (s, _), cs in sorted(poset.morphisms.items()) if s == i for c in cs]
    checks = {name: {"passed": 0, "failed": 0, "counterexamples": []} for name in _CHECKS}

    def record(name, ok, payload):
        entry = checks[name]
        if ok:
            entry["passed"] += 1
        else:
            entry["failed"] += 1
            if len(entry["counterexamples"]) < 3:
                entry["counterexamples"].append(dict(payload, graph=label))

    for _ in range(sample_count):
        a1 = random_automorphism(g, rng)
        a2 = random_automorphism(g, rng)
        m1, m2 = act(base, a1, check=False), act(base, a2, check=False)
        alpha = marking_difference(m1, m2)
        ok = fg.is_automorphism(alpha) and act(m1, alpha, check=False) == m2
        record("transitivity", ok, {"a1": str(a1), "a2": str(a2)})
        for c in targets:
            where = {"target": label_of(c.target), "a1": str(a1)}
            p1 = pushforward(m1, c)
            valid = p1.is_valid()
            record("pushforward", valid, where)
            p2 = pushforward(m2, c)
            record("equivariance", act(p1, alpha, check=False) == p2, where)
            # the pushed class is reached from the canonical marking of the target
            hit = False
            if valid:
                target_base = canonical_marking(p1.presentation)
                beta = marking_difference(target_base, p1)
                hit = fg.is_automorphism(beta) and top_class(act(target_base, beta, check=False)) == top_class(p1)
            record("fullness", hit, where)
    return {"graph": label, "checks": checks}


def verify_quotient(g: int, sample_count: int, seed: int = 0, workers: int = 4) -> dict:
    """Desk-scale checks that forgetting markings identifies the Out(F_g)-quotient with M_g.

    For each stable graph and each sampled pair of markings:
      transitivity   marking_difference is an automorphism carrying one to the other;
      pushforward    each contraction carries a sampled marking to a valid marking;
      equivariance   pushforward commutes with the Out(F_g) action;
      fullness       the pushed class is reached from the target's canonical marking.

    Each graph draws from its own generator seeded by (seed, certificate), so
    the report does not depend on thread scheduling.
    """
    if g not in (2, 3):
        raise UnsupportedGenus(g)
    if sample_count < 0:
        raise ValueError("sample_count must be nonnegative")
    n = len(contraction_poset(g).objects)
    if sample_count == 0:
        per_object = []
    else:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            per_object = list(pool.map(lambda i: _verify_object(g, i, sample_count, seed), range(n)))
    per_object.sort(key=lambda r: r["graph"])
    totals = {name: {"passed": 0, "failed": 0, "counterexamples": []} for name in _CHECKS}
    for row in per_object:
        for name, entry in row["checks"].items():
            totals[name]["passed"] += entry["passed"]
            totals[name]["failed"] += entry["failed"]
            totals[name]["counterexamples"] += entry["counterexamples"]
    checks = {name: dict(v, status="pass" if v["failed"] == 0 else "fail") for name, v in totals.items()} if per_object else {}
    passed = all(v["failed"] == 0 for v in totals.values())
    return {
        "genus": g,
        "samples": sample_count,
        "seed": seed,
        "passed": passed,
        "checks": checks,
        "objects": [{"graph": r["graph"], "failed": sum(e["failed"] for e in r["checks"].values())} for r in per_object],
    }


def verify_chart(g: int, seed_count: int, master_seed: int, radius: int = 0) -> dict:
    """Build one chart per random seed and record the cone-complex verdicts."""
    seeds = random_seeds(g, seed_count, master_seed)
    from .cone_complex import cone_complex_violations, is_cone_complex

    rows = []
    for k, s in enumerate(seeds):
        chart = build_Tg_chart(g, [s], radius)
        bad = cone_complex_violations(chart)
        coarse_ok = is_cone_complex(coarse_space(chart))
        rows.append({
            "seed": k,
            "graph": label_of(s.graph),
            "class": str(s.marking_class),
            "objects": len(chart.objects),
            "cone_complex": not bad,
            "coarse_cone_complex": coarse_ok,
            "violations": [
                {"source": chart.objects[a].label, "target": chart.objects[b].label, "size": n}
                for a, b, n in bad[:5]
            ],
        })
    return {
        "genus": g,
        "seeds": seed_count,
        "master_seed": master_seed,
        "radius": radius,
        "passed": all(r["cone_complex"] for r in rows),
        "coarse_passed": all(r["coarse_cone_complex"] for r in rows),
        "charts": rows,
    }
