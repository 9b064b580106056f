"""Property suites run by `tropteich verify`. Each returns a report dict with
per-check pass/fail counts and a few counterexamples."""

from __future__ import annotations

import random
from typing import Callable

from . import free_group as fg
from .cone_complex import check_diagram, f_vector
from .contraction import compose, contraction_poset, enumerate_by_splitting, enumerate_stable_graphs
from .graph_core import certificate, genus as graph_genus, is_stable, valence
from .marking import (
    act,
    canonical_marking,
    pushforward,
    random_automorphism,
    standard_presentation,
    top_equivalent,
)
from .moduli import build_Mg, cv_locus, verify_chart, verify_quotient


class Tally:
    def __init__(self, names):
        self.checks = {n: {"passed": 0, "failed": 0, "counterexamples": []} for n in names}

    def record(self, name: str, ok: bool, payload=None) -> None:
        entry = self.checks[name]
        if ok:
            entry["passed"] += 1
        else:
            entry["failed"] += 1
            if len(entry["counterexamples"]) < 5:
                entry["counterexamples"].append(payload)

    def report(self, **extra) -> dict:
        passed = all(v["failed"] == 0 for v in self.checks.values())
        return dict(extra, passed=passed, checks=self.checks)


def random_word(rank: int, length: int, rng: random.Random) -> fg.Word:
    letters = []
    while len(letters) < length:
        a = rng.choice([k for k in range(-rank, rank + 1) if k])
        if letters and letters[-1] == -a:
            continue
        letters.append(a)
    return fg.Word(rank, tuple(letters))


def graphs_suite(g: int, cached: Callable[[int], list] | None = None) -> dict:
    t = Tally(["two_enumerations", "mg_objects", "stability", "cv_valence", "cache", "diagram"])
    first = enumerate_stable_graphs(g)
    second = enumerate_by_splitting(g)
    certs = [certificate(x) for x in first]
    t.record("two_enumerations", certs == [certificate(x) for x in second],
             {"first": len(first), "second": len(second)})
    d = build_Mg(g)
    t.record("mg_objects", [certificate(o.payload) for o in d.objects] == certs)
    for x in first:
        t.record("stability", is_stable(x) and graph_genus(x) == g and not x.legs, certificate(x).decode())
    for oid in cv_locus(g, d):
        G = d.object(oid).payload
        t.record("cv_valence", all(valence(G, v) >= 3 for v in G.vertices), certificate(G).decode())
    if cached is not None:
        t.record("cache", [c.decode() for c in certs] == cached(g))
    problems = check_diagram(d)
    t.record("diagram", not problems and len(f_vector(d)) - 1 == 3 * g - 3, problems[:5])
    return t.report(suite="graphs", genus=g, count=len(first))


def markings_suite(g: int, samples: int, seed: int) -> dict:
    rng = random.Random(seed)
    t = Tally(["rank", "inner_triviality", "pushforward_coherence", "equivalence_relation"])
    poset = contraction_poset(g)
    for G in poset.objects:
        t.record("rank", standard_presentation(G).rank == g, certificate(G).decode())
    objects = poset.objects
    for _ in range(samples):
        G = rng.choice(objects)
        m = act(canonical_marking(standard_presentation(G)), random_automorphism(g, rng), check=False)
        w = random_word(g, rng.randint(0, 6), rng)
        t.record("inner_triviality", top_equivalent(m, act(m, fg.conjugation(w))),
                 {"graph": certificate(G).decode(), "w": str(w)})
    if g == 2:
        for (i, j), cs in sorted(poset.morphisms.items()):
            for (j2, k), ds in sorted(poset.morphisms.items()):
                if j2 != j:
                    continue
                m = act(canonical_marking(standard_presentation(objects[i])), random_automorphism(g, rng), check=False)
                for c1 in cs:
                    for c2 in ds:
                        two_step = pushforward(pushforward(m, c1), c2)
                        direct = pushforward(m, compose(c2, c1))
                        t.record("pushforward_coherence", top_equivalent(two_step, direct),
                                 {"source": certificate(objects[i]).decode(), "target": certificate(objects[k]).decode()})
    for _ in range(samples):
        G = rng.choice(objects)
        base = act(canonical_marking(standard_presentation(G)), random_automorphism(g, rng), check=False)
        # draw from a small pool so that related triples actually occur
        pool = [base, act(base, fg.conjugation(random_word(g, 3, rng))), act(base, random_automorphism(g, rng, 2), check=False)]
        a, b, c = (rng.choice(pool) for _ in range(3))
        ok = top_equivalent(a, a)
        ok &= top_equivalent(a, b) == top_equivalent(b, a)
        if top_equivalent(a, b) and top_equivalent(b, c):
            ok &= top_equivalent(a, c)
        t.record("equivalence_relation", ok, {"graph": certificate(G).decode()})
    return t.report(suite="markings", genus=g, samples=samples, seed=seed)


def complex_suite(g: int, samples: int, seed: int) -> dict:
    """Every randomized chart must be a cone complex."""
    t = Tally(["chart_cone_complex"])
    report = verify_chart(g, samples, seed)
    for row in report["charts"]:
        t.record("chart_cone_complex", row["cone_complex"], {k: row[k] for k in ("graph", "class", "violations")})
    return t.report(suite="complex", genus=g, samples=samples, seed=seed,
                    coarse_passed=report["coarse_passed"])


def quotient_suite(g: int, samples: int, seed: int) -> dict:
    return dict(verify_quotient(g, samples, seed), suite="quotient")
