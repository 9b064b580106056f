"""Command line: enumerate, space, verify, tropicalize, export.

Exit status 0 on success, 1 when a verification suite fails, 2 on usage or
parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .cone_complex import coarse_space, cone_complex_violations, to_document, to_dot
from .contraction import UnsupportedGenus, contraction_poset, enumerate_stable_graphs
from .graph_core import certificate, to_document as graph_document
from .marking import format_marking
from .moduli import build_Mg, build_Tg_chart, canonical_seed, cv_locus, random_seeds
from .tropicalize import (
    TropicalizationError,
    curve_to_document,
    dual_tropical_curve,
    locate_cell,
    location_to_document,
    parse_model,
)
from . import suites

CACHE_ENV = "TROPTEICH_CACHE_DIR"
DEFAULT_SEED = 0


@dataclass
class Config:
    genus: int = 2
    seed: int = DEFAULT_SEED
    radius: int = 0
    cache_dir: Path | None = None
    format: str = "json"

    def __post_init__(self):
        if self.genus < 2:
            raise UnsupportedGenus(self.genus)
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    @classmethod
    def from_args(cls, args) -> "Config":
        cache = getattr(args, "cache_dir", None) or os.environ.get(CACHE_ENV)
        return cls(
            genus=getattr(args, "genus", 2),
            seed=getattr(args, "seed", DEFAULT_SEED),
            radius=getattr(args, "radius", 0),
            cache_dir=Path(cache) if cache else None,
            format=getattr(args, "format", "json"),
        )


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# cache of enumerations, keyed by genus and library version


def _cache_file(cfg: Config, g: int) -> Path | None:
    if cfg.cache_dir is None:
        return None
    return cfg.cache_dir / f"stable-graphs-g{g}-v{__version__}.json"


def enumeration_document(g: int) -> dict:
    graphs = enumerate_stable_graphs(g)
    return {
        "genus": g,
        "version": __version__,
        "count": len(graphs),
        "graphs": [
            {"certificate": certificate(x).decode(), "dimension": len(x.edges), "graph": graph_document(x)}
            for x in graphs
        ],
    }


def cached_enumeration(cfg: Config, g: int) -> dict:
    path = _cache_file(cfg, g)
    if path is not None and path.exists():
        return json.loads(path.read_text())
    doc = enumeration_document(g)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(doc))
    return doc


# commands


def cmd_enumerate(args, cfg: Config) -> int:
    if cfg.genus not in (2, 3, 4):
        raise UnsupportedGenus(cfg.genus)
    emit(dumps(cached_enumeration(cfg, cfg.genus)), args.out)
    return 0


def _chart_seeds(args, cfg: Config):
    poset = contraction_poset(cfg.genus)
    seeds = []
    for cert in args.seed_graph or []:
        match = [x for x in poset.objects if certificate(x).decode() == cert]
        if not match:
            raise ValueError(f"no stable graph of genus {cfg.genus} with certificate {cert}")
        seeds.append(canonical_seed(match[0]))
    if args.random_seeds:
        seeds += random_seeds(cfg.genus, args.random_seeds, cfg.seed)
    if not seeds:
        # default: the first top-dimensional graph without bridges (theta in genus 2)
        top = max(len(x.edges) for x in poset.objects)
        default = next(x for x in poset.objects if len(x.edges) == top and not _has_bridge(x))
        seeds.append(canonical_seed(default))
    return seeds


def _has_bridge(x) -> bool:
    """Some edge whose removal disconnects the graph."""
    for e in x.edges:
        rest = [x.ends(f) for f in x.edges if f != e]
        seen = {x.vertices[0]}
        grew = True
        while grew:
            grew = False
            for a, b in rest:
                if (a in seen) != (b in seen):
                    seen |= {a, b}
                    grew = True
        if len(seen) < len(x.vertices):
            return True
    return False


def cmd_space(args, cfg: Config) -> int:
    g = cfg.genus
    if args.which == "Mg":
        d = build_Mg(g)
        text = to_dot(d, f"Mg{g}") if cfg.format == "dot" else dumps(dict(to_document(d), genus=g))
    elif args.which == "CV":
        d = build_Mg(g)
        ids = cv_locus(g, d)
        if cfg.format == "dot":
            sub = d.__class__([o for o in d.objects if o.id in ids],
                              {k: v for k, v in d.homs.items() if k[0] in ids and k[1] in ids}, False, d.meta)
            text = to_dot(sub, f"CV{g}")
        else:
            text = dumps({
                "genus": g,
                "ids": ids,
                "objects": [{"id": i, "certificate": d.object(i).label, "dimension": d.object(i).dimension} for i in ids],
            })
    else:
        seeds = _chart_seeds(args, cfg)
        chart = build_Tg_chart(g, seeds, cfg.radius)
        bad = cone_complex_violations(chart)
        verdict = not bad
        print(f"is_cone_complex: {str(verdict).lower()}", file=sys.stderr)
        if cfg.format == "dot":
            text = to_dot(chart, f"Tg{g}")
        else:
            doc = to_document(chart)
            doc.update(
                genus=g,
                radius=cfg.radius,
                is_cone_complex=verdict,
                coarse_is_cone_complex=not cone_complex_violations(coarse_space(chart)),
                violations=[{"source": s, "target": t, "size": n} for s, t, n in bad],
                markings={str(o.id): format_marking(o.payload.marking) for o in chart.objects},
            )
            text = dumps(doc)
    emit(text, args.out)
    return 0


SUITES = ("graphs", "markings", "complex", "quotient")


def cmd_verify(args, cfg: Config) -> int:
    g = cfg.genus
    names = SUITES if args.suite == "all" else (args.suite,)
    reports = {}
    for name in names:
        if name == "graphs":
            reports[name] = suites.graphs_suite(
                g, lambda k: [e["certificate"] for e in cached_enumeration(cfg, k)["graphs"]])
        elif name == "markings":
            reports[name] = suites.markings_suite(g, args.samples, cfg.seed)
        elif name == "complex":
            reports[name] = suites.complex_suite(g, args.samples, cfg.seed)
        else:
            reports[name] = suites.quotient_suite(g, args.samples, cfg.seed)
    passed = all(r["passed"] for r in reports.values())
    doc = {"genus": g, "seed": cfg.seed, "samples": args.samples, "passed": passed, "suites": reports}
    emit(dumps(doc), args.out)
    for name, r in reports.items():
        print(f"{name}: {'pass' if r['passed'] else 'FAIL'}", file=sys.stderr)
    return 0 if passed else 1


def cmd_tropicalize(args, cfg: Config) -> int:
    text = Path(args.model).read_text()
    model = parse_model(text, args.prime)
    curve = dual_tropical_curve(model)
    doc = {"curve": curve_to_document(curve)}
    if curve.infinite_edges():
        doc["note"] = "edges of infinite length come from nodes that persist in the generic fibre"
    if args.locate:
        from .graph_core import genus as graph_genus

        g = graph_genus(curve.graph)
        doc["cell"] = location_to_document(locate_cell(curve, build_Mg(g)))
    emit(dumps(doc), args.out)
    return 0


def cmd_export(args, cfg: Config) -> int:
    g = cfg.genus
    poset = contraction_poset(g)
    if cfg.format == "dot":
        lines = [f"digraph poset{g} {{", "  rankdir=BT;"]
        for k, x in enumerate(poset.objects):
            lines.append(f'  n{k} [label="{certificate(x).decode()}"];')
        for (i, j) in sorted(poset.morphisms):
            if len(poset.objects[i].edges) == len(poset.objects[j].edges) + 1:
                lines.append(f"  n{j} -> n{i};")
        lines.append("}")
        text = "\n".join(lines) + "\n"
    else:
        text = dumps({
            "genus": g,
            "objects": [certificate(x).decode() for x in poset.objects],
            "morphisms": [
                {"source": i, "target": j, "count": len(cs)} for (i, j), cs in sorted(poset.morphisms.items())
            ],
        })
    emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropteich", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=False, fmt=False):
        sp.add_argument("--genus", type=int, default=2)
        sp.add_argument("--out", default=None, help="output file (stdout if omitted)")
        sp.add_argument("--cache-dir", default=None, help=f"enumeration cache (or ${CACHE_ENV})")
        if seed:
            sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        if fmt:
            sp.add_argument("--format", choices=("json", "dot"), default="json")

    sp = sub.add_parser("enumerate", help="stable weighted graphs of a genus")
    common(sp)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("space", help="M_g, a chart of marked graphs, or the Outer space locus")
    common(sp, seed=True, fmt=True)
    sp.add_argument("--which", choices=("Mg", "Tg-chart", "CV"), default="Mg")
    sp.add_argument("--radius", type=int, default=0)
    sp.add_argument("--seed-graph", action="append", help="certificate of a canonically marked seed")
    sp.add_argument("--random-seeds", type=int, default=0)
    sp.set_defaults(func=cmd_space)

    sp = sub.add_parser("verify", help="run a property suite")
    common(sp, seed=True)
    sp.add_argument("--suite", choices=SUITES + ("all",), default="all")
    sp.add_argument("--samples", type=int, default=20)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("tropicalize", help="dual tropical curve of a stable model document")
    sp.add_argument("model")
    sp.add_argument("--prime", type=int, default=None)
    sp.add_argument("--locate", action="store_true", help="also locate the curve in M_g")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_tropicalize)

    sp = sub.add_parser("export", help="the contraction poset as JSON or DOT")
    common(sp, fmt=True)
    sp.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = Config.from_args(args)
        if getattr(args, "samples", 0) < 0:
            raise ValueError("samples must be nonnegative")
        return args.func(args, cfg)
    except (UnsupportedGenus, TropicalizationError, ValueError, OSError) as exc:
        name = type(exc).__name__
        print(f"tropteich: {name}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
