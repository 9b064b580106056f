"""List nontrivial graph automorphisms that fix the canonical marking class.

Each one is an extra self-morphism of the corresponding cell of a marked chart,
which is what stops the chart from being a cone complex. Fixers that also move
coordinates survive even in the coarse chart.
"""

import argparse

from tropteich.contraction import EdgeContraction, enumerate_stable_graphs
from tropteich.graph_core import automorphisms, certificate
from tropteich.marking import canonical_marking, class_after, standard_presentation, top_class


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--genus", type=int, default=2)
    args = ap.parse_args()
    for G in enumerate_stable_graphs(args.genus):
        cls = top_class(canonical_marking(standard_presentation(G)))
        fixers = moving = 0
        for a in automorphisms(G)[1:]:
            if class_after(EdgeContraction(G, G, a.half_edge_map), cls) != cls:
                continue
            fixers += 1
            moving += tuple(G.edge_of(a(e)) for e in G.edges) != tuple(G.edges)
        if fixers:
            print(f"{certificate(G).decode():<40} {str(cls):<24} fixers {fixers}, moving coordinates {moving}")


if __name__ == "__main__":
    main()
