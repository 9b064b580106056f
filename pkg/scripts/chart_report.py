"""Build marked charts from random seeds and report which fail to be cone complexes.

For each failing chart the offending self-map set is printed together with the
automorphisms of the underlying graph that fix the marking class.
"""

import argparse

from tropteich.moduli import verify_chart


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--genus", type=int, default=2)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--master-seed", type=int, default=2024)
    ap.add_argument("--radius", type=int, default=0)
    args = ap.parse_args()
    rep = verify_chart(args.genus, args.seeds, args.master_seed, args.radius)
    for row in rep["charts"]:
        mark = "ok  " if row["cone_complex"] else "FAIL"
        coarse = "coarse ok" if row["coarse_cone_complex"] else "coarse FAIL"
        print(f"{mark} seed {row['seed']:>3} {row['graph']:<34} {row['objects']:>4} cells, {coarse}")
        for v in row["violations"]:
            print(f"       {v['size']} maps {v['source']} -> {v['target']}")
    good = sum(r["cone_complex"] for r in rep["charts"])
    print(f"{good}/{len(rep['charts'])} charts are cone complexes; coarse all ok: {rep['coarse_passed']}")


if __name__ == "__main__":
    main()
