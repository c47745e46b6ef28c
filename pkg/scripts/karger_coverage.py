"""How many of the 2-approximate cuts a given number of contraction runs recovers.

For fixtures small enough to enumerate, compares the cuts found by
sampling against the full list of cuts costing at most twice the optimum.
Cycles are the stress case: they have quadratically many minimum cuts,
and contracting to only 2 supernodes never produces a non-minimum cut.
"""

import argparse
import math
import sys

import numpy as np

from privcomb.instances import gen_cycle_graph, gen_two_clique_graph
from privcomb.mincut import contraction_supernodes, enumerate_cut_masks, karger_cut_masks
from privcomb.rng import RngStream


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", choices=["cycle", "two-clique"], default="cycle")
    ap.add_argument("--sides", type=int, nargs="+", default=[5, 7, 9], help="vertices per clique, or half the cycle length")
    ap.add_argument("--bridges", type=int, default=2)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--supernodes", type=int, nargs="+", default=[2, contraction_supernodes(2.0)])
    args = ap.parse_args()
    print("n,supernodes,runs,runs_label,near_min_cuts,mean_found,mean_coverage")
    for s in args.sides:
        g = gen_cycle_graph(2 * s) if args.family == "cycle" else gen_two_clique_graph(s, args.bridges)
        n = g.n
        masks, costs = enumerate_cut_masks(g)
        target = set(masks[costs <= 2 * costs.min()].tolist())
        schedules = (("n^2 ceil(ln n)", n**2 * math.ceil(math.log(n))), ("n^3 ceil(ln n)", n**3 * math.ceil(math.log(n))))
        for k in args.supernodes:
            for label, runs in schedules:
                found = []
                for r in range(args.repeats):
                    got = set(karger_cut_masks(g, runs, RngStream(args.seed, path=(s, r)), supernodes=k).tolist())
                    found.append(len(got & target))
                print(f"{n},{k},{runs},{label},{len(target)},{np.mean(found):.2f},{np.mean(found) / len(target):.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
