"""Mean cost against the exact optimum for vertex cover, set cover and min-cut, swept over epsilon."""

import argparse
import csv
import math
import sys

import numpy as np

from privcomb.audit import brute_opt
from privcomb.instances import gen_random_graph, gen_random_set_system, gen_star_graph, gen_two_clique_graph
from privcomb.mincut import cut_cost, min_cut_value, private_min_cut
from privcomb.rng import RngStream
from privcomb.set_cover import decode_set_cover, private_set_cover_unweighted
from privcomb.vertex_cover import decode_cover, private_vc_hallucinated, private_vc_unweighted


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0, 4.0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    root = RngStream(args.seed, stream=3)
    star, rnd = gen_star_graph(20), gen_random_graph(20, 0.2, root.child(0))
    sc = gen_random_set_system(40, 12, root.child(1), density=0.15)
    tc = gen_two_clique_graph(8, 2)
    fixtures = {
        "vc_star": (star, brute_opt("vc", star)[0]),
        "vc_random": (rnd, brute_opt("vc", rnd)[0]),
        "setcover": (sc, brute_opt("setcover", sc)[0]),
        "mincut_two_clique16": (tc, min_cut_value(tc)),
    }
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["fixture", "algorithm", "epsilon", "opt", "mean_cost", "mean_ratio", "mean_gap"])
    for eps in args.eps:
        r = root.child(int(eps * 1000))
        runs = {
            ("vc_star", "unweighted"): lambda t: len(decode_cover(star, private_vc_unweighted(star, eps, r.child(t)))),
            ("vc_star", "hallucinated"): lambda t: len(decode_cover(star, private_vc_hallucinated(star, eps, 0.5, r.child(t)))),
            ("vc_random", "unweighted"): lambda t: len(decode_cover(rnd, private_vc_unweighted(rnd, eps, r.child(t)))),
            ("setcover", "unweighted"): lambda t: len(decode_set_cover(sc, private_set_cover_unweighted(sc, eps, 0.05, r.child(t)))[0]),
            ("mincut_two_clique16", "exact"): lambda t: cut_cost(tc, private_min_cut(tc, eps, "exact", r.child(t))),
        }
        for (fx, algo), run in runs.items():
            opt = fixtures[fx][1]
            mean = float(np.mean([run(t) for t in range(args.trials)]))
            ratio = mean / opt if opt else math.nan
            w.writerow([fx, algo, eps, opt, f"{mean:.4f}", f"{ratio:.4f}", f"{mean - opt:.4f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
