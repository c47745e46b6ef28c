"""Command-line harness: ``privcomb gen | run | audit | bench``.

Exit codes: 0 success, 2 audit bound violated, 3 configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from privcomb import __version__
from privcomb import audit as au
from privcomb import cpp, hst, kmedian, mincut, set_cover, vertex_cover
from privcomb.instances import (
    Graph,
    InstanceError,
    InstanceFormatError,
    MetricInstance,
    SetSystem,
    SubmodularInstance,
    TerminalPairs,
    WeightedGraph,
    dumps,
    gen_complete_graph,
    gen_coverage_instance,
    gen_cycle_graph,
    gen_grid_metric,
    gen_line_metric,
    gen_path_graph,
    gen_random_graph,
    gen_random_metric,
    gen_random_regular_graph,
    gen_random_set_system,
    gen_star_graph,
    gen_terminal_pairs,
    gen_two_clique_graph,
    gen_uniform_metric,
    gen_weighted_graph,
    instance_hash,
    load,
)
from privcomb.rng import RngStream

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_CONFIG = 3

PROBLEMS = ("vc", "wvc", "mincut", "metric", "kmedian", "facility", "setcover", "wsetcover", "cpp", "steiner")
DEFAULT_ALGO = {
    "vc": "unweighted",
    "wvc": "weighted",
    "mincut": "exact",
    "kmedian": "localsearch",
    "metric": "localsearch",
    "facility": "tree",
    "setcover": "unweighted",
    "wsetcover": "weighted",
    "cpp": "greedy",
    "steiner": "tree",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    algo: str
    epsilon: float
    delta: float
    trials: int
    seed: int
    source: str | None
    out: str | None
    k: int | None = None
    alpha: float = 0.5
    facility_cost: float | None = None
    mechanism_epsilon: float | None = None

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ConfigError(f"unknown problem {self.problem!r}")
        if not self.epsilon > 0:
            raise ConfigError("--eps must be positive")
        if not 0 <= self.delta < 1:
            raise ConfigError("--delta must lie in [0, 1)")
        if self.trials < 0:
            raise ConfigError("--trials must be nonnegative")
        if self.seed < 0:
            raise ConfigError("--seed must be a natural number")


# --------------------------------------------------------------------------
# gen
# --------------------------------------------------------------------------


def cmd_gen(args) -> tuple[int, str]:
    rng = RngStream(_seed(args), stream=0)
    p, kind, n = args.problem, args.kind, args.n
    if n is None:
        raise ConfigError("gen needs --n")
    if p in ("vc", "mincut", "wvc"):
        g = _gen_graph(kind or ("two-clique" if p == "mincut" else "random"), n, args, rng)
        inst = gen_weighted_graph(g, args.weights, rng.child(1)) if p == "wvc" else g
    elif p in ("metric", "kmedian", "facility", "steiner"):
        metric = _gen_metric(kind or "uniform", n, args, rng)
        inst = gen_terminal_pairs(metric, args.pairs, rng.child(1)) if p == "steiner" else metric
    elif p in ("setcover", "wsetcover"):
        m = args.m or n
        costs = None
        if p == "wsetcover":
            costs = [float(c) for c in rng.child(1).integers(1, args.max_cost + 1, size=m)]
        inst = gen_random_set_system(n, m, rng, density=args.density, costs=costs)
    elif p == "cpp":
        inst = gen_coverage_instance(args.m or 10, n, args.agents, rng)
    else:
        raise ConfigError(f"no generator for problem {p!r}")
    text = dumps(inst)
    return EXIT_OK, text


def _gen_graph(kind: str, n: int, args, rng: RngStream) -> Graph:
    if kind == "random":
        return gen_random_graph(n, args.p, rng)
    if kind == "star":
        return gen_star_graph(n)
    if kind == "two-clique":
        if n % 2:
            raise ConfigError("two-clique needs an even --n (total vertex count)")
        return gen_two_clique_graph(n // 2, args.bridge)
    if kind == "complete":
        return gen_complete_graph(n)
    if kind == "cycle":
        return gen_cycle_graph(n)
    if kind == "path":
        return gen_path_graph(n)
    if kind == "regular":
        return gen_random_regular_graph(n, args.degree, rng)
    raise ConfigError(f"unknown graph kind {kind!r}")


def _gen_metric(kind: str, n: int, args, rng: RngStream) -> MetricInstance:
    if kind == "uniform":
        return gen_uniform_metric(n, args.diam)
    if kind == "line":
        return gen_line_metric(n)
    if kind == "grid":
        side = math.isqrt(n)
        if side * side != n:
            raise ConfigError("grid metric needs a square --n")
        return gen_grid_metric(side, side)
    if kind == "random":
        return gen_random_metric(n, rng)
    raise ConfigError(f"unknown metric kind {kind!r}")


# --------------------------------------------------------------------------
# run
# --------------------------------------------------------------------------


def _expect(inst, kind, problem):
    if not isinstance(inst, kind):
        raise ConfigError(f"problem {problem!r} needs a {kind.__name__} instance, got {type(inst).__name__}")
    return inst


def _trial_runner(cfg: ExperimentConfig, inst):
    """Returns ``(run(rng) -> cost, opt or None, goal)``; goal is ``min`` or ``max``."""
    p, a, eps, dlt = cfg.problem, cfg.algo, cfg.epsilon, cfg.delta
    if p == "vc":
        g = _expect(inst, Graph, p)
        opt = au.brute_opt("vc", g)[0] if g.n <= 24 else None
        if a == "unweighted":
            return (lambda r: len(vertex_cover.decode_cover(g, vertex_cover.private_vc_unweighted(g, eps, r)))), opt, "min"
        if a == "hallucinated":
            return (lambda r: len(vertex_cover.decode_cover(g, vertex_cover.private_vc_hallucinated(g, eps, cfg.alpha, r)))), opt, "min"
    elif p == "wvc":
        w = _expect(inst, WeightedGraph, p)
        opt = au.brute_opt("wvc", w)[0] if w.n <= 24 else None
        if a == "weighted":
            return (
                lambda r: vertex_cover.cover_weight(w, vertex_cover.decode_cover(w.graph, vertex_cover.private_vc_weighted(w, eps, r)))
            ), opt, "min"
    elif p == "mincut":
        g = _expect(inst, Graph, p)
        opt = mincut.min_cut_value(g)
        if a in ("exact", "sampled"):
            return (lambda r: mincut.cut_cost(g, mincut.private_min_cut(g, eps, a, r))), opt, "min"
    elif p in ("kmedian", "metric"):
        m = _expect(inst, MetricInstance, p)
        if cfg.k is None:
            raise ConfigError("k-median needs --k")
        opt = au.brute_opt("kmedian", m, k=cfg.k)[0] if math.comb(m.n, cfg.k) <= 10**6 else None
        if a == "localsearch":
            return (lambda r: kmedian.kmedian_cost(m, kmedian.private_kmedian_localsearch(m, cfg.k, eps, r))), opt, "min"
        if a == "expmech":
            return (lambda r: kmedian.kmedian_cost(m, kmedian.private_kmedian_expmech(m, cfg.k, eps, r))), opt, "min"
    elif p == "facility":
        m = _expect(inst, MetricInstance, p)
        if cfg.facility_cost is None:
            raise ConfigError("facility location needs --f")
        f = cfg.facility_cost
        opt = au.brute_opt("facility", m, f=f)[0] if m.n <= 16 else None
        if a == "tree":
            return (lambda r: hst.realized_metric_cost(m, hst.private_facility_location(m, f, eps, r))), opt, "min"
    elif p in ("setcover", "wsetcover"):
        s = _expect(inst, SetSystem, p)
        weighted = s.costs is not None
        opt = au.brute_opt("wsetcover" if weighted else "setcover", s)[0] if s.m <= 20 else None
        if a == "unweighted":
            return (lambda r: set_cover.decode_set_cover(s, set_cover.private_set_cover_unweighted(s, eps, dlt, r))[1]), opt, "min"
        if a == "weighted":
            return (lambda r: set_cover.decode_set_cover(s, set_cover.private_set_cover_weighted(s, eps, dlt, r))[1]), opt, "min"
        if a == "bucketed":
            return (lambda r: set_cover.private_set_cover_bucketed(s, eps, dlt, r)[1]), opt, "min"
        if a == "expmech":
            return (lambda r: set_cover.decode_set_cover(s, set_cover.private_set_cover_expmech(s, eps, r))[1]), opt, "min"
    elif p == "cpp":
        c = _expect(inst, SubmodularInstance, p)
        if cfg.k is None:
            raise ConfigError("CPP needs --k")
        opt = au.brute_opt("cpp", c, k=cfg.k)[0] if math.comb(c.m, cfg.k) <= 10**6 else None
        if a == "greedy":
            return (lambda r: cpp.total_welfare(c, cpp.private_cpp_greedy(c, cfg.k, eps, dlt, r))), opt, "max"
        if a == "expmech":
            return (lambda r: cpp.total_welfare(c, cpp.private_cpp_expmech(c, cfg.k, eps, r))), opt, "max"
        if a == "nonprivate":
            return (lambda r: cpp.total_welfare(c, cpp.greedy_cpp(c, cfg.k))), opt, "max"
    elif p == "steiner":
        t = _expect(inst, TerminalPairs, p)
        if a == "tree":
            return (lambda r: hst.steiner_forest_route(t.metric, t, r)[1]), None, "min"
    raise ConfigError(f"algorithm {a!r} is not available for problem {p!r}")


def cmd_run(cfg: ExperimentConfig) -> tuple[int, str]:
    inst = _load(cfg.source)
    run, opt, goal = _trial_runner(cfg, inst)
    h = instance_hash(inst)
    root = RngStream(cfg.seed, stream=1)
    rows = []
    costs = []
    for t in range(cfg.trials):
        c = float(run(root.child(t)))
        costs.append(c)
        ratio = "" if opt in (None, 0) else repr(c / opt)
        gap = "" if opt is None else repr(c - opt)
        rows.append(f"{t},{c!r},{'' if opt is None else repr(float(opt))},{ratio},{gap},{h},{cfg.seed},{__version__}")
    lines = [
        f"# privcomb {__version__} run problem={cfg.problem} algo={cfg.algo} eps={cfg.epsilon!r} "
        f"delta={cfg.delta!r} trials={cfg.trials} seed={cfg.seed} instance={h}",
    ]
    if costs:
        mean = float(np.mean(costs))
        lines.append(f"# mean_cost={mean!r} opt={'' if opt is None else repr(float(opt))}")
        if opt is not None:
            lines.append(f"# mean_gap={mean - opt!r}" + (f" mean_ratio={mean / opt!r}" if opt else ""))
    lines.append("trial,cost,opt,ratio,gap,instance,seed,version")
    return EXIT_OK, "\n".join(lines + rows) + "\n"


# --------------------------------------------------------------------------
# audit
# --------------------------------------------------------------------------


def _default_fixtures(problem: str, algo: str) -> list:
    if problem == "vc":
        return au.all_graphs(4)
    if problem == "wvc":
        return [WeightedGraph(g, (1.0, 1.0, 2.0)) for g in au.all_graphs(3)]
    if problem == "mincut":
        return au.all_graphs(4)
    if problem in ("setcover", "wsetcover"):
        sets = (frozenset({0, 1}), frozenset({1, 2}), frozenset({2, 3}), frozenset({0, 3}))
        costs = (1.0, 2.0, 1.0, 3.0) if problem == "wsetcover" else None
        return [SetSystem(4, sets, frozenset({0, 2}), costs)]
    if problem == "cpp":
        covers = (frozenset({0}), frozenset({1, 2}), frozenset({2, 3}))
        agents = (frozenset({0, 1}), frozenset({2}), frozenset({3}))
        return [SubmodularInstance(4, covers, agents)]
    if problem in ("kmedian", "metric"):
        return [gen_line_metric(4, demands=[0, 3])]
    raise ConfigError(f"no audit fixture for problem {problem!r}")


def cmd_audit(cfg: ExperimentConfig) -> tuple[int, str]:
    p, a = cfg.problem, cfg.algo
    eps = cfg.epsilon
    mech_eps = cfg.mechanism_epsilon if cfg.mechanism_epsilon is not None else eps
    fixtures = [_load(cfg.source)] if cfg.source else _default_fixtures(p, a)
    if p == "vc" and a == "unweighted":
        report = au.audit_pairs("vc_unweighted", fixtures, "edge", eps, epsilon=mech_eps)
    elif p == "vc" and a == "hallucinated":
        bound = min(vertex_cover.hallucinated_privacy(eps, cfg.alpha, g.n) for g in fixtures)
        report = au.audit_pairs("vc_hallucinated", fixtures, "edge", bound, epsilon=mech_eps, alpha=cfg.alpha)
    elif p == "wvc" and a == "weighted":
        # the guarantee is O(eps) with no named constant; the report gives the measured multiple
        report = au.audit_pairs("vc_weighted", fixtures, "weighted_edge", math.inf, epsilon=mech_eps)
    elif p == "mincut" and a == "exact":
        report = au.audit_pairs("mincut_exact", fixtures, "edge", 2 * eps, epsilon=mech_eps)
    elif p == "setcover" and a == "unweighted":
        _need_delta(cfg)
        report = au.audit_pairs("setcover_unweighted", fixtures, "element", eps, cfg.delta, epsilon=mech_eps, delta=cfg.delta)
    elif p == "wsetcover" and a == "weighted":
        _need_delta(cfg)
        report = au.audit_pairs("setcover_weighted", fixtures, "element", eps, cfg.delta, epsilon=mech_eps, delta=cfg.delta)
    elif p == "cpp" and a == "greedy":
        _need_delta(cfg)
        if cfg.k is None:
            raise ConfigError("CPP audit needs --k")
        bound = cpp.cpp_privacy_epsilon(cpp.cpp_epsilon_prime(eps, cfg.delta), cfg.delta)
        report = au.audit_pairs("cpp_greedy", fixtures, "agent", bound, cfg.delta, epsilon=mech_eps, delta=cfg.delta, k=cfg.k)
    elif p in ("kmedian", "metric") and a == "localsearch":
        if cfg.k is None:
            raise ConfigError("k-median audit needs --k")
        report = au.audit_pairs("kmedian_localsearch", fixtures, "demand", eps, epsilon=mech_eps, k=cfg.k, rounds=2, output="transcript")
    else:
        raise ConfigError(f"no exact audit for problem {p!r} with algorithm {a!r}")
    lines = report.lines()
    if p == "wvc":
        lines.insert(1, f"# measured multiple of eps: {report.max_epsilon / mech_eps!r}")
    return (EXIT_OK if report.passed else EXIT_VIOLATION), "\n".join(lines) + "\n"


def _need_delta(cfg: ExperimentConfig) -> None:
    if not cfg.delta > 0:
        raise ConfigError("this audit needs --delta > 0")


# --------------------------------------------------------------------------
# bench
# --------------------------------------------------------------------------


def cmd_bench(cfg: ExperimentConfig) -> tuple[int, str]:
    rng = RngStream(cfg.seed, stream=2)
    cases = []

    g30 = gen_two_clique_graph(15, 3)
    cases.append(("karger_n30", lambda: mincut.karger_near_min_cuts(g30, 2, mincut.default_num_runs(30) // 30, rng.child(0))))
    graphs = au.all_graphs(4)
    cases.append(("exact_audit_vc_n4", lambda: au.audit_pairs("vc_unweighted", graphs, "edge", 1.0, epsilon=1.0)))
    g5 = gen_cycle_graph(5)
    cases.append(("exact_dist_vc_n5", lambda: au.exact_output_distribution("vc_unweighted", g5, epsilon=1.0)))
    grid = gen_grid_metric(8, 8)
    cases.append(("frt_build_n64", lambda: hst.build_frt_tree(grid, rng.child(1))))
    lines = [f"# privcomb {__version__} bench seed={cfg.seed}", "operation,seconds"]
    for name, fn in cases:
        t0 = time.perf_counter()
        fn()
        lines.append(f"{name},{time.perf_counter() - t0:.6f}")
    return EXIT_OK, "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def _load(source: str | None):
    if source is None:
        raise ConfigError("--in is required")
    try:
        return load(source)
    except FileNotFoundError:
        raise ConfigError(f"instance file {source!r} not found") from None
    except (InstanceError, InstanceFormatError) as exc:
        raise ConfigError(f"{source}: {exc}") from None


def _seed(args) -> int:
    if args.seed is None:
        raise ConfigError("--seed is required")
    return args.seed


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="privcomb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"privcomb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--problem", required=True, choices=PROBLEMS)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="write output here instead of stdout")

    g = sub.add_parser("gen", help="generate an instance file")
    common(g)
    g.add_argument("--kind")
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=float, default=0.3, help="edge probability (random graphs)")
    g.add_argument("--bridge", type=int, default=1, help="bridge edges (two-clique)")
    g.add_argument("--degree", type=int, default=3, help="degree (random regular)")
    g.add_argument("--diam", type=float, default=1.0, help="diameter (uniform metric)")
    g.add_argument("--weights", type=float, nargs="+", default=[1.0, 8.0], help="weight classes (wvc)")
    g.add_argument("--m", type=int, help="number of sets / resources")
    g.add_argument("--density", type=float, default=0.2)
    g.add_argument("--max-cost", type=int, default=10)
    g.add_argument("--agents", type=int, default=8)
    g.add_argument("--pairs", type=int, default=3)

    for name, helptext in (("run", "run an algorithm for several trials"), ("audit", "exact privacy audit"), ("bench", "timing report")):
        sp = sub.add_parser(name, help=helptext)
        if name == "bench":
            sp.add_argument("--problem", default="vc", choices=PROBLEMS)
            sp.add_argument("--seed", type=int)
            sp.add_argument("--out")
        else:
            common(sp)
        sp.add_argument("--algo")
        sp.add_argument("--eps", type=float, default=1.0)
        sp.add_argument("--delta", type=float, default=0.0)
        sp.add_argument("--trials", type=int, default=100)
        sp.add_argument("--in", dest="source")
        sp.add_argument("--k", type=int)
        sp.add_argument("--alpha", type=float, default=0.5)
        sp.add_argument("--f", dest="facility_cost", type=float)
        if name == "audit":
            sp.add_argument("--mech-eps", dest="mechanism_epsilon", type=float, help="epsilon handed to the mechanism (defaults to --eps)")
    return parser


def _config(args) -> ExperimentConfig:
    return ExperimentConfig(
        problem=args.problem,
        algo=args.algo or DEFAULT_ALGO[args.problem],
        epsilon=args.eps,
        delta=args.delta,
        trials=args.trials,
        seed=_seed(args),
        source=args.source,
        out=args.out,
        k=args.k,
        alpha=args.alpha,
        facility_cost=args.facility_cost,
        mechanism_epsilon=getattr(args, "mechanism_epsilon", None),
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command == "gen":
            code, text = cmd_gen(args)
        else:
            cfg = _config(args)
            code, text = {"run": cmd_run, "audit": cmd_audit, "bench": cmd_bench}[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
