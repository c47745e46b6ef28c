"""Acceptance gate: fifteen criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
Utility constants that have no closed form are frozen here as regression
bounds.
"""

from __future__ import annotations

import itertools
import math
import subprocess
import sys
import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from privcomb import audit as au
from privcomb.amplify import AmplifiableMechanism, amplification_parameters, private_amplify, utility_threshold
from privcomb.cpp import cpp_epsilon_prime, cpp_privacy_epsilon, private_cpp_greedy, total_welfare
from privcomb.hst import build_frt_tree, stretch
from privcomb.instances import (
    Graph,
    SetSystem,
    SubmodularInstance,
    WeightedGraph,
    gen_coverage_instance,
    gen_grid_metric,
    gen_line_metric,
    gen_random_graph,
    gen_random_metric,
    gen_random_set_system,
    gen_star_graph,
    gen_two_clique_graph,
)
from privcomb.kmedian import kmedian_cost, private_kmedian_localsearch
from privcomb.mincut import cut_cost, min_cut_value, private_min_cut
from privcomb.rng import RngStream
from privcomb.set_cover import (
    decode_set_cover,
    private_set_cover_unweighted,
    private_set_cover_weighted,
    set_cover_epsilon_prime,
)
from privcomb.vertex_cover import (
    cover_weight,
    decode_cover,
    private_vc_hallucinated,
    private_vc_unweighted,
    private_vc_weighted,
)

RESULTS: list[str] = []
TOL = 1e-9

# frozen regression constants
MINCUT_C = 12.0
KMEDIAN_C = 40.0
SETCOVER_C = 6.0
CPP_C = 10.0
FRT_C = 8.0
# contraction runs per sampled min-cut trial at n = 30 (the default n^3 ceil(ln n) is ~30x slower)
SAMPLED_RUNS = lambda n: n**2 * math.ceil(math.log(n))  # noqa: E731


def record(num: int, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {num:2d} {'PASS' if ok else 'FAIL'}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def sigma3(p: float, n: int) -> float:
    return 3 * math.sqrt(p * (1 - p) / n)


# 1 -------------------------------------------------------------------------


def test_01_exact_audit_vc_unweighted():
    t0 = time.perf_counter()
    graphs = au.all_graphs(4)
    worst = {}
    for eps in (0.5, 1.0, 2.0):
        rep = au.audit_pairs("vc_unweighted", graphs, "edge", eps, epsilon=eps)
        worst[eps] = rep.max_epsilon
    dt = time.perf_counter() - t0
    ok = all(worst[e] <= e + TOL for e in worst) and dt < 30
    record(1, ok, f"max_log_ratio/eps = {', '.join(f'{worst[e] / e:.4f}@{e}' for e in worst)}; {dt:.1f}s (< 30s)")


# 2 -------------------------------------------------------------------------


def test_02_exact_audit_mincut():
    t0 = time.perf_counter()
    graphs = au.all_graphs(4)
    worst = {}
    for eps in (0.5, 1.0, 2.0):
        worst[eps] = au.audit_pairs("mincut_exact", graphs, "edge", 2 * eps, epsilon=eps).max_epsilon
    dt = time.perf_counter() - t0
    ok = all(worst[e] <= 2 * e + TOL for e in worst) and dt < 60
    record(2, ok, f"max_log_ratio/eps = {', '.join(f'{worst[e] / e:.4f}@{e}' for e in worst)} (bound 2); {dt:.1f}s (< 60s)")


# 3 -------------------------------------------------------------------------


def _setcover_fixtures() -> list[SetSystem]:
    bases = [
        (4, (frozenset({0, 1}), frozenset({1, 2}), frozenset({2, 3}), frozenset({0, 3}))),
        (4, (frozenset({0}), frozenset({0, 1, 2, 3}), frozenset({3}), frozenset({1, 2}))),
        (3, (frozenset({0, 1, 2}), frozenset({0}), frozenset({1}))),
    ]
    out = []
    for n, sets in bases:
        for r in range(n + 1):
            for R in itertools.combinations(range(n), r):
                out.append(SetSystem(n, sets, frozenset(R)))
    return out


def test_03_hockey_stick_setcover():
    t0 = time.perf_counter()
    delta = 0.05
    fixtures = _setcover_fixtures()
    worst, pairs = 0.0, 0
    for eps in (0.5, 1.0):
        rep = au.audit_pairs("setcover_unweighted", fixtures, "element", eps, delta, epsilon=eps, delta=delta)
        worst = max(worst, rep.max_delta)
        pairs += len(rep.rows)
    dt = time.perf_counter() - t0
    record(3, worst <= delta + TOL and dt < 60, f"max delta_hat = {worst:.3e} over {pairs} pairs (<= {delta}); {dt:.1f}s (< 60s)")


# 4 -------------------------------------------------------------------------


def test_04_hockey_stick_cpp():
    t0 = time.perf_counter()
    delta = 0.1
    fixtures = [gen_coverage_instance(3, 4, 4, RngStream(400).child(s), target_size=2) for s in range(8)]
    fixtures.append(SubmodularInstance(4, (frozenset({0}), frozenset({1, 2}), frozenset({2, 3})), (frozenset({0, 1}), frozenset({2}), frozenset({3}))))
    worst, bound_eps = 0.0, []
    for eps in (0.5, 1.0):
        e_prime = cpp_epsilon_prime(eps, delta)
        bound = cpp_privacy_epsilon(e_prime, delta)
        bound_eps.append(bound)
        rep = au.audit_pairs("cpp_greedy", fixtures, "agent", bound, delta, epsilon=eps, delta=delta, k=2)
        worst = max(worst, rep.max_delta)
    dt = time.perf_counter() - t0
    record(
        4,
        worst <= delta + TOL and dt < 60,
        f"max delta_hat = {worst:.3e} (<= {delta}) at eps = {', '.join(f'{b:.4f}' for b in bound_eps)}; {dt:.1f}s (< 60s)",
    )


# 5 -------------------------------------------------------------------------


def test_05_vc_utility():
    t0 = time.perf_counter()
    graphs = {"star": gen_star_graph(20), "random": gen_random_graph(20, 0.2, RngStream(500))}
    parts, ok = [], True
    for name, g in graphs.items():
        opt = au.brute_opt("vc", g)[0]
        for eps in (0.5, 1.0, 2.0):
            root = RngStream(501, stream=int(eps * 10))
            sizes = [len(decode_cover(g, private_vc_unweighted(g, eps, root.child(t)))) for t in range(500)]
            ratio = float(np.mean(sizes)) / opt
            ok &= ratio <= 2 + 16 / eps
            parts.append(f"{name}@{eps}: {ratio:.2f}/{2 + 16 / eps:.0f}")
    dt = time.perf_counter() - t0
    record(5, ok and dt < 120, f"mean/OPT vs bound: {'; '.join(parts)}; {dt:.1f}s (< 120s)")


# 6 -------------------------------------------------------------------------


def test_06_weighted_vc_utility():
    eps = 1.0
    parts, ok = [], True
    for s in range(3):
        r = RngStream(600).child(s)
        g = gen_random_graph(16, 0.25, r)
        w = WeightedGraph(g, tuple(float(x) for x in np.where(r.child(1).random(16) < 0.5, 1.0, 8.0)))
        opt = au.brute_opt("wvc", w)[0]
        costs = [cover_weight(w, decode_cover(g, private_vc_weighted(w, eps, r.child(2).child(t)))) for t in range(500)]
        ratio = float(np.mean(costs)) / opt
        ok &= ratio <= 16 + 16 / eps
        parts.append(f"{ratio:.2f}")
    record(6, ok, f"mean cost/OPT = {', '.join(parts)} (<= {16 + 16 / eps:.0f})")


# 7 -------------------------------------------------------------------------


@pytest.mark.slow
def test_07_mincut_additive():
    t0 = time.perf_counter()
    parts, ok = [], True
    for n, bridges, mode in ((16, 2, "exact"), (30, 3, "sampled")):
        g = gen_two_clique_graph(n // 2, bridges)
        opt = min_cut_value(g)
        runs = SAMPLED_RUNS(n) if mode == "sampled" else None
        for eps in (0.5, 1.0):
            root = RngStream(700 + n, stream=int(eps * 10))
            costs = [cut_cost(g, private_min_cut(g, eps, mode, root.child(t), num_runs=runs)) for t in range(300)]
            gap = float(np.mean(costs)) - opt
            bound = MINCUT_C * math.log(n) / eps
            ok &= gap <= bound
            parts.append(f"n={n}({mode})@{eps}: {gap:.2f}/{bound:.1f}")
    dt = time.perf_counter() - t0
    record(7, ok, f"mean cost - OPT vs 12 ln n/eps: {'; '.join(parts)}; {dt:.0f}s")


# 8 -------------------------------------------------------------------------


def test_08_kmedian():
    n, k, eps = 15, 2, 1.0
    m = gen_random_metric(n, RngStream(800), demand_fraction=0.6)
    opt = au.brute_opt("kmedian", m, k=k)[0]
    costs = [kmedian_cost(m, private_kmedian_localsearch(m, k, eps, RngStream(801).child(t))) for t in range(200)]
    p95 = float(np.percentile(costs, 95))
    bound = 6 * opt + KMEDIAN_C * m.diameter * k**2 * math.log(n) ** 2 / eps
    record(8, p95 <= bound, f"p95 cost = {p95:.2f}, OPT = {opt:.2f}, bound = {bound:.1f}")


# 9 -------------------------------------------------------------------------


def test_09_setcover_utility():
    n, m, eps, delta = 50, 16, 1.0, 0.05
    s = gen_random_set_system(n, m, RngStream(900), density=0.15)
    opt = au.brute_opt("setcover", s)[0]
    e_prime = set_cover_epsilon_prime(eps, delta)
    sizes = [len(decode_set_cover(s, private_set_cover_unweighted(s, eps, delta, RngStream(901).child(t)))[0]) for t in range(300)]
    mean = float(np.mean(sizes))
    bound = SETCOVER_C * (math.log(n) + math.log(m) / e_prime) * opt
    record(9, mean <= bound, f"mean size = {mean:.2f}, OPT = {opt:.0f}, bound = {bound:.1f}")


# 10 ------------------------------------------------------------------------


def test_10_cpp_utility():
    m, k, eps, delta = 20, 3, 1.0, 0.1
    inst = gen_coverage_instance(m, 30, 12, RngStream(1000), cover_density=0.15)
    opt = au.brute_opt("cpp", inst, k=k)[0]
    e_prime = cpp_epsilon_prime(eps, delta)
    vals = [total_welfare(inst, private_cpp_greedy(inst, k, eps, delta, RngStream(1001).child(t))) for t in range(500)]
    mean = float(np.mean(vals))
    bound = (1 - 1 / math.e) * opt - CPP_C * k * math.log(m) / e_prime
    record(10, mean >= bound, f"mean welfare = {mean:.3f}, OPT = {opt:.3f}, bound = {bound:.1f}")


# 11 ------------------------------------------------------------------------


def test_11_frt():
    m = gen_grid_metric(4, 4)
    acc = np.zeros((16, 16))
    dominated = True
    for t in range(500):
        tree = build_frt_tree(m, RngStream(1100).child(t))
        dominated &= bool((tree.distance_matrix() >= m.matrix - 1e-12).all())
        acc += stretch(m, tree)
    worst = float((acc / 500).max())
    bound = FRT_C * math.log(16)
    record(11, dominated and worst <= bound, f"domination on all 500 trees: {dominated}; max mean stretch = {worst:.2f} (<= {bound:.2f})")


# 12 ------------------------------------------------------------------------


def test_12_tail_bounds():
    trials, parts, ok = 100_000, [], True
    for q in (2.0, 3.0):
        f = au.simulate_coin_tail(0.2, 50, q, trials, RngStream(1200, stream=int(q)))
        b = au.coin_tail_bound(q)
        ok &= f <= b + sigma3(b, trials)
        parts.append(f"coin q={q:.0f}: {f:.4f}/{b:.4f}")
        for name, pol in (("const0.2", au.FractionPolicy.constant(0.2)), ("uniform", au.FractionPolicy.uniform())):
            f = au.simulate_fraction_tail(pol, 50, q, trials, RngStream(1201, stream=int(q)))
            b = au.fraction_tail_bound(q)
            ok &= f <= b + sigma3(min(b, 1.0), trials)
            parts.append(f"fraction[{name}] q={q:.0f}: {f:.4f}/{b:.4f}")
    record(12, ok, "; ".join(parts))


# 13 ------------------------------------------------------------------------


def test_13_amplification():
    eps_p, delta, p = 0.5, 0.5, 0.5
    Q = 100.0
    calls = [0]

    def sampler(data, rng):
        calls[0] += 1
        return Q if rng.random() < p else 0.0

    mech = AmplifiableMechanism(sampler, lambda d, o: o, p)
    T, _ = amplification_parameters(eps_p, delta, p)
    thr = utility_threshold(Q, eps_p, delta, p)
    runs, good, dummies, exact_calls = 200, 0, 0, True
    for t in range(runs):
        before = calls[0]
        out = private_amplify(mech, None, Q, eps_p, delta, RngStream(1300).child(t))
        exact_calls &= calls[0] - before == T + 1
        dummies += out.is_dummy
        good += (not out.is_dummy) and out.score >= thr
    ok = T == 8518 and exact_calls and good / runs >= 1 - delta and dummies / runs <= delta
    record(13, ok, f"T = {T}, T+1 calls every run: {exact_calls}; success = {good / runs:.3f} (>= {1 - delta}); dummy = {dummies / runs:.3f} (<= {delta})")


# 14 ------------------------------------------------------------------------


def _coherence_cases():
    path3 = Graph(3, [(0, 1)])
    wg = WeightedGraph(Graph(3, [(0, 1), (1, 2)]), (1.0, 2.0, 1.0))
    sc = SetSystem(3, (frozenset({0, 1}), frozenset({1, 2}), frozenset({2})), frozenset({0, 2}))
    wsc = SetSystem(3, (frozenset({0, 1}), frozenset({1, 2}), frozenset({2})), frozenset({0, 2}), (1.0, 2.0, 1.0))
    cov = SubmodularInstance(4, (frozenset({0}), frozenset({1, 2}), frozenset({2, 3})), (frozenset({0, 1}), frozenset({2}), frozenset({3})))
    c4 = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    line = gen_line_metric(4, demands=[1, 3])
    return [
        ("vc_unweighted", path3, {"epsilon": 1.0}, lambda r: private_vc_unweighted(path3, 1.0, r)),
        ("vc_hallucinated", path3, {"epsilon": 1.0, "alpha": 0.5}, lambda r: private_vc_hallucinated(path3, 1.0, 0.5, r)),
        ("vc_weighted", wg, {"epsilon": 1.0}, lambda r: private_vc_weighted(wg, 1.0, r)),
        ("setcover_unweighted", sc, {"epsilon": 1.0, "delta": 0.05}, lambda r: private_set_cover_unweighted(sc, 1.0, 0.05, r)),
        ("setcover_weighted", wsc, {"epsilon": 1.0, "delta": 0.05}, lambda r: private_set_cover_weighted(wsc, 1.0, 0.05, r)),
        ("cpp_greedy", cov, {"epsilon": 2.0, "delta": 0.1, "k": 2}, lambda r: private_cpp_greedy(cov, 2, 2.0, 0.1, r)),
        ("mincut_exact", c4, {"epsilon": 1.0}, lambda r: private_min_cut(c4, 1.0, "exact", r).side),
        ("kmedian_localsearch", line, {"epsilon": 4.0, "k": 1, "rounds": 2}, lambda r: tuple(sorted(private_kmedian_localsearch(line, 1, 4.0, r, rounds=2)))),
    ]


@pytest.mark.slow
def test_14_sampler_auditor_coherence():
    runs, parts, ok = 100_000, [], True
    for idx, (name, inst, params, sample) in enumerate(_coherence_cases()):
        dist = au.exact_output_distribution(name, inst, **params)
        root = RngStream(1400, stream=idx)
        seen = Counter(sample(root.child(t)) for t in range(runs))
        stray = set(seen) - set(dist.probs)
        worst = max(abs(seen[o] / runs - p) / max(math.sqrt(p * (1 - p) / runs), 1e-300) for o, p in dist.probs.items())
        good = not stray and worst <= 3.0
        ok &= good
        parts.append(f"{name}: {len(dist)} outcomes, max |z| = {worst:.2f}{' STRAY' if stray else ''}")
    record(14, ok, "; ".join(parts))


# 15 ------------------------------------------------------------------------


def _cli(args: list[str]) -> tuple[int, bytes]:
    p = subprocess.run([sys.executable, "-m", "privcomb", *args], capture_output=True)
    return p.returncode, p.stdout


def _strip_timing(out: bytes) -> bytes:
    return b"\n".join(line.rsplit(b",", 1)[0] for line in out.splitlines())


@pytest.mark.slow
def test_15_determinism(tmp_path):
    gens = {
        "vc": ["--kind", "random", "--n", "8"],
        "wvc": ["--kind", "star", "--n", "7"],
        "mincut": ["--kind", "two-clique", "--n", "10", "--bridge", "2"],
        "kmedian": ["--kind", "random", "--n", "8"],
        "facility": ["--kind", "grid", "--n", "9"],
        "steiner": ["--kind", "line", "--n", "6", "--pairs", "2"],
        "setcover": ["--n", "10", "--m", "6"],
        "wsetcover": ["--n", "10", "--m", "6"],
        "cpp": ["--n", "10", "--m", "6", "--agents", "4"],
    }
    calls: list[list[str]] = []
    for prob, extra in gens.items():
        calls.append(["gen", "--problem", prob, "--seed", "5", *extra])
    files = {}
    for prob, extra in gens.items():
        f = tmp_path / f"{prob}.txt"
        code, out = _cli(["gen", "--problem", prob, "--seed", "5", *extra, "--out", str(f)])
        assert code == 0, prob
        files[prob] = str(f)
    runs = [
        ["--problem", "vc", "--algo", "unweighted"],
        ["--problem", "vc", "--algo", "hallucinated"],
        ["--problem", "wvc"],
        ["--problem", "mincut", "--algo", "exact"],
        ["--problem", "mincut", "--algo", "sampled"],
        ["--problem", "kmedian", "--k", "2"],
        ["--problem", "kmedian", "--algo", "expmech", "--k", "2"],
        ["--problem", "facility", "--f", "3"],
        ["--problem", "steiner"],
        ["--problem", "setcover", "--delta", "0.05"],
        ["--problem", "wsetcover", "--delta", "0.05"],
        ["--problem", "wsetcover", "--algo", "bucketed", "--delta", "0.05"],
        ["--problem", "setcover", "--algo", "expmech"],
        ["--problem", "cpp", "--k", "2", "--delta", "0.1"],
        ["--problem", "cpp", "--algo", "expmech", "--k", "2"],
    ]
    for r in runs:
        calls.append(["run", *r, "--in", files[r[1]], "--trials", "5", "--seed", "9"])
    calls += [
        ["audit", "--problem", "vc", "--seed", "1"],
        ["audit", "--problem", "setcover", "--delta", "0.05", "--seed", "1"],
        ["audit", "--problem", "cpp", "--k", "2", "--delta", "0.1", "--seed", "1"],
        ["audit", "--problem", "vc", "--algo", "hallucinated", "--alpha", "0.25", "--eps", "0.5", "--mech-eps", "1.0", "--seed", "1"],
    ]
    mismatched, failures = [], []
    for c in calls:
        a, b = _cli(c), _cli(c)
        if a != b:
            mismatched.append(" ".join(c[:3]))
        if a[0] not in (0, 2) or not a[1]:
            failures.append(" ".join(c))
    ca, cb = _cli(["bench", "--seed", "1"]), _cli(["bench", "--seed", "1"])
    bench_same = ca[0] == cb[0] and _strip_timing(ca[1]) == _strip_timing(cb[1])
    ok = not mismatched and not failures and bench_same
    detail = f"{len(calls)} invocations byte-identical across two processes: {not mismatched}"
    detail += f"; bench identical outside the timing column: {bench_same}"
    if mismatched or failures:
        detail += f"; mismatched={mismatched} failed={failures}"
    record(15, ok, detail)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
