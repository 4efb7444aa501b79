"""Acceptance criteria.  Each test prints one PASS/FAIL line.

Run alone with ``pytest -m acceptance -s``.
"""
import time

import numpy as np
import pytest

from graphon_centrality import centrality as cent
from graphon_centrality import convergence as conv
from graphon_centrality import graph, numerics, presets, sampling
from graphon_centrality.fileio import canonical_json
from graphon_centrality.graphon import SBMGraphon, discretize_to_sbm, effective_matrices

pytestmark = pytest.mark.acceptance


def _max_abs(a, b):
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))


def test_sbm_gold_values(sbm, acceptance_log):
    t0 = time.perf_counter()
    deg = cent.sbm_centrality(sbm, "degree").values
    eig = cent.sbm_centrality(sbm, "eigenvector").values
    k05 = cent.sbm_centrality(sbm, "katz", alpha=0.5).values
    k15 = cent.sbm_centrality(sbm, "katz", alpha=1.5).values
    pr = cent.sbm_centrality(sbm, "pagerank", beta=0.85).values
    elapsed = time.perf_counter() - t0

    checks = {
        # exact up to round-off: block sizes such as 0.4 - 0.1 are not representable
        "degree exact": _max_abs(deg, [0.6, 0.25, 0.25, 0.25, 0.6]) <= 1e-12,
        "eigenvector": _max_abs(eig, [1.56, 0.72, 0.99, 0.72, 1.56]) <= 0.01,
        "katz(0.5)": _max_abs(k05, [1.36, 1.15, 1.16, 1.15, 1.36]) <= 0.01,
        "katz(1.5)": _max_abs(k15, [2.86, 1.84, 2.01, 1.84, 2.86]) <= 0.01,
        "pagerank(0.85)": _max_abs(pr, [1.77, 0.82, 0.78, 0.82, 1.77]) <= 0.01,
        "runtime < 1 s": elapsed < 1.0,
    }
    ok = all(checks.values())
    acceptance_log("SBM gold values", ok, f"{elapsed:.3f}s; " + ", ".join(k for k, v in checks.items() if not v))
    assert ok, checks


def test_fr_gold_values(fr, acceptance_log):
    t0 = time.perf_counter()
    mats = effective_matrices(fr, pagerank=True)
    deg = cent.fr_centrality(fr, "degree").coefficients
    eig = cent.fr_centrality(fr, "eigenvector").coefficients
    lam1 = cent.principal_eigenvalue(fr)
    katz = cent.fr_centrality(fr, "katz", alpha=0.9 / lam1).coefficients
    pr = cent.fr_centrality(fr, "pagerank", beta=0.85).coefficients
    elapsed = time.perf_counter() - t0

    # printed pairs are (x^2 coefficient, constant)
    def pair(c):
        return np.array([c[2], c[0]])

    checks = {
        "Q exact": _max_abs(mats.Q, [[1 / 5, 1 / 6], [1 / 6, 1 / 4]]) <= 1e-12,
        "E exact": _max_abs(mats.E, [[1 / 6, 1 / 4], [1 / 5, 1 / 6]]) <= 1e-12,
        "g_bar exact": _max_abs(mats.g_bar, [1 / 3, 1 / 2]) <= 1e-12,
        "h_bar exact": _max_abs(mats.h_bar, [1 / 2, 1 / 3]) <= 1e-12,
        "h_nor": _max_abs(mats.h_nor, [1.81, 0.79]) <= 0.01,
        "E_nor": _max_abs(mats.E_nor, [[0.40, 0.91], [0.40, 0.40]]) <= 0.01,
        "degree exact": _max_abs(pair(deg), [1 / 2, 1 / 6]) <= 1e-12 and deg[1] == 0.0,
        "eigenvector (1.07, 0.54)": _max_abs(pair(eig), [1.07, 0.54]) <= 0.02,
        "katz (10.19, 5.44)": _max_abs(pair(katz), [10.19, 5.44]) <= 0.02,
        "pagerank (1.31, 0.56)": _max_abs(pair(pr), [1.31, 0.56]) <= 0.02,
        "runtime < 5 s": elapsed < 5.0,
    }
    ok = all(checks.values())
    failed = ", ".join(k for k, v in checks.items() if not v)
    detail = f"{elapsed:.3f}s; eigenvector computed ({eig[2]:.4f}, {eig[0]:.4f})"
    acceptance_log("FR gold values", ok, detail + (f"; failed: {failed}" if failed else ""))
    assert ok, checks


def test_wg_reference(wg, acceptance_log):
    t0 = time.perf_counter()
    S = discretize_to_sbm(wg, 512)
    eig = cent.sbm_centrality(S, "eigenvector")
    # sup norm over the whole interval, not only at cell midpoints
    x = np.linspace(0.0, 1.0, 512 * 16 + 1)
    sup = float(np.max(np.abs(eig(x) - np.sqrt(2.0) * np.sin(np.pi * x))))
    lam_err = abs(eig.meta["lambda1"] - 1.0 / np.pi ** 2)

    deg = cent.graphon_centrality(wg, "degree")
    xm = deg.rep.midpoints
    deg_err = _max_abs(deg.values, xm * (1 - xm) / 2)

    alpha = 0.9 * np.pi ** 2
    series = cent.wg_reference("katz", alpha=alpha, n_terms=2000)
    disc = cent.sbm_centrality(S, "katz", alpha=alpha)
    katz_l2 = cent.l2_distance(series, disc)
    elapsed = time.perf_counter() - t0

    checks = {
        "eigenvector sup <= 1e-2": sup <= 1e-2,
        "lambda1 within 1e-4": lam_err <= 1e-4,
        "degree within 1e-10": deg_err <= 1e-10,
        "katz L2 <= 5e-2": katz_l2 <= 5e-2,
        "runtime < 30 s": elapsed < 30.0,
    }
    ok = all(checks.values())
    acceptance_log("W_G reference", ok, f"{elapsed:.2f}s; sup={sup:.2e} dlam={lam_err:.1e} deg={deg_err:.1e} katzL2={katz_l2:.2e}")
    assert ok, checks


def _random_graph(rng):
    while True:
        n = int(rng.integers(2, 13))
        p = rng.uniform(0.3, 0.9)
        A = np.triu((rng.random((n, n)) < p).astype(float), 1)
        A = A + A.T
        if not A.any():
            continue
        s = numerics.sym_eig(A / n, top=2)
        if s.gap > 1e-6:
            return A


def test_graph_graphon_equivalence(acceptance_log):
    rng = np.random.default_rng(4)
    graphs = [_random_graph(rng) for _ in range(20)]
    t0 = time.perf_counter()
    worst = 0.0
    for A in graphs:
        n = A.shape[0]
        M = A / n
        W = SBMGraphon(np.arange(n + 1) / n, A)
        lam = numerics.sym_eig(M, top=1).eigenvalues[0]
        for kind, alpha, beta in (("degree", None, None), ("eigenvector", None, None),
                                  ("katz", 0.5 / lam, None), ("pagerank", None, 0.85)):
            lhs = graph.embed_step(graph.graph_centrality(M, kind, alpha, beta))
            rhs = cent.sbm_centrality(W, kind, alpha, beta, dagger=True)
            np.testing.assert_array_equal(lhs.rep.boundaries, rhs.rep.boundaries)
            worst = max(worst, _max_abs(lhs.values, rhs.values))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5.0
    acceptance_log("Graph-graphon equivalence oracle", ok, f"{elapsed:.3f}s; max deviation {worst:.1e} over 20 graphs x 4 kinds")
    assert ok


def test_convergence_trends(acceptance_log):
    t0 = time.perf_counter()
    f4 = presets.experiment("fig4")
    r4 = conv.run_convergence(
        presets.resolve_graphon(f4["graphon"]), f4["kind"], f4["N"], f4["seeds"], f4["mode"], f4["tau"],
        master_seed=f4["master_seed"], with_det=False,
    )
    f5 = presets.experiment("fig5")
    r5 = conv.run_convergence(
        presets.resolve_graphon(f5["graphon"]), f5["kind"], f5["N"], f5["seeds"], f5["mode"], f5["tau"],
        alpha=f5["alpha"], master_seed=f5["master_seed"], with_det=False,
    )
    elapsed = time.perf_counter() - t0

    m4 = dict(zip(r4.column("N"), r4.column("mean_error")))
    m5 = dict(zip(r5.column("N"), r5.column("mean_error")))
    rows = sorted(r5.rows, key=lambda r: r["N"])
    wins = total = 0
    for a, b in zip(rows, rows[1:]):
        if a["aligned"] != b["aligned"]:
            al, mis = (a, b) if a["aligned"] else (b, a)
            total += 1
            wins += al["mean_error"] < mis["mean_error"]
    checks = {
        "fig4 N=489 < N=68": m4[489] < m4[68],
        "fig5 N=960 < N=58": m5[960] < m5[58],
        "fig5 aligned below misaligned >= 80%": total > 0 and wins / total >= 0.8,
        "runtime < 10 min": elapsed < 600.0,
    }
    ok = all(checks.values())
    acceptance_log(
        "Convergence trends (fig4, fig5)", ok,
        f"{elapsed:.1f}s; fig4 {m4[68]:.4f}->{m4[489]:.4f}; fig5 {m5[58]:.4f}->{m5[960]:.4f}; aligned wins {wins}/{total}",
    )
    assert ok, checks


def test_deterministic_latent_rate(fr, acceptance_log):
    Ns = [64, 128, 256, 512, 1024]
    lam1 = cent.principal_eigenvalue(fr)
    parts, ok = [], True
    for kind, alpha, beta in (("degree", None, None), ("eigenvector", None, None),
                              ("katz", 0.9 / lam1, None), ("pagerank", None, 0.85)):
        fit = conv.deterministic_convergence(fr, kind, Ns, alpha=alpha, beta=beta)
        ratios = np.asarray(fit.errors) / np.asarray(fit.rho)
        bounded = np.all(np.asarray(fit.errors) <= fit.C_fit * np.asarray(fit.rho))
        stable = np.isfinite(fit.C_fit) and ratios.max() / ratios.min() <= 2.0
        in_band = -1.3 <= fit.rate <= -0.7
        ok &= bool(bounded and stable and in_band)
        parts.append(f"{kind} rate={fit.rate:.3f} C={fit.C_fit:.3g} spread={ratios.max() / ratios.min():.2f}")
    acceptance_log("Deterministic-latent rate", ok, "; ".join(parts))
    assert ok


def test_order_statistics(acceptance_log):
    t0 = time.perf_counter()
    res = [(N, d, conv.order_stat_check(N, d, 10_000, seed=N)) for N, d in ((100, 0.05), (1000, 0.01))]
    elapsed = time.perf_counter() - t0
    ok = all(r.violation_rate <= d for _, d, r in res) and elapsed < 60.0
    acceptance_log(
        "Order-statistics Monte-Carlo", ok,
        f"{elapsed:.1f}s; " + "; ".join(f"N={N} delta={d} rate={r.violation_rate:.4f}" for N, d, r in res),
    )
    assert ok


def test_davis_kahan(acceptance_log):
    rng = np.random.default_rng(8)
    cases = violations = 0
    tries = 0
    while cases < 200:
        tries += 1
        n = int(rng.integers(2, 40))
        M = rng.standard_normal((n, n))
        M = M + M.T
        M[0, 0] += rng.uniform(0, 3 * n)
        H = rng.standard_normal((n, n)) * 10 ** rng.uniform(-4, 0)
        H = 0.5 * (H + H.T)
        r = conv.davis_kahan_check(M, H)
        if not r.applicable:
            continue
        cases += 1
        violations += not r.holds
    ok = violations == 0
    acceptance_log("Davis-Kahan property", ok, f"{violations} violations in {cases} cases ({tries} drawn)")
    assert ok


def _invariant_eigenfunction(fr):
    c = cent.fr_centrality(fr, "eigenvector")
    lam = c.meta["lambda1"]
    x = np.random.default_rng(3).random(50)
    worst = 0.0
    for xi in x:
        lhs = numerics.integrate(lambda y: fr(np.full_like(y, xi), y) * c(y)).value
        worst = max(worst, abs(lhs - lam * float(c(xi))))
    return worst <= 1e-6, f"residual {worst:.1e}"


def _invariant_unit_norm(sbm, fr, wg):
    norms = [cent.l2_norm(cent.graphon_centrality(W, "eigenvector", resolution=128)) for W in (sbm, fr, wg)]
    return max(abs(v - 1) for v in norms) <= 1e-8, "norms " + ", ".join(f"{v:.12f}" for v in norms)


def _invariant_permutation(sbm):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(10):
        A = _random_graph(rng)
        n = A.shape[0]
        pi = rng.permutation(n)
        Ap = A[np.ix_(pi, pi)]
        lam = numerics.sym_eig(A, top=1).eigenvalues[0]
        for kind, alpha, beta in (("degree", None, None), ("eigenvector", None, None),
                                  ("katz", 0.5 / lam, None), ("pagerank", None, 0.85)):
            c = graph.graph_centrality(A, kind, alpha, beta).values
            cp = graph.graph_centrality(Ap, kind, alpha, beta).values
            worst = max(worst, _max_abs(cp, c[pi]))
    # block permutation of an SBM graphon, exact
    perm = np.array([2, 0, 4, 1, 3])
    q = np.diff(sbm.boundaries)[perm]
    Wp = SBMGraphon(np.concatenate([[0.0], np.cumsum(q)]), sbm.P[np.ix_(perm, perm)])
    exact = True
    for kind, alpha, beta in (("degree", None, None), ("katz", 1.5, None), ("pagerank", None, 0.85)):
        a = cent.sbm_centrality(sbm, kind, alpha, beta).values[perm]
        b = cent.sbm_centrality(Wp, kind, alpha, beta).values
        exact &= _max_abs(a, b) <= 1e-14
    a = cent.sbm_centrality(sbm, "eigenvector").values[perm]
    b = cent.sbm_centrality(Wp, "eigenvector").values
    exact &= _max_abs(a, b) <= 1e-12
    return worst <= 1e-10 and exact, f"graph deviation {worst:.1e}, SBM blocks exact={exact}"


def _invariant_pagerank_mass(sbm):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        A = _random_graph(rng)
        if np.any(A.sum(axis=0) == 0):
            A = A + np.diag(np.ones(len(A)))  # self loops keep degrees positive
        pr = graph.pagerank(A, 0.85).values
        worst = max(worst, abs(pr.sum() - len(A)) / len(A))
    c = cent.sbm_centrality(sbm, "pagerank", beta=0.85)
    mass = float(np.sum(c.values * sbm.block_sizes))
    return worst <= 1e-10 and abs(mass - 1) <= 1e-8, f"graph rel. deviation {worst:.1e}, SBM mass {mass:.12f}"


def _invariant_neumann(sbm):
    worst = 0.0
    E = effective_matrices(sbm).E
    lam = cent.principal_eigenvalue(sbm)
    rng = np.random.default_rng(9)
    for frac in np.concatenate([[0.5, 0.9, 0.95], rng.uniform(0.01, 0.95, 10)]):
        alpha = frac / lam
        solve = cent.sbm_centrality(sbm, "katz", alpha=alpha).values
        series = numerics.neumann_apply(E, alpha, np.ones(5), 1000)
        worst = max(worst, _max_abs(solve, series))
    for _ in range(10):
        A = _random_graph(rng)
        lamA = numerics.sym_eig(A, top=1).eigenvalues[0]
        alpha = 0.95 / lamA
        worst = max(worst, _max_abs(graph.katz(A, alpha).values, numerics.neumann_apply(A, alpha, np.ones(len(A)), 1000)))
    return worst <= 1e-6, f"max deviation {worst:.1e}"


def _invariant_unbiased(sbm):
    N, kappa, seeds = 12, 0.7, 500
    P = sampling.probability_matrix(sbm, sampling.make_latents(N))
    total = np.zeros((N, N))
    for s in range(seeds):
        total += sampling.sample_adjacency(P, kappa, s)
    mean = total / seeds
    p = kappa * P
    sigma = np.sqrt(p * (1 - p) / seeds)
    off = ~np.eye(N, dtype=bool)
    dev = np.abs(mean - p)[off]
    inside = np.all(dev <= 3 * sigma[off] + 1e-15)
    return bool(inside), f"max |mean - kappa P| / sigma = {np.max(dev / np.maximum(sigma[off], 1e-300)):.2f}"


def _invariant_reproducible(sbm):
    a = sampling.sample_graph(sbm, 80, "stochastic", 0.3, seed=11)
    b = sampling.sample_graph(sbm, 80, "stochastic", 0.3, seed=11)
    same_graph = np.array_equal(a.S, b.S) and np.array_equal(a.latents.u, b.latents.u) and a.kappa == b.kappa
    r1 = conv.run_convergence(sbm, "degree", [30, 40], 3, "stochastic", master_seed=2)
    r2 = conv.run_convergence(sbm, "degree", [30, 40], 3, "stochastic", master_seed=2)
    d1, d2 = r1.to_dict(), r2.to_dict()
    # the wall-clock timestamp is the only field allowed to differ
    d1["provenance"].pop("timestamp")
    d2["provenance"].pop("timestamp")
    same_report = canonical_json(d1) == canonical_json(d2)
    return same_graph and same_report, f"graph={same_graph} report={same_report}"


def test_invariant_suites(sbm, fr, wg, acceptance_log):
    results = {
        "eigenfunction residual": _invariant_eigenfunction(fr),
        "unit-norm eigenvector": _invariant_unit_norm(sbm, fr, wg),
        "permutation equivariance": _invariant_permutation(sbm),
        "PageRank mass": _invariant_pagerank_mass(sbm),
        "Neumann vs solve": _invariant_neumann(sbm),
        "sampler unbiasedness": _invariant_unbiased(sbm),
        "bit-exact reproducibility": _invariant_reproducible(sbm),
    }
    ok = all(r[0] for r in results.values())
    acceptance_log("Invariant suites", ok, "; ".join(f"{k}: {'ok' if r[0] else 'FAIL'} ({r[1]})" for k, r in results.items()))
    assert ok, results
