"""Exit criteria. Each test prints one PASS/FAIL line; run with ``pytest tests/test_acceptance.py -v``."""

import subprocess
import sys
import time
import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from kwaypart.cuts import (brute_force_min_psi_cut, cheeger_constant, conductance, ncut, phi_cut, psi_cut,
                           rand_index)
from kwaypart.eigen import SpectralGapWarning, compute_lk, top_k_eigenpairs
from kwaypart.errors import EmptyPartError
from kwaypart.graph import (Partition, WeightedGraph, connected_components, disjoint_union, gen_mesh, normalize,
                            path_graph, random_connected_graph)
from kwaypart.indicator import (IndicatorMatrix, cpqr_init, factorize_phi, grad_psi, grad_q_norm, objective,
                                partition_graph, sso)

pytestmark = pytest.mark.acceptance

MESH_EIGS = (1.0, 0.998, 0.997, 0.995, 0.992, 0.989, 0.988)


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def mesh():
    g = gen_mesh(32, 0.7)
    a = normalize(g)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SpectralGapWarning)
        basis = top_k_eigenpairs(a, 6)
    return g, a, basis


def test_mesh_spectrum(verdict):
    t0 = time.perf_counter()
    g = gen_mesh(32, 0.7)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SpectralGapWarning)
        basis = top_k_eigenpairs(normalize(g), 7)
    elapsed = time.perf_counter() - t0
    rounded = tuple(round(float(v), 3) for v in basis.eigenvalues)
    lk = compute_lk(basis.eigenvalues[:6])
    ok = rounded == MESH_EIGS and abs(lk - 0.0155) <= 5e-4 and elapsed < 5.0
    verdict(1, ok, f"eigenvalues {rounded}, L_6 = {lk:.5f}, {elapsed:.2f} s")


def test_mesh_qr_sso_metrics(verdict, mesh):
    g, a, basis = mesh
    out = partition_graph(a, 6, "qr-sso", basis=basis)
    cp = partition_graph(a, 6, "cpqr", basis=basis)
    vals = {"ncut": ncut(g, out.partition), "psi_cut": psi_cut(g, out.partition),
            "phi_cut": phi_cut(a, out.phi), "residual": out.sso.residual}
    ri = rand_index(out.partition, cp.partition)
    ok = (abs(vals["ncut"] - 0.270) <= 5e-3 and abs(vals["psi_cut"] - 0.131) <= 5e-3
          and abs(vals["phi_cut"] - 0.0539) <= 2e-3 and abs(vals["residual"] - 0.361) <= 5e-3 and ri == 1.0)
    detail = ", ".join(f"{k} = {v:.5f}" for k, v in vals.items()) + f", Rand(cpqr, qr-sso) = {ri}"
    verdict(2, ok, detail)


def test_exact_recovery_on_disjoint_unions(verdict):
    rng = np.random.default_rng(3)
    failures, worst_lk, largest = 0, 0.0, 0
    for _ in range(200):
        k = int(rng.integers(2, 7))
        sizes = rng.integers(3, 300 // k + 1, size=k)
        blocks = [random_connected_graph(int(s), float(rng.uniform(0.1, 0.6)), rng, weighted=bool(rng.integers(2)))
                  for s in sizes]
        g = disjoint_union(blocks).permuted(rng.permutation(int(sizes.sum())))
        largest = max(largest, g.n)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SpectralGapWarning)
            out = partition_graph(normalize(g), k, "cpqr")
        lk = compute_lk(out.basis.eigenvalues)
        worst_lk = max(worst_lk, lk)
        exact = rand_index(out.partition, connected_components(g)) == 1.0
        if not (exact and psi_cut(g, out.partition) == 0.0 and ncut(g, out.partition) == 0.0 and lk <= 1e-6):
            failures += 1
    verdict(3, failures == 0, f"{failures}/200 failures, max L_k = {worst_lk:.2e}, largest n = {largest}")


def dense_lambda2(g):
    B = g.to_dense()
    s = 1 / np.sqrt(B.sum(axis=1))
    return np.sort(np.linalg.eigvalsh(B * np.outer(s, s)))[::-1]


def test_cheeger_brute_force(verdict):
    rng = np.random.default_rng(0)
    t0 = time.perf_counter()
    bad_k = bad_2 = checks = 0
    for _ in range(500):
        n = int(rng.integers(3, 10))
        g = random_connected_graph(n, float(rng.uniform(0.1, 0.9)), rng, weighted=bool(rng.integers(2)))
        lam = dense_lambda2(g)
        for k in (2, 3):
            if k >= n:
                continue
            checks += 1
            _, best = brute_force_min_psi_cut(g, k)
            # rounding slack only; the inequality is exact
            if not compute_lk(lam[:k]) <= best + 1e-12:
                bad_k += 1
        _, h = cheeger_constant(g)
        gap = 1 - lam[1]
        if not (h * h / 2 < gap and gap <= 2 * h + 1e-12):
            bad_2 += 1
    elapsed = time.perf_counter() - t0
    ok = bad_k == 0 and bad_2 == 0 and elapsed < 60
    verdict(4, ok, f"L_k <= Psi_G violations {bad_k}/{checks}, two-way violations {bad_2}/500, {elapsed:.1f} s")


def _orthonormal(rng, n, k):
    return np.linalg.qr(rng.standard_normal((n, k)))[0]


def _rotation(rng, k):
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))


def _fd_grad_norm(X, psi, Q, h=1e-5):
    """Central differences along Q exp(tT) for an orthonormal basis T of skew matrices."""
    k = Q.shape[0]
    total = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            T = np.zeros((k, k))
            T[i, j], T[j, i] = 2 ** -0.5, -(2 ** -0.5)
            total += ((objective(X, psi, Q @ expm(h * T)) - objective(X, psi, Q @ expm(-h * T))) / (2 * h)) ** 2
    return np.sqrt(total)


def test_gradient_against_geodesic_differences(verdict):
    rng = np.random.default_rng(5)
    worst_rel, worst_post, structural = 0.0, 0.0, True
    for _ in range(50):
        n, k = int(rng.integers(10, 101)), int(rng.integers(2, 7))
        X = _orthonormal(rng, n, k)
        labels = np.r_[np.arange(k), rng.integers(0, k, n - k)]
        psi = IndicatorMatrix(labels, rng.uniform(-1, 1, n), k)
        Q = _rotation(rng, k)
        exact = grad_q_norm(X, psi, Q)
        worst_rel = max(worst_rel, abs(_fd_grad_norm(X, psi, Q) - exact) / exact)
        res = sso(X, cpqr_init(X)[0])
        worst_post = max(worst_post, res.grad_q_norm if res.converged else np.inf)
        structural &= bool(np.all(grad_psi(X, res.psi, res.q) == 0.0))
    ok = worst_rel <= 1e-5 and worst_post <= 1e-5 and structural
    verdict(5, ok, f"max FD relative error {worst_rel:.1e}, max converged grad {worst_post:.1e}, "
                   f"Psi-gradient zero: {structural}")


def test_sso_monotone_and_scales_bounded(verdict):
    rng = np.random.default_rng(6)
    worst_step, worst_s, ordered, empty = -np.inf, -np.inf, True, 0
    for _ in range(100):
        n, k = int(rng.integers(10, 101)), int(rng.integers(2, 7))
        X = _orthonormal(rng, n, k)
        try:
            res = sso(X, cpqr_init(X)[0])
        except EmptyPartError:
            empty += 1
            continue
        steps = np.diff(res.history)
        if steps.size:
            worst_step = max(worst_step, steps.max())
        f = factorize_phi(res.psi, res.q)
        worst_s = max(worst_s, f.s[0])
        ordered &= bool(np.all(np.diff(f.s) <= 0))
    ok = worst_step <= 0.0 and worst_s <= 1 + 1e-12 and ordered and empty == 0
    verdict(6, ok, f"max half-step change {worst_step:.1e}, max s_1 = {worst_s:.15f}, descending: {ordered}, "
                   f"empty-part runs {empty}")


def _planted(rng):
    k = int(rng.integers(2, 6))
    blocks = [random_connected_graph(int(rng.integers(8, 25)), 0.4, rng, weighted=True) for _ in range(k)]
    u = disjoint_union(blocks)
    i, j, w = u.edges()
    offs = np.cumsum([0] + [b.n for b in blocks])
    bi, bj = [], []
    for c in range(k):
        for _ in range(2):
            d = (c + 1 + int(rng.integers(k - 1))) % k
            bi.append(int(rng.integers(offs[c], offs[c + 1])))
            bj.append(int(rng.integers(offs[d], offs[d + 1])))
    weights = np.r_[w, rng.uniform(0.05, 0.3, len(bi))]
    return WeightedGraph.from_edges(u.n, np.r_[i, bi], np.r_[j, bj], weights), k


def test_permutation_invariance(verdict):
    rng = np.random.default_rng(2024)
    drift = 0.0
    for _ in range(50):
        g, k = _planted(rng)
        vals = []
        for h in (g, g.permuted(rng.permutation(g.n))):
            a = normalize(h)
            out = partition_graph(a, k, "qr-sso", eig_tol=1e-12)
            vals.append(np.array([compute_lk(out.basis.eigenvalues), psi_cut(h, out.partition),
                                  phi_cut(a, out.phi), ncut(h, out.partition)]))
        drift = max(drift, float(np.abs(vals[0] - vals[1]).max()))
    verdict(7, drift <= 1e-10, f"max drift of L_k, Psi-cut, Phi-cut, NCut = {drift:.1e}")


def test_p3_hand_oracles(verdict):
    g = path_graph(3)
    p = Partition(np.array([0, 1, 1]), 2)
    # Gamma by hand: omega = (1, 3), internal (0, 2), coupling 1
    hand_psi = np.sqrt(1 + (1 / 3) ** 2 + 2 * (1 / np.sqrt(3)) ** 2)
    hand_ncut = 1 / 1 + 1 / 3
    hand_h = 1 / min(1, 3)
    errs = (abs(psi_cut(g, p) - hand_psi), abs(ncut(g, p) - hand_ncut), abs(conductance(g, [0]) - hand_h),
            abs(hand_psi - 4 / 3))
    verdict(8, max(errs) <= 1e-12, f"Psi-cut {psi_cut(g, p):.15f}, NCut {ncut(g, p):.15f}, "
                                   f"h({{0}}) {conductance(g, [0]):.15f}")


def test_cli_determinism(verdict, tmp_path):
    graph = tmp_path / "mesh.txt"
    cmd = [sys.executable, "-m", "kwaypart"]
    subprocess.run(cmd + ["generate", "--kind", "mesh", "--side", "32", "--beta", "0.7", "--output", str(graph)],
                   check=True, capture_output=True)
    outputs = []
    for name in ("one", "two"):
        report = tmp_path / f"{name}.json"
        subprocess.run(cmd + ["partition", "--input", str(graph), "--k", "6", "--method", "qr-sso", "--seed",
                              "0", "--report", str(report)], check=True, capture_output=True)
        outputs.append(report.read_bytes())
    verdict(9, outputs[0] == outputs[1] and len(outputs[0]) > 0,
            f"two runs, {len(outputs[0])} bytes each, identical: {outputs[0] == outputs[1]}")
