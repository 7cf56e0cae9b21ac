"""Partition-quality functionals, Cheeger checks and exhaustive oracles."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import PartitionError
from .graph import NormalizedOperator, Partition, WeightedGraph, degrees
from .indicator import IndicatorMatrix, PhiFactorization

BRUTE_FORCE_MAX_N = 14


class DegeneratePartError(PartitionError):
    pass


@dataclass(frozen=True, eq=False)
class GammaMatrix:
    gamma: np.ndarray
    volumes: np.ndarray
    internal: np.ndarray
    coupling: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.gamma))


def _block_weights(g: WeightedGraph, p: Partition):
    """``W[i, j]`` = total weight between parts ``i`` and ``j`` (internal edges counted twice)."""
    if p.n != g.n:
        raise ValueError(f"partition has {p.n} labels, graph has {g.n} nodes")
    H = p.indicator()
    return H.T @ (g.adjacency @ H)


def gamma_matrix(g: WeightedGraph, p: Partition) -> GammaMatrix:
    W = _block_weights(g, p)
    d = degrees(g).degrees
    omega = np.bincount(p.labels, weights=d, minlength=p.k)
    if np.any(omega <= 0):
        raise DegeneratePartError(f"parts {np.flatnonzero(omega <= 0).tolist()} have zero volume")
    coupling = W.copy()
    np.fill_diagonal(coupling, 0.0)
    internal = np.diag(W).copy()
    # 1 - internal/omega, evaluated as boundary/omega so component splits give exact zeros
    boundary = coupling.sum(axis=1)
    scale = np.sqrt(np.outer(omega, omega))
    G = -coupling / scale
    G[np.diag_indices(p.k)] = boundary / omega
    return GammaMatrix(G, omega, internal, coupling)


def psi_cut(g: WeightedGraph, p: Partition) -> float:
    return gamma_matrix(g, p).norm


def ncut(g: WeightedGraph, p: Partition) -> float:
    """``sum_i |E(R_i, R_i^c)| / vol(R_i)`` on the unnormalized adjacency."""
    gm = gamma_matrix(g, p)
    return float(np.sum(gm.coupling.sum(axis=1) / gm.volumes))


def conductance(g: WeightedGraph, subset) -> float:
    mask = np.zeros(g.n, dtype=bool)
    mask[np.asarray(list(subset), dtype=np.int64)] = True
    if not mask.any() or mask.all():
        raise ValueError("subset must be proper and non-empty")
    d = degrees(g).degrees
    cut = float(mask.astype(float) @ (g.adjacency @ (~mask).astype(float)))
    return cut / min(d[mask].sum(), d[~mask].sum())


def phi_cut(a: NormalizedOperator, phi, norm_tol: float = 1e-8) -> float:
    """``||I - |Phi|^T A |Phi|||`` for a unit-column indicator matrix ``Phi``.

    ``phi`` may be a :class:`PhiFactorization`, an :class:`IndicatorMatrix`
    or a dense array.
    """
    if isinstance(phi, PhiFactorization):
        phi = phi.phi
    if isinstance(phi, IndicatorMatrix):
        phi = phi.to_dense()
    P = np.abs(np.asarray(phi, dtype=float))
    norms = np.linalg.norm(P, axis=0)
    if np.any(np.abs(norms - 1.0) > norm_tol):
        raise ValueError("Phi columns must have unit norm")
    k = P.shape[1]
    return float(np.linalg.norm(np.eye(k) - P.T @ a.apply(P)))


def rand_index(p1, p2) -> float:
    """Fraction of node pairs on which two partitions agree (together or apart)."""
    a = np.asarray(getattr(p1, "labels", p1))
    b = np.asarray(getattr(p2, "labels", p2))
    if a.shape != b.shape:
        raise ValueError("partitions must cover the same nodes")
    n = a.size
    if n < 2:
        return 1.0
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)

    def pairs(x):
        return int(np.sum(x * (x - 1) // 2))

    both = pairs(table)
    same_a = pairs(table.sum(axis=1))
    same_b = pairs(table.sum(axis=0))
    total = n * (n - 1) // 2
    apart = total - same_a - same_b + both
    return (both + apart) / total


# ---------------------------------------------------------------- enumeration


@lru_cache(maxsize=64)
def set_partitions(n: int, k: int) -> np.ndarray:
    """All partitions of ``n`` items into exactly ``k`` non-empty blocks.

    Rows are restricted-growth strings in lexicographic order.
    """
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"exhaustive enumeration capped at n={BRUTE_FORCE_MAX_N}")
    if not 1 <= k <= n:
        return np.empty((0, n), dtype=np.int8)
    out = []
    a = [0] * n

    def rec(i, m):
        # m = number of blocks used so far; need k - m more among n - i slots
        if i == n:
            if m == k:
                out.append(a.copy())
            return
        if k - m > n - i:
            return
        for v in range(min(m + 1, k)):
            a[i] = v
            rec(i + 1, max(m, v + 1))

    a[0] = 0
    rec(1, 1)
    arr = np.array(out, dtype=np.int8)
    arr.setflags(write=False)
    return arr


def _psi_cuts_all(g: WeightedGraph, labels: np.ndarray, k: int) -> np.ndarray:
    B = g.to_dense()
    d = B.sum(axis=1)
    H = np.zeros(labels.shape + (k,))
    np.put_along_axis(H, labels[..., None].astype(np.int64), 1.0, axis=2)
    W = np.einsum("pia,ij,pjb->pab", H, B, H, optimize=True)
    omega = H.transpose(0, 2, 1) @ d
    diag = np.einsum("paa->pa", W)
    boundary = W.sum(axis=2) - diag
    G = -W / np.sqrt(omega[:, :, None] * omega[:, None, :])
    idx = np.arange(k)
    G[:, idx, idx] = boundary / omega
    return np.sqrt(np.sum(G**2, axis=(1, 2)))


def brute_force_min_psi_cut(g: WeightedGraph, k: int):
    """Exhaustive minimum of the Psi-cut over all k-partitionings; ``(Partition, value)``.

    Ties resolve to the lexicographically smallest restricted-growth string.
    """
    if g.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {g.n}")
    if np.any(degrees(g).degrees == 0):
        raise DegeneratePartError("graph has isolated nodes")
    labels = set_partitions(g.n, k)
    vals = _psi_cuts_all(g, labels, k)
    best = int(np.argmin(vals))
    return Partition(labels[best], k), float(vals[best])


def cheeger_constant(g: WeightedGraph):
    """Exact ``h_G`` by enumerating all bipartitions; returns ``(subset, h)``."""
    n = g.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if n < 2:
        raise ValueError("need at least two nodes")
    B = g.to_dense()
    d = B.sum(axis=1)
    # node n-1 fixed outside R; masks range over the other 2^(n-1) - 1 nonempty subsets
    masks = np.arange(1, 2 ** (n - 1))
    S = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    volR = S @ d
    cut = np.einsum("pi,ij,pj->p", S, B, 1.0 - S, optimize=True)
    denom = np.minimum(volR, d.sum() - volR)
    h = cut / denom
    best = int(np.argmin(h))
    return tuple(np.flatnonzero(S[best]).tolist()), float(h[best])


# ---------------------------------------------------------------- Cheeger bounds


@dataclass(frozen=True)
class PhiBound:
    lhs: float
    rhs: float
    delta_norm: float
    s_min: float
    phi_cut: float
    applicable: bool

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs


def cheeger_phi_bound(X, factor: PhiFactorization, a: NormalizedOperator, lk: float) -> PhiBound:
    """Evaluate both sides of the approximate lower Cheeger bound for ``Phi``-cut.

    ``lhs = s_min^4 Phicut^2 / (1 + 4 ||Delta^T A X||)`` with
    ``Delta = X - Phi S Q^T``; ``rhs = L_k``. The bound only holds up to
    ``O(||Delta||^2)``, so this reports rather than asserts. ``applicable``
    is False when ``Phi`` has negative entries.
    """
    X = np.asarray(X, dtype=float)
    delta = X - factor.product()
    s_min = float(factor.s.min())
    pc = phi_cut(a, factor.phi)
    w = float(np.linalg.norm(delta.T @ a.apply(X)))
    lhs = s_min**4 * pc**2 / (1.0 + 4.0 * w)
    return PhiBound(lhs, float(lk), float(np.linalg.norm(delta)), s_min, pc,
                    factor.negatives_count == 0 and lk < 1)


@dataclass(frozen=True)
class TwoWayCheeger:
    lambda2: float
    h_upper: float
    h_exact: float | None
    upper_ok: bool
    lower_ok: bool | None

    @property
    def ok(self) -> bool:
        return self.upper_ok and self.lower_ok is not False


def two_way_cheeger_check(g: WeightedGraph, eig_tol: float = 1e-10, slack: float = 1e-12) -> TwoWayCheeger:
    """Check ``h^2/2 < 1 - lambda_2 <= 2h``.

    The sweep conductance bounds ``h_G`` from above, so only the right-hand
    inequality is checked for it; for small graphs ``h_G`` is computed
    exactly and both sides are checked. ``slack`` absorbs rounding only
    (equality occurs, e.g. on even complete graphs).
    """
    from .eigen import top_k_eigenpairs
    from .graph import connected_components, normalize
    from .twoway import fiedler_sweep

    if connected_components(g).k != 1:
        raise ValueError("graph is disconnected; split it with connected_components first")
    basis = top_k_eigenpairs(normalize(g), 2, tol=eig_tol, gap_warn_threshold=0.0)
    lam2 = float(basis.eigenvalues[1])
    sweep = fiedler_sweep(g, window="full", basis=basis)
    gap = 1.0 - lam2
    upper_ok = gap <= 2.0 * sweep.h_value + slack
    h_exact = lower_ok = None
    if g.n <= BRUTE_FORCE_MAX_N:
        _, h_exact = cheeger_constant(g)
        lower_ok = (h_exact**2 / 2.0 < gap + slack) and (gap <= 2.0 * h_exact + slack)
    return TwoWayCheeger(lam2, sweep.h_value, h_exact, upper_ok, lower_ok)
