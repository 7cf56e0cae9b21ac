"""Top eigenpairs of the normalized adjacency operator.

The sparse path is a block Lanczos method with full reorthogonalization and
thick restart. Block size is ``k + 1``, so eigenvalue 1 of multiplicity up
to ``k + 1`` (a graph with that many components) is resolved.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .graph import NormalizedOperator


class SpectralGapWarning(UserWarning):
    """``lambda_k - lambda_{k+1}`` is small: the invariant subspace is ill-conditioned."""


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    k: int
    eigenvalues: np.ndarray
    X: np.ndarray
    lambda_next: float | None
    residual_norms: np.ndarray
    iterations: int = 0
    gap_warning: bool = False

    @property
    def gap(self) -> float | None:
        if self.lambda_next is None:
            return None
        return float(self.eigenvalues[-1] - self.lambda_next)


def fix_signs(X: np.ndarray) -> np.ndarray:
    """Flip columns so each column's largest-magnitude entry is positive."""
    X = np.array(X, dtype=float, copy=True)
    if X.size == 0:
        return X
    idx = np.argmax(np.abs(X), axis=0)
    signs = np.sign(X[idx, np.arange(X.shape[1])])
    signs[signs == 0] = 1.0
    return X * signs


def _orthonormalize_against(W, V, rng):
    """Orthogonalize block ``V`` against orthonormal ``W`` and itself (CGS2).

    Columns that vanish are replaced by random directions so the block keeps
    its width.
    """
    n, b = V.shape
    out = np.empty((n, b))
    basis = W
    for j in range(b):
        v = V[:, j].copy()
        norm0 = np.linalg.norm(v)
        for attempt in range(4):
            for _ in range(2):
                if basis.shape[1]:
                    v -= basis @ (basis.T @ v)
                if j:
                    v -= out[:, :j] @ (out[:, :j].T @ v)
            nv = np.linalg.norm(v)
            if nv > 1e-10 * max(norm0, 1.0) and nv > 1e-250:
                break
            v = rng.standard_normal(n)
            norm0 = np.linalg.norm(v)
        else:
            raise ConvergenceError("could not extend Krylov basis")
        out[:, j] = v / nv
    return out


def _dense_eigh(a: NormalizedOperator, nev: int):
    vals, vecs = np.linalg.eigh(a.to_dense())
    order = np.argsort(-vals, kind="stable")[:nev]
    vals = vals[order]
    vecs = vecs[:, order]
    res = np.linalg.norm(a.apply(vecs) - vecs * vals, axis=0)
    return vals, vecs, res


def top_k_eigenpairs(a: NormalizedOperator, k: int, tol: float = 1e-8, max_iters: int = 1000,
                     seed: int | None = 0, basis_size: int | None = None,
                     gap_warn_threshold: float = 1e-3, dense: bool | None = None) -> SpectralBasis:
    """Compute the ``k`` largest eigenpairs of ``a`` plus an estimate of the next one.

    ``max_iters`` bounds the number of restart cycles; ``tol`` bounds each
    residual ``||A x - lambda x||``. ``dense`` forces (True) or forbids (False)
    the dense path; by default it is used whenever the Krylov basis would
    cover the whole space.
    """
    n = a.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    nev = min(k + 1, n)
    b = nev
    if basis_size is None:
        basis_size = max(nev + 3 * b, 50)
    m = max(basis_size, nev + b)
    use_dense = dense if dense is not None else (m >= n or k == n)
    if use_dense:
        vals, vecs, res = _dense_eigh(a, nev)
        iters = 0
    else:
        vals, vecs, res, iters = _block_lanczos(a, nev, b, m, tol, max_iters, seed, k)
    X = fix_signs(vecs[:, :k])
    eigenvalues = vals[:k].copy()
    lam_next = float(vals[k]) if nev > k else None
    residuals = np.linalg.norm(a.apply(X) - X * eigenvalues, axis=0)
    gap_flag = False
    if lam_next is not None and eigenvalues[-1] - lam_next < gap_warn_threshold:
        gap_flag = True
        warnings.warn(
            f"small spectral gap lambda_k - lambda_k+1 = {eigenvalues[-1] - lam_next:.3g}",
            SpectralGapWarning, stacklevel=2)
    return SpectralBasis(k, eigenvalues, X, lam_next, residuals, iters, gap_flag)


def _block_lanczos(a, nev, b, m, tol, max_iters, seed, k):
    n = a.n
    rng = np.random.default_rng(seed)
    W = np.empty((n, 0))
    AW = np.empty((n, 0))
    pending = rng.standard_normal((n, b))
    best = None
    for cycle in range(1, max_iters + 1):
        while W.shape[1] + b <= m:
            V = _orthonormalize_against(W, pending, rng)
            AV = a.apply(V)
            W = np.hstack([W, V])
            AW = np.hstack([AW, AV])
            pending = AV
        H = W.T @ AW
        H = 0.5 * (H + H.T)
        theta, S = np.linalg.eigh(H)
        order = np.argsort(-theta, kind="stable")
        theta = theta[order]
        S = S[:, order]
        Y = W @ S[:, :nev]
        AY = AW @ S[:, :nev]
        res = np.linalg.norm(AY - Y * theta[:nev], axis=0)
        if best is None or res[:k].max() < best[2][:k].max():
            best = (theta[:nev], Y, res)
        if res[:k].max() <= tol and res[nev - 1] <= max(tol, 1e-6):
            return theta[:nev], Y, res, cycle
        # Next Krylov block: residual of the last block against the whole basis.
        pending = pending - W @ (W.T @ pending)
        keep = min(m - b, max(nev + b, (m - b) // 2 + nev // 2))
        keep = max(keep, nev)
        W = W @ S[:, :keep]
        AW = AW @ S[:, :keep]
    raise ConvergenceError(
        f"Lanczos did not converge in {max_iters} restarts (max residual {best[2][:k].max():.3g})",
        residuals=best[2])


def compute_lk(eigenvalues) -> float:
    """Distance to k-partitionability, ``sqrt(sum_{nu>=2} (1 - lambda_nu)^2)``."""
    lam = np.asarray(eigenvalues, dtype=float)
    return float(np.sqrt(np.sum((1.0 - lam[1:]) ** 2)))


def subspace_objective(a: NormalizedOperator, Y, ortho_tol: float = 1e-8) -> float:
    """Frobenius norm of ``I - Y^T A Y`` for column-orthonormal ``Y``."""
    Y = np.asarray(Y, dtype=float)
    k = Y.shape[1]
    if np.linalg.norm(Y.T @ Y - np.eye(k)) > ortho_tol:
        raise ValueError("Y must have orthonormal columns")
    return float(np.linalg.norm(np.eye(k) - Y.T @ a.apply(Y)))
