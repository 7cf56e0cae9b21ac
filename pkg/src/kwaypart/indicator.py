"""Semi-sparse orthogonal approximation ``X ~ Psi Q^T`` of an eigenvector basis.

``Psi`` has exactly one nonzero per row (indicator form) and ``Q`` is
orthogonal. The nonzero pattern of ``Psi`` is the partition.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .eigen import SpectralBasis, top_k_eigenpairs
from .errors import DegenerateRowError, EmptyPartError, IllPosedInitError
from .graph import NormalizedOperator, Partition

METHODS = ("cpqr", "sso", "qr-sso")


class NonUniqueProcrustesWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class IndicatorMatrix:
    """Row ``i`` holds ``values[i]`` in column ``columns[i]`` and zeros elsewhere."""

    columns: np.ndarray
    values: np.ndarray
    k: int

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=np.int64)
        vals = np.asarray(self.values, dtype=float)
        if cols.shape != vals.shape or cols.ndim != 1:
            raise ValueError("columns and values must be vectors of equal length")
        if cols.size and (cols.min() < 0 or cols.max() >= self.k):
            raise ValueError("column index out of range")
        if np.any(vals == 0):
            raise ValueError("indicator entries must be nonzero")
        empty = np.flatnonzero(np.bincount(cols, minlength=self.k) == 0)
        if empty.size:
            raise EmptyPartError(f"columns {empty.tolist()} of the indicator matrix are empty", empty)
        cols.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_dense(cls, M) -> "IndicatorMatrix":
        M = np.asarray(M, dtype=float)
        nz = M != 0
        if np.any(nz.sum(axis=1) != 1):
            raise ValueError("matrix is not in indicator form (need one nonzero per row)")
        cols = np.argmax(nz, axis=1)
        return cls(cols, M[np.arange(M.shape[0]), cols], M.shape[1])

    @property
    def n(self) -> int:
        return self.columns.size

    @property
    def shape(self):
        return (self.n, self.k)

    def to_dense(self) -> np.ndarray:
        M = np.zeros((self.n, self.k))
        M[np.arange(self.n), self.columns] = self.values
        return M

    def column_norms(self) -> np.ndarray:
        return np.sqrt(np.bincount(self.columns, weights=self.values**2, minlength=self.k))

    def to_partition(self) -> Partition:
        return Partition(self.columns, self.k)

    def same_pattern(self, other: "IndicatorMatrix") -> bool:
        return self.k == other.k and np.array_equal(self.columns, other.columns)


def nearest_indicator(Y) -> IndicatorMatrix:
    """Closest indicator-form matrix: keep the largest-magnitude entry of each row.

    Ties go to the smallest column index.
    """
    Y = np.asarray(Y, dtype=float)
    absY = np.abs(Y)
    cols = np.argmax(absY, axis=1)
    rows = np.arange(Y.shape[0])
    zero = np.flatnonzero(absY[rows, cols] == 0)
    if zero.size:
        raise DegenerateRowError(f"rows {zero[:10].tolist()} are entirely zero")
    return IndicatorMatrix(cols, Y[rows, cols], Y.shape[1])


def transpose_times(psi: IndicatorMatrix, X) -> np.ndarray:
    """``Psi^T X`` without densifying ``Psi``."""
    X = np.asarray(X, dtype=float)
    out = np.zeros((psi.k, X.shape[1]))
    np.add.at(out, psi.columns, psi.values[:, None] * X)
    return out


def procrustes(X, psi: IndicatorMatrix) -> np.ndarray:
    """Orthogonal ``Q`` minimizing ``||X - Psi Q^T||``: ``Q = V U^T`` for ``Psi^T X = U S V^T``."""
    M = transpose_times(psi, X)
    U, s, Vt = np.linalg.svd(M)
    if s[-1] <= 1e-12 * max(s[0], 1.0):
        warnings.warn("Psi^T X is rank deficient; Procrustes solution is not unique",
                      NonUniqueProcrustesWarning, stacklevel=2)
    return Vt.T @ U.T


def objective(X, psi: IndicatorMatrix, Q) -> float:
    """``r(Psi, Q) = 1/2 ||X Q - Psi||^2``."""
    return 0.5 * float(np.linalg.norm(np.asarray(X) @ Q - psi.to_dense()) ** 2)


def relative_residual(X, psi: IndicatorMatrix, Q) -> float:
    X = np.asarray(X)
    return float(np.linalg.norm(X @ Q - psi.to_dense()) / np.linalg.norm(X))


def grad_q_norm(X, psi: IndicatorMatrix, Q) -> float:
    """Norm of the Riemannian gradient of ``r`` in ``Q``: ``1/2 ||C - C^T||``, ``C = Psi^T X Q``."""
    C = transpose_times(psi, np.asarray(X) @ Q)
    return 0.5 * float(np.linalg.norm(C - C.T))


def grad_psi(X, psi: IndicatorMatrix, Q) -> np.ndarray:
    """Gradient of ``r`` in ``Psi`` restricted to the fixed nonzero pattern."""
    Y = np.asarray(X) @ Q
    G = np.zeros(psi.shape)
    rows = np.arange(psi.n)
    G[rows, psi.columns] = psi.values - Y[rows, psi.columns]
    return G


@dataclass(frozen=True, eq=False)
class SsoResult:
    psi: IndicatorMatrix
    q: np.ndarray
    residual: float
    grad_q_norm: float
    iters_pre: int
    iters_post: int
    converged: bool
    history: list = field(default_factory=list)

    @property
    def iterations(self) -> str:
        return f"{self.iters_pre}/{self.iters_post}"


def sso(X, psi0: IndicatorMatrix, grad_tol: float = 1e-5, max_iters: int = 100) -> SsoResult:
    """Alternate Procrustes and nearest-indicator steps.

    Stops once an iteration leaves the nonzero pattern unchanged and the
    ``Q``-gradient norm is at most ``grad_tol``. ``history`` records the
    objective after every half-step. ``iters_pre`` counts iterations up to
    the one where the pattern settled for good, ``iters_post`` the rest.
    """
    if grad_tol <= 0:
        raise ValueError("grad_tol must be positive")
    X = np.asarray(X, dtype=float)
    psi = psi0
    history = []
    settled_at = None
    g = np.inf
    Q = None
    it = 0
    for it in range(1, max_iters + 1):
        Q = procrustes(X, psi)
        history.append(objective(X, psi, Q))
        try:
            new = nearest_indicator(X @ Q)
        except EmptyPartError as exc:
            raise EmptyPartError("SSO step emptied a part", exc.columns, iteration=it) from None
        history.append(objective(X, new, Q))
        stable = new.same_pattern(psi)
        if not stable:
            settled_at = None
        elif settled_at is None:
            settled_at = it
        psi = new
        g = grad_q_norm(X, psi, Q)
        if stable and g <= grad_tol:
            return SsoResult(psi, Q, relative_residual(X, psi, Q), g, settled_at, it - settled_at,
                             True, history)
    pre = settled_at if settled_at is not None else it
    return SsoResult(psi, Q, relative_residual(X, psi, Q), g, pre, it - pre, False, history)


def cpqr_init(X):
    """Starting approximation from column-pivoted QR of ``X^T`` and a polar factor.

    Returns ``(Psi0, Q0)``.
    """
    X = np.asarray(X, dtype=float)
    k = X.shape[1]
    _, piv = scipy.linalg.qr(X.T, mode="r", pivoting=True)
    Z1 = X[piv[:k]].T
    U, s, Vt = np.linalg.svd(Z1)
    if s[-1] <= 1e-12:
        raise IllPosedInitError(f"selected {k}x{k} block is singular (sigma_min={s[-1]:.2e})")
    Q0 = U @ Vt
    return nearest_indicator(X @ Q0), Q0


@dataclass(frozen=True, eq=False)
class PhiFactorization:
    """``Psi Q^T = Phi S Q^T`` with unit-norm indicator columns and ``s`` descending."""

    phi: IndicatorMatrix
    s: np.ndarray
    q: np.ndarray
    negatives_count: int
    order: np.ndarray

    def product(self) -> np.ndarray:
        return (self.phi.to_dense() * self.s) @ self.q.T


def factorize_phi(psi: IndicatorMatrix, Q) -> PhiFactorization:
    norms = psi.column_norms()
    if np.any(norms == 0):
        raise EmptyPartError("zero column in indicator matrix", np.flatnonzero(norms == 0))
    order = np.argsort(-norms, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    cols = rank[psi.columns]
    s = norms[order]
    vals = psi.values / norms[psi.columns]
    phi = IndicatorMatrix(cols, vals, psi.k)
    return PhiFactorization(phi, s, np.asarray(Q)[:, order], int(np.sum(vals < 0)), order)


class PartitionOutcome(NamedTuple):
    partition: Partition
    sso: SsoResult
    phi: PhiFactorization
    basis: SpectralBasis


def factor_basis(X, method: str = "qr-sso", grad_tol: float = 1e-5, max_iters: int = 100) -> SsoResult:
    """Run one of the three indicator factorizations on an eigenvector basis."""
    X = np.asarray(X, dtype=float)
    if method == "cpqr":
        psi, Q = cpqr_init(X)
        g = grad_q_norm(X, psi, Q)
        return SsoResult(psi, Q, relative_residual(X, psi, Q), g, 0, 0, g <= grad_tol)
    if method == "sso":
        return sso(X, nearest_indicator(X), grad_tol, max_iters)
    if method == "qr-sso":
        psi, _ = cpqr_init(X)
        return sso(X, psi, grad_tol, max_iters)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def partition_graph(a: NormalizedOperator, k: int, method: str = "qr-sso", *, grad_tol: float = 1e-5,
                    max_iters: int = 100, eig_tol: float = 1e-8, eig_max_iters: int = 1000,
                    seed: int | None = 0, basis: SpectralBasis | None = None) -> PartitionOutcome:
    """Spectral k-way partitioning of the graph behind ``a``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if basis is None:
        basis = top_k_eigenpairs(a, k, tol=eig_tol, max_iters=eig_max_iters, seed=seed)
    try:
        res = factor_basis(basis.X, method, grad_tol, max_iters)
    except EmptyPartError as exc:
        err = EmptyPartError(f"{method} with k={k} produced an empty part: {exc}", exc.columns)
        err.iteration = exc.iteration
        raise err from None
    phi = factorize_phi(res.psi, res.q)
    return PartitionOutcome(phi.phi.to_partition(), res, phi, basis)
