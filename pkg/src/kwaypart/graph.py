"""Weighted undirected graphs, ingestion, normalization and test-graph generators."""

from __future__ import annotations

import io
import logging
import re
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.io
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc

from .errors import DegenerateDegreeError, GraphParseError, GraphStructureError

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Symmetric nonnegative adjacency with zero diagonal, stored as CSR.

    Build instances through :meth:`from_edges`; it enforces the invariants
    (no self-loops, strictly positive weights, symmetry).
    """

    adjacency: sp.csr_matrix
    node_labels: tuple | None = None

    @classmethod
    def from_edges(cls, n: int, rows, cols, weights=None, node_labels=None) -> "WeightedGraph":
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        if weights is None:
            weights = np.ones(rows.shape[0])
        weights = np.asarray(weights, dtype=float).ravel()
        if not (rows.shape == cols.shape == weights.shape):
            raise ValueError("rows, cols and weights must have equal length")
        if rows.size and (rows.min() < 0 or cols.min() < 0 or max(rows.max(), cols.max()) >= n):
            raise ValueError(f"edge endpoint out of range for n={n}")
        if np.any(rows == cols):
            raise ValueError("self-loops are not allowed")
        if np.any(~(weights > 0)) or not np.all(np.isfinite(weights)):
            raise ValueError("edge weights must be finite and strictly positive")
        lo = np.minimum(rows, cols)
        hi = np.maximum(rows, cols)
        upper = sp.coo_matrix((weights, (lo, hi)), shape=(n, n)).tocsr()
        upper.sum_duplicates()
        adj = (upper + upper.T).tocsr()
        adj.sort_indices()
        if node_labels is not None:
            node_labels = tuple(node_labels)
            if len(node_labels) != n:
                raise ValueError("node_labels must have one entry per node")
        return cls(adj, node_labels)

    @classmethod
    def from_dense(cls, b) -> "WeightedGraph":
        b = np.asarray(b, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError("adjacency must be square")
        if not np.array_equal(b, b.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(b) != 0):
            raise ValueError("adjacency must have zero diagonal")
        i, j = np.nonzero(np.triu(b, 1))
        return cls.from_edges(b.shape[0], i, j, b[i, j])

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def num_edges(self) -> int:
        return self.adjacency.nnz // 2

    def edges(self):
        """Return ``(i, j, w)`` arrays of the stored edges with ``i < j``, sorted."""
        upper = sp.triu(self.adjacency, k=1).tocoo()
        order = np.lexsort((upper.col, upper.row))
        return upper.row[order].astype(np.int64), upper.col[order].astype(np.int64), upper.data[order]

    def to_dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    def permuted(self, perm) -> "WeightedGraph":
        """Relabel nodes: old node ``perm[new]`` becomes node ``new``."""
        perm = np.asarray(perm)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(perm.size)
        i, j, w = self.edges()
        labels = None if self.node_labels is None else tuple(self.node_labels[p] for p in perm)
        return WeightedGraph.from_edges(self.n, inv[i], inv[j], w, labels)

    def subgraph(self, nodes) -> "WeightedGraph":
        nodes = np.asarray(nodes, dtype=np.int64)
        sub = self.adjacency[nodes][:, nodes]
        i, j = sp.triu(sub, k=1).nonzero()
        w = np.asarray(sub[i, j]).ravel()
        if self.node_labels is None:
            labels = tuple(int(v) for v in nodes)
        else:
            labels = tuple(self.node_labels[v] for v in nodes)
        return WeightedGraph.from_edges(len(nodes), i, j, w, labels)


def disjoint_union(graphs: Sequence[WeightedGraph]) -> WeightedGraph:
    rows, cols, ws = [], [], []
    offset = 0
    for g in graphs:
        i, j, w = g.edges()
        rows.append(i + offset)
        cols.append(j + offset)
        ws.append(w)
        offset += g.n
    return WeightedGraph.from_edges(offset, np.concatenate(rows), np.concatenate(cols), np.concatenate(ws))


@dataclass(frozen=True, eq=False)
class DegreeData:
    degrees: np.ndarray
    volume: float
    isolated: tuple


def degrees(g: WeightedGraph) -> DegreeData:
    d = np.asarray(g.adjacency.sum(axis=1)).ravel()
    iso = tuple(int(i) for i in np.flatnonzero(d == 0))
    return DegreeData(d, float(d.sum()), iso)


@dataclass(frozen=True, eq=False)
class Partition:
    """Labels in ``0..k-1``, every part non-empty."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1:
            raise ValueError("labels must be a vector")
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            raise ValueError(f"labels must lie in 0..{self.k - 1}")
        counts = np.bincount(labels, minlength=self.k)
        if np.any(counts == 0):
            raise ValueError(f"parts {np.flatnonzero(counts == 0).tolist()} are empty")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Accept arbitrary hashable labels; parts are numbered by first appearance."""
        mapping: dict = {}
        out = np.empty(len(labels), dtype=np.int64)
        for i, lab in enumerate(labels):
            out[i] = mapping.setdefault(lab, len(mapping))
        return cls(out, len(mapping))

    @property
    def n(self) -> int:
        return self.labels.size

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    def members(self, part: int) -> np.ndarray:
        return np.flatnonzero(self.labels == part)

    def indicator(self) -> np.ndarray:
        h = np.zeros((self.n, self.k))
        h[np.arange(self.n), self.labels] = 1.0
        return h

    def permuted(self, perm) -> "Partition":
        return Partition(self.labels[np.asarray(perm)], self.k)


def connected_components(g: WeightedGraph) -> Partition:
    k, labels = _cc(g.adjacency, directed=False)
    return Partition(labels, int(k))


class NormalizedOperator:
    """Implicit ``D^{-1/2} B' D^{-1/2}`` with ``B' = (1-tau) B + tau (g g^T - I)``.

    The rank-one part is never formed; it enters ``apply`` as a ``(g^T z) g``
    correction. ``D`` holds the degrees of ``B'``, so the top eigenvalue is 1.
    """

    def __init__(self, graph: WeightedGraph, tau: float = 0.0):
        if not 0.0 <= tau < 1.0:
            raise ValueError("regularization weight must lie in [0, 1)")
        self.graph = graph
        self.tau = float(tau)
        base = degrees(graph).degrees
        n = graph.n
        self.degrees = (1.0 - tau) * base + tau * (n - 1)
        if np.any(self.degrees <= 0):
            raise DegenerateDegreeError(np.flatnonzero(self.degrees <= 0))
        self.inv_sqrt = 1.0 / np.sqrt(self.degrees)
        self._scaled = sp.diags(self.inv_sqrt) @ graph.adjacency @ sp.diags(self.inv_sqrt)
        self._scaled = self._scaled.tocsr()
        if tau:
            self._scaled = (1.0 - tau) * self._scaled

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def shape(self):
        return (self.n, self.n)

    def apply(self, x) -> np.ndarray:
        """Return ``A @ x`` for a vector or an ``n x b`` block."""
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.n:
            raise ValueError(f"dimension mismatch: operator is {self.n}x{self.n}, got {x.shape}")
        y = self._scaled @ x
        if self.tau:
            z = x * (self.inv_sqrt if x.ndim == 1 else self.inv_sqrt[:, None])
            corr = self.tau * (z.sum(axis=0) - z)
            y = y + corr * (self.inv_sqrt if x.ndim == 1 else self.inv_sqrt[:, None])
        return y

    __matmul__ = apply

    def perron_vector(self) -> np.ndarray:
        v = np.sqrt(self.degrees)
        return v / np.linalg.norm(v)

    def to_dense(self) -> np.ndarray:
        a = self._scaled.toarray()
        if self.tau:
            s = self.inv_sqrt
            a += self.tau * (np.outer(s, s) - np.diag(s * s))
        return a


def normalize(g: WeightedGraph, tau: float = 0.0) -> NormalizedOperator:
    return NormalizedOperator(g, tau)


# ---------------------------------------------------------------- ingestion


def _as_text(source) -> TextIO:
    if isinstance(source, str):
        return io.StringIO(source)
    return source


@dataclass
class EdgeListResult:
    graph: WeightedGraph
    self_loops: int = 0


_N_HEADER = re.compile(r"\s*n=(\d+)\b")


def load_edge_list(source, weighted: bool = True, one_based: bool = False,
                   n: int | None = None) -> EdgeListResult:
    """Parse ``i j [w]`` lines. Duplicates are summed; self-loops are dropped and counted.

    ``source`` is a text stream or a string holding the file contents. With
    ``one_based`` the graph keeps the original 1-based ids as node labels.
    With ``weighted=False`` any third column is ignored. A ``# n=<count>``
    comment (as written by :func:`write_edge_list`) declares trailing isolated
    nodes when ``n`` is not given.
    """
    rows, cols, ws = [], [], []
    loops = 0
    top = -1
    declared = None
    for lineno, raw in enumerate(_as_text(source), start=1):
        line, _, comment = raw.partition("#")
        line = line.strip()
        if declared is None and (m := _N_HEADER.match(comment)):
            declared = int(m.group(1))
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphParseError(f"expected 'i j [w]', got {raw.strip()!r}", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2]) if (weighted and len(parts) == 3) else 1.0
        except ValueError:
            raise GraphParseError(f"non-numeric field in {raw.strip()!r}", lineno) from None
        if one_based:
            i, j = i - 1, j - 1
        if i < 0 or j < 0:
            raise GraphParseError("negative node index", lineno)
        if not (w > 0) or not np.isfinite(w):
            raise GraphParseError(f"edge weight must be positive, got {w}", lineno)
        top = max(top, i, j)
        if i == j:
            loops += 1
            continue
        rows.append(i)
        cols.append(j)
        ws.append(w)
    size = top + 1
    if n is None:
        n = declared
    if n is not None:
        if n < size:
            raise GraphParseError(f"node index {size - 1} exceeds declared n={n}")
        size = n
    if loops:
        log.warning("dropped %d self-loop line(s)", loops)
    labels = tuple(range(1, size + 1)) if one_based else None
    return EdgeListResult(WeightedGraph.from_edges(size, rows, cols, ws, labels), loops)


def load_matrix_market(source, rtol: float = 1e-12) -> WeightedGraph:
    """Read a coordinate Matrix Market file. Diagonal entries are discarded."""
    if isinstance(source, str):
        source = io.BytesIO(source.encode())
    elif isinstance(source, io.TextIOBase):
        source = io.BytesIO(source.read().encode())
    try:
        mat = scipy.io.mmread(source)
    except (ValueError, IndexError, OSError) as exc:
        raise GraphParseError(f"invalid Matrix Market input: {exc}") from None
    if not sp.issparse(mat):
        raise GraphParseError("only coordinate Matrix Market files are supported")
    mat = sp.csr_matrix(mat, dtype=float)
    if mat.shape[0] != mat.shape[1]:
        raise GraphStructureError(f"adjacency must be square, got {mat.shape}")
    mat.setdiag(0)
    mat.eliminate_zeros()
    diff = abs(mat - mat.T)
    scale = abs(mat).max() if mat.nnz else 0.0
    if diff.nnz and diff.max() > rtol * scale:
        raise GraphStructureError("matrix is not symmetric")
    if mat.nnz and mat.data.min() < 0:
        raise GraphStructureError("negative edge weights")
    upper = sp.triu(mat, k=1).tocoo()
    return WeightedGraph.from_edges(mat.shape[0], upper.row, upper.col, upper.data)


def write_edge_list(g: WeightedGraph, stream: TextIO) -> None:
    i, j, w = g.edges()
    stream.write(f"# n={g.n} edges={g.num_edges}\n")
    for a, b, c in zip(i.tolist(), j.tolist(), w.tolist()):
        stream.write(f"{a} {b} {c!r}\n")


# ---------------------------------------------------------------- generators


def path_adjacency(m: int) -> sp.csr_matrix:
    off = np.ones(m - 1)
    return sp.diags([off, off], [-1, 1], format="csr")


def gen_mesh(m: int, beta: float) -> WeightedGraph:
    """Grid with adjacency ``B0 (x) I + beta (I (x) B0)``, ``B0`` the m-node path."""
    if m < 2:
        raise ValueError("side length must be at least 2")
    if not beta > 0:
        raise ValueError("coupling weight must be positive")
    b0 = path_adjacency(m)
    eye = sp.identity(m, format="csr")
    b = (sp.kron(b0, eye, format="csr") + beta * sp.kron(eye, b0, format="csr")).tocoo()
    keep = (b.row < b.col) & (b.data != 0)
    return WeightedGraph.from_edges(m * m, b.row[keep], b.col[keep], b.data[keep])


def gen_block_model(sizes: Iterable[int], p_in: float, p_out: float, w_out: float = 1.0,
                    seed: int | None = 0, w_in: float = 1.0):
    """Planted-partition random graph. Returns ``(graph, planted_partition)``.

    Within-block pairs get an edge of weight ``w_in`` with probability
    ``p_in``; between-block pairs get weight ``w_out`` with probability ``p_out``.
    """
    sizes = [int(s) for s in sizes]
    if not sizes or min(sizes) < 1:
        raise ValueError("every block needs at least one node")
    if not (0 <= p_in <= 1 and 0 <= p_out <= 1):
        raise ValueError("densities must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = labels.size
    iu, ju = np.triu_indices(n, k=1)
    same = labels[iu] == labels[ju]
    prob = np.where(same, p_in, p_out)
    hit = rng.random(iu.size) < prob
    w = np.where(same, w_in, w_out)[hit]
    g = WeightedGraph.from_edges(n, iu[hit], ju[hit], w)
    return g, Partition(labels, len(sizes))


def random_connected_graph(n: int, p: float, rng: np.random.Generator,
                           weighted: bool = False) -> WeightedGraph:
    """Random spanning tree plus independent extra edges; always connected."""
    perm = rng.permutation(n)
    rows, cols = [], []
    for t in range(1, n):
        rows.append(perm[t])
        cols.append(perm[rng.integers(t)])
    tree = set(zip(np.minimum(rows, cols).tolist(), np.maximum(rows, cols).tolist()))
    iu, ju = np.triu_indices(n, k=1)
    extra = rng.random(iu.size) < p
    for a, b in zip(iu[extra].tolist(), ju[extra].tolist()):
        tree.add((a, b))
    edges = sorted(tree)
    i = np.array([e[0] for e in edges], dtype=np.int64)
    j = np.array([e[1] for e in edges], dtype=np.int64)
    w = rng.uniform(0.1, 1.0, size=i.size) if weighted else np.ones(i.size)
    return WeightedGraph.from_edges(n, i, j, w)


def complete_graph(n: int) -> WeightedGraph:
    i, j = np.triu_indices(n, k=1)
    return WeightedGraph.from_edges(n, i, j)


def path_graph(n: int) -> WeightedGraph:
    return WeightedGraph.from_edges(n, np.arange(n - 1), np.arange(1, n))
