"""Pixel-graph construction and the three centrality feature maps.

A W x H image becomes an undirected graph on n = W*H vertices (row-major
pixel order, vertex i sits at column i % W, row i // W). Pixels i and j are
joined when all of the following hold:

* Euclidean grid distance d(i, j) <= r
* weight (d^2 + r^2 * |I_i - I_j| / 255) / (2 r^2) <= t
* |g_i - g_j| <= s

with I the gray intensity and g the Sobel gradient magnitude, both on the
0-255 scale. Construction enumerates every unordered pair i < j of the upper
triangle exactly once and keeps the enumerated-pair count on the returned
graph, so the traversal cost is n(n-1)/2 pair evaluations, never n^2.

The per-vertex maps derived from the graph:

* clustering coefficient  C(i) = 2 c_i / (k_i (k_i - 1)),   C, values in [0, 1]
* degree energy           D(i) = (k_i / (n - 1))^2,          values in [0, 1]
* eigenvector entropy     E(i) = -x_i * sum_{x_j > 0} log2(x_j)
  with x = (1/lambda_max) * L u for the dominant eigenpair (lambda_max, u)
  of the adjacency matrix, u unit-norm and entrywise non-negative.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.sparse.linalg import eigsh

from .errors import DimensionMismatch, EigenNonConvergence
from .imgproc import round_half_up

MAX_POWER_ITERATIONS = 10_000
EIGEN_RESIDUAL_TOL = 1e-8
# per-component iteration target; the combined vector then meets the 1e-8
# contract with a wide margin. Near machine precision on purpose: tiny Perron
# entries make the entropy's log2 terms amplify eigenvector error by 1/entry
_COMPONENT_TOL = 5e-13
# components whose dominant eigenvalue ties the global maximum within this
# relative tolerance all contribute to the eigenvector
_EIGEN_TIE_RTOL = 1e-12
# components above this size go straight to the Lanczos solver: lattice-like
# pixel graphs have near-degenerate leading eigenvalues, which stalls any
# plain power scheme
_LANCZOS_SIZE = 128

_PAIR_BLOCK_ROWS = 128


@dataclass(frozen=True)
class CnParams:
    """Graph thresholds plus the LBP neighbor count carried for configuration."""

    r: float = 3.0
    t: float = 0.315
    s: float = 5.0
    p: int = 8

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError(f"radius r must be positive, got {self.r}")
        if not 0.0 < self.t <= 1.0:
            raise ValueError(f"similarity threshold t must be in (0, 1], got {self.t}")
        if self.s < 0:
            raise ValueError(f"gradient threshold s must be non-negative, got {self.s}")
        if self.p != 8:
            raise ValueError(f"only P=8 neighborhoods are supported, got {self.p}")


@dataclass
class PixelGraph:
    """Sparse symmetric adjacency in CSR form, neighbor lists sorted per vertex."""

    width: int
    height: int
    indptr: np.ndarray
    indices: np.ndarray
    examined_pairs: int

    @property
    def vertex_count(self):
        return self.width * self.height

    @property
    def degrees(self):
        return np.diff(self.indptr)

    def neighbors(self, i):
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    @property
    def edge_count(self):
        return self.indices.size // 2

    def edges(self):
        """(m, 2) array of undirected edges with i < j, lexicographically sorted."""
        rows = np.repeat(np.arange(self.vertex_count, dtype=np.int64), self.degrees)
        keep = rows < self.indices
        return np.stack([rows[keep], self.indices[keep]], axis=1)

    def to_csr(self):
        n = self.vertex_count
        data = np.ones(self.indices.size, dtype=np.float64)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(n, n))


def build_graph(gsi, goi, params):
    """Evaluate the edge rule on every unordered pixel pair of the upper triangle."""
    gsi = np.asarray(gsi)
    goi = np.asarray(goi)
    if gsi.shape != goi.shape:
        raise DimensionMismatch(
            f"gray plane {gsi.shape} and gradient plane {goi.shape} differ"
        )
    height, width = gsi.shape
    n = width * height

    idx = np.arange(n, dtype=np.int64)
    xs = (idx % width).astype(np.float64)
    ys = (idx // width).astype(np.float64)
    inten = gsi.ravel().astype(np.float64)
    grad = goi.ravel().astype(np.float64)

    r2 = float(params.r) * float(params.r)
    t = float(params.t)
    s = float(params.s)

    examined = 0
    src_parts = []
    dst_parts = []
    for i0 in range(0, max(n - 1, 0), _PAIR_BLOCK_ROWS):
        i1 = min(i0 + _PAIR_BLOCK_ROWS, n - 1)
        block = np.arange(i0, i1, dtype=np.int64)
        counts = n - 1 - block
        i_arr = np.repeat(block, counts)
        j_arr = np.concatenate([idx[i + 1 :] for i in range(i0, i1)])
        examined += int(j_arr.size)

        dx = xs[j_arr] - xs[i_arr]
        dy = ys[j_arr] - ys[i_arr]
        d2 = dx * dx + dy * dy
        di = np.abs(inten[j_arr] - inten[i_arr])
        wgt = (d2 + r2 * di / 255.0) / (2.0 * r2)
        dg = np.abs(grad[j_arr] - grad[i_arr])
        keep = (d2 <= r2) & (wgt <= t) & (dg <= s)
        src_parts.append(i_arr[keep])
        dst_parts.append(j_arr[keep])

    src = np.concatenate(src_parts) if src_parts else np.empty(0, dtype=np.int64)
    dst = np.concatenate(dst_parts) if dst_parts else np.empty(0, dtype=np.int64)

    rows = np.concatenate([src, dst])
    cols = np.concatenate([dst, src])
    order = np.lexsort((cols, rows))
    rows = rows[order]
    cols = cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return PixelGraph(
        width=width,
        height=height,
        indptr=indptr,
        indices=cols,
        examined_pairs=examined,
    )


def vertex_stats(graph):
    """Per-vertex degree k_i and count c_i of edges among the neighbors of i."""
    k = graph.degrees.astype(np.int64)
    if graph.indices.size == 0:
        return k, np.zeros_like(k)
    adj = graph.to_csr()
    # (A @ A)_{uv} counts common neighbors; restricted to edges and row-summed
    # it counts ordered neighbor pairs of u that are themselves adjacent
    tri = (adj @ adj).multiply(adj)
    c = np.asarray(tri.sum(axis=1)).ravel() / 2.0
    return k, round_half_up(c).astype(np.int64)


def clustering_map(graph):
    """C(i) = 2 c_i / (k_i (k_i - 1)); vertices with k_i <= 1 get 0."""
    k, c = vertex_stats(graph)
    vals = np.zeros(graph.vertex_count, dtype=np.float64)
    m = k >= 2
    vals[m] = 2.0 * c[m] / (k[m] * (k[m] - 1.0))
    return vals.reshape(graph.height, graph.width)


def degree_energy_map(graph):
    """D(i) = (k_i / (n - 1))^2."""
    k = graph.degrees.astype(np.float64)
    vals = (k / (graph.vertex_count - 1.0)) ** 2
    return vals.reshape(graph.height, graph.width)


@dataclass
class EigenData:
    lambda_max: float
    u: np.ndarray
    lam: float
    residual: float
    iterations: int


def _power_iteration(adj, max_iter, tol):
    """Dominant eigenpair of one connected component by power iteration.

    Iterates on A + I: same eigenvectors, shifted spectrum, so bipartite
    components (whose spectrum contains -lambda_max) converge instead of
    oscillating. The all-ones start keeps every entry strictly positive
    throughout, which is the Perron orientation.
    """
    n = adj.shape[0]
    x = np.full(n, 1.0 / math.sqrt(n))
    for it in range(1, max_iter + 1):
        y = adj @ x
        lam = float(x @ y)
        if float(np.linalg.norm(y - lam * x)) <= tol:
            return x, lam, it
        z = y + x
        x = z / np.linalg.norm(z)
    raise EigenNonConvergence(
        f"power iteration did not reach residual {tol:g} in {max_iter} iterations"
    )


def _lanczos_pair(adj, tol):
    """Dominant eigenpair via restarted Lanczos (deterministic: fixed start).

    Used for components whose spectral gap is too small for plain power
    iteration. The vector is Perron-oriented, stray numerical near-zeros are
    cleared so the entropy log domain matches the component's true support.
    """
    n = adj.shape[0]
    v0 = np.full(n, 1.0 / math.sqrt(n))
    vals, vecs = eigsh(adj, k=1, which="LA", v0=v0, tol=1e-13)
    lam = float(vals[0])
    vec = vecs[:, 0]
    if vec.sum() < 0.0:
        vec = -vec
    floor = 1e-13 * np.abs(vec).max()
    if vec.min() < -floor:
        raise EigenNonConvergence("Lanczos vector is not Perron-orientable")
    vec = np.where(vec <= floor, 0.0, vec)
    vec /= np.linalg.norm(vec)
    return vec, lam


def _component_eigenpair(sub, max_iter, comp_tol):
    n_sub = sub.shape[0]
    iters = 0
    if n_sub > _LANCZOS_SIZE:
        vec, lam_c = _lanczos_pair(sub, comp_tol)
    else:
        try:
            vec, lam_c, iters = _power_iteration(sub, max_iter, comp_tol)
        except EigenNonConvergence:
            if n_sub < 8:
                raise
            vec, lam_c = _lanczos_pair(sub, comp_tol)
    residual = float(np.linalg.norm(sub @ vec - lam_c * vec))
    if residual > max(comp_tol, 1e-10):
        raise EigenNonConvergence(
            f"component residual {residual:g} exceeds {max(comp_tol, 1e-10):g}"
        )
    return vec, lam_c, iters


def eigen_data(graph, max_iter=MAX_POWER_ITERATIONS, tol=EIGEN_RESIDUAL_TOL):
    """Dominant eigenpair of the whole adjacency matrix.

    Solves each connected component independently (power iteration, with a
    Lanczos route for large or slow-converging components) and combines the
    Perron vectors of all components tying the maximal eigenvalue, weighted
    by their overlap with the all-ones start vector. That is the limit the
    whole-graph power iteration converges to, but with exact zeros on
    non-dominant components and no cross-component stalling.
    """
    if graph.indices.size == 0:
        raise ValueError("eigen data is undefined for an edgeless graph")
    n = graph.vertex_count
    adj = graph.to_csr()
    n_comp, comp = csgraph.connected_components(adj, directed=False)

    results = []
    total_iters = 0
    comp_tol = min(_COMPONENT_TOL, tol)
    for c in range(n_comp):
        verts = np.nonzero(comp == c)[0]
        if verts.size < 2:
            continue
        sub = adj[verts][:, verts]
        if sub.nnz == 0:
            continue
        vec, lam_c, iters = _component_eigenpair(sub, max_iter, comp_tol)
        total_iters += iters
        results.append((lam_c, verts, vec))

    lam_star = max(lam_c for lam_c, _, _ in results)
    u = np.zeros(n, dtype=np.float64)
    for lam_c, verts, vec in results:
        if lam_c >= lam_star * (1.0 - _EIGEN_TIE_RTOL):
            u[verts] = float(vec.sum()) * vec
    u /= np.linalg.norm(u)

    y = adj @ u
    lambda_max = float(u @ y)
    residual = float(np.linalg.norm(y - lambda_max * u))
    if residual > tol:
        raise EigenNonConvergence(
            f"combined eigenvector residual {residual:g} exceeds {tol:g}"
        )
    return EigenData(
        lambda_max=lambda_max,
        u=u,
        lam=1.0 / lambda_max,
        residual=residual,
        iterations=total_iters,
    )


def eigen_entropy_map(graph, max_iter=MAX_POWER_ITERATIONS, tol=EIGEN_RESIDUAL_TOL):
    """E(i) = -x_i * sum over strictly positive x_j of log2(x_j).

    x_i = lambda * sum_j e_{i,j} u_j, evaluated literally (it equals u_i at
    convergence). An edgeless graph maps to all zeros by convention.
    """
    if graph.indices.size == 0:
        return np.zeros((graph.height, graph.width), dtype=np.float64)
    ed = eigen_data(graph, max_iter=max_iter, tol=tol)
    x = ed.lam * (graph.to_csr() @ ed.u)
    pos = x > 0.0
    log_sum = float(np.log2(x[pos]).sum()) if np.any(pos) else 0.0
    return (-(x * log_sum)).reshape(graph.height, graph.width)


def quantize_feature_map(values):
    """Min-max rescale to [0, 255] with half-up rounding; constant maps -> 0."""
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError("feature map contains non-finite values")
    lo = values.min()
    hi = values.max()
    if hi <= lo:
        return np.zeros(values.shape, dtype=np.uint8)
    scaled = (values - lo) / (hi - lo) * 255.0
    return round_half_up(scaled).astype(np.uint8)
