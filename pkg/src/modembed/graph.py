"""Sampled graphs and the implicit modularity operator.

A sampled graph is a symmetric bivariate probability distribution p(u, w)
over node pairs: nonnegative entries summing to one, with equal row and
column marginals.  The modularity matrix is the covariance

    q(u, w) = p(u, w) - p_U(u) * p_W(w),

which has zero row and column sums.  It is never materialized densely on
the hot path: the sparse part p and the rank-one part p_U p_W^T are kept
separate, so applying Q to a matrix costs O((n + m) K).
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

__all__ = [
    "SampledGraph",
    "ModularityMatrix",
    "MarginalAggregate",
    "from_edge_list",
    "from_similarity",
    "from_bivariate",
    "load_edge_list",
    "save_edge_list",
]


class SampledGraph:
    """Symmetric pair distribution stored as CSR off-diagonal mass plus a
    diagonal mass vector.

    Attributes:
        n: number of nodes.
        node_labels: list of original labels in index order.
        diag_mass: length-n vector of p(u, u).
        marginal: length-n vector p_U = p_W (equal by symmetry).
    """

    def __init__(self, n, off_diag, diag_mass, node_labels):
        self.n = int(n)
        self._P = sparse.csr_array(off_diag)
        self._P.sort_indices()
        self.diag_mass = np.asarray(diag_mass, dtype=float)
        self.node_labels = list(node_labels)
        self._index = {lab: i for i, lab in enumerate(self.node_labels)}
        row_mass = np.add.reduceat(
            np.append(self._P.data, 0.0), self._P.indptr[:-1]
        )
        row_mass[np.diff(self._P.indptr) == 0] = 0.0
        self.marginal = row_mass + self.diag_mass

    # The two marginals coincide for a symmetric distribution; both names
    # are kept because asymmetric inputs are symmetrized on construction.
    @property
    def marginal_u(self):
        return self.marginal

    @property
    def marginal_w(self):
        return self.marginal

    @property
    def indptr(self):
        return self._P.indptr

    @property
    def indices(self):
        return self._P.indices

    @property
    def data(self):
        return self._P.data

    @property
    def nnz(self):
        """Stored off-diagonal entries (both directions counted)."""
        return self._P.nnz

    @property
    def total_mass(self):
        return float(self._P.data.sum() + self.diag_mass.sum())

    def index_of(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown node label: {label!r}") from None

    def label_of(self, index):
        return self.node_labels[index]

    def pair_mass(self, u, w):
        """p(u, w) by index."""
        self._check_index(u)
        self._check_index(w)
        if u == w:
            return float(self.diag_mass[u])
        s, e = self._P.indptr[u], self._P.indptr[u + 1]
        pos = np.searchsorted(self._P.indices[s:e], w)
        if pos < e - s and self._P.indices[s + pos] == w:
            return float(self._P.data[s + pos])
        return 0.0

    def neighbors(self, u):
        """Indices with positive off-diagonal mass against u."""
        self._check_index(u)
        return self._P.indices[self._P.indptr[u]:self._P.indptr[u + 1]]

    def modularity_matrix(self, diag_zeroed=False):
        return ModularityMatrix(self, diag_zeroed=diag_zeroed)

    def edges(self):
        """Unique undirected positive-mass pairs (u, w) with u < w, plus
        self pairs (u, u) where p(u, u) > 0.  Index order."""
        out = []
        for u in range(self.n):
            if self.diag_mass[u] > 0.0:
                out.append((u, u))
            s, e = self._P.indptr[u], self._P.indptr[u + 1]
            for w in self._P.indices[s:e]:
                if u < w:
                    out.append((u, int(w)))
        return out

    def _check_index(self, u):
        if not 0 <= u < self.n:
            raise IndexError(f"node index {u} out of range [0, {self.n})")


class MarginalAggregate:
    """Running aggregate S[k] = sum_w p_W(w) h[w, k].

    Lets a single row's expected covariance be computed from its sparse
    neighborhood plus this K-vector instead of a full pass over nodes.
    Kept in sync incrementally as assignment rows change.
    """

    def __init__(self, marginal, H):
        self.marginal = marginal
        self.S = marginal @ H

    def update(self, u, delta_row):
        self.S += self.marginal[u] * delta_row


class ModularityMatrix:
    """Implicit covariance operator q = p - p_U p_W^T for a sampled graph.

    With diag_zeroed=True the diagonal is treated as exactly zero, as the
    sequential clustering updates require; the underlying graph is shared,
    so the flagged views are cheap.
    """

    def __init__(self, graph, diag_zeroed=False):
        self.graph = graph
        self.diag_zeroed = bool(diag_zeroed)

    @property
    def n(self):
        return self.graph.n

    @property
    def marginal(self):
        return self.graph.marginal

    def zero_diagonal(self):
        if self.diag_zeroed:
            return self
        return ModularityMatrix(self.graph, diag_zeroed=True)

    def full_diagonal(self):
        if not self.diag_zeroed:
            return self
        return ModularityMatrix(self.graph, diag_zeroed=False)

    def covariance(self, u, w):
        """q(u, w) = p(u, w) - p_U(u) p_W(w); zero on the diagonal when
        the flag is set."""
        if u == w and self.diag_zeroed:
            self.graph._check_index(u)
            return 0.0
        pi = self.graph.marginal
        return self.graph.pair_mass(u, w) - float(pi[u] * pi[w])

    def diag(self):
        """q(u, u) for all u, honoring the flag."""
        if self.diag_zeroed:
            return np.zeros(self.n)
        return self.graph.diag_mass - self.graph.marginal ** 2

    def trace(self):
        return float(self.diag().sum())

    def apply(self, H):
        """Q @ H without materializing Q: sparse part, diagonal mass and
        rank-one correction, summed in fixed (ascending index) order."""
        H = np.asarray(H, dtype=float)
        squeeze = H.ndim == 1
        if squeeze:
            H = H[:, None]
        g = self.graph
        out = g._P @ H
        pi = g.marginal
        out -= np.outer(pi, pi @ H)
        if self.diag_zeroed:
            out += (pi ** 2)[:, None] * H
        else:
            out += g.diag_mass[:, None] * H
        return out[:, 0] if squeeze else out

    def make_aggregate(self, H):
        return MarginalAggregate(self.graph.marginal, H)

    def row_cost(self, u):
        """Stored entries touched when forming row u's covariance."""
        g = self.graph
        return int(g.indptr[u + 1] - g.indptr[u])

    def spectral_shift(self):
        """A bound c >= -lambda_min, from row absolute sums: each row of
        q is dominated by p's row mass plus the rank-one row mass, both
        at most the marginal."""
        return 2.0 * float(self.graph.marginal.max())

    def row_covariance(self, H, agg, u):
        """z[k] = sum_{w != u} q(w, u) h[w, k] from u's sparse row and the
        marginal aggregate; O(deg(u) + K)."""
        g = self.graph
        s, e = g.indptr[u], g.indptr[u + 1]
        z = g.data[s:e] @ H[g.indices[s:e]]
        pi_u = g.marginal[u]
        z -= pi_u * (agg.S - pi_u * H[u])
        return z

    def partition_modularity(self, partition):
        """sum_k q(S_k, S_k) for a hard partition, in O(n + m).

        partition: length-n array of cluster ids (any integers).
        """
        g = self.graph
        part = np.asarray(partition)
        if part.shape != (g.n,):
            raise ValueError(
                f"partition must assign all {g.n} nodes, got shape {part.shape}"
            )
        _, labels = np.unique(part, return_inverse=True)
        rows = np.repeat(np.arange(g.n), np.diff(g.indptr))
        same = labels[rows] == labels[g.indices]
        pair_mass = float(g.data[same].sum()) + float(g.diag_mass.sum())
        cluster_marginal = np.bincount(labels, weights=g.marginal)
        value = pair_mass - float((cluster_marginal ** 2).sum())
        if self.diag_zeroed:
            value -= float((g.diag_mass - g.marginal ** 2).sum())
        return value

    def dense(self):
        """Materialize Q (oracle/debug only); guarded against large n."""
        if self.n > 5000:
            raise ValueError(f"refusing to densify at n={self.n} (> 5000)")
        g = self.graph
        Q = g._P.toarray()
        Q += np.diag(g.diag_mass)
        Q -= np.outer(g.marginal, g.marginal)
        if self.diag_zeroed:
            np.fill_diagonal(Q, 0.0)
        return Q


def _build(n, acc, node_labels):
    """Assemble a SampledGraph from accumulated symmetric weights.

    acc maps (i, j) with i <= j to a positive weight; total weight is
    normalized out so the stored masses sum to one.
    """
    total = sum(acc.values())
    if total <= 0.0:
        raise ValueError("empty graph: total weight is zero")
    diag = np.zeros(n)
    rows, cols, vals = [], [], []
    for (i, j), wt in acc.items():
        if i == j:
            diag[i] = wt / total
        else:
            # Off-diagonal mass splits evenly over the two directions.
            p = wt / (2.0 * total)
            rows.append(i)
            cols.append(j)
            vals.append(p)
            rows.append(j)
            cols.append(i)
            vals.append(p)
    if vals:
        off = sparse.csr_array(
            (np.array(vals, dtype=float),
             (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
            shape=(n, n),
        )
    else:
        off = sparse.csr_array((n, n), dtype=float)
    return SampledGraph(n, off, diag, node_labels)


def from_edge_list(edges, nodes=None):
    """Build a sampled graph from weighted edges.

    Each edge is (u, w) or (u, w, weight) with hashable node labels and
    weight defaulting to 1.0.  Directed duplicates and multi-edges sum;
    the result is symmetrized, p(u, w) = (wt(u, w) + wt(w, u)) / (2 W).
    `nodes` optionally declares labels up front (so isolated nodes exist,
    with zero marginals) and fixes their index order.

    Raises ValueError on negative weights or an effectively empty graph.
    """
    index = {}
    labels = []

    def idx(lab):
        i = index.get(lab)
        if i is None:
            i = len(labels)
            index[lab] = i
            labels.append(lab)
        return i

    if nodes is not None:
        for lab in nodes:
            idx(lab)

    acc = {}
    count = 0
    for edge in edges:
        if len(edge) == 2:
            u, w = edge
            wt = 1.0
        else:
            u, w, wt = edge
            wt = float(wt)
        if wt < 0.0 or not np.isfinite(wt):
            raise ValueError(f"invalid weight {wt!r} on edge ({u!r}, {w!r})")
        count += 1
        i, j = idx(u), idx(w)
        key = (i, j) if i <= j else (j, i)
        acc[key] = acc.get(key, 0.0) + wt
    if count == 0:
        raise ValueError("empty graph: no edges")
    acc = {k: v for k, v in acc.items() if v > 0.0}
    if not acc:
        raise ValueError("empty graph: total weight is zero")
    return _build(len(labels), acc, labels)


def from_similarity(sim, node_labels=None):
    """Map a finite similarity matrix to a sampled graph.

    Asymmetric input is symmetrized as (sim + sim^T) / 2, then shifted by
    its minimum and normalized:

        p(u, w) = (sim(u, w) - min sim) / sum_ij (sim(i, j) - min sim).

    A constant matrix leaves no mass to normalize and is rejected.
    """
    S = np.asarray(sim, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"similarity must be square, got shape {S.shape}")
    if not np.isfinite(S).all():
        raise ValueError("similarity contains non-finite entries")
    S = (S + S.T) / 2.0
    S = S - S.min()
    total = S.sum()
    if total <= 0.0:
        raise ValueError("degenerate similarity: all entries equal")
    return from_bivariate(S / total, node_labels=node_labels)


def from_bivariate(P, node_labels=None):
    """Build a sampled graph directly from a dense symmetric mass matrix
    (nonnegative, summing to one within 1e-12)."""
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    if P.shape != (n, n):
        raise ValueError(f"mass matrix must be square, got shape {P.shape}")
    if not np.allclose(P, P.T, rtol=0.0, atol=1e-15):
        raise ValueError("mass matrix must be symmetric")
    if (P < 0.0).any():
        raise ValueError("mass matrix has negative entries")
    if abs(P.sum() - 1.0) > 1e-12:
        raise ValueError(f"mass matrix sums to {P.sum()!r}, expected 1")
    if node_labels is None:
        node_labels = list(range(n))
    diag = np.diag(P).copy()
    off = sparse.csr_array(P - np.diag(diag))
    return SampledGraph(n, off, diag, node_labels)


def load_edge_list(path, nodes=None):
    """Read a whitespace-separated edge list: `u w [weight]` per line,
    UTF-8, lines whose first nonblank character is `#` ignored.  Labels
    are arbitrary strings."""
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) == 2:
                edges.append((parts[0], parts[1]))
            elif len(parts) == 3:
                try:
                    wt = float(parts[2])
                except ValueError:
                    raise ValueError(
                        f"{path}:{lineno}: bad weight {parts[2]!r}"
                    ) from None
                edges.append((parts[0], parts[1], wt))
            else:
                raise ValueError(
                    f"{path}:{lineno}: expected 'u w [weight]', got {len(parts)} fields"
                )
    return from_edge_list(edges, nodes=nodes)


def save_edge_list(path, graph):
    """Write unique undirected pairs with their total pair mass as weight.

    The absolute scale is the stored probability mass, so a round trip
    reproduces the same distribution (weights renormalize to themselves).
    """
    with open(path, "w", encoding="utf-8") as fh:
        for u, w in graph.edges():
            if u == w:
                wt = graph.diag_mass[u]
            else:
                wt = 2.0 * graph.pair_mass(u, w)
            fh.write(f"{graph.label_of(u)}\t{graph.label_of(w)}\t{wt:.17g}\n")
