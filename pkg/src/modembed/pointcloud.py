"""Dimensionality reduction of point clouds through the same machinery.

Centering a cloud X makes Q = X X^T a covariance-style operator with
zero row sums along the all-ones direction of the lifted feature space,
so the clustering and sphere sweeps apply unchanged: Q is never formed,
only v -> X (X^T v) at O(n L) per apply.  The converged assignment is
orthonormalized exactly as for graphs, and each embedding column is
scored by its energy outside the top principal subspace; columns with
near-zero residual reproduce principal coordinates of the cloud.

An isometric random lift to a higher ambient dimension (orthonormal-row
mixing matrix) lets experiments decouple the ambient dimension from the
intrinsic one without changing the Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import clustering
from .clustering import ClusterConfig
from .embedding import qr_embed
from .sphere import SphereConfig, run_sphere
from .spectral import jacobi_eigh, projection_residual

__all__ = [
    "GramOperator",
    "CoordinateAggregate",
    "ReduceResult",
    "center",
    "embed_lift",
    "weight_iteration",
    "weights_from_assignment",
    "pca_basis",
    "reduce_cloud",
    "concentric_circles",
    "torus_cloud",
    "load_xyz",
    "save_xyz",
]

# Embedding columns at or below this residual carry principal-subspace
# coordinates; the rest are orthogonal-complement padding.
RESIDUAL_SELECT = 1e-3


class CoordinateAggregate:
    """Running W = X^T H, the feature-space image of the assignment.

    The per-row covariance against the implicit Gram operator is then
    W^T x_u minus the row's own diagonal term, at O(L K) per node.
    """

    def __init__(self, X, H):
        self.X = X
        self.W = X.T @ H

    def update(self, u, delta_row):
        self.W += np.outer(self.X[u], delta_row)


class GramOperator:
    """Implicit Q = X X^T over a centered cloud, mirroring the interface
    of the sparse modularity operator (apply, row_covariance, aggregate,
    diagonal handling) so every downstream stage reuses it."""

    def __init__(self, X, diag_zeroed=False):
        self.X = np.asarray(X, dtype=float)
        if self.X.ndim != 2:
            raise ValueError(f"expected an n x L array, got {self.X.shape}")
        self.diag_zeroed = bool(diag_zeroed)
        self._sq = np.einsum("ij,ij->i", self.X, self.X)

    @property
    def n(self):
        return self.X.shape[0]

    def zero_diagonal(self):
        if self.diag_zeroed:
            return self
        return GramOperator(self.X, diag_zeroed=True)

    def full_diagonal(self):
        if not self.diag_zeroed:
            return self
        return GramOperator(self.X, diag_zeroed=False)

    def covariance(self, u, w):
        if u == w and self.diag_zeroed:
            return 0.0
        return float(self.X[u] @ self.X[w])

    def diag(self):
        if self.diag_zeroed:
            return np.zeros(self.n)
        return self._sq.copy()

    def trace(self):
        return float(self.diag().sum())

    def apply(self, H):
        H = np.asarray(H, dtype=float)
        squeeze = H.ndim == 1
        if squeeze:
            H = H[:, None]
        out = self.X @ (self.X.T @ H)
        if self.diag_zeroed:
            out -= self._sq[:, None] * H
        return out[:, 0] if squeeze else out

    def make_aggregate(self, H):
        return CoordinateAggregate(self.X, H)

    def row_covariance(self, H, agg, u):
        return agg.W.T @ self.X[u] - self._sq[u] * H[u]

    def row_cost(self, u):
        return self.X.shape[1]

    def spectral_shift(self):
        # X X^T is positive semidefinite; zeroing the diagonal can push
        # eigenvalues down by at most the largest squared row norm.
        return float(self._sq.max()) if self.diag_zeroed else 0.0

    def dense(self):
        if self.n > 5000:
            raise ValueError(f"refusing to densify at n={self.n} (> 5000)")
        Q = self.X @ self.X.T
        if self.diag_zeroed:
            np.fill_diagonal(Q, 0.0)
        return Q


def center(X):
    """Subtract per-coordinate means; idempotent."""
    X = np.asarray(X, dtype=float)
    return X - X.mean(axis=0, keepdims=True)


def embed_lift(X, L, seed=0):
    """Isometric lift to ambient dimension L via a seeded mixing matrix
    with orthonormal rows, leaving X X^T unchanged."""
    X = np.asarray(X, dtype=float)
    d = X.shape[1]
    if L < d:
        raise ValueError(f"lift dimension {L} below input dimension {d}")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal(size=(L, d))
    Qfac, _ = np.linalg.qr(G)
    return X @ Qfac.T


def weights_from_assignment(X, H):
    """Feature-space cluster weights W = X^T H; for a hard partition,
    column j is exactly the coordinate sum of cluster j's points."""
    return np.asarray(X, dtype=float).T @ np.asarray(H, dtype=float)


def weight_iteration(X, H0, theta, max_sweeps=200, tol=1e-9):
    """Synchronous fixed-point iteration on the cluster weights:

        W  <-  X^T softmax(theta * X W)

    updating all rows at once (unlike the sequential graph sweeps).
    Returns (W, H, iterations, converged) with H the last activation.
    """
    X = np.asarray(X, dtype=float)
    W = weights_from_assignment(X, H0)
    H = np.asarray(H0, dtype=float)
    converged = False
    iterations = 0
    for iterations in range(1, max_sweeps + 1):
        Z = theta * (X @ W)
        Z -= Z.max(axis=1, keepdims=True)
        H = np.exp(Z)
        H /= H.sum(axis=1, keepdims=True)
        W_next = X.T @ H
        delta = np.abs(W_next - W).max()
        W = W_next
        if delta < tol:
            converged = True
            break
    return W, H, iterations, converged


def pca_basis(X, k):
    """Top principal directions of a centered cloud as unit columns.

    Solves the small L x L Gram problem and maps back, keeping only
    directions with numerically positive variance; returns (V, sigma)
    with V of shape (n, min(k, rank)) and sigma the singular values.
    """
    X = np.asarray(X, dtype=float)
    small = jacobi_eigh(X.T @ X)
    lam = small.eigenvalues
    cutoff = max(lam[0], 0.0) * 1e-12
    rank = int((lam > cutoff).sum())
    take = min(k, rank)
    if take == 0:
        raise ValueError("cloud has zero variance; nothing to project on")
    sigma = np.sqrt(lam[:take])
    V = (X @ small.eigenvectors[:, :take]) / sigma
    idx = np.argmax(np.abs(V), axis=0)
    V *= np.where(V[idx, np.arange(take)] < 0.0, -1.0, 1.0)
    return V, sigma


@dataclass
class ReduceResult:
    """Embedding of a cloud plus per-column principal-subspace residuals.

    selected flags columns with residual <= 1e-3; reconstruction scales
    those columns by the matching singular values, recovering principal
    coordinates up to rotation within equal-variance subspaces.
    """

    embedding: np.ndarray
    residuals: np.ndarray
    singular_values: np.ndarray
    selected: np.ndarray
    reconstruction: np.ndarray
    objective: float
    sweeps: int
    converged: bool


def reduce_cloud(points, n_dims, theta=0.010, method="cafe", seed=0,
                 beta=0.5, max_sweeps=200, tol=1e-9):
    """Embed a point cloud through the implicit Gram operator.

    The cloud is centered, the chosen iteration (simplex softmax rows or
    unit-sphere rows) runs to convergence, and the assignment is
    orthonormalized against Q = X X^T.  No columns are pruned and no hard
    rounding is applied: trailing columns beyond the cloud's intrinsic
    rank are reported with residuals near one rather than dropped, so the
    output width always equals n_dims.
    """
    X = center(points)
    gram = GramOperator(X)
    if method == "cafe":
        config = ClusterConfig(
            n_clusters=n_dims, theta=theta, max_sweeps=max_sweeps,
            tol=tol, seed=seed,
        )
        result = clustering.run(gram, config)
        H = result.assignment.H
        objective = result.objective
        sweeps = result.sweeps
        converged = result.converged
    elif method == "sphere":
        config = SphereConfig(
            n_dims=n_dims, beta=beta, max_sweeps=max_sweeps,
            tol=tol, seed=seed,
        )
        H, objective, sweeps, converged, _, _ = run_sphere(gram, config)
    else:
        raise ValueError(f"unknown method {method!r} (want cafe or sphere)")
    embedding = qr_embed(gram, H, drop_dependent=False).H_hat
    V, sigma = pca_basis(X, n_dims)
    residuals = projection_residual(embedding, V)
    selected = residuals <= RESIDUAL_SELECT
    scale = np.zeros(n_dims)
    scale[: sigma.size] = sigma
    reconstruction = embedding[:, selected] * scale[selected]
    return ReduceResult(
        embedding=embedding,
        residuals=residuals,
        singular_values=sigma,
        selected=selected,
        reconstruction=reconstruction,
        objective=objective,
        sweeps=sweeps,
        converged=converged,
    )


def concentric_circles(n=200, radii=(1.0, 2.0)):
    """Two concentric circles, n points split evenly, as a 2-D cloud."""
    half = n // 2
    counts = (half, n - half)
    pts = []
    for radius, count in zip(radii, counts):
        angles = 2.0 * np.pi * np.arange(count) / count
        pts.append(radius * np.column_stack([np.cos(angles), np.sin(angles)]))
    return np.vstack(pts)


def torus_cloud(n=240, major=2.0, minor=0.7):
    """Deterministic grid on a torus; spans three ambient dimensions."""
    nu = max(int(np.sqrt(n)), 3)
    nv = max(n // nu, 3)
    u = 2.0 * np.pi * np.arange(nu) / nu
    v = 2.0 * np.pi * np.arange(nv) / nv
    uu, vv = np.meshgrid(u, v, indexing="ij")
    ring = major + minor * np.cos(vv)
    return np.column_stack([
        (ring * np.cos(uu)).ravel(),
        (ring * np.sin(uu)).ravel(),
        (minor * np.sin(vv)).ravel(),
    ])


def load_xyz(path):
    """Whitespace-separated coordinates, two or three per line; `#`
    comment lines ignored."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) not in (2, 3):
                raise ValueError(
                    f"{path}:{lineno}: expected 2 or 3 coordinates, got {len(parts)}"
                )
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise ValueError(f"{path}:{lineno}: inconsistent column count")
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad coordinate") from None
    if not rows:
        raise ValueError(f"{path}: empty point cloud")
    return np.array(rows)


def save_xyz(path, points):
    """Write one point per line with 17 significant digits."""
    points = np.asarray(points, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        for row in points:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
