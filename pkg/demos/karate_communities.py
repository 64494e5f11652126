#!/usr/bin/env python3
"""Walk through community detection on the karate club graph.

Sweeps the inverse temperature from soft to hard, prints the cluster
structure each run settles into, then checks the converged two-cluster
assignment against the dominant eigenvector with the dense oracle.
"""
import warnings

import numpy as np

from modembed import (
    ClusterConfig,
    HARD_THETA,
    alignment_bounds,
    cafe_embed,
    from_edge_list,
    hard_labels,
)
from modembed.clustering import run
from modembed.datasets import karate_club_edges
from modembed.embedding import RankDeficiencyWarning

warnings.simplefilter("ignore", RankDeficiencyWarning)


def main():
    g = from_edge_list(karate_club_edges())
    Q = g.modularity_matrix()
    print(f"karate club: n={g.n}, edges={sum(1 for _ in g.edges())}")
    print()

    print(f"{'theta':>10} {'sweeps':>7} {'clusters':>9} {'modularity':>11}")
    for theta in (1.0, 10.0, 50.0, HARD_THETA):
        result = run(Q, ClusterConfig(n_clusters=g.n, theta=theta,
                                      max_sweeps=600, seed=0))
        labels = hard_labels(result.assignment.H)
        mod = Q.partition_modularity(labels)
        name = "hard" if theta >= HARD_THETA else f"{theta:g}"
        print(f"{name:>10} {result.sweeps:>7} {len(set(labels)):>9} "
              f"{mod:>11.4f}")
    print()

    # Two clusters: the classic split. Compare against the dense spectrum.
    result = run(Q, ClusterConfig(n_clusters=2, theta=50.0, seed=0,
                                  max_sweeps=1600))
    report = alignment_bounds(Q, result.assignment.H)
    print(f"K=2 run converged after {result.sweeps} sweeps")
    print(f"  lambda1={report.lambda1:.6f}  delta1={report.delta1:.4f}")
    print(f"  cos(v1, x)  = {report.cos_x:.4f}")
    print(f"  cos(v1, Qx) = {report.cos_qx:.4f}  <- one operator application "
          f"sharpens the estimate")
    print(f"  gap precondition applicable: {report.applicable}")
    print()

    emb = cafe_embed(Q, ClusterConfig(n_clusters=6, theta=50.0, seed=0))
    H_hat = emb.embedding.H_hat
    print(f"K=6 embedding: {H_hat.shape[1]} orthonormal columns "
          f"(empty clusters pruned, one dependent column dropped)")
    print(f"  max |H^T H - I| = {np.abs(H_hat.T @ H_hat - np.eye(H_hat.shape[1])).max():.2e}")


if __name__ == "__main__":
    main()
