"""Downstream evaluation of embeddings: node classification and link
prediction.

The classifier is a deliberately plain multinomial logistic regression
(full-batch gradient descent, fixed step, small L2 penalty) so results
depend on the embedding, not on tuned model machinery.  Features are
standardized with train-split statistics inside the solver.

Link prediction scores pairs by concatenated endpoint embeddings against
an equal number of uniformly sampled non-edges.  The embeddings are
assumed to have been trained on the full graph, so held-out edges did
influence them; results measure pair separability in embedding space,
not inductive generalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

__all__ = [
    "MetricSummary",
    "SoftmaxRegression",
    "stratified_split",
    "accuracy_score",
    "macro_f1_score",
    "roc_auc_ovr",
    "classify",
    "link_predict",
    "load_labels",
    "labeled_dataset",
    "save_metrics_tsv",
]


@dataclass
class MetricSummary:
    """Mean and spread over repetitions; roc_auc is None when one-vs-rest
    AUC is not applicable (a dataset class with a single member)."""

    accuracy: float
    accuracy_std: float
    macro_f1: float
    macro_f1_std: float
    roc_auc: float | None
    roc_auc_std: float | None
    repetitions: int

    def rows(self):
        out = [
            ("accuracy", self.accuracy, self.accuracy_std),
            ("macro_f1", self.macro_f1, self.macro_f1_std),
        ]
        if self.roc_auc is not None:
            out.append(("roc_auc_ovr", self.roc_auc, self.roc_auc_std))
        return out


class SoftmaxRegression:
    """Multinomial logistic regression by full-batch gradient descent.

    Fixed recipe: 500 iterations, step 0.1, L2 penalty 1e-4 on weights
    (not the bias), features z-scored with training statistics.  The
    zero initialization makes fits deterministic.
    """

    def __init__(self, n_classes, l2=1e-4, iterations=500, step=0.1):
        self.n_classes = int(n_classes)
        self.l2 = float(l2)
        self.iterations = int(iterations)
        self.step = float(step)
        self.W = None
        self.b = None
        self._mean = None
        self._scale = None

    def _standardize(self, X):
        return (X - self._mean) / self._scale

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self._mean = X.mean(axis=0)
        std = X.std(axis=0)
        self._scale = np.where(std > 0.0, std, 1.0)
        Z = self._standardize(X)
        m, d = Z.shape
        C = self.n_classes
        Y = np.zeros((m, C))
        Y[np.arange(m), y] = 1.0
        self.W = np.zeros((d, C))
        self.b = np.zeros(C)
        for _ in range(self.iterations):
            P = self._softmax(Z @ self.W + self.b)
            G = P - Y
            self.W -= self.step * (Z.T @ G / m + self.l2 * self.W)
            self.b -= self.step * G.mean(axis=0)
        return self

    @staticmethod
    def _softmax(logits):
        logits = logits - logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        return e / e.sum(axis=1, keepdims=True)

    def predict_proba(self, X):
        Z = self._standardize(np.asarray(X, dtype=float))
        return self._softmax(Z @ self.W + self.b)

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)


def stratified_split(y, train_fraction, rng):
    """Class-proportional train/test indices.

    Within each class the train count is round(fraction * size), clamped
    so both sides stay nonempty when the class has at least two members;
    singleton classes go entirely to train and are reported back.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    y = np.asarray(y, dtype=int)
    train, test, singletons = [], [], []
    for cls in np.unique(y):
        members = np.flatnonzero(y == cls)
        members = members[rng.permutation(members.size)]
        if members.size == 1:
            train.extend(members.tolist())
            singletons.append(int(cls))
            continue
        k = int(round(train_fraction * members.size))
        k = min(max(k, 1), members.size - 1)
        train.extend(members[:k].tolist())
        test.extend(members[k:].tolist())
    return np.array(sorted(train)), np.array(sorted(test)), singletons


def accuracy_score(y_true, y_pred):
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.size == 0:
        raise ValueError("empty test set")
    return float((y_true == y_pred).mean())


def macro_f1_score(y_true, y_pred):
    """F1 averaged over the classes present in the truth; degenerate
    precision/recall terms count as zero."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    scores = []
    for cls in np.unique(y_true):
        tp = int(((y_pred == cls) & (y_true == cls)).sum())
        fp = int(((y_pred == cls) & (y_true != cls)).sum())
        fn = int(((y_pred != cls) & (y_true == cls)).sum())
        denom = 2 * tp + fp + fn
        scores.append(2.0 * tp / denom if denom else 0.0)
    return float(np.mean(scores))


def roc_auc_ovr(y_true, scores):
    """One-vs-rest AUC by the rank statistic, macro-averaged over classes
    with both positives and negatives present; None if no class
    qualifies."""
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=float)
    aucs = []
    for cls in range(scores.shape[1]):
        pos = y_true == cls
        n_pos = int(pos.sum())
        n_neg = y_true.size - n_pos
        if n_pos == 0 or n_neg == 0:
            continue
        ranks = rankdata(scores[:, cls])
        u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
        aucs.append(u / (n_pos * n_neg))
    if not aucs:
        return None
    return float(np.mean(aucs))


def _summarize(per_rep):
    arr = np.array(per_rep, dtype=float)
    return float(arr.mean()), float(arr.std())


def classify(embeddings, y, train_fraction=0.5, repetitions=100, seed=0):
    """Repeated stratified splits; each repetition draws its RNG stream
    from (seed, repetition) so runs are reproducible and independent."""
    X = np.asarray(embeddings, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.shape[0] != y.size:
        raise ValueError(
            f"{X.shape[0]} embedding rows vs {y.size} labels"
        )
    n_classes = int(y.max()) + 1
    counts = np.bincount(y, minlength=n_classes)
    auc_applicable = (counts != 1).all()
    accs, f1s, aucs = [], [], []
    for rep in range(repetitions):
        rng = np.random.default_rng([seed, rep])
        train, test, _ = stratified_split(y, train_fraction, rng)
        model = SoftmaxRegression(n_classes).fit(X[train], y[train])
        proba = model.predict_proba(X[test])
        pred = np.argmax(proba, axis=1)
        accs.append(accuracy_score(y[test], pred))
        f1s.append(macro_f1_score(y[test], pred))
        if auc_applicable:
            auc = roc_auc_ovr(y[test], proba)
            if auc is not None:
                aucs.append(auc)
    acc_m, acc_s = _summarize(accs)
    f1_m, f1_s = _summarize(f1s)
    if auc_applicable and aucs:
        auc_m, auc_s = _summarize(aucs)
    else:
        auc_m = auc_s = None
    return MetricSummary(acc_m, acc_s, f1_m, f1_s, auc_m, auc_s, repetitions)


def _non_edge_sample(graph, count, rng):
    """Uniformly sampled distinct non-adjacent pairs (u < w), rejecting
    edges and self pairs."""
    n = graph.n
    possible = n * (n - 1) // 2 - sum(1 for u, w in graph.edges() if u != w)
    if possible < count:
        raise ValueError(
            f"graph too dense: only {possible} non-edges for {count} negatives"
        )
    chosen = set()
    out = []
    while len(out) < count:
        u = int(rng.integers(0, n))
        w = int(rng.integers(0, n))
        if u == w:
            continue
        if u > w:
            u, w = w, u
        if (u, w) in chosen or graph.pair_mass(u, w) > 0.0:
            continue
        chosen.add((u, w))
        out.append((u, w))
    return out


def link_predict(graph, embeddings, train_fraction=0.5, repetitions=10,
                 seed=0):
    """Balanced edge-versus-non-edge classification.

    Positives are the graph's undirected edges (u < w); each repetition
    samples an equal number of fresh negatives, splits both classes
    stratified, and fits the standard classifier on concatenated
    endpoint embeddings.
    """
    X = np.asarray(embeddings, dtype=float)
    if X.shape[0] != graph.n:
        raise ValueError(
            f"{X.shape[0]} embedding rows vs {graph.n} graph nodes"
        )
    positives = [(u, w) for u, w in graph.edges() if u != w]
    if not positives:
        raise ValueError("graph has no off-diagonal edges to predict")
    accs, f1s, aucs = [], [], []
    for rep in range(repetitions):
        rng = np.random.default_rng([seed, rep])
        negatives = _non_edge_sample(graph, len(positives), rng)
        pairs = positives + negatives
        y = np.array([1] * len(positives) + [0] * len(negatives))
        feats = np.hstack([
            X[[u for u, _ in pairs]],
            X[[w for _, w in pairs]],
        ])
        train, test, _ = stratified_split(y, train_fraction, rng)
        model = SoftmaxRegression(2).fit(feats[train], y[train])
        proba = model.predict_proba(feats[test])
        pred = np.argmax(proba, axis=1)
        accs.append(accuracy_score(y[test], pred))
        f1s.append(macro_f1_score(y[test], pred))
        auc = roc_auc_ovr(y[test], proba)
        if auc is not None:
            aucs.append(auc)
    acc_m, acc_s = _summarize(accs)
    f1_m, f1_s = _summarize(f1s)
    auc_m, auc_s = _summarize(aucs) if aucs else (None, None)
    return MetricSummary(acc_m, acc_s, f1_m, f1_s, auc_m, auc_s, repetitions)


def load_labels(path, graph):
    """Read `node<TAB>class` lines; every node must exist in the graph,
    and repeated nodes must agree on their class."""
    labels = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.rstrip("\n")
            if not stripped or stripped.lstrip().startswith("#"):
                continue
            parts = stripped.split("\t")
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected 'node<TAB>class', got {len(parts)} fields"
                )
            node, cls = parts
            graph.index_of(node)
            if node in labels and labels[node] != cls:
                raise ValueError(
                    f"{path}:{lineno}: conflicting class for node {node!r}"
                )
            labels[node] = cls
    if not labels:
        raise ValueError(f"{path}: no labels found")
    return labels


def labeled_dataset(embeddings, graph, label_map):
    """Align a label map with embedding rows.

    Returns (X, y, class_names, node_indices) restricted to labeled
    nodes; class ids follow sorted class-name order for determinism.
    """
    X = np.asarray(embeddings, dtype=float)
    if X.shape[0] != graph.n:
        raise ValueError(
            f"{X.shape[0]} embedding rows vs {graph.n} graph nodes"
        )
    class_names = sorted(set(label_map.values()))
    class_id = {name: i for i, name in enumerate(class_names)}
    idx = np.array(sorted(graph.index_of(node) for node in label_map))
    y = np.array([
        class_id[label_map[graph.label_of(i)]] for i in idx
    ])
    return X[idx], y, class_names, idx


def save_metrics_tsv(path, summary):
    """Write `metric<TAB>mean<TAB>std` rows with 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        for name, mean, std in summary.rows():
            fh.write(f"{name}\t{mean:.17g}\t{std:.17g}\n")
