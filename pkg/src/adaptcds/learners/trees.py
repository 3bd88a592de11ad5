"""Gain-ratio decision tree (C4.5-style) and random forest."""

from __future__ import annotations

import math

import numpy as np

from ..tabular import ABOVE, BELOW
from .base import LearnerError, Model, ModelSpec

# normal upper quantile for confidence 0.25 (pessimistic error estimate)
_Z_CF25 = 0.6744897501960817


def _entropy(n_below: int, n_above: int) -> float:
    n = n_below + n_above
    if n == 0:
        return 0.0
    e = 0.0
    for c in (n_below, n_above):
        if c:
            p = c / n
            e -= p * math.log2(p)
    return e


def _pessimistic_error(n: int, errors: int, z: float) -> float:
    """Upper-bound error count estimate used for subtree-replacement pruning."""
    if n == 0:
        return 0.0
    f = errors / n
    num = f + z * z / (2 * n) + z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))
    return n * (num / (1 + z * z / n))


class _Node:
    __slots__ = ("counts", "col", "threshold", "branches")

    def __init__(self, counts, col=None, threshold=None, branches=None):
        self.counts = counts  # (n_below, n_above) of training rows at node
        self.col = col  # None for leaf
        self.threshold = threshold  # numeric split only
        self.branches = branches  # {"le": node, "gt": node} or {category: node}

    @property
    def is_leaf(self):
        return self.col is None

    def p_above(self) -> float:
        nb, na = self.counts
        return (na + 1.0) / (nb + na + 2.0)

    def to_dict(self) -> dict:
        d = {"counts": list(self.counts)}
        if not self.is_leaf:
            d["col"] = self.col
            if self.threshold is not None:
                d["threshold"] = self.threshold
            d["branches"] = {k: v.to_dict() for k, v in self.branches.items()}
        return d

    @classmethod
    def from_dict(cls, d) -> "_Node":
        if "branches" not in d:
            return cls(tuple(d["counts"]))
        return cls(
            tuple(d["counts"]),
            col=d["col"],
            threshold=d.get("threshold"),
            branches={k: cls.from_dict(v) for k, v in d["branches"].items()},
        )


def _node_counts(labels, idx):
    nb = sum(1 for i in idx if labels[i] == BELOW)
    return (nb, len(idx) - nb)


class _TreeBuilder:
    def __init__(self, columns, rows, labels, min_leaf, rng=None, features_per_split=None):
        self.columns = columns
        self.rows = rows
        self.labels = labels
        self.min_leaf = min_leaf
        self.rng = rng
        self.features_per_split = features_per_split

    def _candidate_columns(self):
        p = len(self.columns)
        if self.rng is None or self.features_per_split is None or self.features_per_split >= p:
            return range(p)
        return sorted(self.rng.choice(p, size=self.features_per_split, replace=False).tolist())

    def _split_numeric(self, j, idx):
        vals = sorted({self.rows[i][j] for i in idx})
        best = None
        parent_info = _entropy(*_node_counts(self.labels, idx))
        n = len(idx)
        for a, b in zip(vals, vals[1:]):
            t = (a + b) / 2.0
            le = [i for i in idx if self.rows[i][j] <= t]
            gt = [i for i in idx if self.rows[i][j] > t]
            if len(le) < self.min_leaf or len(gt) < self.min_leaf:
                continue
            info = sum(len(s) / n * _entropy(*_node_counts(self.labels, s)) for s in (le, gt))
            gain = parent_info - info
            split_info = _entropy(len(le), len(gt))
            if split_info <= 0:
                continue
            ratio = gain / split_info
            if best is None or ratio > best[0]:
                best = (ratio, t, {"le": le, "gt": gt})
        return best

    def _split_categorical(self, j, idx):
        groups: dict[str, list] = {}
        for i in idx:
            groups.setdefault(self.rows[i][j], []).append(i)
        populated = [g for g in groups.values() if len(g) >= self.min_leaf]
        if len(groups) < 2 or len(populated) < 2:
            return None
        n = len(idx)
        parent_info = _entropy(*_node_counts(self.labels, idx))
        info = sum(len(g) / n * _entropy(*_node_counts(self.labels, g)) for g in groups.values())
        gain = parent_info - info
        split_sizes = [len(g) for g in groups.values()]
        split_info = 0.0
        for s in split_sizes:
            p = s / n
            split_info -= p * math.log2(p)
        if split_info <= 0:
            return None
        return (gain / split_info, None, groups)

    def build(self, idx) -> _Node:
        counts = _node_counts(self.labels, idx)
        if counts[0] == 0 or counts[1] == 0 or len(idx) < 2 * self.min_leaf:
            return _Node(counts)
        best = None
        for j in self._candidate_columns():
            cand = (
                self._split_numeric(j, idx)
                if self.columns[j].kind == "numeric"
                else self._split_categorical(j, idx)
            )
            if cand is not None and (best is None or cand[0] > best[0]):
                best = (cand[0], j, cand[1], cand[2])
        if best is None:
            return _Node(counts)
        _, j, threshold, groups = best
        branches = {key: self.build(sub) for key, sub in groups.items()}
        return _Node(counts, col=j, threshold=threshold, branches=branches)


def _route(node: _Node, row):
    v = row[node.col]
    if node.threshold is not None:
        return node.branches["le"] if v <= node.threshold else node.branches["gt"]
    return node.branches.get(v)  # unseen category -> None


def _predict_node(node: _Node, row) -> float:
    while not node.is_leaf:
        child = _route(node, row)
        if child is None:
            break
        node = child
    return node.p_above()


def _prune(node: _Node, rows, labels, idx, z: float) -> _Node:
    if node.is_leaf:
        return node
    # partition idx over branches
    parts: dict = {k: [] for k in node.branches}
    for i in idx:
        v = rows[i][node.col]
        key = ("le" if v <= node.threshold else "gt") if node.threshold is not None else v
        if key in parts:
            parts[key].append(i)
    node.branches = {k: _prune(c, rows, labels, parts.get(k, []), z) for k, c in node.branches.items()}

    def subtree_error(nd, sub_idx):
        if nd.is_leaf:
            nb, na = _node_counts(labels, sub_idx)
            # errors w.r.t. the leaf's majority class
            errors = nb if nd.counts[1] >= nd.counts[0] else na
            return _pessimistic_error(len(sub_idx), errors, z)
        total = 0.0
        sub_parts: dict = {k: [] for k in nd.branches}
        for i in sub_idx:
            v = rows[i][nd.col]
            key = ("le" if v <= nd.threshold else "gt") if nd.threshold is not None else v
            if key in sub_parts:
                sub_parts[key].append(i)
        for k, c in nd.branches.items():
            total += subtree_error(c, sub_parts[k])
        return total

    nb, na = _node_counts(labels, idx)
    leaf_errors = nb if na >= nb else na
    leaf_est = _pessimistic_error(len(idx), leaf_errors, z)
    if leaf_est <= subtree_error(node, idx):
        return _Node((nb, na))
    return node


class TreeModel(Model):
    method = "Tree"

    def __init__(self, spec, columns, root: _Node):
        super().__init__(spec, columns)
        self.root = root

    def _proba(self, row) -> float:
        return _predict_node(self.root, row)

    def params_to_dict(self) -> dict:
        return {"root": self.root.to_dict()}

    @classmethod
    def params_from_dict(cls, spec, columns, doc):
        return cls(spec, columns, _Node.from_dict(doc["root"]))


def fit_tree(spec: ModelSpec, columns, rows, labels) -> TreeModel:
    min_leaf = int(spec.hyperparams.get("min_leaf", 2))
    prune_cf = spec.hyperparams.get("prune_cf", 0.25)
    if len(rows) < min_leaf:
        raise LearnerError(f"need at least min_leaf={min_leaf} rows")
    idx = list(range(len(rows)))
    root = _TreeBuilder(columns, rows, labels, min_leaf).build(idx)
    if prune_cf is not None:
        root = _prune(root, rows, labels, idx, _Z_CF25)
    return TreeModel(spec, columns, root)


class RandomForestModel(Model):
    method = "RandomForest"

    def __init__(self, spec, columns, roots):
        super().__init__(spec, columns)
        self.roots = roots

    def _proba(self, row) -> float:
        return sum(_predict_node(r, row) for r in self.roots) / len(self.roots)

    def params_to_dict(self) -> dict:
        return {"roots": [r.to_dict() for r in self.roots]}

    @classmethod
    def params_from_dict(cls, spec, columns, doc):
        return cls(spec, columns, [_Node.from_dict(d) for d in doc["roots"]])


def fit_random_forest(spec: ModelSpec, columns, rows, labels) -> RandomForestModel:
    n_trees = int(spec.hyperparams.get("n_trees", 10))
    if n_trees < 1:
        raise LearnerError("n_trees must be >= 1")
    p = len(columns)
    fps = int(spec.hyperparams.get("features_per_split", int(math.log2(p)) + 1 if p else 1))
    bootstrap = bool(spec.hyperparams.get("bootstrap", True))
    seed = spec.hyperparams.get("seed", 0)
    rng = np.random.default_rng(seed)
    n = len(rows)
    roots = []
    for _ in range(n_trees):
        idx = rng.integers(0, n, size=n).tolist() if bootstrap else list(range(n))
        builder = _TreeBuilder(columns, rows, labels, min_leaf=1, rng=rng, features_per_split=fps)
        roots.append(builder.build(idx))
    return RandomForestModel(spec, columns, roots)
