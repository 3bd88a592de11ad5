"""In-fold feature selection: chi-squared, Relief-F, gain ratio rankers and
a symmetrical-uncertainty correlation-based subset search."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .tabular import Column


@dataclass(frozen=True)
class FeatureScore:
    name: str
    score: float
    method: str


@dataclass(frozen=True)
class FeatureSubset:
    names: tuple[str, ...]
    merit: float
    trace_length: int


def _equal_frequency_bins(values: list[float], n_bins: int = 10) -> list[str]:
    """Bin a numeric column for counting-based scores (scoring only)."""
    order = sorted(values)
    n = len(values)
    boundaries = []
    for b in range(1, n_bins):
        cut = order[min(b * n // n_bins, n - 1)]
        if not boundaries or cut > boundaries[-1]:
            boundaries.append(cut)
    import bisect

    return [f"b{bisect.bisect_left(boundaries, v)}" for v in values]


def _as_discrete(columns, rows) -> list[list[str]]:
    cols = []
    for j, col in enumerate(columns):
        vals = [r[j] for r in rows]
        if col.kind == "numeric":
            cols.append(_equal_frequency_bins(vals))
        else:
            cols.append([str(v) for v in vals])
    return cols


def _entropy_of(values) -> float:
    n = len(values)
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return -sum((c / n) * math.log2(c / n) for c in counts.values())


def _info_gain(feature_vals, labels) -> float:
    n = len(labels)
    h = _entropy_of(labels)
    groups: dict = {}
    for v, l in zip(feature_vals, labels):
        groups.setdefault(v, []).append(l)
    cond = sum(len(g) / n * _entropy_of(g) for g in groups.values())
    return h - cond


def _ranked(scores: dict[str, float], method: str) -> list[FeatureScore]:
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return [FeatureScore(name, s, method) for name, s in ordered]


def chi2_rank(columns, rows, labels) -> list[FeatureScore]:
    """Pearson chi-squared of feature x class contingency, descending."""
    discrete = _as_discrete(columns, rows)
    n = len(labels)
    class_counts: dict = {}
    for l in labels:
        class_counts[l] = class_counts.get(l, 0) + 1
    scores = {}
    for col, vals in zip(columns, discrete):
        cell: dict = {}
        margin: dict = {}
        for v, l in zip(vals, labels):
            cell[(v, l)] = cell.get((v, l), 0) + 1
            margin[v] = margin.get(v, 0) + 1
        chi2 = 0.0
        for v, mv in margin.items():
            for c, mc in class_counts.items():
                expected = mv * mc / n
                observed = cell.get((v, c), 0)
                if expected > 0:
                    chi2 += (observed - expected) ** 2 / expected
        scores[col.name] = chi2
    return _ranked(scores, "chi2")


def gain_ratio_rank(columns, rows, labels) -> list[FeatureScore]:
    discrete = _as_discrete(columns, rows)
    scores = {}
    for col, vals in zip(columns, discrete):
        gain = _info_gain(vals, labels)
        split_info = _entropy_of(vals)
        scores[col.name] = gain / split_info if split_info > 0 else 0.0
    return _ranked(scores, "gain_ratio")


def relieff_rank(columns, rows, labels, k_neighbors: int = 10) -> list[FeatureScore]:
    """Relief-F weights over all instances, k nearest hits and misses."""
    n = len(rows)
    p = len(columns)
    ranges = []
    for j, col in enumerate(columns):
        if col.kind == "numeric":
            vals = [r[j] for r in rows]
            ranges.append(max(vals) - min(vals))
        else:
            ranges.append(None)
    priors: dict = {}
    for l in labels:
        priors[l] = priors.get(l, 0) + 1
    priors = {c: cnt / n for c, cnt in priors.items()}

    def diff(j, a, b) -> float:
        if ranges[j] is None:
            return 0.0 if a[j] == b[j] else 1.0
        if ranges[j] == 0:
            return 0.0
        return abs(a[j] - b[j]) / ranges[j]

    def dist(a, b) -> float:
        return sum(diff(j, a, b) for j in range(p))

    weights = [0.0] * p
    for i in range(n):
        ri = rows[i]
        by_class: dict = {}
        for idx in range(n):
            if idx == i:
                continue
            by_class.setdefault(labels[idx], []).append(idx)
        same = labels[i]
        for cls, members in by_class.items():
            k = min(k_neighbors, len(members))
            if k == 0:
                continue
            nearest = sorted(members, key=lambda m: (dist(ri, rows[m]), m))[:k]
            for j in range(p):
                contribution = sum(diff(j, ri, rows[m]) for m in nearest) / (n * k)
                if cls == same:
                    weights[j] -= contribution
                else:
                    weights[j] += priors[cls] / (1.0 - priors[same]) * contribution
    return _ranked({c.name: w for c, w in zip(columns, weights)}, "relieff")


def symmetrical_uncertainty(a_vals, b_vals) -> float:
    ha, hb = _entropy_of(a_vals), _entropy_of(b_vals)
    if ha + hb == 0:
        return 0.0
    return 2.0 * _info_gain(a_vals, b_vals) / (ha + hb)


def cfs_merit(su_class: list[float], su_pairs, subset: tuple[int, ...]) -> float:
    k = len(subset)
    if k == 0:
        return 0.0
    rcf = sum(su_class[i] for i in subset) / k
    if k == 1:
        return rcf
    rff = 0.0
    pairs = 0
    for ai in range(k):
        for bi in range(ai + 1, k):
            rff += su_pairs[subset[ai]][subset[bi]]
            pairs += 1
    rff /= pairs
    return k * rcf / math.sqrt(k + k * (k - 1) * rff)


def su_cfs_subset(columns, rows, labels, stop_after: int = 5) -> FeatureSubset:
    """Best-first forward search maximizing the CFS merit over SU correlations."""
    discrete = _as_discrete(columns, rows)
    p = len(columns)
    if p == 0:
        return FeatureSubset((), 0.0, 0)
    su_class = [symmetrical_uncertainty(discrete[j], labels) for j in range(p)]
    su_pairs = [[0.0] * p for _ in range(p)]
    for a in range(p):
        for b in range(a + 1, p):
            su_pairs[a][b] = su_pairs[b][a] = symmetrical_uncertainty(discrete[a], discrete[b])

    best_subset: tuple[int, ...] = ()
    best_merit = -math.inf
    open_list: list[tuple[float, tuple[int, ...]]] = [(0.0, ())]
    visited = {()}
    non_improving = 0
    trace = 0
    while open_list and non_improving < stop_after:
        open_list.sort(key=lambda e: (-e[0], e[1]))
        merit, subset = open_list.pop(0)
        trace += 1
        improved = False
        for j in range(p):
            if j in subset:
                continue
            child = tuple(sorted(subset + (j,)))
            if child in visited:
                continue
            visited.add(child)
            m = cfs_merit(su_class, su_pairs, child)
            open_list.append((m, child))
            if m > best_merit + 1e-12:
                best_merit = m
                best_subset = child
                improved = True
        non_improving = 0 if improved else non_improving + 1
    if not best_subset:
        # degenerate data: fall back to the single best-SU feature
        j = max(range(p), key=lambda i: (su_class[i], -i))
        best_subset = (j,)
        best_merit = su_class[j]
    names = tuple(columns[j].name for j in best_subset)
    return FeatureSubset(names, best_merit, trace)


SELECTORS = ("chi2", "relieff", "gain_ratio", "su_cfs")


def select_features(method: str, columns, rows, labels) -> tuple[str, ...]:
    """Names chosen by a selector; rankers keep the top ceil(p/2)."""
    if method == "su_cfs":
        return su_cfs_subset(columns, rows, labels).names
    ranker = {"chi2": chi2_rank, "relieff": relieff_rank, "gain_ratio": gain_ratio_rank}.get(method)
    if ranker is None:
        raise ValueError(f"unknown selector {method!r}")
    ranked = ranker(columns, rows, labels)
    k = math.ceil(len(columns) / 2)
    return tuple(fs.name for fs in ranked[:k])
