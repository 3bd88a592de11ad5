"""Classifier evaluation metrics on pooled out-of-fold prediction logs."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .tabular import ABOVE, BELOW


class MetricError(Exception):
    pass


@dataclass(frozen=True)
class PredictionLog:
    """One out-of-fold probability per record, aligned with true labels."""

    p_above: tuple[float, ...]
    labels: tuple[str, ...]
    fold_ids: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.p_above) == len(self.labels) == len(self.fold_ids)):
            raise MetricError("log fields must align")
        if any(p < 0.0 or p > 1.0 for p in self.p_above):
            raise MetricError("probabilities must lie in [0, 1]")

    def __len__(self):
        return len(self.p_above)


def confusion(log: PredictionLog, threshold: float = 0.5):
    tp = fp = tn = fn = 0
    for p, y in zip(log.p_above, log.labels):
        predicted_above = p >= threshold
        if y == ABOVE:
            tp += predicted_above
            fn += not predicted_above
        else:
            fp += predicted_above
            tn += not predicted_above
    return tp, fp, tn, fn


def accuracy(log: PredictionLog, threshold: float = 0.5) -> float:
    if not len(log):
        raise MetricError("empty log")
    tp, fp, tn, fn = confusion(log, threshold)
    return (tp + tn) / len(log)


def tp_rate(log: PredictionLog, threshold: float = 0.5):
    tp, fp, tn, fn = confusion(log, threshold)
    return tp / (tp + fn) if (tp + fn) else None


def fp_rate(log: PredictionLog, threshold: float = 0.5):
    tp, fp, tn, fn = confusion(log, threshold)
    return fp / (fp + tn) if (fp + tn) else None


def auc(log: PredictionLog) -> float:
    """Mann-Whitney AUC: concordant pairs plus half ties over all pos/neg pairs."""
    pos = [p for p, y in zip(log.p_above, log.labels) if y == ABOVE]
    neg = [p for p, y in zip(log.p_above, log.labels) if y == BELOW]
    if not pos or not neg:
        raise MetricError("AUC needs both classes")
    # average-rank formulation, O(n log n)
    scored = sorted(
        [(p, 1) for p in pos] + [(p, 0) for p in neg], key=lambda t: t[0]
    )
    rank_sum_pos = 0.0
    i = 0
    while i < len(scored):
        j = i
        while j < len(scored) and scored[j][0] == scored[i][0]:
            j += 1
        avg_rank = (i + 1 + j) / 2.0  # ranks are 1-based
        rank_sum_pos += avg_rank * sum(1 for k in range(i, j) if scored[k][1] == 1)
        i = j
    n_pos, n_neg = len(pos), len(neg)
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


# ------------------------------------------------------------------ Hand's H


def _beta22_moments(a: float, b: float) -> tuple[float, float]:
    """Integrals of c*w(c) and (1-c)*w(c) over [a, b] for w = Beta(2,2) = 6c(1-c)."""

    def int_cw(c):
        return 2.0 * c**3 - 1.5 * c**4

    def int_1mcw(c):
        return 3.0 * c**2 - 4.0 * c**3 + 1.5 * c**4

    return int_cw(b) - int_cw(a), int_1mcw(b) - int_1mcw(a)


def roc_hull_points(log: PredictionLog) -> list[tuple[float, float]]:
    """Upper convex hull of the ROC curve as (F0, F1) CDF pairs per threshold.

    F0/F1 are the score CDFs of the negative ("below") and positive ("above")
    classes; hull vertices run from (0,0) to (1,1).
    """
    pos = sorted(p for p, y in zip(log.p_above, log.labels) if y == ABOVE)
    neg = sorted(p for p, y in zip(log.p_above, log.labels) if y == BELOW)
    if not pos or not neg:
        raise MetricError("H-measure needs both classes")
    import bisect

    thresholds = sorted(set(log.p_above))
    pts = [(0.0, 0.0)]
    for t in thresholds:
        f0 = bisect.bisect_right(neg, t) / len(neg)
        f1 = bisect.bisect_right(pos, t) / len(pos)
        pts.append((f0, f1))
    pts.append((1.0, 1.0))
    pts = sorted(set(pts))
    # lower hull in (F0, F1): minimizes F1 for given F0, which maximizes the
    # ROC (TPR=1-F1 vs FPR=1-F0) convex hull
    hull: list[tuple[float, float]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) <= 1e-15:
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def h_measure(log: PredictionLog) -> float:
    """Hand's H with the Beta(2,2) cost weight, by closed-form segment integration."""
    n = len(log)
    n_pos = sum(1 for y in log.labels if y == ABOVE)
    n_neg = n - n_pos
    pi0 = n_neg / n  # class "below"
    pi1 = n_pos / n  # class "above"
    hull = roc_hull_points(log)

    # cost boundaries where the minimizing hull vertex switches
    bounds = [0.0]
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        d0, d1 = x2 - x1, y2 - y1
        denom = pi0 * d0 + pi1 * d1
        c = pi1 * d1 / denom if denom > 0 else 0.0
        bounds.append(min(max(c, 0.0), 1.0))
    bounds.append(1.0)

    loss = 0.0
    for i, (f0, f1) in enumerate(hull):
        a, b = bounds[i], bounds[i + 1]
        if b <= a:
            continue
        int_c, int_1mc = _beta22_moments(a, b)
        loss += pi0 * (1.0 - f0) * int_c + pi1 * f1 * int_1mc
    cstar = pi1  # where c*pi0 = (1-c)*pi1
    int_c_lo, _ = _beta22_moments(0.0, cstar)
    _, int_1mc_hi = _beta22_moments(cstar, 1.0)
    loss_ref = pi0 * int_c_lo + pi1 * int_1mc_hi
    if loss_ref <= 0:
        raise MetricError("degenerate reference loss")
    return 1.0 - loss / loss_ref


def h_measure_quadrature(log: PredictionLog, n_points: int = 100_000) -> float:
    """Independent oracle: brute-force min over thresholds at quadrature nodes."""
    n = len(log)
    n_pos = sum(1 for y in log.labels if y == ABOVE)
    pi1 = n_pos / n
    pi0 = 1.0 - pi1
    pos = sorted(p for p, y in zip(log.p_above, log.labels) if y == ABOVE)
    neg = sorted(p for p, y in zip(log.p_above, log.labels) if y == BELOW)
    import bisect

    thresholds = [-math.inf] + sorted(set(log.p_above))
    f0s = [bisect.bisect_right(neg, t) / len(neg) if t > -math.inf else 0.0 for t in thresholds]
    f1s = [bisect.bisect_right(pos, t) / len(pos) if t > -math.inf else 0.0 for t in thresholds]
    total = 0.0
    ref = 0.0
    h = 1.0 / n_points
    for k in range(n_points):
        c = (k + 0.5) * h
        w = 6.0 * c * (1.0 - c)
        q = min(
            c * pi0 * (1.0 - f0) + (1.0 - c) * pi1 * f1 for f0, f1 in zip(f0s, f1s)
        )
        total += q * w * h
        ref += min(c * pi0, (1.0 - c) * pi1) * w * h
    return 1.0 - total / ref


# ------------------------------------------------------------------ Spearman


def _average_ranks(xs) -> list[float]:
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(xs):
        j = i
        while j < len(xs) and xs[order[j]] == xs[order[i]]:
            j += 1
        avg = (i + 1 + j) / 2.0
        for k in range(i, j):
            ranks[order[k]] = avg
        i = j
    return ranks


def spearman(x, y) -> tuple[float, str]:
    """Spearman rho with average-rank ties; p-value via the t approximation."""
    if len(x) != len(y) or len(x) < 3:
        raise MetricError("spearman needs equal-length inputs of size >= 3")
    rx, ry = _average_ranks(list(x)), _average_ranks(list(y))
    n = len(x)
    mx, my = sum(rx) / n, sum(ry) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    sxx = sum((a - mx) ** 2 for a in rx)
    syy = sum((b - my) ** 2 for b in ry)
    if sxx == 0 or syy == 0:
        raise MetricError("zero rank variance")
    rho = sxy / math.sqrt(sxx * syy)
    if abs(rho) >= 1.0:
        return rho, "p~0 (approximate, t-distribution)"
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    # two-sided tail from the t distribution via the regularized incomplete beta
    df = n - 2
    xbeta = df / (df + t * t)
    p = _betainc_regularized(df / 2.0, 0.5, xbeta)
    return rho, f"p={p:.4g} (approximate, t-distribution)"


def _betainc_regularized(a: float, b: float, x: float) -> float:
    # continued-fraction evaluation (Numerical Recipes style)
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_beta = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    front = math.exp(ln_beta + a * math.log(x) + b * math.log(1.0 - x)) / a
    f, c, d = 1.0, 1.0, 0.0
    for i in range(200):
        m = i // 2
        if i == 0:
            num = 1.0
        elif i % 2 == 0:
            num = m * (b - m) * x / ((a + 2 * m - 1) * (a + 2 * m))
        else:
            num = -(a + m) * (a + b + m) * x / ((a + 2 * m) * (a + 2 * m + 1))
        d = 1.0 + num * d
        d = 1.0 / d if abs(d) > 1e-30 else 1e30
        c = 1.0 + num / c if abs(c) > 1e-30 else 1e-30
        f *= c * d
        if abs(1.0 - c * d) < 1e-10:
            break
    result = front * (f - 1.0)
    if x < (a + 1.0) / (a + b + 2.0):
        return result
    return 1.0 - _betainc_regularized(b, a, 1.0 - x)
