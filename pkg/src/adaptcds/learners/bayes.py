"""Naive Bayes and AODE (averaged one-dependence estimators)."""

from __future__ import annotations

import math

from ..tabular import ABOVE, BELOW, CLASSES
from .base import LearnerError, Model, ModelSpec, require_discrete


def _class_counts(labels):
    return {c: sum(1 for l in labels if l == c) for c in CLASSES}


class NaiveBayesModel(Model):
    """Add-alpha categorical likelihoods, per-class Gaussians with a variance floor."""

    method = "NaiveBayes"

    def __init__(self, spec, columns, priors, cat_tables, gauss_tables):
        super().__init__(spec, columns)
        self.priors = priors  # class -> smoothed prior
        self.cat_tables = cat_tables  # col name -> class -> category -> prob
        self.gauss_tables = gauss_tables  # col name -> class -> (mean, var)

    def _proba(self, row) -> float:
        logs = {}
        for c in CLASSES:
            lp = math.log(self.priors[c])
            for col, v in zip(self.columns, row):
                if col.kind == "numeric":
                    mean, var = self.gauss_tables[col.name][c]
                    lp += -0.5 * math.log(2 * math.pi * var) - (v - mean) ** 2 / (2 * var)
                else:
                    lp += math.log(self.cat_tables[col.name][c][v])
            logs[c] = lp
        m = max(logs.values())
        za = math.exp(logs[ABOVE] - m)
        zb = math.exp(logs[BELOW] - m)
        return za / (za + zb)

    def params_to_dict(self) -> dict:
        return {
            "priors": self.priors,
            "cat_tables": self.cat_tables,
            "gauss_tables": {
                name: {c: list(mv) for c, mv in per_class.items()}
                for name, per_class in self.gauss_tables.items()
            },
        }

    @classmethod
    def params_from_dict(cls, spec, columns, doc):
        gauss = {
            name: {c: tuple(mv) for c, mv in per_class.items()}
            for name, per_class in doc["gauss_tables"].items()
        }
        return cls(spec, columns, doc["priors"], doc["cat_tables"], gauss)


def fit_naive_bayes(spec: ModelSpec, columns, rows, labels) -> NaiveBayesModel:
    alpha = float(spec.hyperparams.get("smoothing", 1.0))
    var_floor = float(spec.hyperparams.get("variance_floor", 1e-6))
    n = len(rows)
    if n == 0:
        raise LearnerError("no training rows")
    counts = _class_counts(labels)
    priors = {c: (counts[c] + alpha) / (n + alpha * len(CLASSES)) for c in CLASSES}

    all_values = {c: [row[j] for row in rows] for j, c in enumerate(columns)}
    cat_tables: dict = {}
    gauss_tables: dict = {}
    for j, col in enumerate(columns):
        vals = all_values[col]
        if col.kind == "numeric":
            pooled_mean = sum(vals) / n
            pooled_var = max(sum((v - pooled_mean) ** 2 for v in vals) / n, var_floor)
            per_class = {}
            for c in CLASSES:
                cv = [v for v, l in zip(vals, labels) if l == c]
                if cv:
                    mean = sum(cv) / len(cv)
                    var = max(sum((v - mean) ** 2 for v in cv) / len(cv), var_floor)
                else:
                    mean, var = pooled_mean, pooled_var
                per_class[c] = (mean, var)
            gauss_tables[col.name] = per_class
        else:
            v_count = len(col.categories)
            per_class = {}
            for c in CLASSES:
                cv = [v for v, l in zip(vals, labels) if l == c]
                per_class[c] = {
                    cat: (cv.count(cat) + alpha) / (len(cv) + alpha * v_count)
                    for cat in col.categories
                }
            cat_tables[col.name] = per_class
    return NaiveBayesModel(spec, columns, priors, cat_tables, gauss_tables)


class AODEModel(Model):
    """Average of super-parent one-dependence estimators over frequent parent values.

    Joint terms factor as P(y)*P(x_i|y) with the same smoothed estimates as
    naive Bayes, so a single-feature AODE collapses to the NB posterior.
    """

    method = "AODE"

    def __init__(self, spec, columns, n, class_counts, joint, pair, freq_limit, alpha):
        super().__init__(spec, columns)
        self.n = n
        self.class_counts = class_counts  # class -> count
        # joint[i][class][value] = N(y, x_i=value); pair[(i,j)][class][vi][vj]
        self.joint = joint
        self.pair = pair
        self.freq_limit = freq_limit
        self.alpha = alpha

    # smoothed estimates -------------------------------------------------
    def _p_class(self, c):
        return (self.class_counts[c] + self.alpha) / (self.n + self.alpha * len(CLASSES))

    def _p_feat_given_class(self, i, v, c):
        vi = len(self.columns[i].categories)
        return (self.joint[i][c].get(v, 0) + self.alpha) / (
            self.class_counts[c] + self.alpha * vi
        )

    def _p_cond(self, j, vj, c, i, vi):
        # P(x_j | y, x_i)
        cnt = self.pair[(i, j)][c].get(vi, {}).get(vj, 0)
        parent = self.joint[i][c].get(vi, 0)
        vsize = len(self.columns[j].categories)
        return (cnt + self.alpha) / (parent + self.alpha * vsize)

    def _value_count(self, i, v):
        return sum(self.joint[i][c].get(v, 0) for c in CLASSES)

    def _nb_score(self, row, c):
        s = self._p_class(c)
        for i in range(len(self.columns)):
            s *= self._p_feat_given_class(i, row[i], c)
        return s

    def _proba(self, row) -> float:
        parents = [i for i in range(len(self.columns)) if self._value_count(i, row[i]) >= self.freq_limit]
        scores = {}
        for c in CLASSES:
            if not parents:
                scores[c] = self._nb_score(row, c)
                continue
            total = 0.0
            for i in parents:
                term = self._p_class(c) * self._p_feat_given_class(i, row[i], c)
                for j in range(len(self.columns)):
                    if j != i:
                        term *= self._p_cond(j, row[j], c, i, row[i])
                total += term
            scores[c] = total / len(parents)
        z = scores[ABOVE] + scores[BELOW]
        return scores[ABOVE] / z

    def params_to_dict(self) -> dict:
        return {
            "n": self.n,
            "class_counts": self.class_counts,
            "joint": [{c: tbl for c, tbl in per.items()} for per in self.joint],
            "pair": [
                {"i": i, "j": j, "tables": tables}
                for (i, j), tables in sorted(self.pair.items())
            ],
            "freq_limit": self.freq_limit,
            "alpha": self.alpha,
        }

    @classmethod
    def params_from_dict(cls, spec, columns, doc):
        pair = {(e["i"], e["j"]): e["tables"] for e in doc["pair"]}
        return cls(
            spec, columns, doc["n"], doc["class_counts"], doc["joint"], pair,
            doc["freq_limit"], doc["alpha"],
        )


def fit_aode(spec: ModelSpec, columns, rows, labels) -> AODEModel:
    require_discrete(columns)
    alpha = float(spec.hyperparams.get("smoothing", 1.0))
    m = int(spec.hyperparams.get("freq_limit", 1))
    n = len(rows)
    if n == 0:
        raise LearnerError("no training rows")
    counts = _class_counts(labels)
    p = len(columns)
    joint = [{c: {} for c in CLASSES} for _ in range(p)]
    pair = {
        (i, j): {c: {} for c in CLASSES}
        for i in range(p)
        for j in range(p)
        if i != j
    }
    for row, label in zip(rows, labels):
        for i in range(p):
            tbl = joint[i][label]
            tbl[row[i]] = tbl.get(row[i], 0) + 1
        for i in range(p):
            for j in range(p):
                if i == j:
                    continue
                by_vi = pair[(i, j)][label].setdefault(row[i], {})
                by_vi[row[j]] = by_vi.get(row[j], 0) + 1
    return AODEModel(spec, columns, n, counts, joint, pair, m, alpha)
