"""Bayesian network classifier: greedy K2 structure search, add-alpha CPTs.

Node order is fixed: class node first, then feature columns in schema order.
Parent sets grow greedily while the Cooper-Herskovits log-score strictly
improves, capped at max_parents.
"""

from __future__ import annotations

import math
from math import lgamma

from ..tabular import ABOVE, BELOW, CLASSES
from .base import LearnerError, Model, ModelSpec, require_discrete


def k2_log_score(node_values: list, parent_rows: list[tuple], arity: int) -> float:
    """Cooper-Herskovits score of one node given its parent value rows."""
    groups: dict[tuple, dict] = {}
    for v, cfg in zip(node_values, parent_rows):
        groups.setdefault(cfg, {})
        groups[cfg][v] = groups[cfg].get(v, 0) + 1
    score = 0.0
    for counts in groups.values():
        nj = sum(counts.values())
        score += lgamma(arity) - lgamma(nj + arity)
        for njk in counts.values():
            score += lgamma(njk + 1)
    return score


class BayesNetK2Model(Model):
    method = "BayesNetK2"

    def __init__(self, spec, columns, node_values, parent_sets, cpts, alpha):
        super().__init__(spec, columns)
        self.node_values = node_values  # per node: tuple of possible values
        self.parent_sets = parent_sets  # per node: tuple of parent node indices
        # cpts[node] = list of {"config": [...], "probs": {value: p}}
        self.cpts = cpts
        self.alpha = alpha

    def _local_logp(self, node, value, assignment):
        cfg = tuple(assignment[p] for p in self.parent_sets[node])
        table = self.cpts[node].get(cfg)
        if table is None:
            return -math.log(len(self.node_values[node]))  # unseen config: uniform
        return math.log(table[value])

    def _proba(self, row) -> float:
        logs = {}
        for c in CLASSES:
            assignment = [c] + list(row)
            logs[c] = sum(
                self._local_logp(i, assignment[i], assignment)
                for i in range(len(assignment))
            )
        m = max(logs.values())
        za = math.exp(logs[ABOVE] - m)
        zb = math.exp(logs[BELOW] - m)
        return za / (za + zb)

    def params_to_dict(self) -> dict:
        return {
            "node_values": [list(v) for v in self.node_values],
            "parent_sets": [list(p) for p in self.parent_sets],
            "cpts": [
                [{"config": list(cfg), "probs": probs} for cfg, probs in sorted(tbl.items())]
                for tbl in self.cpts
            ],
            "alpha": self.alpha,
        }

    @classmethod
    def params_from_dict(cls, spec, columns, doc):
        cpts = [
            {tuple(e["config"]): e["probs"] for e in tbl} for tbl in doc["cpts"]
        ]
        return cls(
            spec, columns,
            [tuple(v) for v in doc["node_values"]],
            [tuple(p) for p in doc["parent_sets"]],
            cpts, doc["alpha"],
        )


def fit_bayesnet_k2(spec: ModelSpec, columns, rows, labels) -> BayesNetK2Model:
    require_discrete(columns)
    max_parents = int(spec.hyperparams.get("max_parents", 3))
    alpha = float(spec.hyperparams.get("cpt_smoothing", 0.5))
    if not rows:
        raise LearnerError("no training rows")

    node_values = [tuple(CLASSES)] + [tuple(c.categories) for c in columns]
    data = [[l] + list(r) for r, l in zip(rows, labels)]
    n_nodes = len(node_values)

    parent_sets: list[tuple[int, ...]] = []
    for i in range(n_nodes):
        col_i = [rec[i] for rec in data]
        arity = len(node_values[i])
        parents: list[int] = []
        best = k2_log_score(col_i, [()] * len(data), arity)
        while len(parents) < max_parents:
            best_cand, best_score = None, best
            for cand in range(i):
                if cand in parents:
                    continue
                trial = sorted(parents + [cand])
                cfg_rows = [tuple(rec[p] for p in trial) for rec in data]
                s = k2_log_score(col_i, cfg_rows, arity)
                if s > best_score:
                    best_cand, best_score = cand, s
            if best_cand is None:
                break
            parents = sorted(parents + [best_cand])
            best = best_score
        parent_sets.append(tuple(parents))

    # CPTs over observed parent configs; unseen configs handled as uniform
    cpts = []
    for i in range(n_nodes):
        arity = len(node_values[i])
        groups: dict[tuple, dict] = {}
        for rec in data:
            cfg = tuple(rec[p] for p in parent_sets[i])
            groups.setdefault(cfg, {v: 0 for v in node_values[i]})
            groups[cfg][rec[i]] += 1
        table = {}
        for cfg, counts in groups.items():
            total = sum(counts.values())
            table[cfg] = {
                v: (counts[v] + alpha) / (total + alpha * arity) for v in node_values[i]
            }
        cpts.append(table)
    return BayesNetK2Model(spec, columns, node_values, parent_sets, cpts, alpha)
