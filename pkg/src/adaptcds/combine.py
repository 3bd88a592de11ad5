"""Ensemble selection (greedy, AUC-hillclimbed, with replacement) and
maximum-probability voting over a fixed member library."""

from __future__ import annotations

from dataclasses import dataclass

from .learners import ClassDistribution, Model, distribution, model_from_dict, model_to_dict
from .metrics import MetricError, PredictionLog, auc
from .tabular import ABOVE

DEFAULT_LIBRARY = ("NaiveBayes", "MLP", "RandomForest", "KNN", "LogReg")


class CombineError(Exception):
    pass


@dataclass
class ModelLibrary:
    """Named fitted members plus their predictions on the hillclimb split."""

    names: tuple[str, ...]
    members: dict  # name -> Model
    hillclimb: dict  # name -> list of p_above on the hillclimb set

    def __post_init__(self):
        if not self.names:
            raise CombineError("empty library")
        prints = {self.members[n].fingerprint for n in self.names}
        if len(prints) != 1:
            raise CombineError("members trained on different column layouts")


def _auc_of(ps, labels) -> float:
    log = PredictionLog(tuple(ps), tuple(labels), tuple(0 for _ in ps))
    return auc(log)


def ensemble_select(library: ModelLibrary, hillclimb_labels, max_iters: int = 50):
    """Forward selection with replacement, maximizing hillclimb AUC.

    Returns (member multiset, achieved AUC). Never worse than the best
    single member, by construction.
    """
    best_single = max(
        library.names, key=lambda n: (_auc_of(library.hillclimb[n], hillclimb_labels),
                                      -library.names.index(n))
    )
    multiset = [best_single]
    sums = list(library.hillclimb[best_single])
    current = _auc_of(sums, hillclimb_labels)
    for _ in range(max_iters - 1):
        best_name, best_auc = None, current
        for name in library.names:
            # mean over multiset + candidate
            mean = [
                (s + p) / (len(multiset) + 1) for s, p in zip(sums, library.hillclimb[name])
            ]
            a = _auc_of(mean, hillclimb_labels)
            if a > best_auc + 1e-12:
                best_name, best_auc = name, a
        if best_name is None:
            break
        multiset.append(best_name)
        sums = [s + p for s, p in zip(sums, library.hillclimb[best_name])]
        current = best_auc
    return tuple(multiset), current


class EnsembleModel:
    """Arithmetic mean of member probabilities over a selection multiset."""

    method = "Ensemble"

    def __init__(self, members: dict, multiset: tuple[str, ...], hillclimb_auc: float = None):
        if not multiset:
            raise CombineError("empty ensemble")
        self.members = members
        self.multiset = tuple(multiset)
        self.hillclimb_auc = hillclimb_auc
        self.fingerprint = members[multiset[0]].fingerprint

    def predict_proba(self, row) -> ClassDistribution:
        total = sum(self.members[name].predict_proba(row).p_above for name in self.multiset)
        return distribution(total / len(self.multiset))

    def to_dict(self) -> dict:
        return {
            "multiset": list(self.multiset),
            "hillclimb_auc": self.hillclimb_auc,
            "members": {n: model_to_dict(m) for n, m in self.members.items()},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "EnsembleModel":
        members = {n: model_from_dict(d) for n, d in doc["members"].items()}
        return cls(members, tuple(doc["multiset"]), doc.get("hillclimb_auc"))


class VoteModel:
    """Committee vote: the single highest class probability anywhere wins."""

    method = "Vote"

    def __init__(self, names: tuple[str, ...], members: dict):
        if not names:
            raise CombineError("empty committee")
        self.names = tuple(names)
        self.members = members
        self.fingerprint = members[names[0]].fingerprint

    def predict_proba(self, row) -> ClassDistribution:
        return vote_predict([self.members[n] for n in self.names], row)

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "members": {n: model_to_dict(m) for n, m in self.members.items()},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "VoteModel":
        members = {n: model_from_dict(d) for n, d in doc["members"].items()}
        return cls(tuple(doc["names"]), members)


def vote_predict(members, row) -> ClassDistribution:
    """Emit the distribution of the member holding the maximum class probability.

    Ties break by member order, then class "above".
    """
    if not members:
        raise CombineError("no members to vote")
    best = None  # (prob, member index, dist)
    for idx, member in enumerate(members):
        dist = member.predict_proba(row)
        for prob in (dist.p_above, dist.p_below):  # "above" checked first on ties
            if best is None or prob > best[0]:
                best = (prob, idx, dist)
    return best[2]


def ensemble_predict(ensemble: EnsembleModel, row) -> ClassDistribution:
    return ensemble.predict_proba(row)
