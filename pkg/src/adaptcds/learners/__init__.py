"""Classifier grid: one fit/predict-probability contract across nine methods."""

from __future__ import annotations

from ..tabular import columns_from_dict, columns_to_dict
from .base import (
    ClassDistribution,
    LearnerError,
    Model,
    ModelSpec,
    RowEncoder,
    distribution,
)
from .bayes import AODEModel, NaiveBayesModel, fit_aode, fit_naive_bayes
from .bayesnet import BayesNetK2Model, fit_bayesnet_k2, k2_log_score
from .knn import KNNModel, fit_knn
from .linear import (
    LinRegClassifierModel,
    LogRegModel,
    fit_linreg_classifier,
    fit_logreg,
    logreg_objective,
)
from .mlp import MLPModel, fit_mlp, mlp_loss_and_grads
from .trees import RandomForestModel, TreeModel, fit_random_forest, fit_tree

_FITTERS = {
    "NaiveBayes": fit_naive_bayes,
    "AODE": fit_aode,
    "BayesNetK2": fit_bayesnet_k2,
    "Tree": fit_tree,
    "RandomForest": fit_random_forest,
    "LogReg": fit_logreg,
    "KNN": fit_knn,
    "MLP": fit_mlp,
    "LinRegClassifier": fit_linreg_classifier,
}

_MODEL_CLASSES = {
    cls.method: cls
    for cls in (
        NaiveBayesModel,
        AODEModel,
        BayesNetK2Model,
        TreeModel,
        RandomForestModel,
        LogRegModel,
        KNNModel,
        MLPModel,
        LinRegClassifierModel,
    )
}

METHODS = tuple(_FITTERS)


def fit_model(spec: ModelSpec, columns, rows, labels) -> Model:
    if spec.method not in _FITTERS:
        raise LearnerError(f"unknown method {spec.method!r}")
    return _FITTERS[spec.method](spec, columns, rows, labels)


def model_to_dict(model: Model) -> dict:
    return {
        "method": model.spec.method,
        "hyperparams": dict(model.spec.hyperparams),
        "columns": columns_to_dict(model.columns),
        "params": model.params_to_dict(),
    }


def model_from_dict(doc: dict) -> Model:
    cls = _MODEL_CLASSES.get(doc["method"])
    if cls is None:
        raise LearnerError(f"unknown method {doc['method']!r}")
    spec = ModelSpec(doc["method"], dict(doc["hyperparams"]))
    columns = columns_from_dict(doc["columns"])
    return cls.params_from_dict(spec, columns, doc["params"])


__all__ = [
    "ClassDistribution",
    "LearnerError",
    "METHODS",
    "Model",
    "ModelSpec",
    "RowEncoder",
    "distribution",
    "fit_model",
    "k2_log_score",
    "logreg_objective",
    "mlp_loss_and_grads",
    "model_from_dict",
    "model_to_dict",
]
