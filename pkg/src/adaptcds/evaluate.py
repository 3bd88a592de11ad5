"""Cross-validation harness: stratified folds, in-fold preprocessing and
feature selection, pooled out-of-fold metrics, and the model/binning grid."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .cohort import Cohort
from .combine import DEFAULT_LIBRARY, EnsembleModel, ModelLibrary, VoteModel, ensemble_select
from .learners import ModelSpec, fit_model
from .metrics import MetricError, PredictionLog, accuracy, auc, fp_rate, h_measure, tp_rate
from .preprocess import (
    MODE_BIN_TARGET,
    MODE_CAIM,
    TargetBinarizer,
    apply_preprocess,
    fit_binarizer,
    fit_preprocess,
    labels_for,
    state_to_dict,
)
from .tabular import ABOVE, Column


class EvaluateError(Exception):
    pass


@dataclass(frozen=True)
class FoldPlan:
    n_folds: int
    seed: int
    assignment: tuple[int, ...]  # record index -> fold id
    stratified: bool

    def train_test(self, fold: int):
        train = [i for i, f in enumerate(self.assignment) if f != fold]
        test = [i for i, f in enumerate(self.assignment) if f == fold]
        return train, test


def make_folds(labels, seed: int, n_folds: int = 10, stratified: bool = True) -> FoldPlan:
    n = len(labels)
    if n < n_folds:
        raise EvaluateError(f"need at least {n_folds} records, got {n}")
    rng = np.random.default_rng(seed)
    assignment = [0] * n
    if stratified:
        next_fold = 0
        for cls in sorted(set(labels)):
            idx = [i for i, l in enumerate(labels) if l == cls]
            rng.shuffle(idx)
            for i in idx:
                assignment[i] = next_fold
                next_fold = (next_fold + 1) % n_folds
    else:
        idx = list(range(n))
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            assignment[i] = pos % n_folds
    return FoldPlan(n_folds, seed, tuple(assignment), stratified)


@dataclass(frozen=True)
class MetricRow:
    model: str
    binning: str
    accuracy: float
    auc: float
    tp_rate: float
    fp_rate: float
    h_measure: float
    selector: str | None = None

    def to_dict(self) -> dict:
        return {
            "Model": self.model,
            "Binning": self.binning,
            "Accuracy": self.accuracy,
            "AUC": self.auc,
            "TP rate": self.tp_rate,
            "FP rate": self.fp_rate,
            "H": self.h_measure,
            "Selector": self.selector,
        }


@dataclass(frozen=True)
class GridCell:
    mode: str
    spec: ModelSpec
    selector: str | None = None
    label: str | None = None

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        base = self.spec.method
        return f"{base}+{self.selector}" if self.selector else base


@dataclass
class FoldDetail:
    fold: int
    preprocess_state: dict  # serialized PreprocessState, for leakage sentinels
    selected_features: tuple[str, ...] | None
    ensemble_multiset: tuple[str, ...] | None = None


@dataclass
class CellResult:
    cell: GridCell
    log: PredictionLog
    metrics: MetricRow
    fold_details: list[FoldDetail] = field(default_factory=list)
    per_fold_auc: list[float] = field(default_factory=list)


def _reduce_columns(columns, rows, selected):
    keep = [j for j, c in enumerate(columns) if c.name in selected]
    cols = tuple(columns[j] for j in keep)
    return cols, [[r[j] for j in keep] for r in rows], keep


def _with_seed(spec: ModelSpec, seed: int) -> ModelSpec:
    if spec.method in ("RandomForest", "MLP") and "seed" not in spec.hyperparams:
        return ModelSpec(spec.method, {**spec.hyperparams, "seed": seed})
    return spec


def _stratified_split(labels, frac: float, rng):
    """Index split keeping class proportions; returns (major, minor)."""
    major, minor = [], []
    for cls in sorted(set(labels)):
        idx = [i for i, l in enumerate(labels) if l == cls]
        rng.shuffle(idx)
        cut = max(1, int(round(len(idx) * frac)))
        cut = min(cut, len(idx) - 1) if len(idx) > 1 else cut
        major.extend(idx[:cut])
        minor.extend(idx[cut:])
    return sorted(major), sorted(minor)


def _fit_cell_model(cell, columns, rows, labels, seed, fold):
    """Fit the model for one fold; returns (predictor, ensemble multiset or None)."""
    fold_seed = seed * 1009 + fold
    if cell.spec.method == "Ensemble":
        rng = np.random.default_rng(fold_seed)
        train_idx, climb_idx = _stratified_split(labels, 0.8, rng)
        sub_rows = [rows[i] for i in train_idx]
        sub_labels = [labels[i] for i in train_idx]
        members, hillclimb = {}, {}
        for k, method in enumerate(DEFAULT_LIBRARY):
            spec = _with_seed(ModelSpec(method), fold_seed * 10 + k)
            members[method] = fit_model(spec, columns, sub_rows, sub_labels)
            hillclimb[method] = [
                members[method].predict_proba(rows[i]).p_above for i in climb_idx
            ]
        library = ModelLibrary(DEFAULT_LIBRARY, members, hillclimb)
        climb_labels = [labels[i] for i in climb_idx]
        multiset, climb_auc = ensemble_select(library, climb_labels)
        return EnsembleModel(members, multiset, climb_auc), multiset
    if cell.spec.method == "Vote":
        members = {}
        for k, method in enumerate(DEFAULT_LIBRARY):
            spec = _with_seed(ModelSpec(method), fold_seed * 10 + k)
            members[method] = fit_model(spec, columns, rows, labels)
        return VoteModel(DEFAULT_LIBRARY, members), None
    spec = _with_seed(cell.spec, fold_seed)
    return fit_model(spec, columns, rows, labels), None


def run_cell(
    cohort: Cohort,
    cell: GridCell,
    seed: int,
    binarizer: TargetBinarizer | None = None,
    fold_plan: FoldPlan | None = None,
) -> CellResult:
    if cell.spec.requires_discrete and cell.mode != MODE_CAIM:
        raise EvaluateError(
            f"{cell.spec.method} needs discretized predictors; pair it with CAIM mode"
        )
    binarizer = binarizer or fit_binarizer(cohort)
    all_labels = labels_for(cohort, binarizer)
    plan = fold_plan or make_folds(all_labels, seed)

    n = len(cohort)
    pooled_p: list[float | None] = [None] * n
    fold_details: list[FoldDetail] = []
    per_fold_auc: list[float] = []
    for fold in range(plan.n_folds):
        train_idx, test_idx = plan.train_test(fold)
        train_cohort = Cohort(cohort.schema, tuple(cohort.records[i] for i in train_idx))
        try:
            state = fit_preprocess(train_cohort, cell.mode, binarizer)
            train_rows = [apply_preprocess(state, rec) for rec in train_cohort.records]
            train_labels = [all_labels[i] for i in train_idx]
            columns = state.columns
            selected = None
            if cell.selector:
                from .select import select_features

                selected = select_features(cell.selector, columns, train_rows, train_labels)
                columns, train_rows, keep = _reduce_columns(columns, train_rows, selected)
            model, multiset = _fit_cell_model(
                cell, columns, train_rows, train_labels, seed, fold
            )
            for i in test_idx:
                row = apply_preprocess(state, cohort.records[i])
                if selected is not None:
                    row = [row[j] for j in keep]
                pooled_p[i] = model.predict_proba(row).p_above
        except Exception as exc:
            raise EvaluateError(f"cell {cell.name!r} failed in fold {fold}: {exc}") from exc
        fold_details.append(
            FoldDetail(fold, state_to_dict(state), selected, multiset)
        )
        try:
            fold_log = PredictionLog(
                tuple(pooled_p[i] for i in test_idx),
                tuple(all_labels[i] for i in test_idx),
                tuple(fold for _ in test_idx),
            )
            per_fold_auc.append(auc(fold_log))
        except MetricError:
            per_fold_auc.append(float("nan"))

    if any(p is None for p in pooled_p):
        raise EvaluateError("pooled log does not cover every record")
    log = PredictionLog(tuple(pooled_p), tuple(all_labels), plan.assignment)
    row = MetricRow(
        model=cell.name,
        binning=cell.mode,
        accuracy=accuracy(log),
        auc=auc(log),
        tp_rate=tp_rate(log),
        fp_rate=fp_rate(log),
        h_measure=h_measure(log),
        selector=cell.selector,
    )
    return CellResult(cell, log, row, fold_details, per_fold_auc)


@dataclass
class GridResult:
    rows: list[MetricRow]
    seed: int
    fingerprint: str
    cells: list[CellResult] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "positive_class": ABOVE,
            "seed": self.seed,
            "fingerprint": self.fingerprint,
            "rows": [r.to_dict() for r in self.rows],
        }


def default_grid_cells() -> list[GridCell]:
    """The default grid: every method under each applicable binning mode."""
    cells = []
    both = ("NaiveBayes", "Tree", "RandomForest", "LogReg", "KNN", "MLP", "Ensemble", "Vote")
    for method in both:
        for mode in (MODE_BIN_TARGET, MODE_CAIM):
            cells.append(GridCell(mode, ModelSpec(method)))
    cells.append(GridCell(MODE_CAIM, ModelSpec("AODE")))
    cells.append(GridCell(MODE_CAIM, ModelSpec("BayesNetK2")))
    cells.append(GridCell(MODE_BIN_TARGET, ModelSpec("LinRegClassifier")))
    return cells


def grid_fingerprint(cells, seed: int) -> str:
    doc = [
        {"mode": c.mode, "method": c.spec.method, "hyper": sorted(c.spec.hyperparams.items()),
         "selector": c.selector}
        for c in cells
    ]
    return hashlib.sha256(json.dumps({"cells": doc, "seed": seed}).encode()).hexdigest()[:16]


def run_grid(cohort: Cohort, cells, seed: int) -> GridResult:
    if not cells:
        raise EvaluateError("grid needs at least one cell")
    binarizer = fit_binarizer(cohort)
    all_labels = labels_for(cohort, binarizer)
    plan = make_folds(all_labels, seed)
    results = [run_cell(cohort, c, seed, binarizer, plan) for c in cells]
    rows = sorted(
        (r.metrics for r in results), key=lambda m: (-m.auc, m.model, m.binning)
    )
    return GridResult(list(rows), seed, grid_fingerprint(cells, seed), results)
