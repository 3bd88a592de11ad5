"""Training-fold preprocessing: target binarization, z-score, imputation, CAIM.

All fitting happens on training data only; fitted states are immutable and
apply_* functions are pure.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .cohort import MISSING, Cohort, Record
from .tabular import ABOVE, BELOW, Column

MODE_BIN_TARGET = "BinTarget"
MODE_CAIM = "CAIM"
MODES = (MODE_BIN_TARGET, MODE_CAIM)


class PreprocessError(Exception):
    pass


# ---------------------------------------------------------------- target


@dataclass(frozen=True)
class TargetBinarizer:
    """Splits improvement (follow-up minus baseline) at the cohort mean."""

    threshold: float
    baseline_name: str
    followup_name: str

    def improvement(self, record: Record) -> float:
        base = record.get(self.baseline_name)
        follow = record.get(self.followup_name)
        if base is MISSING or follow is MISSING:
            raise PreprocessError("record lacks baseline or follow-up outcome")
        return follow - base

    def label(self, record: Record) -> str:
        # ties at the mean go to "above"
        return ABOVE if self.improvement(record) >= self.threshold else BELOW


def fit_binarizer(cohort: Cohort) -> TargetBinarizer:
    if not cohort.records:
        raise PreprocessError("cannot fit binarizer on empty cohort")
    base = cohort.schema.target_baseline
    follow = cohort.schema.target_followup
    improvements = []
    for rec in cohort.records:
        b, f = rec.get(base), rec.get(follow)
        if b is MISSING or f is MISSING:
            raise PreprocessError("binarizer requires screened cohort (no missing outcomes)")
        improvements.append(f - b)
    threshold = sum(improvements) / len(improvements)
    if not math.isfinite(threshold):
        raise PreprocessError("non-finite improvement mean")
    return TargetBinarizer(threshold, base, follow)


def labels_for(cohort: Cohort, binarizer: TargetBinarizer) -> list[str]:
    return [binarizer.label(rec) for rec in cohort.records]


# ---------------------------------------------------------------- z-score


@dataclass(frozen=True)
class ZScoreParams:
    stats: dict  # name -> (mean, sd); sample sd, sd=0 kept as-is

    def transform(self, name: str, value: float) -> float:
        mean, sd = self.stats[name]
        if sd == 0.0:
            return 0.0
        return (value - mean) / sd


def fit_zscore(train: Cohort, feature_names: list[str]) -> ZScoreParams:
    stats = {}
    for name in feature_names:
        observed = [v for v in train.column(name) if v is not MISSING]
        if not observed:
            stats[name] = (0.0, 0.0)
            continue
        mean = sum(observed) / len(observed)
        if len(observed) > 1:
            sd = math.sqrt(sum((v - mean) ** 2 for v in observed) / (len(observed) - 1))
        else:
            sd = 0.0
        stats[name] = (mean, sd)
    return ZScoreParams(stats)


# ---------------------------------------------------------------- imputation


@dataclass(frozen=True)
class ImputeParams:
    fills: dict  # name -> fill value

    def fill(self, name: str, value):
        return self.fills[name] if value is MISSING else value


def fit_impute(train: Cohort, feature_names: list[str]) -> ImputeParams:
    fills = {}
    for name in feature_names:
        spec = train.schema.get(name)
        observed = [v for v in train.column(name) if v is not MISSING]
        if not observed:
            raise PreprocessError(f"feature {name!r}: no observed training values to impute from")
        if spec.kind == "numeric":
            fills[name] = sum(observed) / len(observed)
        else:
            counts = {c: 0 for c in spec.categories}
            for v in observed:
                counts[v] += 1
            fills[name] = max(spec.categories, key=lambda c: counts[c])
    return ImputeParams(fills)


# ---------------------------------------------------------------- CAIM


@dataclass(frozen=True)
class CutPoints:
    boundaries: tuple[float, ...]  # strictly increasing
    labels: tuple[str, ...]  # one per interval, len = boundaries + 1

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.boundaries, self.boundaries[1:])):
            raise PreprocessError("boundaries must be strictly increasing")
        if len(self.labels) != len(self.boundaries) + 1:
            raise PreprocessError("need one label per interval")

    def interval(self, value: float) -> int:
        """0-based interval index; intervals are (-inf,b1], (b1,b2], ..., (bk,inf)."""
        return bisect.bisect_left(self.boundaries, value)

    def apply(self, value: float) -> str:
        return self.labels[self.interval(value)]


def caim_score(contingency: list[list[int]]) -> float:
    """CAIM criterion: mean over intervals of (dominant class count)^2 / interval total."""
    if not contingency:
        raise PreprocessError("no intervals")
    total = 0.0
    for counts in contingency:
        m = sum(counts)
        if m == 0:
            raise PreprocessError("empty interval")
        total += max(counts) ** 2 / m
    return total / len(contingency)


def _contingency(values, class_ids, n_classes, boundaries):
    table = [[0] * n_classes for _ in range(len(boundaries) + 1)]
    for v, c in zip(values, class_ids):
        table[bisect.bisect_left(boundaries, v)][c] += 1
    return table


def caim_fit(values: list[float], labels: list[str]) -> CutPoints:
    """Greedy CAIM boundary selection over midpoint candidates.

    Boundaries are accepted while the criterion strictly improves, or while
    the interval count is still below the number of classes.
    """
    if len(values) != len(labels):
        raise PreprocessError("values and labels must align")
    if not values:
        raise PreprocessError("no values to discretize")
    classes = sorted(set(labels))
    class_ids = [classes.index(l) for l in labels]
    n_classes = len(classes)
    distinct = sorted(set(values))
    candidates = [(a + b) / 2.0 for a, b in zip(distinct, distinct[1:])]

    accepted: list[float] = []
    score = caim_score(_contingency(values, class_ids, n_classes, []))
    remaining = list(candidates)
    while remaining:
        best_c, best_s = None, -math.inf
        for c in remaining:
            trial = sorted(accepted + [c])
            s = caim_score(_contingency(values, class_ids, n_classes, trial))
            if s > best_s:
                best_c, best_s = c, s
        if best_s > score or len(accepted) + 1 < n_classes:
            accepted.append(best_c)
            accepted.sort()
            remaining.remove(best_c)
            score = best_s
        else:
            break
    labels_out = tuple(f"i{k + 1}" for k in range(len(accepted) + 1))
    return CutPoints(tuple(accepted), labels_out)


def caim_apply(cutpoints: CutPoints, value: float) -> str:
    return cutpoints.apply(value)


# ---------------------------------------------------------------- pipeline


@dataclass(frozen=True)
class PreprocessState:
    """Fitted per-fold transform: impute -> z-score -> (CAIM mode) discretize."""

    mode: str
    binarizer: TargetBinarizer
    zscore: ZScoreParams
    impute: ImputeParams
    cutpoints: dict | None  # name -> CutPoints, CAIM mode only
    columns: tuple[Column, ...]  # output layout, schema predictor order

    def __post_init__(self):
        if self.mode not in MODES:
            raise PreprocessError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_CAIM and self.cutpoints is None:
            raise PreprocessError("CAIM mode requires cutpoints")


def fit_preprocess(
    train: Cohort, mode: str, binarizer: TargetBinarizer
) -> PreprocessState:
    if mode not in MODES:
        raise PreprocessError(f"unknown mode {mode!r}")
    predictors = train.schema.predictors()
    numeric = [f.name for f in predictors if f.kind == "numeric"]
    impute = fit_impute(train, [f.name for f in predictors])
    zscore = fit_zscore(train, numeric)

    cutpoints = None
    if mode == MODE_CAIM:
        labels = labels_for(train, binarizer)
        cutpoints = {}
        for name in numeric:
            zs = [
                zscore.transform(name, impute.fill(name, v))
                for v in train.column(name)
            ]
            cutpoints[name] = caim_fit(zs, labels)

    columns = []
    for f in predictors:
        if f.kind == "numeric":
            if mode == MODE_CAIM:
                columns.append(Column(f.name, "categorical", cutpoints[f.name].labels))
            else:
                columns.append(Column(f.name, "numeric"))
        else:
            columns.append(Column(f.name, "categorical", f.categories))
    return PreprocessState(mode, binarizer, zscore, impute, cutpoints, tuple(columns))


def apply_preprocess(state: PreprocessState, record: Record) -> list:
    """Produce one model-ready row in state.columns order."""
    row = []
    for col in state.columns:
        raw = state.impute.fill(col.name, record.get(col.name))
        if col.name in state.zscore.stats:
            z = state.zscore.transform(col.name, raw)
            if state.mode == MODE_CAIM:
                row.append(state.cutpoints[col.name].apply(z))
            else:
                row.append(z)
        else:
            row.append(raw)
    return row


# ---------------------------------------------------------------- serialization


def state_to_dict(state: PreprocessState) -> dict:
    return {
        "mode": state.mode,
        "binarizer": {
            "threshold": state.binarizer.threshold,
            "baseline_name": state.binarizer.baseline_name,
            "followup_name": state.binarizer.followup_name,
        },
        "zscore": {k: list(v) for k, v in state.zscore.stats.items()},
        "impute": dict(state.impute.fills),
        "cutpoints": None
        if state.cutpoints is None
        else {
            k: {"boundaries": list(cp.boundaries), "labels": list(cp.labels)}
            for k, cp in state.cutpoints.items()
        },
        "columns": [
            {"name": c.name, "kind": c.kind, "categories": list(c.categories)}
            for c in state.columns
        ],
    }


def state_from_dict(doc: dict) -> PreprocessState:
    cutpoints = None
    if doc["cutpoints"] is not None:
        cutpoints = {
            k: CutPoints(tuple(v["boundaries"]), tuple(v["labels"]))
            for k, v in doc["cutpoints"].items()
        }
    return PreprocessState(
        mode=doc["mode"],
        binarizer=TargetBinarizer(**doc["binarizer"]),
        zscore=ZScoreParams({k: tuple(v) for k, v in doc["zscore"].items()}),
        impute=ImputeParams(dict(doc["impute"])),
        cutpoints=cutpoints,
        columns=tuple(
            Column(c["name"], c["kind"], tuple(c["categories"])) for c in doc["columns"]
        ),
    )
