"""Versioned JSON model artifacts: preprocessing state, fitted model, and
training metadata bundled for exact reload."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .cohort import Cohort, CohortSchema, Record, schema_from_dict, schema_to_dict
from .combine import EnsembleModel, VoteModel
from .evaluate import GridCell, _fit_cell_model, _reduce_columns
from .learners import ClassDistribution, model_from_dict, model_to_dict
from .preprocess import (
    PreprocessState,
    apply_preprocess,
    fit_binarizer,
    fit_preprocess,
    labels_for,
    state_from_dict,
    state_to_dict,
)

FORMAT_VERSION = 1


class ArtifactError(Exception):
    pass


def schema_fingerprint(schema: CohortSchema) -> str:
    doc = json.dumps(schema_to_dict(schema), sort_keys=True)
    return hashlib.sha256(doc.encode()).hexdigest()[:16]


def _model_doc(model) -> dict:
    if isinstance(model, (EnsembleModel, VoteModel)):
        return {"method": model.method, "params": model.to_dict()}
    return {"method": model.spec.method, "params": model_to_dict(model)}


def _model_from_doc(doc: dict):
    if doc["method"] == "Ensemble":
        return EnsembleModel.from_dict(doc["params"])
    if doc["method"] == "Vote":
        return VoteModel.from_dict(doc["params"])
    return model_from_dict(doc["params"])


@dataclass
class ModelArtifact:
    schema: CohortSchema
    preprocess_state: PreprocessState
    model: object
    selected_features: tuple[str, ...] | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def method(self) -> str:
        return self.model.method if hasattr(self.model, "method") else "unknown"

    def _keep_indices(self) -> list[int] | None:
        if self.selected_features is None:
            return None
        names = set(self.selected_features)
        return [j for j, c in enumerate(self.preprocess_state.columns) if c.name in names]

    def predict(self, record: Record) -> ClassDistribution:
        row = apply_preprocess(self.preprocess_state, record)
        keep = self._keep_indices()
        if keep is not None:
            row = [row[j] for j in keep]
        return self.model.predict_proba(row)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "schema_fingerprint": schema_fingerprint(self.schema),
            "schema": schema_to_dict(self.schema),
            "preprocess_state": state_to_dict(self.preprocess_state),
            "model": _model_doc(self.model),
            "selected_features": (
                None if self.selected_features is None else list(self.selected_features)
            ),
            "metadata": self.metadata,
        }


def artifact_from_dict(doc: dict) -> ModelArtifact:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ArtifactError(f"unsupported artifact format version {version!r}")
    schema = schema_from_dict(doc["schema"])
    if doc.get("schema_fingerprint") != schema_fingerprint(schema):
        raise ArtifactError("artifact schema fingerprint mismatch")
    selected = doc.get("selected_features")
    return ModelArtifact(
        schema,
        state_from_dict(doc["preprocess_state"]),
        _model_from_doc(doc["model"]),
        None if selected is None else tuple(selected),
        dict(doc.get("metadata", {})),
    )


def save_artifact(artifact: ModelArtifact, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(artifact.to_dict(), fh, indent=2)


def load_artifact(path) -> ModelArtifact:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ArtifactError(f"cannot read artifact {path}: {exc}") from exc
    return artifact_from_dict(doc)


def train_artifact(cohort: Cohort, cell: GridCell, seed: int,
                   metrics: dict | None = None) -> ModelArtifact:
    """Fit one grid cell on the full cohort and wrap it for persistence."""
    binarizer = fit_binarizer(cohort)
    labels = labels_for(cohort, binarizer)
    state = fit_preprocess(cohort, cell.mode, binarizer)
    rows = [apply_preprocess(state, rec) for rec in cohort.records]
    columns = state.columns
    selected = None
    if cell.selector:
        from .select import select_features

        selected = select_features(cell.selector, columns, rows, labels)
        columns, rows, _ = _reduce_columns(columns, rows, selected)
    model, multiset = _fit_cell_model(cell, columns, rows, labels, seed, fold=0)
    metadata = {
        "seed": seed,
        "mode": cell.mode,
        "method": cell.spec.method,
        "selector": cell.selector,
        "n_records": len(cohort),
        "trained_at": datetime.now(timezone.utc).isoformat(),
    }
    if multiset:
        metadata["ensemble_multiset"] = list(multiset)
    if metrics:
        metadata["metrics"] = metrics
    return ModelArtifact(cohort.schema, state, model, selected, metadata)
