"""Clinical cohort data model: schema, CSV ingest, screening, summaries."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

MISSING = None
MISSING_TOKENS = {"", "NA"}


class CohortError(Exception):
    """Schema violation or unreadable cohort file."""


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str  # "numeric" | "categorical" | "binary"
    role: str = "predictor"  # "predictor" | "target_raw" | "identifier"
    service_field: bool = False
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("numeric", "categorical", "binary"):
            raise CohortError(f"feature {self.name!r}: unknown kind {self.kind!r}")
        if self.role not in ("predictor", "target_raw", "identifier"):
            raise CohortError(f"feature {self.name!r}: unknown role {self.role!r}")
        if self.kind in ("categorical", "binary"):
            if len(self.categories) < 2:
                raise CohortError(
                    f"feature {self.name!r}: categorical/binary needs >=2 categories"
                )
            if self.kind == "binary" and len(self.categories) != 2:
                raise CohortError(f"feature {self.name!r}: binary needs exactly 2 categories")
        elif self.categories:
            raise CohortError(f"feature {self.name!r}: numeric spec must not list categories")
        if self.service_field and self.role != "predictor":
            raise CohortError(f"feature {self.name!r}: service_field implies role=predictor")

    def parse(self, text: str):
        """Parse one CSV cell for this feature. Empty/NA -> MISSING."""
        text = text.strip()
        if text in MISSING_TOKENS:
            return MISSING
        if self.kind == "numeric":
            try:
                return float(text)
            except ValueError:
                raise CohortError(f"unparseable numeric {text!r}") from None
        if text not in self.categories:
            raise CohortError(
                f"category {text!r} not in {list(self.categories)}"
            )
        return text

    def validate(self, value) -> None:
        if value is MISSING:
            return
        if self.kind == "numeric":
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise CohortError(f"feature {self.name!r}: expected number, got {value!r}")
        elif value not in self.categories:
            raise CohortError(f"feature {self.name!r}: category {value!r} not allowed")


@dataclass(frozen=True)
class CohortSchema:
    features: tuple[FeatureSpec, ...]
    target_baseline: str
    target_followup: str

    def __post_init__(self):
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise CohortError("duplicate feature names in schema")
        for t in (self.target_baseline, self.target_followup):
            spec = self.get(t)
            if spec is None or spec.role != "target_raw":
                raise CohortError(f"target field {t!r} missing or not role=target_raw")
        if self.target_baseline == self.target_followup:
            raise CohortError("baseline and follow-up targets must differ")
        extra_targets = [
            f.name for f in self.features
            if f.role == "target_raw"
            and f.name not in (self.target_baseline, self.target_followup)
        ]
        if extra_targets:
            raise CohortError(f"unexpected target_raw features: {extra_targets}")
        if not self.predictors():
            raise CohortError("schema needs >=1 predictor")
        if not any(f.service_field for f in self.features):
            raise CohortError("schema needs >=1 service_field predictor")

    def get(self, name: str) -> FeatureSpec | None:
        for f in self.features:
            if f.name == name:
                return f
        return None

    def predictors(self) -> list[FeatureSpec]:
        return [f for f in self.features if f.role == "predictor"]

    def service_fields(self) -> list[FeatureSpec]:
        return [f for f in self.features if f.service_field]

    def names(self) -> list[str]:
        return [f.name for f in self.features]


@dataclass(frozen=True)
class Record:
    values: dict

    def get(self, name: str):
        return self.values.get(name, MISSING)

    def is_missing(self, name: str) -> bool:
        return self.values.get(name, MISSING) is MISSING

    def with_overrides(self, overrides: dict) -> "Record":
        merged = dict(self.values)
        merged.update(overrides)
        return Record(merged)


@dataclass(frozen=True)
class Cohort:
    schema: CohortSchema
    records: tuple[Record, ...]

    def __post_init__(self):
        for i, rec in enumerate(self.records):
            for name, value in rec.values.items():
                spec = self.schema.get(name)
                if spec is None:
                    raise CohortError(f"record {i}: unknown feature {name!r}")
                try:
                    spec.validate(value)
                except CohortError as exc:
                    raise CohortError(f"record {i}: {exc}") from None

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> list:
        return [rec.get(name) for rec in self.records]


@dataclass
class ScreenReport:
    input_count: int
    retained_count: int
    drop_reasons: dict = field(default_factory=dict)

    def check(self) -> None:
        if self.retained_count + sum(self.drop_reasons.values()) != self.input_count:
            raise CohortError("screen report counts do not add up")


def load_cohort(path, schema: CohortSchema) -> Cohort:
    """Load a CSV cohort; header must match schema names (any order)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CohortError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        known = set(schema.names())
        for col in header:
            if col not in known:
                raise CohortError(f"{path}: unknown column {col!r}")
        missing_cols = known - set(header)
        if missing_cols:
            raise CohortError(f"{path}: missing columns {sorted(missing_cols)}")
        records = []
        for row_idx, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise CohortError(f"{path} row {row_idx}: expected {len(header)} cells")
            values = {}
            for col, cell in zip(header, row):
                spec = schema.get(col)
                try:
                    values[col] = spec.parse(cell)
                except CohortError as exc:
                    raise CohortError(f"{path} row {row_idx}, column {col!r}: {exc}") from None
            records.append(Record(values))
    return Cohort(schema, tuple(records))


def write_cohort(cohort: Cohort, path) -> None:
    names = cohort.schema.names()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for rec in cohort.records:
            row = []
            for name in names:
                v = rec.get(name)
                if v is MISSING:
                    row.append("")
                elif isinstance(v, float):
                    row.append(repr(v))
                else:
                    row.append(str(v))
            writer.writerow(row)


def screen(cohort: Cohort, required: list[str]) -> tuple[Cohort, ScreenReport]:
    """Drop records missing any required field; account for every drop."""
    for name in required:
        if cohort.schema.get(name) is None:
            raise CohortError(f"required field {name!r} not in schema")
    kept = []
    drops: dict[str, int] = {}
    for rec in cohort.records:
        missing = [name for name in required if rec.is_missing(name)]
        if missing:
            reason = f"missing:{missing[0]}"
            drops[reason] = drops.get(reason, 0) + 1
        else:
            kept.append(rec)
    report = ScreenReport(len(cohort.records), len(kept), drops)
    report.check()
    return Cohort(cohort.schema, tuple(kept)), report


def summarize(cohort: Cohort) -> dict:
    """Per-feature counts, missing rates, and moments/frequencies."""
    out = {}
    n = len(cohort)
    for spec in cohort.schema.features:
        col = cohort.column(spec.name)
        observed = [v for v in col if v is not MISSING]
        entry: dict = {
            "count": len(observed),
            "missing_rate": (n - len(observed)) / n if n else 0.0,
        }
        if spec.kind == "numeric":
            if observed:
                mean = sum(observed) / len(observed)
                entry["mean"] = mean
                if len(observed) > 1:
                    var = sum((v - mean) ** 2 for v in observed) / (len(observed) - 1)
                    entry["sd"] = math.sqrt(var)
                else:
                    entry["sd"] = None
            else:
                entry["mean"] = None
                entry["sd"] = None
        else:
            freqs: dict[str, int] = {}
            for v in observed:
                freqs[v] = freqs.get(v, 0) + 1
            entry["frequencies"] = freqs
        out[spec.name] = entry
    return out


def schema_to_dict(schema: CohortSchema) -> dict:
    return {
        "features": [
            {
                "name": f.name,
                "kind": f.kind,
                "role": f.role,
                "service_field": f.service_field,
                "categories": list(f.categories),
            }
            for f in schema.features
        ],
        "target_baseline": schema.target_baseline,
        "target_followup": schema.target_followup,
    }


def schema_from_dict(doc: dict) -> CohortSchema:
    try:
        features = tuple(
            FeatureSpec(
                name=f["name"],
                kind=f["kind"],
                role=f.get("role", "predictor"),
                service_field=bool(f.get("service_field", False)),
                categories=tuple(f.get("categories", ())),
            )
            for f in doc["features"]
        )
        return CohortSchema(features, doc["target_baseline"], doc["target_followup"])
    except KeyError as exc:
        raise CohortError(f"schema document missing key {exc}") from None
