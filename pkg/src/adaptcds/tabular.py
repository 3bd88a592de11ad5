"""Model-ready row layout: typed columns plus a schema fingerprint."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

ABOVE = "above"
BELOW = "below"
CLASSES = (BELOW, ABOVE)


class SchemaMismatch(Exception):
    """Row columns do not match the layout a model was trained on."""


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # "numeric" | "categorical"
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind == "numeric" and self.categories:
            raise ValueError(f"numeric column {self.name!r} must not list categories")
        if self.kind == "categorical" and not self.categories:
            raise ValueError(f"categorical column {self.name!r} needs categories")


def fingerprint(columns: list[Column] | tuple[Column, ...]) -> str:
    h = hashlib.sha256()
    for col in columns:
        h.update(repr((col.name, col.kind, col.categories)).encode())
    return h.hexdigest()[:16]


def check_row(columns, row) -> None:
    if len(row) != len(columns):
        raise SchemaMismatch(f"expected {len(columns)} values, got {len(row)}")
    for col, v in zip(columns, row):
        if col.kind == "numeric":
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise SchemaMismatch(f"column {col.name!r}: expected number, got {v!r}")
        elif v not in col.categories:
            raise SchemaMismatch(f"column {col.name!r}: unknown category {v!r}")


def columns_to_dict(columns) -> list[dict]:
    return [
        {"name": c.name, "kind": c.kind, "categories": list(c.categories)}
        for c in columns
    ]


def columns_from_dict(docs) -> tuple[Column, ...]:
    return tuple(
        Column(d["name"], d["kind"], tuple(d.get("categories", ()))) for d in docs
    )
