"""What-if service recommendations: join a client record with each package in
a catalog, predict the outcome probability, and rank the packages."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .artifact import ModelArtifact
from .cohort import CohortError, CohortSchema, Record
from .synth import PROFILES, VOLUMES


class RecommendError(Exception):
    pass


class UnknownFieldError(RecommendError):
    """Client record names a field absent from the schema."""


@dataclass(frozen=True)
class ServicePackage:
    id: str
    name: str
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise RecommendError("package needs a non-empty id")
        if not self.overrides:
            raise RecommendError(f"package {self.id!r} overrides nothing")


@dataclass(frozen=True)
class PackageCatalog:
    packages: tuple[ServicePackage, ...]

    def __post_init__(self):
        if not self.packages:
            raise RecommendError("catalog is empty")
        ids = [p.id for p in self.packages]
        if len(set(ids)) != len(ids):
            raise RecommendError("duplicate package ids in catalog")

    def validate_against(self, schema: CohortSchema) -> None:
        service_names = {f.name for f in schema.service_fields()}
        for pkg in self.packages:
            for name, value in pkg.overrides.items():
                if name not in service_names:
                    raise RecommendError(
                        f"package {pkg.id!r} overrides non-service field {name!r}"
                    )
                schema.get(name).validate(value)


@dataclass(frozen=True)
class Recommendation:
    package_id: str
    name: str
    p_above: float
    rank: int

    def to_dict(self) -> dict:
        return {
            "package_id": self.package_id,
            "name": self.name,
            "p_above": self.p_above,
            "rank": self.rank,
        }


def validate_client(schema: CohortSchema, client: Record) -> None:
    """Check field names and values; service and target fields may be absent."""
    for name, value in client.values.items():
        spec = schema.get(name)
        if spec is None:
            raise UnknownFieldError(f"unknown field {name!r}")
        spec.validate(value)


def what_if(artifact: ModelArtifact, client: Record, catalog: PackageCatalog):
    """Rank every catalog package by predicted p_above for this client."""
    schema = artifact.schema
    validate_client(schema, client)
    catalog.validate_against(schema)
    scored = []
    for pkg in catalog.packages:
        joined = client.with_overrides(pkg.overrides)
        p = artifact.predict(joined).p_above
        scored.append((pkg, p))
    scored.sort(key=lambda t: (-t[1], t[0].id))
    return [
        Recommendation(pkg.id, pkg.name, p, rank)
        for rank, (pkg, p) in enumerate(scored, start=1)
    ]


_PROFILE_NAMES = {
    "therapy": "Therapy",
    "medical": "Medical",
    "case_management": "Case management",
    "therapy_medical": "Therapy + medical",
}


def default_catalog() -> PackageCatalog:
    """One package per service profile and volume combination."""
    packages = []
    for profile in PROFILES:
        for volume in VOLUMES:
            packages.append(ServicePackage(
                id=f"{profile}_{volume}",
                name=f"{_PROFILE_NAMES.get(profile, profile)} / {volume} volume",
                overrides={"service_profile": profile, "service_volume": volume},
            ))
    return PackageCatalog(tuple(packages))


def catalog_to_dict(catalog: PackageCatalog) -> dict:
    return {
        "packages": [
            {"id": p.id, "name": p.name, "overrides": dict(p.overrides)}
            for p in catalog.packages
        ]
    }


def catalog_from_dict(doc: dict, schema: CohortSchema | None = None) -> PackageCatalog:
    try:
        packages = tuple(
            ServicePackage(e["id"], e.get("name", e["id"]), dict(e["overrides"]))
            for e in doc["packages"]
        )
    except (KeyError, TypeError) as exc:
        raise RecommendError(f"malformed catalog document: {exc}") from exc
    catalog = PackageCatalog(packages)
    if schema is not None:
        try:
            catalog.validate_against(schema)
        except CohortError as exc:
            raise RecommendError(str(exc)) from exc
    return catalog


def load_catalog(path, schema: CohortSchema | None = None) -> PackageCatalog:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise RecommendError(f"cannot read catalog {path}: {exc}") from exc
    return catalog_from_dict(doc, schema)


def save_catalog(catalog: PackageCatalog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(catalog_to_dict(catalog), fh, indent=2)
