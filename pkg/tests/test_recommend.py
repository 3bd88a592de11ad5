import json

import pytest

from adaptcds.artifact import (
    ArtifactError,
    artifact_from_dict,
    load_artifact,
    save_artifact,
    train_artifact,
)
from adaptcds.cohort import Record
from adaptcds.evaluate import GridCell
from adaptcds.learners import ModelSpec
from adaptcds.preprocess import MODE_BIN_TARGET, MODE_CAIM
from adaptcds.recommend import (
    PackageCatalog,
    RecommendError,
    ServicePackage,
    UnknownFieldError,
    catalog_from_dict,
    default_catalog,
    load_catalog,
    save_catalog,
    what_if,
)
from adaptcds.synth import GenSpec, PROFILES, VOLUMES, generate, oracle_p_above


@pytest.fixture(scope="module")
def cohort():
    return generate(GenSpec(seed=5, n=80))


@pytest.fixture(scope="module")
def nb_artifact(cohort):
    return train_artifact(cohort, GridCell(MODE_BIN_TARGET, ModelSpec("NaiveBayes")), seed=3)


@pytest.fixture(scope="module")
def client(cohort):
    values = dict(cohort.records[0].values)
    for name in ("service_profile", "service_volume", "carla_baseline", "carla_followup"):
        values.pop(name, None)
    return Record(values)


class OracleArtifact:
    """Stub exposing the generative-model probability through the artifact surface."""

    def __init__(self, spec, schema):
        self.gen_spec = spec
        self.schema = schema

    def predict(self, record):
        from adaptcds.learners import distribution

        return distribution(oracle_p_above(self.gen_spec, record))


# ----------------------------------------------------------------- catalog


def test_default_catalog_has_eight_unique_packages():
    catalog = default_catalog()
    assert len(catalog.packages) == 8
    assert len({p.id for p in catalog.packages}) == 8
    combos = {(p.overrides["service_profile"], p.overrides["service_volume"])
              for p in catalog.packages}
    assert combos == {(pr, v) for pr in PROFILES for v in VOLUMES}


def test_catalog_rejects_duplicates_and_empty():
    pkg = ServicePackage("a", "A", {"service_volume": "low"})
    with pytest.raises(RecommendError):
        PackageCatalog((pkg, pkg))
    with pytest.raises(RecommendError):
        PackageCatalog(())


def test_package_must_override_something():
    with pytest.raises(RecommendError):
        ServicePackage("a", "A", {})


def test_catalog_file_round_trip_preserves_order(tmp_path, cohort):
    packages = tuple(
        ServicePackage(f"p{i}", f"P{i}", {"service_volume": "low"}) for i in range(3)
    )
    path = tmp_path / "catalog.json"
    save_catalog(PackageCatalog(packages), path)
    loaded = load_catalog(path, cohort.schema)
    assert [p.id for p in loaded.packages] == ["p0", "p1", "p2"]


def test_catalog_overriding_non_service_field_rejected(cohort):
    doc = {"packages": [{"id": "bad", "name": "Bad", "overrides": {"age": 30.0}}]}
    with pytest.raises(RecommendError):
        catalog_from_dict(doc, cohort.schema)


def test_catalog_invalid_category_rejected(cohort):
    doc = {"packages": [{"id": "bad", "name": "Bad",
                         "overrides": {"service_volume": "medium"}}]}
    catalog = catalog_from_dict(doc)
    with pytest.raises(Exception):
        catalog.validate_against(cohort.schema)


def test_malformed_catalog_document(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(RecommendError):
        load_catalog(path)
    with pytest.raises(RecommendError):
        catalog_from_dict({"packages": [{"name": "missing id"}]})


# ----------------------------------------------------------------- what_if


def test_single_package_rank_one(nb_artifact, client):
    catalog = PackageCatalog((ServicePackage(
        "only", "Only", {"service_profile": "therapy", "service_volume": "low"}),))
    recs = what_if(nb_artifact, client, catalog)
    assert len(recs) == 1
    assert recs[0].rank == 1
    assert recs[0].package_id == "only"


def test_ranks_are_permutation_sorted_by_probability(nb_artifact, client):
    recs = what_if(nb_artifact, client, default_catalog())
    assert [r.rank for r in recs] == list(range(1, 9))
    ps = [r.p_above for r in recs]
    assert ps == sorted(ps, reverse=True)


def test_identical_overrides_tie_break_by_id(nb_artifact, client):
    overrides = {"service_profile": "therapy", "service_volume": "high"}
    catalog = PackageCatalog((
        ServicePackage("zeta", "Z", dict(overrides)),
        ServicePackage("alpha", "A", dict(overrides)),
    ))
    recs = what_if(nb_artifact, client, catalog)
    assert recs[0].p_above == recs[1].p_above
    assert [r.package_id for r in recs] == ["alpha", "zeta"]


def test_catalog_order_invariance(nb_artifact, client):
    catalog = default_catalog()
    reversed_catalog = PackageCatalog(tuple(reversed(catalog.packages)))
    a = {r.package_id: (r.p_above, r.rank) for r in what_if(nb_artifact, client, catalog)}
    b = {r.package_id: (r.p_above, r.rank)
         for r in what_if(nb_artifact, client, reversed_catalog)}
    assert a == b


def test_override_isolation(client):
    pkg = ServicePackage("x", "X", {"service_profile": "medical",
                                    "service_volume": "low"})
    joined = client.with_overrides(pkg.overrides)
    for name, value in client.values.items():
        if name not in pkg.overrides:
            assert joined.get(name) is value or joined.get(name) == value
    assert joined.get("service_profile") == "medical"


def test_unknown_client_field_rejected(nb_artifact, client):
    bad = client.with_overrides({"shoe_size": 42.0})
    with pytest.raises(UnknownFieldError):
        what_if(nb_artifact, bad, default_catalog())


def test_invalid_client_category_rejected(nb_artifact, client):
    bad = client.with_overrides({"gender": "unknown"})
    with pytest.raises(Exception):
        what_if(nb_artifact, bad, default_catalog())


def test_oracle_ranks_high_volume_above_low(cohort, client):
    spec = GenSpec(seed=5, n=80)
    oracle = OracleArtifact(spec, cohort.schema)
    recs = {r.package_id: r for r in what_if(oracle, client, default_catalog())}
    for profile in PROFILES:
        assert (recs[f"{profile}_high"].p_above > recs[f"{profile}_low"].p_above)
        assert recs[f"{profile}_high"].rank < recs[f"{profile}_low"].rank


def test_missing_non_service_fields_are_imputed(nb_artifact, client):
    partial = Record({k: v for k, v in client.values.items() if k not in ("age", "race")})
    recs = what_if(nb_artifact, partial, default_catalog())
    assert len(recs) == 8
    assert all(0.0 <= r.p_above <= 1.0 for r in recs)


def test_recommendation_to_dict_fields(nb_artifact, client):
    rec = what_if(nb_artifact, client, default_catalog())[0]
    doc = rec.to_dict()
    assert set(doc) == {"package_id", "name", "p_above", "rank"}


# ----------------------------------------------------------------- artifacts


def test_artifact_round_trip_bit_equal(tmp_path, cohort, nb_artifact):
    path = tmp_path / "model.json"
    save_artifact(nb_artifact, path)
    clone = load_artifact(path)
    for rec in cohort.records:
        assert clone.predict(rec).p_above == nb_artifact.predict(rec).p_above


@pytest.mark.parametrize("method,mode", [
    ("Tree", MODE_CAIM),
    ("Ensemble", MODE_BIN_TARGET),
    ("Vote", MODE_BIN_TARGET),
])
def test_artifact_round_trip_other_methods(tmp_path, cohort, method, mode):
    art = train_artifact(cohort, GridCell(mode, ModelSpec(method)), seed=2)
    path = tmp_path / "model.json"
    save_artifact(art, path)
    clone = load_artifact(path)
    for rec in cohort.records[:20]:
        assert clone.predict(rec).p_above == art.predict(rec).p_above


def test_artifact_with_selector_round_trip(tmp_path, cohort):
    art = train_artifact(
        cohort, GridCell(MODE_BIN_TARGET, ModelSpec("KNN"), selector="gain_ratio"), seed=2)
    assert art.selected_features
    path = tmp_path / "model.json"
    save_artifact(art, path)
    clone = load_artifact(path)
    assert clone.selected_features == art.selected_features
    for rec in cohort.records[:20]:
        assert clone.predict(rec).p_above == art.predict(rec).p_above


def test_artifact_version_and_fingerprint_guards(nb_artifact):
    doc = nb_artifact.to_dict()
    stale = dict(doc, format_version=99)
    with pytest.raises(ArtifactError):
        artifact_from_dict(stale)
    tampered = json.loads(json.dumps(doc))
    tampered["schema_fingerprint"] = "0" * 16
    with pytest.raises(ArtifactError):
        artifact_from_dict(tampered)


def test_artifact_metadata_records_training_context(nb_artifact):
    md = nb_artifact.metadata
    assert md["seed"] == 3
    assert md["method"] == "NaiveBayes"
    assert md["mode"] == MODE_BIN_TARGET
    assert md["n_records"] == 80
