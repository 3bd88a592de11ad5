import pytest

from adaptcds.cohort import Cohort, CohortSchema, FeatureSpec, Record


def make_schema(extra=()):
    features = [
        FeatureSpec("age", "numeric"),
        FeatureSpec("score", "numeric"),
        FeatureSpec("region", "categorical", categories=("Urban", "Rural")),
        FeatureSpec(
            "service_profile",
            "categorical",
            service_field=True,
            categories=("therapy", "medical"),
        ),
        FeatureSpec("baseline", "numeric", role="target_raw"),
        FeatureSpec("followup", "numeric", role="target_raw"),
    ]
    features.extend(extra)
    return CohortSchema(tuple(features), "baseline", "followup")


def make_cohort(rows):
    """rows: list of dicts with keys matching make_schema feature names."""
    schema = make_schema()
    return Cohort(schema, tuple(Record(dict(r)) for r in rows))


@pytest.fixture
def toy_schema():
    return make_schema()


@pytest.fixture
def toy_cohort():
    rows = [
        {"age": 30.0, "score": 2.0, "region": "Urban", "service_profile": "therapy",
         "baseline": 10.0, "followup": 8.0},
        {"age": 40.0, "score": 4.0, "region": "Urban", "service_profile": "medical",
         "baseline": 10.0, "followup": 10.0},
        {"age": 50.0, "score": 6.0, "region": "Rural", "service_profile": "therapy",
         "baseline": 10.0, "followup": 12.0},
        {"age": 60.0, "score": 8.0, "region": "Rural", "service_profile": "medical",
         "baseline": 10.0, "followup": 14.0},
    ]
    return make_cohort(rows)
