"""Command-line entry points: cohort synthesis, training, the evaluation
grid, report rendering, recommendations, and the HTTP service."""

from __future__ import annotations

import csv
import functools
import json
import sys
from dataclasses import dataclass, fields

import click

from .artifact import ArtifactError, load_artifact, save_artifact, train_artifact
from .cohort import (
    CohortError,
    Record,
    load_cohort,
    schema_from_dict,
    schema_to_dict,
    write_cohort,
)
from .combine import CombineError
from .evaluate import EvaluateError, GridCell, default_grid_cells, run_grid
from .learners import METHODS, LearnerError, ModelSpec
from .metrics import MetricError, spearman
from .preprocess import MODES, PreprocessError
from .recommend import RecommendError, default_catalog, load_catalog, what_if
from .synth import GenSpec, default_schema, generate, save_spec

_KNOWN_ERRORS = (
    ArtifactError, CohortError, CombineError, EvaluateError, LearnerError,
    MetricError, PreprocessError, RecommendError, OSError, ValueError,
    json.JSONDecodeError,
)


@dataclass
class RunConfig:
    schema: str | None = None
    cohort: str | None = None
    seed: int | None = None
    cells: list | None = None
    catalog: str | None = None
    artifact: str | None = None
    report_json: str | None = None
    report_csv: str | None = None
    port: int | None = None
    frontend_dir: str | None = None


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError(f"config {path}: expected a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ValueError(f"config {path}: unknown key {unknown[0]!r}")
    return RunConfig(**doc)


def config_cells(config: RunConfig) -> list[GridCell]:
    if config.cells is None:
        return default_grid_cells()
    cells = []
    for entry in config.cells:
        extra = sorted(set(entry) - {"method", "mode", "selector"})
        if extra:
            raise ValueError(f"config cells: unknown key {extra[0]!r}")
        cells.append(GridCell(entry["mode"], ModelSpec(entry["method"]),
                              entry.get("selector")))
    return cells


def fail_cleanly(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _KNOWN_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _load_schema(path):
    if path is None:
        return default_schema()
    with open(path, encoding="utf-8") as fh:
        return schema_from_dict(json.load(fh))


def _pick(flag, config_value, default=None):
    if flag is not None:
        return flag
    if config_value is not None:
        return config_value
    return default


def _fmt(value, width=9):
    if value is None:
        return "-".rjust(width)
    return f"{value:.4f}".rjust(width)


REPORT_COLUMNS = ("Model", "Binning", "Accuracy", "AUC", "TP rate", "FP rate", "H")


def render_table(rows) -> str:
    name_w = max([len("Model")] + [len(r["Model"]) for r in rows]) + 2
    bin_w = max([len("Binning")] + [len(r["Binning"]) for r in rows]) + 2
    header = ("Model".ljust(name_w) + "Binning".ljust(bin_w)
              + "".join(c.rjust(10) for c in REPORT_COLUMNS[2:]))
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            r["Model"].ljust(name_w) + r["Binning"].ljust(bin_w)
            + "".join(_fmt(r[c], 10) for c in REPORT_COLUMNS[2:]))
    return "\n".join(lines)


@click.group()
def main():
    """Outcome-driven treatment planning pipeline."""


@main.command("synth")
@click.option("--out", required=True, help="cohort CSV output path")
@click.option("--spec-out", default=None, help="generator spec JSON output path")
@click.option("--schema-out", default=None, help="schema JSON output path")
@click.option("--seed", default=None, type=int)
@click.option("--n", default=None, type=int)
@fail_cleanly
def synth_cmd(out, spec_out, schema_out, seed, n):
    """Generate a synthetic cohort with a known outcome model."""
    defaults = GenSpec()
    spec = GenSpec(seed=_pick(seed, None, defaults.seed), n=_pick(n, None, defaults.n))
    cohort = generate(spec)
    write_cohort(cohort, out)
    if spec_out:
        save_spec(spec, spec_out)
    if schema_out:
        with open(schema_out, "w", encoding="utf-8") as fh:
            json.dump(schema_to_dict(cohort.schema), fh, indent=2)
    click.echo(f"wrote {len(cohort)} records to {out}")


@main.command("train")
@click.option("--config", "config_path", default=None)
@click.option("--cohort", "cohort_path", default=None)
@click.option("--schema", "schema_path", default=None)
@click.option("--method", type=click.Choice(sorted(METHODS) + ["Ensemble", "Vote"]),
              default="NaiveBayes")
@click.option("--mode", type=click.Choice(list(MODES)), default="BinTarget")
@click.option("--selector", default=None)
@click.option("--seed", default=None, type=int)
@click.option("--out", default=None, help="artifact JSON output path")
@fail_cleanly
def train_cmd(config_path, cohort_path, schema_path, method, mode, selector, seed, out):
    """Fit one model on the full cohort and save it as an artifact."""
    config = load_config(config_path) if config_path else RunConfig()
    cohort_path = _pick(cohort_path, config.cohort)
    if cohort_path is None:
        raise ValueError("train needs --cohort (or a config with 'cohort')")
    out = _pick(out, config.artifact)
    if out is None:
        raise ValueError("train needs --out (or a config with 'artifact')")
    schema = _load_schema(_pick(schema_path, config.schema))
    cohort = load_cohort(cohort_path, schema)
    cell = GridCell(mode, ModelSpec(method), selector)
    artifact = train_artifact(cohort, cell, _pick(seed, config.seed, 0))
    save_artifact(artifact, out)
    click.echo(f"trained {cell.name} ({mode}) on {len(cohort)} records -> {out}")


@main.command("grid")
@click.option("--config", "config_path", default=None)
@click.option("--cohort", "cohort_path", default=None)
@click.option("--schema", "schema_path", default=None)
@click.option("--seed", default=None, type=int)
@click.option("--json-out", default=None)
@click.option("--csv-out", default=None)
@fail_cleanly
def grid_cmd(config_path, cohort_path, schema_path, seed, json_out, csv_out):
    """Cross-validate every grid cell and report metrics sorted by AUC."""
    config = load_config(config_path) if config_path else RunConfig()
    cohort_path = _pick(cohort_path, config.cohort)
    if cohort_path is None:
        raise ValueError("grid needs --cohort (or a config with 'cohort')")
    schema = _load_schema(_pick(schema_path, config.schema))
    cohort = load_cohort(cohort_path, schema)
    result = run_grid(cohort, config_cells(config), _pick(seed, config.seed, 0))
    doc = result.to_dict()
    doc["per_fold"] = [
        {"Model": c.metrics.model, "Binning": c.metrics.binning,
         "auc_by_fold": c.per_fold_auc}
        for c in result.cells
    ]
    click.echo(render_table(doc["rows"]))
    json_out = _pick(json_out, config.report_json)
    if json_out:
        with open(json_out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
    csv_out = _pick(csv_out, config.report_csv)
    if csv_out:
        with open(csv_out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS + ("Selector",))
            writer.writeheader()
            writer.writerows(doc["rows"])


@main.command("report")
@click.option("--grid", "grid_path", required=True, help="grid JSON report path")
@fail_cleanly
def report_cmd(grid_path):
    """Render rank agreement between AUC and H plus per-fold AUC detail."""
    with open(grid_path, encoding="utf-8") as fh:
        doc = json.load(fh)
    rows = doc.get("rows", [])
    if len(rows) < 3:
        raise ValueError(f"report {grid_path}: needs >=3 grid rows")
    rho, note = spearman([r["AUC"] for r in rows], [r["H"] for r in rows])
    click.echo(f"Spearman rank correlation, AUC vs H: {rho:.4f} ({note})")
    for entry in doc.get("per_fold", []):
        folds = " ".join(
            "  nan" if a != a else f"{a:.3f}" for a in entry["auc_by_fold"])
        click.echo(f"{entry['Model']:24s} {entry['Binning']:10s} {folds}")


@main.command("recommend")
@click.option("--artifact", "artifact_path", required=True)
@click.option("--client", "client_path", required=True, help="client record JSON")
@click.option("--catalog", "catalog_path", default=None)
@click.option("--json", "as_json", is_flag=True, default=False)
@fail_cleanly
def recommend_cmd(artifact_path, client_path, catalog_path, as_json):
    """Rank service packages for one client."""
    artifact = load_artifact(artifact_path)
    with open(client_path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict):
        raise ValueError(f"client file {client_path}: expected a JSON object")
    client = Record({k: v for k, v in payload.items() if v is not None})
    catalog = (load_catalog(catalog_path, artifact.schema)
               if catalog_path else default_catalog())
    recs = what_if(artifact, client, catalog)
    if as_json:
        click.echo(json.dumps({"recommendations": [r.to_dict() for r in recs]},
                              indent=2))
        return
    width = max(len(r.name) for r in recs) + 2
    click.echo("rank  " + "package".ljust(width) + "  p_above")
    for r in recs:
        click.echo(f"{r.rank:>4}  " + r.name.ljust(width) + f"  {r.p_above:.4f}")


@main.command("serve")
@click.option("--config", "config_path", default=None)
@click.option("--artifact", "artifact_path", default=None)
@click.option("--catalog", "catalog_path", default=None)
@click.option("--grid-report", "grid_report_path", default=None)
@click.option("--frontend-dir", default=None)
@click.option("--port", default=None, type=int)
@fail_cleanly
def serve_cmd(config_path, artifact_path, catalog_path, grid_report_path,
              frontend_dir, port):
    """Serve the what-if API (and the intake UI, when built) over HTTP."""
    import uvicorn

    from .service import create_app

    config = load_config(config_path) if config_path else RunConfig()
    artifact_path = _pick(artifact_path, config.artifact)
    if artifact_path is None:
        raise ValueError("serve needs --artifact (or a config with 'artifact')")
    artifact = load_artifact(artifact_path)
    catalog_path = _pick(catalog_path, config.catalog)
    catalog = load_catalog(catalog_path, artifact.schema) if catalog_path else None
    grid_report_path = _pick(grid_report_path, config.report_json)
    grid_report = None
    if grid_report_path:
        with open(grid_report_path, encoding="utf-8") as fh:
            grid_report = json.load(fh)
    app = create_app(artifact, catalog, grid_report,
                     _pick(frontend_dir, config.frontend_dir))
    uvicorn.run(app, host="127.0.0.1", port=_pick(port, config.port, 8000))


if __name__ == "__main__":
    main()
