"""Read-only HTTP surface over one trained artifact: intake schema, package
catalog, metric report, and what-if recommendations."""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .artifact import ModelArtifact
from .cohort import CohortError, Record
from .recommend import (
    PackageCatalog,
    RecommendError,
    UnknownFieldError,
    catalog_to_dict,
    default_catalog,
    what_if,
)


def schema_fields(artifact: ModelArtifact) -> list[dict]:
    return [
        {
            "name": f.name,
            "kind": f.kind,
            "categories": list(f.categories),
            "service_field": f.service_field,
        }
        for f in artifact.schema.predictors()
    ]


def create_app(
    artifact: ModelArtifact | None,
    catalog: PackageCatalog | None = None,
    grid_report: dict | None = None,
    frontend_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="adaptcds", docs_url=None, redoc_url=None)
    catalog = catalog or default_catalog()

    def no_artifact():
        return JSONResponse({"detail": "no model artifact loaded"}, status_code=503)

    @app.get("/health")
    def health():
        if artifact is None:
            return no_artifact()
        return {"status": "ok", "method": artifact.method,
                "mode": artifact.preprocess_state.mode}

    @app.get("/schema")
    def schema():
        if artifact is None:
            return no_artifact()
        return {"fields": schema_fields(artifact)}

    @app.get("/packages")
    def packages():
        return catalog_to_dict(catalog)

    @app.get("/grid")
    def grid():
        if grid_report is None:
            return JSONResponse({"detail": "no grid report loaded"}, status_code=503)
        return grid_report

    @app.post("/whatif")
    async def whatif(request: Request):
        if artifact is None:
            return no_artifact()
        try:
            payload = json.loads(await request.body())
        except json.JSONDecodeError:
            return JSONResponse({"detail": "body is not valid JSON"}, status_code=400)
        if not isinstance(payload, dict):
            return JSONResponse(
                {"detail": "body must be a JSON object of field values"}, status_code=400)
        client = Record({k: v for k, v in payload.items() if v is not None})
        try:
            recs = what_if(artifact, client, catalog)
        except UnknownFieldError as exc:
            return JSONResponse({"detail": str(exc)}, status_code=400)
        except (CohortError, RecommendError) as exc:
            return JSONResponse({"detail": str(exc)}, status_code=422)
        return {"recommendations": [r.to_dict() for r in recs]}

    if frontend_dir is not None:
        static_root = Path(frontend_dir).resolve()
        if not static_root.is_dir():
            raise ValueError(f"frontend dir not found: {frontend_dir}")
        app.mount("/", StaticFiles(directory=static_root, html=True), name="ui")
    return app
