"""HTTP JSON facade: load bundles, inspect cube metadata, run queries.

A thin adapter over the engine. Registered cubes are immutable; concurrent
reads need no synchronization, registration is serialized. With a state
directory configured, registered bundles are snapshotted and reloaded on
startup.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import etl
from .cql import ParseError, SemanticError, UnexpectedChar, parse, plan_and_execute
from .cube import Cube, CubeError, build_cube
from .payloads import (
    AxisMismatch,
    chart_compare_json,
    metadata_json,
    result_json,
    violations_json,
)


@dataclass(frozen=True)
class CubeHandle:
    cube_id: str
    star: etl.StarSchema
    cube: Cube


class SessionState:
    """Named immutable cubes registered in this process."""

    def __init__(self, state_dir: "str | None" = None):
        self._cubes: dict[str, CubeHandle] = {}
        self._lock = threading.Lock()
        self._counter = 0
        self.state_dir = state_dir

    def names(self) -> list[str]:
        return sorted(self._cubes)

    def get(self, cube_id: str) -> "CubeHandle | None":
        return self._cubes.get(cube_id)

    def register(self, star: etl.StarSchema, name: "str | None" = None,
                 snapshot: bool = True) -> CubeHandle:
        with self._lock:
            if name is None:
                self._counter += 1
                name = f"cube-{self._counter}"
            if name in self._cubes:
                raise KeyError(name)
            handle = CubeHandle(name, star, build_cube(star))
            self._cubes[name] = handle
        if snapshot and self.state_dir:
            etl.write_bundle(os.path.join(self.state_dir, name), etl.export_star(star))
        return handle

    def load_snapshots(self) -> None:
        if not self.state_dir or not os.path.isdir(self.state_dir):
            return
        for entry in sorted(os.listdir(self.state_dir)):
            path = os.path.join(self.state_dir, entry)
            if os.path.isdir(path) and entry not in self._cubes:
                self.register(etl.load_star(path), name=entry, snapshot=False)


class DatasetUpload(BaseModel):
    files: dict[str, str]
    format: str = "csv_bundle"
    name: "str | None" = None


class QueryRequest(BaseModel):
    cql: str


def _error(status: int, error: str, message: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": error, "message": message, **extra})


def _span_json(span) -> "dict | None":
    if span is None:
        return None
    return {"start": str(span.start), "end": str(span.end)}


def create_app(state_dir: "str | None" = None) -> FastAPI:
    app = FastAPI(title="sherdcube", version="0.1.0")
    # the explorer is a static page served from elsewhere; queries are read-only
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    state = SessionState(state_dir)
    state.load_snapshots()
    app.state.session = state

    @app.get("/cubes")
    def list_cubes():
        return {
            "cubes": [
                {"cube_id": name, "fact_count": str(state.get(name).cube.n_facts)}
                for name in state.names()
            ]
        }

    @app.post("/datasets")
    def post_dataset(upload: DatasetUpload):
        if upload.format not in etl.FORMATS:
            return _error(400, "BadRequest", f"unknown format {upload.format!r}")
        try:
            dataset = etl.parse_source(upload.files, upload.format)
            star = etl.build_star(dataset)
        except etl.MissingFile as exc:
            return _error(422, "MissingFile", str(exc), file=exc.name)
        except etl.MalformedRow as exc:
            return _error(422, "MalformedRow", str(exc), file=exc.file, line=str(exc.line))
        except etl.DuplicateId as exc:
            return _error(422, "DuplicateId", str(exc), rule="id_unique",
                          record_type=exc.record_type, record_id=exc.record_id)
        except etl.ValidationFailed as exc:
            return _error(422, "ValidationFailed", str(exc),
                          violations=violations_json(exc.report))
        try:
            handle = state.register(star, upload.name)
        except KeyError:
            return _error(409, "Conflict", f"cube {upload.name!r} already registered")
        return {
            "cube_id": handle.cube_id,
            "fact_count": str(handle.cube.n_facts),
            "validation_report": [],
            "dimensions": [spec.name for spec in handle.cube.dims],
        }

    @app.get("/cubes/{cube_id}/metadata")
    def get_metadata(cube_id: str):
        handle = state.get(cube_id)
        if handle is None:
            return _error(404, "NotFound", f"no cube {cube_id!r}")
        return metadata_json(cube_id, handle.cube)

    @app.post("/cubes/{cube_id}/query")
    def post_query(cube_id: str, request: QueryRequest):
        handle = state.get(cube_id)
        if handle is None:
            return _error(404, "NotFound", f"no cube {cube_id!r}")
        started = time.perf_counter()
        try:
            ast = parse(request.cql)
            result = plan_and_execute(ast, handle.cube)
        except UnexpectedChar as exc:
            return _error(400, "SyntaxError", str(exc),
                          span={"start": str(exc.offset), "end": str(exc.offset + 1)})
        except ParseError as exc:
            return _error(400, "SyntaxError", str(exc), span=_span_json(exc.span))
        except SemanticError as exc:
            return _error(422, "SemanticError", str(exc), span=_span_json(exc.span))
        payload = result_json(result)
        payload["elapsed_ms"] = repr(round((time.perf_counter() - started) * 1000.0, 3))
        return payload

    @app.get("/cubes/{cube_id}/chart/compare")
    def get_chart_compare(cube_id: str, left: str, right: str, axis: str):
        handle = state.get(cube_id)
        if handle is None:
            return _error(404, "NotFound", f"no cube {cube_id!r}")
        try:
            return chart_compare_json(handle.cube, left, right, axis)
        except AxisMismatch as exc:
            return _error(422, "AxisMismatch", str(exc))
        except UnexpectedChar as exc:
            return _error(400, "SyntaxError", str(exc),
                          span={"start": str(exc.offset), "end": str(exc.offset + 1)})
        except ParseError as exc:
            return _error(400, "SyntaxError", str(exc), span=_span_json(exc.span))
        except SemanticError as exc:
            return _error(422, "SemanticError", str(exc), span=_span_json(exc.span))
        except CubeError as exc:
            return _error(422, "SemanticError", str(exc))

    return app
