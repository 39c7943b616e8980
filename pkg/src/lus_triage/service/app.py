"""FastAPI application factory over a file-backed study store."""

from __future__ import annotations

import mimetypes
from pathlib import Path

from fastapi import Depends, FastAPI, Request, Response, status
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse

from ..config import PipelineConfig
from ..store import (
    FrameNotFound,
    OverrideValidationError,
    StudyNotFound,
    StudyStore,
    VideoNotFound,
    utc_now,
)
from . import schemas


def _error(status_code: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status_code, content={"error": {"code": code, "message": message}}
    )


def create_app(
    root: str | Path,
    config: PipelineConfig | None = None,
    clock=utc_now,
) -> FastAPI:
    config = config or PipelineConfig()
    store = StudyStore(root, config=config, clock=clock)
    app = FastAPI(title="lus-triage", docs_url="/api/docs", openapi_url="/api/openapi.json")
    app.state.store = store

    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    async def require_token(request: Request) -> None:
        if config.bearer_token is None:
            return
        header = request.headers.get("Authorization", "")
        if header != f"Bearer {config.bearer_token}":
            raise PermissionError("missing or invalid bearer token")

    guarded = [Depends(require_token)]

    @app.exception_handler(StudyNotFound)
    @app.exception_handler(VideoNotFound)
    @app.exception_handler(FrameNotFound)
    async def not_found_handler(request: Request, exc: Exception):
        return _error(status.HTTP_404_NOT_FOUND, "not_found", str(exc.args[0]))

    @app.exception_handler(OverrideValidationError)
    async def override_invalid_handler(request: Request, exc: Exception):
        return _error(422, "invalid_override", str(exc))

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: Exception):
        return _error(422, "invalid_request", str(exc))

    @app.exception_handler(PermissionError)
    async def auth_handler(request: Request, exc: Exception):
        return _error(status.HTTP_401_UNAUTHORIZED, "unauthorized", str(exc))

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return _error(
            422, "invalid_request", str(exc.errors()[:3])
        )

    @app.get("/api/studies", response_model=schemas.StudyList, dependencies=guarded)
    async def list_studies():
        return schemas.StudyList(studies=store.study_summaries())

    @app.get(
        "/api/studies/{study_id}/report",
        response_model=schemas.Report,
        dependencies=guarded,
    )
    async def get_report(study_id: str):
        return schemas.Report.model_validate(store.report(study_id))

    @app.get(
        "/api/studies/{study_id}/videos/{video_id}",
        response_model=schemas.Video,
        dependencies=guarded,
    )
    async def get_video(study_id: str, video_id: str):
        return schemas.Video.model_validate(store.video(study_id, video_id))

    @app.get(
        "/api/studies/{study_id}/frames/{frame_id}",
        response_model=schemas.Frame,
        dependencies=guarded,
    )
    async def get_frame(study_id: str, frame_id: str):
        return schemas.Frame.model_validate(store.frame(study_id, frame_id))

    @app.get(
        "/api/studies/{study_id}/frames/{frame_id}/image",
        dependencies=guarded,
        response_class=Response,
    )
    async def get_frame_image(study_id: str, frame_id: str):
        path = store.frame_image_path(study_id, frame_id)
        media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        return FileResponse(path, media_type=media_type)

    @app.get(
        "/api/studies/{study_id}/queue",
        response_model=schemas.Queue,
        dependencies=guarded,
    )
    async def get_queue(study_id: str):
        return schemas.Queue.model_validate(store.queue(study_id))

    @app.post(
        "/api/studies/{study_id}/frames/{frame_id}/override",
        response_model=schemas.OverrideResponse,
        status_code=status.HTTP_201_CREATED,
        dependencies=guarded,
    )
    async def post_override(study_id: str, frame_id: str, body: schemas.OverrideRequest):
        result = store.apply_override(
            study_id,
            frame_id,
            author=body.author,
            annotations=[
                {"class": a.cls, "bbox": list(a.bbox)} for a in body.annotations
            ],
            note=body.note,
        )
        return schemas.OverrideResponse.model_validate(result)

    @app.post(
        "/api/studies/{study_id}/export",
        response_model=schemas.ExportManifest,
        dependencies=guarded,
    )
    async def post_export(study_id: str, body: schemas.ExportRequest):
        return schemas.ExportManifest.model_validate(store.export(study_id, body.format))

    return app
