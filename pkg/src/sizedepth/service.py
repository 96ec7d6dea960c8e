"""Local HTTP API for interactive annotation.

Session-oriented: upload an image, receive the patch grid, submit size
labels, trigger solves, and fetch depth previews. Sessions live in
memory only (single-user annotation aid) and are evicted after an hour
of inactivity. Depth responses carry X-Depth-Revision / X-Stale headers
so the client can detect previews computed from outdated labels.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import io as sdio
from .annotation import PatchGrid, targets_from_annotations
from .crf import CrfConfig, DepthField, solve_map
from .errors import (
    DecodeError,
    DimensionError,
    EmptyConstraintError,
    SchemaError,
    SolverError,
    UnderdeterminedError,
)
from .raster import DEFAULT_HEIGHT, DEFAULT_WIDTH, Raster, compute_intensity, load_and_resize

MAX_UPLOAD_BYTES = 20 * 1024 * 1024
SESSION_IDLE_SECONDS = 3600


@dataclass
class Session:
    id: str
    raster: Raster
    grid: PatchGrid
    original_width: int
    original_height: int
    annotation_doc: dict | None = None
    latest: DepthField | None = None
    latest_revision: int = -1
    latest_pfm: bytes | None = None
    latest_png: bytes | None = None
    revision: int = 0
    last_access: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock)


def _grid_geometry(session: Session) -> dict:
    patches = []
    for r in range(session.grid.rows):
        for c in range(session.grid.cols):
            y0, y1, x0, x1 = session.grid.patch_bounds(r, c)
            patches.append({"row": r, "col": c, "x0": x0, "y0": y0, "x1": x1, "y1": y1})
    return {
        "grid": {"rows": session.grid.rows, "cols": session.grid.cols},
        "working": {"width": session.raster.width, "height": session.raster.height},
        "image": {"width": session.original_width, "height": session.original_height},
        "patches": patches,
    }


def _session_state(session: Session) -> dict:
    has_solve = session.latest is not None
    return {
        "session_id": session.id,
        "revision": session.revision,
        "annotation_count": 0
        if session.annotation_doc is None
        else len(session.annotation_doc["annotations"]),
        "solve": None
        if not has_solve
        else {
            "revision": session.latest_revision,
            "stale": session.latest_revision != session.revision,
            "lambda": session.latest.config_used.lam,
            "beta": session.latest.config_used.beta,
            "unary_energy": session.latest.unary_energy,
            "binary_energy": session.latest.binary_energy,
            "residual": session.latest.residual,
            "iterations": session.latest.iterations,
        },
        **_grid_geometry(session),
    }


def create_app(
    working_width: int = DEFAULT_WIDTH,
    working_height: int = DEFAULT_HEIGHT,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="sizedepth annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Depth-Revision", "X-Session-Revision", "X-Stale"],
    )
    sessions: dict[str, Session] = {}
    store_lock = threading.Lock()

    def evict_idle(now: float) -> None:
        with store_lock:
            dead = [
                sid
                for sid, s in sessions.items()
                if now - s.last_access > SESSION_IDLE_SECONDS
            ]
            for sid in dead:
                del sessions[sid]

    def get_session(session_id: str) -> Session | None:
        now = time.time()
        evict_idle(now)
        with store_lock:
            session = sessions.get(session_id)
            if session is not None:
                session.last_access = now
            return session

    def not_found(session_id: str) -> JSONResponse:
        return JSONResponse({"detail": f"unknown session {session_id}"}, status_code=404)

    @app.post("/sessions", status_code=201)
    def create_session(
        image: UploadFile = File(...),
        rows: int = Form(7),
        cols: int = Form(7),
    ):
        data = image.file.read(MAX_UPLOAD_BYTES + 1)
        if len(data) > MAX_UPLOAD_BYTES:
            return JSONResponse(
                {"detail": f"upload exceeds {MAX_UPLOAD_BYTES} bytes"}, status_code=413
            )
        try:
            from PIL import Image as PILImage
            import io as _stdio

            with PILImage.open(_stdio.BytesIO(data)) as img:
                original_width, original_height = img.size
            raster = compute_intensity(
                load_and_resize(data, target_width=working_width, target_height=working_height)
            )
            grid = PatchGrid(
                rows=rows, cols=cols, image_width=raster.width, image_height=raster.height
            )
        except (DecodeError, DimensionError, OSError) as exc:
            return JSONResponse({"detail": str(exc)}, status_code=400)
        session = Session(
            id=uuid.uuid4().hex,
            raster=raster,
            grid=grid,
            original_width=original_width,
            original_height=original_height,
            last_access=time.time(),
        )
        with store_lock:
            sessions[session.id] = session
        return _session_state(session)

    @app.get("/sessions/{session_id}")
    def read_session(session_id: str):
        session = get_session(session_id)
        if session is None:
            return not_found(session_id)
        with session.lock:
            return _session_state(session)

    @app.put("/sessions/{session_id}/annotations")
    async def put_annotations(session_id: str, request: Request):
        session = get_session(session_id)
        if session is None:
            return not_found(session_id)
        try:
            doc = await request.json()
        except Exception:  # noqa: BLE001
            return JSONResponse({"detail": "body is not valid JSON"}, status_code=422)
        try:
            sdio.validate_annotation_doc(doc)
        except SchemaError as exc:
            return JSONResponse(
                {"detail": exc.message, "field": exc.path}, status_code=422
            )
        if (
            doc["grid"]["rows"] != session.grid.rows
            or doc["grid"]["cols"] != session.grid.cols
        ):
            return JSONResponse(
                {
                    "detail": f"document grid {doc['grid']['rows']}x{doc['grid']['cols']} "
                    f"does not match session grid {session.grid.rows}x{session.grid.cols}",
                    "field": "grid",
                },
                status_code=422,
            )
        with session.lock:
            session.annotation_doc = doc
            session.revision += 1
            return {"revision": session.revision}

    @app.post("/sessions/{session_id}/solve")
    async def solve_session(session_id: str, request: Request):
        session = get_session(session_id)
        if session is None:
            return not_found(session_id)
        body = {}
        if (await request.body()):
            try:
                body = await request.json()
            except Exception:  # noqa: BLE001
                return JSONResponse({"detail": "body is not valid JSON"}, status_code=422)
        with session.lock:
            doc = session.annotation_doc
            if doc is None or not doc["annotations"]:
                return JSONResponse(
                    {"detail": "label at least one patch before solving"}, status_code=409
                )
            try:
                config = CrfConfig(
                    lam=float(body.get("lambda", 1.0)),
                    beta=float(body.get("beta", 10.0)),
                )
                _, _, focal, annotations = sdio.parse_annotation_doc(doc)
                targets = targets_from_annotations(session.grid, annotations, focal_length=focal)
                depth = solve_map(session.raster, targets, config)
            except (EmptyConstraintError, UnderdeterminedError) as exc:
                return JSONResponse({"detail": str(exc)}, status_code=409)
            except SolverError as exc:
                return JSONResponse(
                    {
                        "detail": str(exc),
                        "residual": exc.residual,
                        "iterations": exc.iterations,
                    },
                    status_code=500,
                )
            except (DimensionError, SchemaError) as exc:
                return JSONResponse({"detail": str(exc)}, status_code=422)
            session.latest = depth
            session.latest_revision = session.revision
            session.latest_pfm = sdio.pfm_bytes(depth.y)
            session.latest_png = sdio.depth_preview_png_bytes(depth.y)
            return {
                "revision": session.revision,
                "stale": False,
                "lambda": config.lam,
                "beta": config.beta,
                "unary_energy": depth.unary_energy,
                "binary_energy": depth.binary_energy,
                "residual": depth.residual,
                "iterations": depth.iterations,
                "pfm_url": f"/sessions/{session.id}/depth.pfm",
                "png_url": f"/sessions/{session.id}/depth.png",
            }

    def depth_response(session_id: str, kind: str) -> Response:
        session = get_session(session_id)
        if session is None:
            return not_found(session_id)
        with session.lock:
            if session.latest is None:
                return JSONResponse({"detail": "no solve yet"}, status_code=404)
            payload = session.latest_pfm if kind == "pfm" else session.latest_png
            media = "image/x-portable-floatmap" if kind == "pfm" else "image/png"
            stale = session.latest_revision != session.revision
            return Response(
                content=payload,
                media_type=media,
                headers={
                    "X-Depth-Revision": str(session.latest_revision),
                    "X-Session-Revision": str(session.revision),
                    "X-Stale": "true" if stale else "false",
                },
            )

    @app.get("/sessions/{session_id}/depth.pfm")
    def get_depth_pfm(session_id: str):
        return depth_response(session_id, "pfm")

    @app.get("/sessions/{session_id}/depth.png")
    def get_depth_png(session_id: str):
        return depth_response(session_id, "png")

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
