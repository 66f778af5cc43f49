"""HTTP service exposing the parcellation engine to interactive clients.

Sessions are held in process memory. Each session owns one loaded dataset,
at most one hierarchy, the (at most two) locked node ids a client may pin
for side-by-side comparison, and a connectivity cache keyed by the
hierarchy revision. Mutations on a session are serialized through its lock,
so concurrent steering requests land in a total order and every read that
follows an acknowledged operation sees it.

Error bodies are always {"error_kind", "message", "detail"}: engine and IO
error kinds keep their names, dataset load problems map to 400, malformed
values to 422, state conflicts to 409 and unknown ids to 404.
"""
from __future__ import annotations

import base64
import os
import threading
import uuid
from pathlib import Path

import numpy as np
from fastapi import Body, FastAPI, Query, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import engine, metrics, slices, volume_io
from .errors import ParcelSteerError, NoHierarchy

DATA_ROOT_ENV = "PARCELSTEER_DATA_ROOT"

_STATUS = {
    "MalformedHeader": 400,
    "UnsupportedDatatype": 400,
    "NonFiniteSample": 400,
    "DimsMismatch": 400,
    "UnknownLabel": 400,
    "DuplicateLabel": 400,
    "EmptyAtlas": 400,
    "ZeroVariance": 400,
    "LengthMismatch": 400,
    "ThresholdOutOfRange": 422,
    "InvalidRange": 422,
    "IndexOutOfRange": 422,
    "NotALeaf": 409,
    "SingletonLeaf": 409,
    "ThresholdNotTighter": 409,
    "SameNode": 409,
    "ForbiddenKind": 409,
    "NoHierarchy": 409,
}


class ApiError(Exception):
    """Request-level failure carrying its HTTP status and error kind."""

    def __init__(self, status: int, kind: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.kind = kind
        self.message = message
        self.detail = detail if detail is not None else {}


class Dataset:
    """A loaded scan/atlas/meta triple with everything derived from it."""

    def __init__(self, scan, atlas, meta):
        self.scan = scan
        self.atlas = atlas
        self.meta = meta
        self.svs = engine.extract_supervoxels(scan, atlas, meta)
        self.table = engine.SuperVoxelTable(self.svs)
        self.mean_image = scan.data.mean(axis=3, dtype=np.float64)


def load_dataset(scan_path, atlas_path, meta_path) -> Dataset:
    scan = volume_io.load_timeseries(scan_path)
    atlas, meta = volume_io.load_atlas(atlas_path, meta_path)
    volume_io.ensure_compatible(scan, atlas)
    return Dataset(scan, atlas, meta)


class Session:
    def __init__(self, session_id: str, dataset: Dataset):
        self.session_id = session_id
        self.dataset = dataset
        self.hierarchy = None
        self.locked = []
        self.fc_cache = None
        self.lock = threading.RLock()


def _need(payload: dict, key: str):
    if not isinstance(payload, dict) or key not in payload or payload[key] is None:
        raise ApiError(422, "MissingField", f"request body needs {key!r}")
    return payload[key]


def _need_number(payload: dict, key: str) -> float:
    value = _need(payload, key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ApiError(422, "ValidationError", f"{key!r} must be a number")
    return float(value)


def _need_int(payload: dict, key: str) -> int:
    value = _need(payload, key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ApiError(422, "ValidationError", f"{key!r} must be an integer")
    return int(value)


def _error_detail(exc) -> dict:
    detail = {}
    position = getattr(exc, "position", None)
    if position is not None:
        detail["position"] = [int(v) for v in position]
    label = getattr(exc, "label", None)
    if label is not None:
        detail["label"] = int(label)
    return detail


def create_app(data_root=None, default_dataset: Dataset | None = None) -> FastAPI:
    """Build the service; ``default_dataset`` backs bodyless POST /session."""
    app = FastAPI(title="parcelsteer", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    root = Path(data_root) if data_root is not None else Path(
        os.environ.get(DATA_ROOT_ENV, ".")
    )
    app.state.data_root = root
    app.state.default_dataset = default_dataset
    app.state.sessions = {}
    app.state.store_lock = threading.Lock()

    @app.exception_handler(ApiError)
    def _api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error_kind": exc.kind, "message": exc.message, "detail": exc.detail},
        )

    @app.exception_handler(ParcelSteerError)
    def _engine_error(request: Request, exc: ParcelSteerError):
        return JSONResponse(
            status_code=_STATUS.get(exc.kind, 400),
            content={
                "error_kind": exc.kind,
                "message": str(exc),
                "detail": _error_detail(exc),
            },
        )

    @app.exception_handler(RequestValidationError)
    def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "error_kind": "ValidationError",
                "message": "invalid request parameters",
                "detail": {"errors": jsonable_encoder(exc.errors())},
            },
        )

    def get_session(session_id: str) -> Session:
        session = app.state.sessions.get(session_id)
        if session is None:
            raise ApiError(404, "UnknownSession", f"no session {session_id!r}")
        return session

    def require_hierarchy(session: Session):
        if session.hierarchy is None:
            raise NoHierarchy("initialize a hierarchy for this session first")
        return session.hierarchy

    def resolve(path_str: str) -> Path:
        path = Path(path_str)
        return path if path.is_absolute() else app.state.data_root / path

    # -- dataset and session lifecycle

    @app.post("/session")
    def create_session(payload: dict = Body(default={})):
        paths = [payload.get(k) for k in ("scan_path", "atlas_path", "meta_path")]
        if any(p is not None for p in paths):
            for key in ("scan_path", "atlas_path", "meta_path"):
                _need(payload, key)
            try:
                dataset = load_dataset(*(resolve(str(p)) for p in paths))
            except FileNotFoundError as exc:
                raise ApiError(400, "NotFound", f"cannot open {exc.filename}")
            except IsADirectoryError as exc:
                raise ApiError(400, "NotFound", f"cannot open {exc.filename}")
        elif app.state.default_dataset is not None:
            dataset = app.state.default_dataset
        else:
            raise ApiError(
                422,
                "MissingField",
                "request body needs scan_path, atlas_path and meta_path "
                "(no default dataset is loaded)",
            )
        session = Session(uuid.uuid4().hex[:12], dataset)
        with app.state.store_lock:
            app.state.sessions[session.session_id] = session
        nx, ny, nz, nt = dataset.scan.dims
        return {
            "session_id": session.session_id,
            "n_supervoxels": len(dataset.table),
            "nt": nt,
            "dims": [nx, ny, nz],
        }

    @app.post("/session/{session_id}/hierarchy")
    def init_hierarchy(session_id: str, payload: dict = Body(...)):
        session = get_session(session_id)
        threshold = _need_number(payload, "threshold")
        confirm = bool(payload.get("confirm", False))
        with session.lock:
            existing = session.hierarchy
            if existing is not None and existing.op_log and not confirm:
                raise ApiError(
                    409,
                    "ConfirmRequired",
                    "re-initializing discards this session's edits; "
                    "pass confirm=true to proceed",
                )
            session.hierarchy = engine.init_hierarchy(session.dataset.table, threshold)
            session.locked = []
            session.fc_cache = None
            return session.hierarchy.to_document()

    @app.post("/session/{session_id}/restore")
    def restore(session_id: str, payload: dict = Body(...)):
        session = get_session(session_id)
        document = _need(payload, "document")
        if not isinstance(document, dict):
            raise ApiError(422, "ValidationError", "'document' must be an object")
        if document.get("schema_version") != engine.SCHEMA_VERSION:
            raise ApiError(
                422,
                "ValidationError",
                f"unsupported schema_version {document.get('schema_version')!r}",
            )
        with session.lock:
            try:
                session.hierarchy = engine.replay(session.dataset.table, document)
            except (KeyError, TypeError, ValueError) as exc:
                raise ApiError(422, "InvalidDocument", f"cannot replay document: {exc}")
            session.locked = []
            session.fc_cache = None
            return session.hierarchy.to_document()

    # -- inspection

    @app.get("/session/{session_id}/node/{node_id}")
    def node_info(session_id: str, node_id: int):
        session = get_session(session_id)
        table = session.dataset.table
        with session.lock:
            hierarchy = require_hierarchy(session)
            try:
                hierarchy.node(node_id)
            except KeyError:
                raise ApiError(404, "UnknownNode", f"no node {node_id}")
            members = hierarchy.members(node_id)
            member_rows = table.rows_for(members)
            band = metrics.mean_se([table.svs[i].mean_tc for i in member_rows])
            leaf_ids, courses = hierarchy.leaf_courses()
            stacked = np.vstack([table.mean_course(members)[None, :], courses])
            r, degenerate = metrics.pairwise_r(stacked)
            return {
                "node": hierarchy.node_doc(node_id),
                "homogeneity": float(hierarchy.node(node_id).homogeneity),
                "banded": {
                    "mean": band.mean.tolist(),
                    "se": band.se.tolist(),
                    "n_members": int(band.n_members),
                },
                "fc_row": [
                    {
                        "leaf_id": int(leaf_id),
                        "r": float(r[0, k + 1]),
                        "degenerate": bool(degenerate[0] | degenerate[k + 1]),
                    }
                    for k, leaf_id in enumerate(leaf_ids)
                ],
                "member_svs": [
                    {
                        "sv_id": int(sv),
                        "degenerate": bool(table.degenerate[table.row[int(sv)]]),
                    }
                    for sv in members
                ],
            }

    @app.get("/session/{session_id}/selection")
    def get_selection(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return {"locked": list(session.locked)}

    @app.put("/session/{session_id}/selection")
    def put_selection(session_id: str, payload: dict = Body(...)):
        session = get_session(session_id)
        locked = _need(payload, "locked")
        if not isinstance(locked, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in locked
        ):
            raise ApiError(422, "ValidationError", "'locked' must be a list of node ids")
        if len(locked) > 2:
            raise ApiError(422, "TooManyLocked", "at most two nodes can be locked")
        with session.lock:
            hierarchy = require_hierarchy(session)
            for node_id in locked:
                if node_id not in hierarchy.nodes:
                    raise ApiError(404, "UnknownNode", f"no node {node_id}")
            session.locked = [int(v) for v in locked]
            return {"locked": list(session.locked)}

    # -- steering

    def _after_mutation(session: Session):
        hierarchy = session.hierarchy
        session.locked = [nid for nid in session.locked if nid in hierarchy.nodes]

    @app.post("/session/{session_id}/expand")
    def expand(session_id: str, payload: dict = Body(...)):
        session = get_session(session_id)
        node_id = _need_int(payload, "node_id")
        threshold = _need_number(payload, "threshold")
        with session.lock:
            hierarchy = require_hierarchy(session)
            try:
                delta = hierarchy.expand(node_id, threshold)
            except KeyError:
                raise ApiError(404, "UnknownNode", f"no node {node_id}")
            _after_mutation(session)
            return delta.to_doc()

    @app.post("/session/{session_id}/merge")
    def merge(session_id: str, payload: dict = Body(...)):
        session = get_session(session_id)
        target_id = _need_int(payload, "target_id")
        source_id = _need_int(payload, "source_id")
        with session.lock:
            hierarchy = require_hierarchy(session)
            try:
                delta = hierarchy.merge(target_id, source_id)
            except KeyError as exc:
                raise ApiError(404, "UnknownNode", f"no node {exc.args[0]}")
            _after_mutation(session)
            return delta.to_doc()

    @app.post("/session/{session_id}/collapse")
    def collapse(session_id: str, payload: dict = Body(...)):
        session = get_session(session_id)
        node_id = _need_int(payload, "node_id")
        with session.lock:
            hierarchy = require_hierarchy(session)
            try:
                delta = hierarchy.collapse(node_id)
            except KeyError:
                raise ApiError(404, "UnknownNode", f"no node {node_id}")
            _after_mutation(session)
            return delta.to_doc()

    # -- connectivity and slices

    @app.get("/session/{session_id}/fc")
    def fc(session_id: str, lo: float = Query(0.0), hi: float = Query(1.0)):
        session = get_session(session_id)
        with session.lock:
            hierarchy = require_hierarchy(session)
            cache = session.fc_cache
            if cache is None or cache[0] != hierarchy.revision:
                leaf_ids, courses = hierarchy.leaf_courses()
                r, degenerate = metrics.pairwise_r(courses)
                cache = (hierarchy.revision, leaf_ids, r, degenerate)
                session.fc_cache = cache
            _, leaf_ids, r, degenerate = cache
            fcm = metrics.FCMatrix(
                parcel_ids=tuple(leaf_ids),
                r=r,
                degenerate=degenerate[:, None] | degenerate[None, :],
            )
            chords = metrics.fc_filter(fcm, lo, hi)
            nodes = {leaf_id: hierarchy.node(leaf_id) for leaf_id in leaf_ids}
            return {
                "parcel_order": [int(i) for i in leaf_ids],
                "parcels": [
                    {
                        "leaf_id": int(leaf_id),
                        "network_id": int(nodes[leaf_id].network_id),
                        "hemisphere": nodes[leaf_id].hemisphere,
                        "n_svs": len(nodes[leaf_id].sv_members),
                        "homogeneity": float(nodes[leaf_id].homogeneity),
                    }
                    for leaf_id in leaf_ids
                ],
                "matrix": r.tolist(),
                "degenerate": [bool(d) for d in degenerate],
                "chords": [
                    {"a": int(leaf_ids[i]), "b": int(leaf_ids[j]), "r": float(value)}
                    for i, j, value in chords
                ],
                "bars": np.abs(r).tolist(),
                "revision": int(hierarchy.revision),
            }

    @app.get("/session/{session_id}/slice/{plane}/{index}")
    def slice_view(
        session_id: str, plane: str, index: int, highlight: int | None = Query(None)
    ):
        session = get_session(session_id)
        with session.lock:
            hierarchy = require_hierarchy(session)
            if plane not in slices.PLANE_AXES:
                raise ApiError(
                    422,
                    "UnknownPlane",
                    f"plane must be one of {sorted(slices.PLANE_AXES)}, got {plane!r}",
                )
            parcellation = hierarchy.current_parcellation()
            overlay = slices.render_slice(
                parcellation, session.dataset.atlas, plane, index, highlight
            )
            underlay = slices.plane_slice(session.dataset.mean_image, plane, index)
            return {
                "plane": overlay.plane,
                "index": overlay.index,
                "shape": list(overlay.label_image.shape),
                "label_image": overlay.label_image.tolist(),
                "underlay": underlay.tolist(),
                "contours": [
                    {
                        "leaf_id": int(c.leaf_id),
                        "network_id": int(c.network_id),
                        "points": [[int(x), int(y)] for x, y in c.points],
                        "highlighted": overlay.highlight == c.leaf_id,
                    }
                    for c in overlay.contours
                ],
                "highlight": overlay.highlight,
            }

    @app.get("/session/{session_id}/export")
    def export(session_id: str):
        session = get_session(session_id)
        with session.lock:
            hierarchy = require_hierarchy(session)
            label_volume, document = hierarchy.export(session.dataset.atlas)
            payload = base64.b64encode(volume_io.label_volume_bytes(label_volume))
            return {
                "hierarchy": document,
                "label_volume": {
                    "filename": "parcellation.nii",
                    "media_type": "application/octet-stream",
                    "encoding": "base64",
                    "base64": payload.decode("ascii"),
                },
            }

    return app
