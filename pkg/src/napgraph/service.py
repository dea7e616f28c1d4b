"""HTTP JSON API for collecting tablecloths and serving consensus outputs.

Endpoints:

    POST /sessions                      create a session (sample names, sheet)
    GET  /sessions/{id}                 session metadata
    POST /sessions/{id}/tablecloths     submit or replace one assessor's placement
    GET  /sessions/{id}/consensus       ?format=svg|csv|json and optional &seed=
    GET  /sessions/{id}/export.csv      coordinate table of the current data

Submissions carry normalized coordinates in the unit square; they are scaled
to sheet centimeters on arrival.  Resubmitting with the same assessor id
replaces that assessor's tablecloth.  Consensus is recomputed on demand from
the session's current tablecloths via the same pipeline the CLI uses.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, Field

from .geometry import Sheet, Tablecloth
from .layout import LayoutParams
from .pipeline import AnalysisResult, analyze
from .render import RenderStyle
from .sessions import (
    CorruptSessionError,
    Session,
    SessionStore,
    UnknownSessionError,
)
from .tableio import tablecloths_to_table, write_table


class SheetModel(BaseModel):
    width: float = 60.0
    height: float = 40.0


class CreateSessionRequest(BaseModel):
    sample_names: list[str]
    sheet: SheetModel = Field(default_factory=SheetModel)


class PlacementModel(BaseModel):
    sample: str
    x: float
    y: float


class SubmissionPayload(BaseModel):
    assessor_id: str = Field(min_length=1, max_length=128)
    placements: list[PlacementModel]


def _load_or_404(store: SessionStore, session_id: str) -> Session:
    try:
        return store.load(session_id)
    except UnknownSessionError:
        raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
    except CorruptSessionError as exc:
        raise HTTPException(status_code=500, detail=str(exc))


def _session_meta(session: Session) -> dict:
    return {
        "id": session.id,
        "sample_names": session.sample_names,
        "sheet": {"width": session.sheet.width, "height": session.sheet.height},
        "assessor_ids": session.assessor_ids,
        "tablecloth_count": len(session.tablecloths),
        "created": session.created,
        "updated": session.updated,
    }


def create_app(
    store: SessionStore,
    layout_params: LayoutParams | None = None,
    render_style: RenderStyle | None = None,
) -> FastAPI:
    app = FastAPI(title="napgraph collection service")

    def run_analysis(session: Session, seed: int | None) -> AnalysisResult:
        params = layout_params or LayoutParams(display_diameter=session.sheet.diagonal)
        if seed is not None:
            params = LayoutParams(
                spring_constant=params.spring_constant,
                max_updates=params.max_updates,
                tolerance=params.tolerance,
                display_diameter=params.display_diameter,
                seed=seed,
            )
        return analyze(
            session.tablecloths,
            session.sample_names,
            sheet=session.sheet,
            params=params,
            style=render_style,
        )

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        if len(req.sample_names) < 2:
            raise HTTPException(status_code=422, detail="need at least 2 sample names")
        if len(set(req.sample_names)) != len(req.sample_names):
            raise HTTPException(status_code=422, detail="sample names must be unique")
        if any(not name.strip() for name in req.sample_names):
            raise HTTPException(status_code=422, detail="sample names must be non-empty")
        try:
            sheet = Sheet(req.sheet.width, req.sheet.height)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        session = store.create(req.sample_names, sheet)
        return _session_meta(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_meta(_load_or_404(store, session_id))

    @app.post("/sessions/{session_id}/tablecloths")
    def submit_tablecloth(session_id: str, payload: SubmissionPayload):
        with store.locked(session_id):
            session = _load_or_404(store, session_id)
            expected = set(session.sample_names)
            got = [p.sample for p in payload.placements]
            missing = sorted(expected - set(got))
            extra = sorted(set(got) - expected)
            if missing or extra:
                problems = []
                if missing:
                    problems.append(f"missing sample placements: {missing}")
                if extra:
                    problems.append(f"unknown samples: {extra}")
                raise HTTPException(status_code=422, detail="; ".join(problems))
            if len(got) != len(set(got)):
                raise HTTPException(status_code=422, detail="duplicate sample placements")
            by_name = {p.sample: p for p in payload.placements}
            for p in payload.placements:
                if not (0.0 <= p.x <= 1.0 and 0.0 <= p.y <= 1.0):
                    raise HTTPException(
                        status_code=422,
                        detail=f"coordinates for {p.sample!r} outside [0, 1]",
                    )
            positions = np.array(
                [
                    [
                        by_name[name].x * session.sheet.width,
                        by_name[name].y * session.sheet.height,
                    ]
                    for name in session.sample_names
                ],
                dtype=np.float64,
            )
            cloth = Tablecloth(
                assessor_id=payload.assessor_id, sheet=session.sheet, positions=positions
            )
            replaced = session.upsert_tablecloth(cloth)
            store.save(session)
            return {
                "status": "replaced" if replaced else "accepted",
                "tablecloth_count": len(session.tablecloths),
            }

    @app.get("/sessions/{session_id}/consensus")
    def get_consensus(
        session_id: str,
        format: Literal["svg", "csv", "json"] = "json",
        seed: int | None = None,
    ):
        session = _load_or_404(store, session_id)
        if not session.tablecloths:
            raise HTTPException(status_code=409, detail="session has no tablecloths yet")
        result = run_analysis(session, seed)
        meta = {
            "X-Sample-Count": str(result.sample_count),
            "X-Assessor-Count": str(result.assessor_count),
            "X-Final-Energy": repr(result.layout.final_energy),
            "X-Converged": "true" if result.layout.converged else "false",
        }
        if format == "svg":
            return Response(result.svg, media_type="image/svg+xml", headers=meta)
        if format == "csv":
            return Response(result.matrix_csv, media_type="text/csv", headers=meta)
        return result.to_json_dict()

    @app.get("/sessions/{session_id}/export.csv")
    def export_csv(session_id: str):
        session = _load_or_404(store, session_id)
        if not session.tablecloths:
            raise HTTPException(status_code=409, detail="session has no tablecloths yet")
        table = tablecloths_to_table(
            session.tablecloths, session.sample_names, session.sheet
        )
        return Response(write_table(table), media_type="text/csv")

    return app
