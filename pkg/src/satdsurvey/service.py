"""Local HTTP facade over survey sessions.

A thin transport: every mutation goes through the survey module, payloads
are JSON with documented field names, and each session appends to a replay
log so a restarted process can rebuild its sessions.

Single-process and localhost-bound by design; this is a labeling bench for
one reviewer, not a multi-tenant service.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .corpus import Corpus, discover_corpora, leave_one_out
from .harness import recall
from .survey import ACTIVE, SurveyConfig, SurveySession, replay_session


class CreateSessionRequest(BaseModel):
    test_project: str
    classifier: str = "svm"
    stop: str = "target@0.9"
    m: int = 100
    seed: int = 0
    min_df: int = 1


class LabelsRequest(BaseModel):
    labels: dict[int, bool] = Field(default_factory=dict)


class _Held:
    def __init__(self, session: SurveySession):
        self.session = session
        self.lock = threading.Lock()


def _session_payload(sid: str, held: _Held) -> dict:
    s = held.session
    return {
        "session_id": sid,
        "project": s.test.name,
        "pool_size": len(s.pool_ids),
        "corpus_size": len(s.test),
        "status": s.status,
    }


def _report_payload(s: SurveySession, report) -> dict:
    rec = None
    if s.test.fully_labeled() and s.test.positives() > 0:
        rec = recall(report.found, s.test.positives())
    return {
        "iteration": report.iteration,
        "found": report.found,
        "reads": report.reads,
        "estimate_total": report.estimate.total_positives,
        "estimate_converged": report.estimate.converged,
        "decision_stop": report.decision.stop,
        "decision_rule": report.decision.rule,
        "status": report.status,
        "seconds": report.seconds,
        "recall_if_known": rec,
    }


def create_app(
    data_dir: str | Path,
    fmt: str = "default",
    log_dir: str | Path | None = None,
    restore: bool = True,
) -> FastAPI:
    data_dir = Path(data_dir)
    log_dir = Path(log_dir) if log_dir else data_dir / "session_logs"
    log_dir.mkdir(parents=True, exist_ok=True)

    corpora: list[Corpus] = discover_corpora(data_dir, fmt=fmt)
    names = {c.name for c in corpora}
    sessions: dict[str, _Held] = {}

    app = FastAPI(title="satdsurvey")
    app.state.log_dir = log_dir
    app.state.sessions = sessions

    if restore:
        for log_path in sorted(log_dir.glob("*.log")):
            sid = log_path.stem
            try:
                with open(log_path, encoding="utf-8") as f:
                    head = f.read(512)
                test_name = None
                for corp in corpora:
                    if f'"test": "{corp.name}"' in head:
                        test_name = corp.name
                        break
                if test_name is None:
                    continue
                train, test = leave_one_out(corpora, test_name)
                sessions[sid] = _Held(replay_session(log_path, test, train))
            except Exception:
                continue  # a malformed log must not block startup

    def _get(sid: str) -> _Held:
        held = sessions.get(sid)
        if held is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid}")
        return held

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        if req.test_project not in names:
            raise HTTPException(status_code=400, detail=f"unknown project {req.test_project!r}")
        if req.m < 1:
            raise HTTPException(status_code=400, detail="m must be >= 1")
        sid = uuid.uuid4().hex
        try:
            train, test = leave_one_out(corpora, req.test_project)
            config = SurveyConfig(
                m=req.m,
                classifier=req.classifier,
                stop=req.stop,
                seed=req.seed,
                min_df=req.min_df,
                log_path=log_dir / f"{sid}.log",
            )
            session = SurveySession(test, train, config)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except OSError as exc:
            raise HTTPException(status_code=500, detail=f"ingestion failure: {exc}")
        sessions[sid] = _Held(session)
        return _session_payload(sid, sessions[sid])

    @app.get("/sessions/{sid}/batch")
    def get_batch(sid: str):
        held = _get(sid)
        with held.lock:
            if held.session.status != ACTIVE:
                raise HTTPException(status_code=409, detail=f"session is {held.session.status}")
            batch = held.session.next_batch()
            return {
                "batch_index": held.session.iteration,
                "ids": [c.id for c in batch],
                "texts": [c.text for c in batch],
                "projects": [c.project for c in batch],
            }

    @app.post("/sessions/{sid}/labels")
    def post_labels(sid: str, req: LabelsRequest):
        held = _get(sid)
        with held.lock:
            if held.session.status != ACTIVE:
                raise HTTPException(status_code=409, detail=f"session is {held.session.status}")
            try:
                report = held.session.submit_labels(req.labels)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            return _report_payload(held.session, report)

    @app.get("/sessions/{sid}/status")
    def get_status(sid: str):
        held = _get(sid)
        s = held.session
        return {
            "reads": s.reads,
            "found": s.found,
            "estimate_total": s.estimate.total_positives if s.estimate else None,
            "curve": [[r, f] for r, f in zip(s.curve.reads, s.curve.found)],
            "status": s.status,
            "pool_size": len(s.pool_ids),
            "corpus_size": len(s.test),
            "m": s.config.m,
            "stop_rule": str(s.rule),
        }

    @app.post("/sessions/{sid}/stop")
    def stop_session(sid: str):
        held = _get(sid)
        with held.lock:
            held.session.stop_now()
            return {"status": held.session.status}

    return app


def serve(data_dir, port: int = 8714, fmt: str = "default", log_dir=None, ui_dir=None) -> None:
    """Run the service with uvicorn; blocks until interrupted."""
    import uvicorn

    app = create_app(data_dir, fmt=fmt, log_dir=log_dir)
    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    uvicorn.run(app, host="127.0.0.1", port=port)
