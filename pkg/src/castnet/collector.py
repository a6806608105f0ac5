"""HTTP service for collecting survey responses.

Four-page flow per session: consent, task 1 entries, task 2 matrix, then a
respondent profile. Stages advance strictly in that order and no stage can
be submitted twice. Sessions are identified by random opaque tokens rather
than by client address, so several annotators can share one machine.

Persistence is an append-only line-delimited record file per story. Every
accepted submission is appended as one complete line and fsynced before the
request is acknowledged; a crash can therefore leave at most one partial
trailing line, which the loader detects and truncates. Contact emails never
enter the main store: they are appended to a separate contacts file and are
absent from exports.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, field_validator

from .corpus import CharacterRegistry
from .errors import FormatError, ValidationError
from .survey import (
    ACADEMIC_BACKGROUNDS,
    SurveyResponse,
    response_from_dict,
    response_to_dict,
    validate_task1,
    validate_task2,
)

STAGES = ("consent", "task1", "task2", "profile")
DONE = "done"

TASK1_MIN, TASK1_MAX = 1.0, 10.0
TASK2_MIN, TASK2_MAX = 0.0, 10.0


class ConsentPayload(BaseModel):
    agreed: bool

    @field_validator("agreed")
    @classmethod
    def must_agree(cls, value: bool) -> bool:
        if not value:
            raise ValueError("consent requires agreed=true")
        return value


class Task1EntryPayload(BaseModel):
    pair: tuple[str, str]
    importance: float = Field(ge=TASK1_MIN, le=TASK1_MAX)
    entry_order: int = Field(ge=0)


class Task1Payload(BaseModel):
    entries: list[Task1EntryPayload]


class Task2CellPayload(BaseModel):
    pair: tuple[str, str]
    value: float = Field(ge=TASK2_MIN, le=TASK2_MAX)


class Task2Payload(BaseModel):
    cells: list[Task2CellPayload]


class ProfilePayload(BaseModel):
    gender: str = Field(min_length=1, max_length=40)
    age: int = Field(ge=10, le=120)
    education_level: str = Field(min_length=1, max_length=80)
    academic_background: Literal[ACADEMIC_BACKGROUNDS]  # type: ignore[valid-type]
    contact_email: str | None = Field(default=None, max_length=200)


PAYLOAD_MODELS = {
    "consent": ConsentPayload,
    "task1": Task1Payload,
    "task2": Task2Payload,
    "profile": ProfilePayload,
}


@dataclass
class Session:
    token: str
    story_id: str
    seq: int
    stage: str = "consent"
    data: dict = field(default_factory=dict)  # stage -> stored payload
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class ResponseStore:
    """Append-only record file for one story plus a separate contacts file."""

    def __init__(self, data_dir: Path, story_id: str):
        self.path = data_dir / f"{story_id}.jsonl"
        self.contacts_path = data_dir / f"{story_id}_contacts.jsonl"
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        self._append(self.path, record)

    def append_contact(self, record: dict) -> None:
        self._append(self.contacts_path, record)

    def _append(self, path: Path, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False, separators=(",", ":"))
        if "\n" in line:
            raise ValueError("record serialization must be single-line")
        with self._lock:
            with open(path, "a", encoding="utf-8") as f:
                f.write(line + "\n")
                f.flush()
                os.fsync(f.fileno())

    def load(self) -> list[dict]:
        """Replay complete records; truncate a partial trailing line.

        A partial line can only be the tail of a write interrupted before
        acknowledgment, so dropping it never loses an acknowledged record.
        """
        if not self.path.exists():
            return []
        raw = self.path.read_bytes().decode("utf-8")
        keep = len(raw)
        if raw and not raw.endswith("\n"):
            cut = raw.rfind("\n") + 1
            keep = cut
            raw = raw[:cut]
        if keep < self.path.stat().st_size:
            with open(self.path, "r+", encoding="utf-8") as f:
                f.truncate(len(raw.encode("utf-8")))
        records = []
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise FormatError(self.path, lineno, f"corrupt record: {exc.msg}")
        return records


class Collector:
    def __init__(self, registries: list[CharacterRegistry], data_dir: Path):
        if not registries:
            raise ValueError("the collector needs at least one story registry")
        self.registries = {r.story_id: r for r in registries}
        if len(self.registries) != len(registries):
            raise ValueError("story ids must be unique across registries")
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.stores = {sid: ResponseStore(self.data_dir, sid) for sid in self.registries}
        self.sessions: dict[str, Session] = {}
        self._sessions_lock = threading.Lock()
        self._next_seq = 0
        for story_id, store in self.stores.items():
            self._replay(story_id, store.load())

    def _replay(self, story_id: str, records: list[dict]) -> None:
        for record in records:
            kind = record.get("kind")
            if kind == "session":
                token = record["token"]
                seq = int(record["seq"])
                self.sessions[token] = Session(token, story_id, seq)
                self._next_seq = max(self._next_seq, seq + 1)
            elif kind == "stage":
                session = self.sessions.get(record["token"])
                if session is None:
                    raise FormatError(self.stores[story_id].path, None,
                                      "stage record for unknown session token")
                session.data[record["stage"]] = record["payload"]
                session.stage = _next_stage(record["stage"])
            else:
                raise FormatError(self.stores[story_id].path, None,
                                  f"unknown record kind {kind!r}")

    def create_session(self, story_id: str) -> Session:
        registry = self.registry_or_404(story_id)
        token = secrets.token_urlsafe(16)
        with self._sessions_lock:
            seq = self._next_seq
            self._next_seq += 1
            session = Session(token, registry.story_id, seq)
            self.sessions[token] = session
        self.stores[story_id].append({
            "kind": "session", "token": token, "story_id": story_id, "seq": seq,
            "created_at": datetime.now(timezone.utc).isoformat(),
        })
        return session

    def registry_or_404(self, story_id: str) -> CharacterRegistry:
        registry = self.registries.get(story_id)
        if registry is None:
            raise HTTPException(status_code=404, detail=f"unknown story {story_id!r}")
        return registry

    def session_or_401(self, token: str) -> Session:
        session = self.sessions.get(token)
        if session is None:
            raise HTTPException(status_code=401, detail="unknown session token")
        return session

    def submit(self, token: str, stage: str, body: dict) -> dict:
        if stage not in STAGES:
            raise HTTPException(status_code=404, detail=f"unknown stage {stage!r}")
        session = self.session_or_401(token)
        with session.lock:  # atomic check-and-advance per token
            if session.stage != stage:
                raise HTTPException(
                    status_code=409,
                    detail=f"stage {stage!r} cannot be submitted now; "
                           f"the session is at stage {session.stage!r}",
                )
            try:
                payload = PAYLOAD_MODELS[stage].model_validate(body)
            except Exception as exc:  # pydantic.ValidationError: re-raise as HTTP 422
                raise HTTPException(status_code=422, detail=_pydantic_detail(exc))
            stored = self._check_semantics(session, stage, payload)
            contact = stored.pop("contact_email", None) if stage == "profile" else None
            self.stores[session.story_id].append({
                "kind": "stage", "token": token, "stage": stage, "payload": stored,
            })
            if contact:
                self.stores[session.story_id].append_contact({
                    "token": token, "contact_email": contact,
                })
            session.data[stage] = stored
            session.stage = _next_stage(stage)
        return {"accepted": True, "stage": session.stage}

    def _check_semantics(self, session: Session, stage: str, payload) -> dict:
        """Registry-aware validation beyond field bounds; returns the stored dict."""
        registry = self.registries[session.story_id]
        if stage == "consent":
            return {"agreed": True}
        if stage == "task1":
            stored = {"task1": [e.model_dump() for e in payload.entries]}
            doc = {"respondent_id": session.token, **stored}
            try:
                response = response_from_dict(doc, session.story_id)
                validate_task1(response.task1, registry)
            except (ValidationError, ValueError) as exc:
                raise HTTPException(status_code=422, detail=[
                    {"loc": ["body", "entries"], "msg": str(exc)}])
            return {"entries": stored["task1"]}
        if stage == "task2":
            cells = [c.model_dump() for c in payload.cells]
            doc = {"respondent_id": session.token, "task2": cells}
            try:
                response = response_from_dict(doc, session.story_id)
                if len(response.task2.cells) != len(cells):
                    raise ValidationError("duplicate cells for one pair")
                validate_task2(response.task2, registry)
            except (ValidationError, ValueError) as exc:
                raise HTTPException(status_code=422, detail=[
                    {"loc": ["body", "cells"], "msg": str(exc)}])
            return {"cells": cells}
        return payload.model_dump()

    def export(self, story_id: str) -> dict:
        self.registry_or_404(story_id)
        done = sorted(
            (s for s in self.sessions.values()
             if s.story_id == story_id and s.stage == DONE),
            key=lambda s: s.seq,
        )
        responses = []
        for session in done:
            doc = {"respondent_id": f"r{session.seq:04d}"}
            doc["task1"] = session.data["task1"]["entries"]
            doc["task2"] = session.data["task2"]["cells"]
            doc["profile"] = {k: v for k, v in session.data["profile"].items()
                              if k != "contact_email"}
            responses.append(doc)
        return {
            "format": "castnet-responses",
            "version": 1,
            "story_id": story_id,
            "responses": responses,
        }

    def export_responses(self, story_id: str) -> list[SurveyResponse]:
        """The export as `survey` objects, for in-process use."""
        doc = self.export(story_id)
        return [response_from_dict(r, story_id) for r in doc["responses"]]


def _next_stage(stage: str) -> str:
    i = STAGES.index(stage)
    return STAGES[i + 1] if i + 1 < len(STAGES) else DONE


def _pydantic_detail(exc) -> list:
    errors = getattr(exc, "errors", None)
    if callable(errors):
        return [{"loc": ["body", *e["loc"]], "msg": e["msg"]} for e in errors()]
    return [{"loc": ["body"], "msg": str(exc)}]


def schema_document() -> dict:
    """Bounds and vocabularies shared with survey clients."""
    return {
        "task1": {"min": TASK1_MIN, "max": TASK1_MAX},
        "task2": {"min": TASK2_MIN, "max": TASK2_MAX},
        "academic_backgrounds": list(ACADEMIC_BACKGROUNDS),
        "stages": list(STAGES) + [DONE],
        "profile": {"age_min": 10, "age_max": 120},
    }


def create_app(
    registries: list[CharacterRegistry],
    data_dir: str | Path,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    collector = Collector(registries, Path(data_dir))
    app = FastAPI(title="castnet survey collector", version="1")
    app.state.collector = collector

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: dict):
        story_id = body.get("story_id")
        if not isinstance(story_id, str):
            raise HTTPException(status_code=422, detail=[
                {"loc": ["body", "story_id"], "msg": "story_id is required"}])
        session = collector.create_session(story_id)
        registry = collector.registries[session.story_id]
        return {
            "token": session.token,
            "story_id": session.story_id,
            "stage": session.stage,
            "characters": list(registry.names),
        }

    @app.get("/v1/sessions/{token}")
    def get_session(token: str):
        session = collector.session_or_401(token)
        registry = collector.registries[session.story_id]
        return {
            "story_id": session.story_id,
            "stage": session.stage,
            "characters": list(registry.names),
        }

    @app.post("/v1/sessions/{token}/{stage}")
    def submit_stage(token: str, stage: str, body: dict):
        return collector.submit(token, stage, body)

    @app.get("/v1/stories/{story_id}/characters")
    def story_characters(story_id: str):
        registry = collector.registry_or_404(story_id)
        return {"story_id": story_id, "characters": list(registry.names)}

    @app.get("/v1/export/{story_id}")
    def export_story(story_id: str):
        return collector.export(story_id)

    @app.get("/v1/schema")
    def schema():
        return schema_document()

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
