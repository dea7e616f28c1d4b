"""Session persistence: one JSON file per session, atomic replace on write.

A session pins the sample list and sheet for a tasting and accumulates one
tablecloth per assessor.  Writes go to a temp file in the same directory,
are fsynced, then renamed over the target, so readers always see a complete
document and a crash between operations loses nothing already acknowledged.
"""

from __future__ import annotations

import json
import os
import re
import threading
import uuid
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .geometry import Sheet, Tablecloth


_ID_RE = re.compile(r"[A-Za-z0-9_-]{1,64}")


class UnknownSessionError(KeyError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"unknown session {session_id!r}")


class CorruptSessionError(ValueError):
    def __init__(self, session_id: str, detail: str):
        self.session_id = session_id
        super().__init__(f"session file {session_id!r} is corrupt: {detail}")


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass(eq=False)
class Session:
    id: str
    sample_names: list[str]
    sheet: Sheet
    tablecloths: list[Tablecloth] = field(default_factory=list)
    created: str = field(default_factory=_utcnow)
    updated: str = field(default_factory=_utcnow)

    def __post_init__(self):
        if len(self.sample_names) < 2:
            raise ValueError("a session needs at least 2 samples")
        if len(set(self.sample_names)) != len(self.sample_names):
            raise ValueError("sample names must be unique")
        seen = set()
        for t in self.tablecloths:
            if t.sample_count != len(self.sample_names):
                raise ValueError(
                    f"tablecloth {t.assessor_id!r} does not cover the sample list"
                )
            if t.assessor_id in seen:
                raise ValueError(f"duplicate assessor id {t.assessor_id!r}")
            seen.add(t.assessor_id)

    @property
    def assessor_ids(self) -> list[str]:
        return [t.assessor_id for t in self.tablecloths]

    def upsert_tablecloth(self, cloth: Tablecloth) -> bool:
        """Insert or replace by assessor id; returns True when replaced."""
        if cloth.sample_count != len(self.sample_names):
            raise ValueError("tablecloth does not cover the sample list")
        for idx, existing in enumerate(self.tablecloths):
            if existing.assessor_id == cloth.assessor_id:
                self.tablecloths[idx] = cloth
                self.updated = _utcnow()
                return True
        self.tablecloths.append(cloth)
        self.updated = _utcnow()
        return False

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "sample_names": list(self.sample_names),
            "sheet": {"width": self.sheet.width, "height": self.sheet.height},
            "tablecloths": [
                {
                    "assessor_id": t.assessor_id,
                    "placements": [[float(x), float(y)] for x, y in t.positions],
                }
                for t in self.tablecloths
            ],
            "created": self.created,
            "updated": self.updated,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Session":
        sheet = Sheet(doc["sheet"]["width"], doc["sheet"]["height"])
        names = doc["sample_names"]
        cloths = [
            Tablecloth(
                assessor_id=t["assessor_id"],
                sheet=sheet,
                positions=np.array(t["placements"], dtype=np.float64).reshape(len(names), 2),
            )
            for t in doc["tablecloths"]
        ]
        return cls(
            id=doc["id"],
            sample_names=list(names),
            sheet=sheet,
            tablecloths=cloths,
            created=doc["created"],
            updated=doc["updated"],
        )

    def __eq__(self, other):
        if not isinstance(other, Session):
            return NotImplemented
        return (
            self.id == other.id
            and self.sample_names == other.sample_names
            and self.sheet == other.sheet
            and self.tablecloths == other.tablecloths
            and self.created == other.created
            and self.updated == other.updated
        )


def new_session_id() -> str:
    return uuid.uuid4().hex[:12]


class SessionStore:
    """Directory-backed store; one writer per session at a time, snapshot reads."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._meta = threading.Lock()

    def _path(self, session_id: str) -> Path:
        if not _ID_RE.fullmatch(session_id):
            raise UnknownSessionError(session_id)
        return self.directory / f"{session_id}.json"

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._meta:
            return self._locks.setdefault(session_id, threading.Lock())

    @contextmanager
    def locked(self, session_id: str):
        lock = self._lock_for(session_id)
        with lock:
            yield

    def exists(self, session_id: str) -> bool:
        try:
            return self._path(session_id).exists()
        except UnknownSessionError:
            return False

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.json"))

    def save(self, session: Session) -> None:
        path = self._path(session.id)
        payload = json.dumps(session.to_dict(), indent=2, sort_keys=True) + "\n"
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as handle:
            handle.write(payload)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)

    def load(self, session_id: str) -> Session:
        path = self._path(session_id)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise UnknownSessionError(session_id) from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CorruptSessionError(
                session_id, f"{exc.msg} at line {exc.lineno} column {exc.colno}"
            ) from exc
        try:
            return Session.from_dict(doc)
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptSessionError(session_id, str(exc)) from exc

    def create(self, sample_names: list[str], sheet: Sheet | None = None) -> Session:
        session = Session(
            id=new_session_id(), sample_names=sample_names, sheet=sheet or Sheet()
        )
        with self.locked(session.id):
            self.save(session)
        return session
