"""A directory of documents addressed by the digest of their cone and Reeb data."""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Iterator
import fcntl
import hashlib
import json
import pathlib

import structlog

from .document import Document, cone_to_json, dumps, reeb_to_json
from .errors import IntegrityError, PreconditionError

logger = structlog.get_logger(__name__)


INDEX = "index.json"
LOCK = ".lock"


def document_hash(doc: Document) -> str:
    content = {"cone": cone_to_json(doc.cone), "reeb": reeb_to_json(doc.reeb) if doc.reeb else None}
    return hashlib.sha256(dumps(content).encode()).hexdigest()


@dataclass(slots=True, frozen=True)
class Catalog:
    root: pathlib.Path

    @classmethod
    def open(cls, root: str | pathlib.Path) -> Catalog:
        root = pathlib.Path(root)
        root.mkdir(parents=True, exist_ok=True)
        return cls(root)

    def _index(self) -> dict[str, dict[str, Any]]:
        path = self.root / INDEX
        if not path.exists():
            return {}
        with open(path) as f:
            return json.load(f)

    @contextmanager
    def _locked(self) -> Iterator[None]:
        with open(self.root / LOCK, "w") as lock:
            fcntl.flock(lock, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(lock, fcntl.LOCK_UN)

    def add(self, doc: Document) -> str:
        doc = Document.loads(doc.dumps())
        key = document_hash(doc)
        path = self.root / f"{key}.json"

        with self._locked():
            index = self._index()
            if path.exists():
                stored = Document.load(path)
                if (stored.cone, stored.reeb) != (doc.cone, doc.reeb):
                    raise IntegrityError(f"hash {key} already holds a different document")
                logger.debug("catalog hit", key=key)
                return key

            doc.save(path)
            index[key] = {"name": doc.metadata.get("name", ""), "faces": len(doc.cone)}
            with open(self.root / INDEX, "w") as f:
                json.dump(index, f, sort_keys=True, indent=1)

        logger.info("catalog add", key=key, faces=len(doc.cone))
        return key

    def entries(self) -> list[dict[str, Any]]:
        return [{"hash": key, **entry} for key, entry in sorted(self._index().items())]

    def get(self, key: str) -> Document:
        """Fetch by full hash or unique prefix; the content must still match its hash."""
        matches = [k for k in self._index() if k.startswith(key)]
        if len(matches) != 1:
            raise PreconditionError(f"{len(matches)} catalog entries match {key!r}")
        doc = Document.load(self.root / f"{matches[0]}.json")
        if document_hash(doc) != matches[0]:
            raise IntegrityError(f"entry {matches[0]} does not match its content")
        return doc
