"""Content-addressed on-disk cache of model responses, one JSON file per request."""

from __future__ import annotations

import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path


class ResponseCache:
    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> dict | None:
        try:
            return json.loads(self.path(key).read_text(encoding="utf-8"))
        except FileNotFoundError:
            return None

    def put(self, key: str, request: dict, raw_text: str, normalized_text: str, provider_meta: dict) -> dict:
        record = {
            "request": request,
            "raw_text": raw_text,
            "normalized_text": normalized_text,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "provider_meta": provider_meta,
        }
        # write-then-rename so concurrent readers never see a partial record
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(record, fh, ensure_ascii=False, indent=1)
            os.replace(tmp, self.path(key))
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        return record

    def __contains__(self, key: str) -> bool:
        return self.path(key).exists()
