"""Append-only JSON-lines store for attack outcomes.

Records are serialized with sorted keys, so identical campaigns produce
byte-identical files; (sample_id, attack) pairs key resumability.
"""

from __future__ import annotations

import json
from pathlib import Path


class OutcomeStore:
    def __init__(self, path):
        self.path = Path(path)
        self._keys: set[tuple[str, str]] = set()
        self._records: list[dict] = []
        if self.path.exists():
            for rec in load_records(self.path):
                self._records.append(rec)
                self._keys.add((rec["sample_id"], rec["attack"]))

    def __len__(self) -> int:
        return len(self._records)

    def has(self, sample_id: str, attack_key: str) -> bool:
        return (sample_id, attack_key) in self._keys

    def append(self, record: dict) -> None:
        line = json.dumps(record, sort_keys=True, separators=(",", ":"))
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
        self._records.append(record)
        self._keys.add((record["sample_id"], record["attack"]))

    def records(self) -> list[dict]:
        return list(self._records)


def load_records(path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records
