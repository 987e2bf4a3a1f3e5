"""Reference catalog of codes, class censuses and orbit counts, and the append-only results log."""

from __future__ import annotations

import fcntl
import json
import os
from contextlib import contextmanager

# (level, word, orbit count, realizing curves)
NORMAL_FORMS = [
    (1, "R", 1, ["t, 0, 0"]),
    (2, "RR", 1, ["t, 0, 0"]),
    (2, "RV", 1, ["t^2, t^3, 0"]),
    (3, "RRR", 1, ["t, 0, 0"]),
    (3, "RRV", 1, ["t^2, t^5, 0"]),
    (3, "RVR", 1, ["t^2, t^3, 0"]),
    (3, "RVV", 1, ["t^3, t^5, t^7", "t^3, t^5, 0"]),
    (3, "RVT", 2, ["t^3, t^4, t^5", "t^3, t^4, 0"]),
    (3, "RVL", 1, ["t^4, t^6, t^7"]),
]

CENSUS = {1: 1, 2: 2, 3: 6, 4: 23}

LEVEL_TOTALS = {1: 1, 2: 2, 3: 7, 4: 34}

LEVEL4_MULTI = {"RRVT": 2, "RVRV": 2, "RVVR": 2, "RVVV": 2, "RVVT": 2,
                "RVTR": 2, "RVTV": 2, "RVTL": 2, "RVTT": 4}

LEVEL4_SPOT = ("RVVV", "RVTT", "RRVT")

# pairs (curve, curve, level, expected verdict)
EQUIVALENCE_PAIRS = [
    ("t^3, t^5, t^7", "t^3, t^5, 0", 3, "Equivalent"),
    ("t^3, t^4, t^5", "t^3, t^4, 0", 3, "Distinguished"),
]


def expected_count(word: str) -> int | None:
    for level, w, n, _ in NORMAL_FORMS:
        if w == word:
            return n
    if sum(ch.isalpha() for ch in word) == 4:
        return LEVEL4_MULTI.get(word, 1)
    return None


def default_log_path() -> str | None:
    return os.environ.get("SEMPLE_LOG") or None


@contextmanager
def _locked(path: str, mode: str):
    with open(path, mode, encoding="utf-8") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX if "a" in mode else fcntl.LOCK_SH)
        try:
            yield fh
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def append_record(path: str, record: dict) -> None:
    """Append one JSON line under an exclusive advisory lock."""
    line = json.dumps(record, sort_keys=True, separators=(",", ":"))
    with _locked(path, "a") as fh:
        fh.write(line + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def read_records(path: str | None) -> list:
    if not path or not os.path.exists(path):
        return []
    out = []
    with _locked(path, "r") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError:
                continue
    return out


def find_checkpoint(path: str | None, **match) -> dict | None:
    """Latest record whose fields equal ``match``."""
    hit = None
    for rec in read_records(path):
        if all(rec.get(k) == v for k, v in match.items()):
            hit = rec
    return hit
