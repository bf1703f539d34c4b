"""Deterministic run reports: one row per executed check."""

import hashlib
import json
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict


class CheckRow(BaseModel):
    model_config = ConfigDict(extra="forbid")

    check: str              # stable identifier of the verified law
    detail: str             # what was computed, human-readable
    value: float            # the measured residual / quantity
    tolerance: Optional[float] = None
    passed: bool
    error: Optional[str] = None


class Report(BaseModel):
    model_config = ConfigDict(extra="forbid")

    task: str
    config_digest: str
    seed: int
    checks: List[CheckRow]
    artifacts: List[str] = []
    passed: bool

    def to_json(self):
        return json.dumps(self.model_dump(), sort_keys=True, indent=2) + "\n"


def config_digest(cfg, seed):
    payload = cfg.canonical_json() + f"|seed={seed}"
    return hashlib.sha256(payload.encode()).hexdigest()


def build_report(task, cfg, seed, rows, artifacts):
    return Report(task=task, config_digest=config_digest(cfg, seed), seed=seed,
                  checks=rows, artifacts=[str(a) for a in artifacts],
                  passed=all(r.passed for r in rows))


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)
