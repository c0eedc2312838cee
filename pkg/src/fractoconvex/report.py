"""Structured check reports, serialisable to the same JSON format as space files."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Iterator


@dataclass
class Report:
    name: str
    status: str = "pass"  # pass | fail | info
    counts: dict[str, int] = field(default_factory=dict)
    witnesses: list[Any] = field(default_factory=list)
    seed: int | None = None
    details: dict[str, Any] = field(default_factory=dict)
    timing_ms: float | None = None
    objects: dict[str, Any] = field(default_factory=dict, repr=False)  # not serialised

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def fail(self, witness: Any = None, limit: int = 10) -> None:
        self.status = "fail"
        if witness is not None and len(self.witnesses) < limit:
            self.witnesses.append(witness)

    def bump(self, key: str, by: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + by

    def to_dict(self, timing: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "name": self.name,
            "status": self.status,
            "counts": dict(self.counts),
            "witnesses": list(self.witnesses),
            "seed": self.seed,
        }
        if self.details:
            out["details"] = dict(self.details)
        if timing and self.timing_ms is not None:
            out["timing_ms"] = round(self.timing_ms, 3)
        return out

    @contextmanager
    def timed(self) -> Iterator["Report"]:
        t0 = time.perf_counter()
        try:
            yield self
        finally:
            self.timing_ms = (time.perf_counter() - t0) * 1000.0
