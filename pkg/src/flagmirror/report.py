"""Claim records shared by the verification routines and the CLI."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Any


@dataclass
class Report:
    """One checked claim.

    ``paper_ref`` names the statement being checked in words; ``residual``
    and ``tolerance`` are plain floats so the record serializes as JSON.
    """

    claim_id: str
    paper_ref: str
    residual: float
    tolerance: float
    passed: bool
    runtime_ms: float = 0.0
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def as_float(x) -> float:
    """float() that tolerates mpf/Fraction and complex values (takes |x| for complex)."""
    try:
        return float(x)
    except TypeError:
        return float(abs(x))


@contextmanager
def stopwatch():
    """Yields a dict whose ``ms`` entry is filled in on exit."""
    box = {"ms": 0.0}
    start = time.perf_counter()
    try:
        yield box
    finally:
        box["ms"] = (time.perf_counter() - start) * 1000.0
