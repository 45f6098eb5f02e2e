"""Verdicts that carry a witness when they fail."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass
class Check:
    """Outcome of one property check; truthy iff the property holds.

    ``witness`` holds the offending element, pair or value on failure.
    ``mode`` is ``"exhaustive"`` or ``"sampled(seed=..., trials=...)"``.
    """

    name: str
    ok: bool
    witness: Any = None
    detail: str = ""
    mode: str = "exhaustive"

    def __bool__(self) -> bool:
        return self.ok

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        out = f"{self.name}: {status} [{self.mode}]"
        if self.detail:
            out += f" {self.detail}"
        return out


def sampled(seed: int, trials: int) -> str:
    return f"sampled(seed={seed}, trials={trials})"
