from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Check:
    """Outcome of a structural check: truthy when it passed, else names the
    first violated condition."""

    ok: bool
    violation: str | None = None

    def __bool__(self):
        return self.ok


PASS = Check(True)
