from __future__ import annotations

from typing import Any


class MetricError(Exception):
    """A semantic failure carrying a machine-readable code and witness data.

    ``violations`` holds one dict per violated constraint; operations that
    report a single witness produce a one-element list.
    """

    def __init__(self, code: str, message: str = "", violations: list[dict[str, Any]] | None = None, **details: Any):
        self.code = code
        self.message = message or code
        self.details = details
        self.violations = violations if violations is not None else ([dict(details)] if details else [])
        super().__init__(f"{code}: {self.message}")

    def report(self) -> dict[str, Any]:
        return {"error": self.code, "message": self.message, "violations": self.violations}


class ParseError(Exception):
    """Structural problems in an input document (CLI exit code 2)."""

    def __init__(self, code: str, message: str, position: int | None = None):
        self.code = code
        self.message = message
        self.position = position
        super().__init__(f"{code}: {message}")

    def report(self) -> dict[str, Any]:
        out: dict[str, Any] = {"error": self.code, "message": self.message}
        if self.position is not None:
            out["position"] = self.position
        return out
