"""Check records and deterministic JSON reports."""
from __future__ import annotations

import json
from fractions import Fraction

PASS, FAIL, SKIP = "pass", "fail", "skip"


def rational(q) -> str:
    """Exact "p/q" string (denominator always written)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def jsonable(obj):
    """Recursively turn Fractions into "p/q" strings and tuples into lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return round(obj, 12)
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return jsonable(obj.item())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    return str(obj)


class Report:
    def __init__(self, command: str, config: dict | None = None):
        self.command = command
        self.config = dict(config or {})
        self.checks: list[dict] = []
        self.data: dict = {}
        self.warnings: list[str] = []
        self.timing: dict | None = None

    def check(self, name: str, ok: bool, anchor: str, **witness) -> bool:
        self.checks.append({"name": name, "status": PASS if ok else FAIL, "anchor": anchor,
                            "witness": jsonable(witness)})
        return ok

    def skip(self, name: str, anchor: str, reason: str) -> None:
        self.checks.append({"name": name, "status": SKIP, "anchor": anchor, "witness": {"reason": reason}})

    @property
    def failed(self) -> list[dict]:
        return [c for c in self.checks if c["status"] == FAIL]

    def summary(self) -> dict:
        out = {PASS: 0, FAIL: 0, SKIP: 0}
        for c in self.checks:
            out[c["status"]] += 1
        return out

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "config": jsonable(self.config),
            "checks": self.checks,
            "summary": self.summary(),
            "data": jsonable(self.data),
        }
        if self.warnings:
            out["warnings"] = list(self.warnings)
        if self.timing is not None:
            out["timing"] = jsonable(self.timing)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
