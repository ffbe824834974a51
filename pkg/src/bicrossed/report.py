"""Verification reports shared by every checker."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

MAX_WITNESSES = 25


@dataclass
class Report:
    """Outcome of an exhaustive check.

    ``failures`` keeps at most ``MAX_WITNESSES`` witnesses; ``n_failures``
    counts all of them.
    """

    name: str
    checked: int = 0
    n_failures: int = 0
    failures: list[dict] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.n_failures == 0

    def tick(self, n: int = 1) -> None:
        self.checked += n

    def fail(self, axiom: str, **witness) -> None:
        self.n_failures += 1
        if len(self.failures) < MAX_WITNESSES:
            self.failures.append({"axiom": axiom, **witness})

    def merge(self, other: "Report") -> "Report":
        self.checked += other.checked
        self.n_failures += other.n_failures
        room = MAX_WITNESSES - len(self.failures)
        if room > 0:
            self.failures.extend(other.failures[:room])
        return self

    def first_failure(self) -> str | None:
        if not self.failures:
            return None
        f = self.failures[0]
        rest = ", ".join(f"{k}={v}" for k, v in f.items() if k != "axiom")
        return f"{f['axiom']} ({rest})"

    def summary(self) -> str:
        if self.ok:
            return f"{self.name}: pass ({self.checked} checks)"
        return f"{self.name}: FAIL {self.n_failures}/{self.checked}; first: {self.first_failure()}"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "checked": self.checked,
            "n_failures": self.n_failures,
            "failures": [{k: _plain(v) for k, v in f.items()} for f in self.failures],
            "details": {k: _plain(v) for k, v in self.details.items()},
        }


def _plain(v):
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    if hasattr(v, "to_json"):
        return v.to_json()
    return str(v)
