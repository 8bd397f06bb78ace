"""Pass / fail / undetermined results carrying replayable certificates."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

PASS, FAIL, UNDETERMINED = "pass", "fail", "undetermined"
EXIT_CODES = {PASS: 0, FAIL: 1, UNDETERMINED: 2}


@dataclass
class Verdict:
    status: str
    message: str = ""
    certificates: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in EXIT_CODES:
            raise ValueError(f"unknown verdict status {self.status!r}")

    @classmethod
    def passed(cls, message="", certificates=None, **details):
        return cls(PASS, message, list(certificates or []), details)

    @classmethod
    def failed(cls, message, certificates=None, **details):
        return cls(FAIL, message, list(certificates or []), details)

    @classmethod
    def undetermined(cls, message, **details):
        return cls(UNDETERMINED, message, [], details)

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def __bool__(self):
        return self.ok

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def report(self) -> str:
        lines = [f"{self.status.upper()}: {self.message}".rstrip(": ")]
        for c in self.certificates[:20]:
            lines.append(f"  - {c}")
        if len(self.certificates) > 20:
            lines.append(f"  ... {len(self.certificates) - 20} more certificates")
        return "\n".join(lines)


def combine(verdicts, message="") -> Verdict:
    """Fail if any verdict fails, else undetermined if any is, else pass."""
    verdicts = list(verdicts)
    for status in (FAIL, UNDETERMINED):
        bad = [v for v in verdicts if v.status == status]
        if bad:
            return Verdict(status, message or bad[0].message,
                           [c for v in bad for c in v.certificates],
                           {"causes": [v.message for v in bad]})
    certs: list[Any] = [c for v in verdicts for c in v.certificates]
    return Verdict.passed(message, certs)
