"""Error taxonomy and check reports shared by all modules."""

from __future__ import annotations

from dataclasses import dataclass, field

EXIT_OK = 0
EXIT_CERTIFICATION = 2
EXIT_INPUT = 3
EXIT_ABSENCE = 4


class QuadlieError(Exception):
    """Base class for all library errors."""

    exit_code = EXIT_CERTIFICATION


class InputError(QuadlieError):
    """Bad input: dimension mismatch, violated precondition, parse failure."""

    exit_code = EXIT_INPUT


class CertificationError(QuadlieError):
    """An exact identity that was required to hold does not hold."""

    exit_code = EXIT_CERTIFICATION

    def __init__(self, message, failures=None):
        super().__init__(message)
        self.failures = list(failures or [])


class AbsenceError(QuadlieError):
    """A search came up empty.  Not a nonexistence proof unless stated."""

    exit_code = EXIT_ABSENCE


@dataclass
class CheckReport:
    """Outcome of a certification check with explicit witnesses."""

    name: str
    ok: bool = True
    failures: list = field(default_factory=list)

    def fail(self, check, where=None, detail=""):
        self.ok = False
        self.failures.append({"check": check, "where": where, "detail": detail})

    @property
    def first(self):
        return self.failures[0] if self.failures else None

    def raise_if_failed(self):
        if not self.ok:
            raise CertificationError(
                f"{self.name}: {self.first['check']} failed at {self.first['where']}",
                failures=self.failures,
            )
        return self

    def as_json(self):
        return {
            "name": self.name,
            "pass": self.ok,
            "failures": [
                {
                    "check": f["check"],
                    "where": list(f["where"]) if isinstance(f["where"], tuple) else f["where"],
                    "detail": str(f["detail"]),
                }
                for f in self.failures
            ],
        }
