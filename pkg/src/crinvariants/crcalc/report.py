"""Verification case records shared by the suites and the command line."""
from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field


@dataclass
class CaseResult:
    case_id: str
    anchor: str
    status: str
    expected: str = ""
    actual: str = ""
    residual: str = ""
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CaseResult":
        return cls(**d)


@dataclass
class SuiteReport:
    suite: str
    cases: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, case: CaseResult) -> CaseResult:
        self.cases.append(case)
        return case

    def extend(self, cases):
        self.cases.extend(cases)

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.cases)

    @property
    def all_passed(self) -> bool:
        return bool(self.cases) and all(c.passed for c in self.cases)

    def sort(self) -> "SuiteReport":
        """Order cases by id (stable, so equal ids keep generation order)."""
        self.cases.sort(key=lambda c: c.case_id)
        return self

    def failures(self) -> list:
        return [c for c in self.cases if c.status == "fail"]

    def summary(self) -> dict:
        return {
            "pass": sum(c.status == "pass" for c in self.cases),
            "fail": sum(c.status == "fail" for c in self.cases),
            "skipped": sum(c.status == "skipped" for c in self.cases),
        }


@contextmanager
def timed():
    box = {"t": 0.0}
    t0 = time.perf_counter()
    try:
        yield box
    finally:
        box["t"] = time.perf_counter() - t0


def compare(case_id: str, anchor: str, actual, expected, residual=None) -> CaseResult:
    """Exact comparison case; ``residual`` defaults to ``actual - expected``."""
    ok = actual == expected
    if residual is None and not ok:
        try:
            residual = actual - expected
        except Exception:  # incomparable types: leave the residual blank
            residual = ""
    return CaseResult(case_id, anchor, "pass" if ok else "fail",
                      str(expected), str(actual), "0" if ok else str(residual))


def numeric_case(case_id: str, anchor: str, actual: float, expected: float, tol: float,
                 relative: bool = True) -> CaseResult:
    err = abs(actual - expected)
    if relative and expected != 0:
        err /= abs(expected)
    return CaseResult(case_id, anchor, "pass" if err <= tol else "fail",
                      repr(expected), repr(actual), f"{err:.3e}")
