"""Machine-readable verification reports."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _unnum(x):
    if x is None:
        return None
    return float(x)


@dataclass
class ReportEntry:
    """Outcome of one named check.

    ``mode`` decides which error is compared against ``tol``: ``"abs"``,
    ``"rel"`` or ``"bound"`` (the check itself decides ``passed`` and
    ``measured`` is compared with ``tol`` as an upper bound).
    """

    check_name: str
    target: Optional[float]
    measured: float
    abs_err: float
    rel_err: float
    tol: float
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def compare(cls, name, target, measured, tol, mode="rel", scale=None, extra_err=0.0, **details):
        """Build an entry comparing ``measured`` with ``target``.

        ``scale`` replaces ``|target|`` in the relative error (useful when the
        target is zero).  ``extra_err`` is a known error bound (a truncated
        tail, say) subtracted from the observed discrepancy before the
        comparison.
        """
        target = float(target)
        measured = float(measured)
        abs_err = abs(measured - target)
        ref = abs(target) if scale is None else abs(float(scale))
        rel_err = abs_err / ref if ref > 0 else (0.0 if abs_err == 0 else math.inf)
        if mode == "abs":
            passed = abs_err - extra_err <= tol
        elif mode == "rel":
            passed = abs_err - extra_err <= tol * ref
        else:
            raise ValueError(f"unknown comparison mode {mode!r}")
        if extra_err:
            details["error_allowance"] = float(extra_err)
        details["mode"] = mode
        details["scale"] = ref
        return cls(name, target, measured, abs_err, rel_err, float(tol), bool(passed), details)

    @classmethod
    def bound(cls, name, measured, tol, **details):
        """Entry asserting ``measured <= tol`` (no target value)."""
        measured = float(measured)
        details["mode"] = "bound"
        return cls(name, None, measured, measured, math.nan, float(tol), bool(measured <= tol), details)

    @classmethod
    def flag(cls, name, ok, measured=0.0, tol=0.0, **details):
        details["mode"] = "flag"
        return cls(name, None, float(measured), math.nan, math.nan, float(tol), bool(ok), details)

    def with_tol(self, tol: float) -> "ReportEntry":
        """Copy of the entry judged against a different tolerance."""
        tol = float(tol)
        mode = self.details.get("mode")
        allowance = float(self.details.get("error_allowance", 0.0))
        if mode == "abs":
            passed = self.abs_err - allowance <= tol
        elif mode == "rel":
            passed = self.abs_err - allowance <= tol * float(self.details.get("scale", abs(self.target or 0.0)))
        elif mode == "bound":
            passed = self.measured <= tol
        else:
            passed = self.passed
        return ReportEntry(
            self.check_name, self.target, self.measured, self.abs_err, self.rel_err, tol, bool(passed), dict(self.details)
        )

    def to_dict(self):
        return {
            "check_name": self.check_name,
            "target": _num(self.target),
            "measured": _num(self.measured),
            "abs_err": _num(self.abs_err),
            "rel_err": _num(self.rel_err),
            "tol": _num(self.tol),
            "pass": self.passed,
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["check_name"],
            _unnum(d["target"]),
            _unnum(d["measured"]),
            _unnum(d["abs_err"]),
            _unnum(d["rel_err"]),
            _unnum(d["tol"]),
            bool(d["pass"]),
            dict(d.get("details", {})),
        )

    def __bool__(self):
        return self.passed

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        target = "n/a" if self.target is None else f"{self.target:.10g}"
        return f"{status} {self.check_name}: measured={self.measured:.10g} target={target} tol={self.tol:.1e}"


def _jsonable(v):
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (int,)):
        return int(v)
    if isinstance(v, float) or hasattr(v, "__float__") and not hasattr(v, "__len__"):
        return _num(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)) or hasattr(v, "tolist"):
        seq = v.tolist() if hasattr(v, "tolist") else v
        return [_jsonable(x) for x in seq]
    return str(v)


@dataclass
class VerificationReport:
    entries: List[ReportEntry] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def overall_pass(self) -> bool:
        return all(e.passed for e in self.entries)

    def add(self, entry: ReportEntry) -> ReportEntry:
        self.entries.append(entry)
        return entry

    def extend(self, entries):
        for e in entries:
            self.add(e)

    def sorted(self) -> "VerificationReport":
        return VerificationReport(sorted(self.entries, key=lambda e: e.check_name), dict(self.metadata))

    def to_dict(self):
        return {
            "entries": [e.to_dict() for e in self.entries],
            "overall_pass": self.overall_pass,
            "metadata": {k: _jsonable(v) for k, v in self.metadata.items()},
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        return cls([ReportEntry.from_dict(e) for e in d["entries"]], dict(d.get("metadata", {})))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))
