"""Check records, report assembly and serialisation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

__all__ = ["Check", "CheckReport", "aggregate", "skipped", "render_report", "parse_report"]

STATUSES = ("pass", "fail", "skipped")


@dataclass
class Check:
    check_name: str
    paper_anchor: str
    points_evaluated: int
    max_residual: float | None
    mean_residual: float | None
    tolerance: float
    status: str
    skip_reason: str | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def aggregate(name: str, anchor: str, residuals: Iterable[float], tolerance: float) -> Check:
    """Fold per-point residuals into one check record (max and mean)."""
    r = np.asarray(list(residuals), dtype=float)
    if r.size == 0:
        return skipped(name, anchor, tolerance, "no points evaluated")
    mx = float(np.max(r)) if not np.any(np.isnan(r)) else float("nan")
    mean = float(np.mean(r))
    status = "pass" if mx <= tolerance else "fail"
    return Check(name, anchor, int(r.size), mx, mean, tolerance, status)


def skipped(name: str, anchor: str, tolerance: float, reason: str) -> Check:
    return Check(name, anchor, 0, None, None, tolerance, "skipped", reason)


@dataclass
class CheckReport:
    meta: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def add(self, *checks: Check) -> "CheckReport":
        self.checks.extend(checks)
        return self

    def extend(self, other: "CheckReport") -> "CheckReport":
        self.checks.extend(other.checks)
        for k, v in other.meta.items():
            self.meta.setdefault(k, v)
        return self

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.check_name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(c.check_name == name for c in self.checks)

    @property
    def failed(self) -> list:
        return [c for c in self.checks if c.status == "fail"]

    @property
    def all_passed(self) -> bool:
        return not self.failed

    def to_dict(self) -> dict:
        checks = sorted(self.checks, key=lambda c: c.check_name)
        return {"meta": self.meta, "checks": [asdict(c) for c in checks]}

    @classmethod
    def from_dict(cls, data: dict) -> "CheckReport":
        return cls(dict(data.get("meta", {})), [Check(**c) for c in data.get("checks", [])])


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return x


def render_report(report: CheckReport, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(_jsonable(report.to_dict()), indent=2, sort_keys=False)
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    meta = report.meta
    lines = []
    head = ", ".join(f"{k}={meta[k]}" for k in ("manifold", "params", "seed", "jet_order") if k in meta)
    if head:
        lines.append(head)
    width = max([len(c.check_name) for c in report.checks] + [10])
    lines.append(f"{'check':<{width}}  {'status':<7}  {'max':>10}  {'mean':>10}  {'tol':>8}  points")
    for c in sorted(report.checks, key=lambda c: c.check_name):
        mark = {"pass": "PASS", "fail": "FAIL", "skipped": "SKIP"}[c.status]
        if c.status == "skipped":
            lines.append(f"{c.check_name:<{width}}  {mark:<7}  {'-':>10}  {'-':>10}  {c.tolerance:>8.1e}  ({c.skip_reason})")
        else:
            lines.append(
                f"{c.check_name:<{width}}  {mark:<7}  {c.max_residual:>10.3e}  "
                f"{c.mean_residual:>10.3e}  {c.tolerance:>8.1e}  {c.points_evaluated}"
            )
    n_fail = len(report.failed)
    lines.append(f"{len(report.checks)} checks, {n_fail} failed")
    return "\n".join(lines)


def parse_report(text: str) -> CheckReport:
    return CheckReport.from_dict(json.loads(text))
