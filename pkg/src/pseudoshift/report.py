"""Certificate grids, per-family verdicts and their JSON form."""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction

from .index_core import UNDEFINED, IndexSpace
from .logmag import LogProduct

REPORT_VERSION = 1
PASS = "PASS-CERTIFICATE"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"
SKIPPED = "SKIPPED"

CAVEAT = (
    "finite certificate: every checked quantity was compared with its 1/k bound "
    "for k <= K on the listed windows only; no statement about the limit k -> infinity"
)


def fmt_float(x):
    """Fixed 15-significant-digit float; ``None`` for an exact zero (log ``-inf``)."""
    if x is None or x == -math.inf:
        return None
    if x == math.inf:
        return "inf"
    return float("%.15g" % x)


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class GridEntry:
    condition: str
    k: int
    indices: tuple
    value: LogProduct
    landing: object
    passed: bool

    @property
    def log_magnitude(self) -> float:
        return self.value.log

    def to_dict(self, space: IndexSpace):
        landing = None
        if self.landing is not None and self.landing is not UNDEFINED:
            landing = space.encode(self.landing)
        elif self.landing is UNDEFINED:
            landing = "UNDEFINED"
        return {
            "condition": self.condition,
            "k": self.k,
            "indices": [space.encode(i) for i in self.indices],
            "log_magnitude": fmt_float(self.value.log),
            "landing": landing,
            "pass": self.passed,
        }


@dataclass
class FamilyVerdict:
    condition: str
    status: str
    entries: list = field(default_factory=list)
    witness: GridEntry | None = None
    trend: str | None = None
    reason: str | None = None

    def max_log_by_k(self) -> dict:
        out = {}
        for e in self.entries:
            out[e.k] = max(out.get(e.k, -math.inf), e.value.log)
        return dict(sorted(out.items()))

    def decay_slope(self):
        """Least-squares slope of the per-k maximal log-value (advisory only)."""
        points = [(k, v) for k, v in self.max_log_by_k().items() if math.isfinite(v)]
        if len(points) < 2:
            return None
        ks, vs = zip(*points)
        return statistics.linear_regression(ks, vs).slope

    def to_dict(self, space: IndexSpace):
        out = {
            "condition": self.condition,
            "verdict": self.status,
            "max_log_magnitude": [
                {"k": k, "log_magnitude": fmt_float(v)} for k, v in self.max_log_by_k().items()
            ],
            "decay_slope": fmt_float(self.decay_slope()),
        }
        if self.reason:
            out["reason"] = self.reason
        if self.witness is not None:
            out["witness"] = dict(self.witness.to_dict(space), trend=self.trend)
        return out


def threshold(k: int, scale=1) -> Fraction:
    return Fraction(scale) / k


def judge(condition: str, entries: list) -> FamilyVerdict:
    """Turn one family's grid into PASS, FAIL (non-decaying witness) or INCONCLUSIVE.

    FAIL needs a key whose last two or more observations all violate their
    bound and never decrease in ``k``.
    """
    if all(e.passed for e in entries):
        return FamilyVerdict(condition, PASS, entries)
    series = {}
    for e in entries:
        series.setdefault(e.indices, []).append(e)
    for obs in series.values():
        if len(obs) < 2 or obs[-1].passed:
            continue
        start = len(obs) - 1
        while start > 0 and not obs[start - 1].passed and not _decreases(obs[start - 1], obs[start]):
            start -= 1
        if len(obs) - start >= 2:
            last, first = obs[-1], obs[start]
            trend = "divergent" if _decreases(last, first) else "constant"
            return FamilyVerdict(condition, FAIL, entries, last, trend)
    return FamilyVerdict(condition, INCONCLUSIVE, entries)


def _decreases(a: GridEntry, b: GridEntry) -> bool:
    """``|value(b)| < |value(a)|`` decided exactly."""
    if b.value.is_zero:
        return not a.value.is_zero
    if a.value.is_zero:
        return False
    return (b.value / a.value).less_than(1)


@dataclass
class CertificateReport:
    checker: str
    mode: str
    space: IndexSpace
    schedule: object
    windows: dict
    families: list
    thresholds: list
    preconditions: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        statuses = [f.status for f in self.families if f.status != SKIPPED]
        if FAIL in statuses:
            return FAIL
        if INCONCLUSIVE in statuses or not statuses:
            return INCONCLUSIVE
        return PASS

    @property
    def witness(self) -> FamilyVerdict | None:
        for f in self.families:
            if f.status == FAIL:
                return f
        return None

    def family(self, condition: str) -> FamilyVerdict:
        for f in self.families:
            if f.condition == condition:
                return f
        raise KeyError(condition)

    def grid(self, condition: str | None = None) -> list:
        return [e for f in self.families for e in f.entries
                if condition is None or f.condition == condition]

    def to_dict(self) -> dict:
        witness = self.witness
        return {
            "report_version": REPORT_VERSION,
            "checker": self.checker,
            "mode": self.mode,
            "verdict": self.verdict,
            "witness": None if witness is None else dict(
                witness.witness.to_dict(self.space), trend=witness.trend
            ),
            "caveat": CAVEAT,
            "schedule": self.schedule.to_dict(),
            "windows": self.windows,
            "thresholds": self.thresholds,
            "families": [f.to_dict(self.space) for f in self.families],
            "grid": [e.to_dict(self.space) for f in self.families for e in f.entries],
            "preconditions": self.preconditions,
            **({"extra": self.extra} if self.extra else {}),
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_text(self) -> str:
        lines = [f"{self.checker} [{self.mode}]: {self.verdict}"]
        lines.append(f"schedule n_k = {list(self.schedule.values)} ({self.schedule.provenance})")
        for f in self.families:
            slope = f.decay_slope()
            slope_txt = "n/a" if slope is None else f"{slope:.6g}"
            lines.append(f"  {f.condition:<28} {f.status:<17} decay slope {slope_txt}")
            if f.reason:
                lines.append(f"    {f.reason}")
            if f.witness is not None:
                w = f.witness
                idx = ", ".join(self.space.encode(i) for i in w.indices)
                lines.append(f"    witness k={w.k} at [{idx}] log={w.value.log:.15g} ({f.trend})")
        lines.append("  " + CAVEAT)
        return "\n".join(lines) + "\n"


def threshold_table(K: int, scale=1) -> list:
    out = []
    for k in range(1, K + 1):
        b = threshold(k, scale)
        out.append({"k": k, "bound": str(b), "log_bound": fmt_float(LogProduct.of(b).log)})
    return out
