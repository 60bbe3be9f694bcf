"""Check records, JSON/markdown reports and deterministic CSV output."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

PASS, FAIL, REPORTED = "PASS", "FAIL", "REPORTED"
NOTE = "NOTE"
STATUSES = (PASS, FAIL, REPORTED)


@dataclass
class Check:
    """One verification result.

    ``status`` is ``PASS``/``FAIL`` for asserted checks and ``REPORTED`` for
    audited claims; ``verdict`` carries the audited outcome in the latter case.
    """

    name: str
    status: str
    value: float | None = None
    tol: float | None = None
    citation: str = ""
    verdict: str = ""
    detail: str = ""
    group: str = ""
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status in (FAIL, REPORTED) and not self.citation:
            raise ValueError(f"{self.name}: FAIL and REPORTED checks need a citation")

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def as_dict(self) -> dict:
        d = asdict(self)
        d["value"] = _json_number(self.value)
        d["tol"] = _json_number(self.tol)
        d["evidence"] = _clean(self.evidence)
        return d


def asserted(name: str, ok: bool, value=None, tol=None, citation: str = "", **kw) -> Check:
    return Check(name, PASS if ok else FAIL, _float(value), _float(tol), citation or name, **kw)


def audited(name: str, ok: bool, value=None, tol=None, citation: str = "", **kw) -> Check:
    return Check(name, REPORTED, _float(value), _float(tol), citation, verdict=PASS if ok else FAIL, **kw)


def noted(name: str, citation: str, **kw) -> Check:
    """An audited reading choice with no numeric outcome; listed in the discrepancy report."""
    return Check(name, REPORTED, None, None, citation, verdict=NOTE, **kw)


def _float(v):
    return None if v is None else float(v)


def _json_number(v):
    if v is None:
        return None
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _clean(o: Any):
    if isinstance(o, dict):
        return {str(k): _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, float):
        return _json_number(o)
    if hasattr(o, "item"):
        return _clean(o.item())
    return o


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    def extend(self, checks: Iterable[Check]) -> "Report":
        self.checks.extend(checks)
        return self

    @property
    def exit_code(self) -> int:
        return 1 if any(c.failed for c in self.checks) else 0

    def counts(self) -> dict[str, int]:
        return {s: sum(c.status == s for c in self.checks) for s in STATUSES}

    def as_dict(self) -> dict:
        return {"counts": self.counts(), "checks": [c.as_dict() for c in self.checks]}

    def to_json(self) -> str:
        return dumps(self.as_dict())

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            val = "" if c.value is None else f" value={c.value:.3e}"
            verdict = f" verdict={c.verdict}" if c.verdict else ""
            lines.append(f"[{c.status}] {c.name}{val}{verdict}")
        n = self.counts()
        lines.append(f"{n[PASS]} passed, {n[FAIL]} failed, {n[REPORTED]} reported")
        return "\n".join(lines)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        checks = []
        for c in d.get("checks", []):
            c = dict(c)
            for k in ("value", "tol"):
                if isinstance(c.get(k), str):
                    c[k] = float(c[k])
            checks.append(Check(**c))
        return cls(checks)


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path: Path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")


def fmt(v) -> str:
    """CSV cell: floats with 17 significant digits, everything else via ``str``."""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float) or hasattr(v, "dtype") and getattr(v.dtype, "kind", "") == "f":
        return format(float(v), ".17g")
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
    return path


# -- discrepancy report ---------------------------------------------------------


def discrepancies(report: Report) -> list[dict]:
    """Every audited claim whose verdict is not ``PASS``, plus every asserted failure."""
    out = []
    for c in report.checks:
        if c.status == REPORTED and c.verdict != PASS:
            out.append({
                "name": c.name,
                "citation": c.citation,
                "residual": _json_number(c.value),
                "detail": c.detail,
                "evidence": _clean(c.evidence),
            })
        elif c.status == FAIL:
            out.append({
                "name": c.name,
                "citation": c.citation,
                "residual": _json_number(c.value),
                "detail": "asserted check failed: " + c.detail,
                "evidence": _clean(c.evidence),
            })
    return sorted(out, key=lambda d: d["name"])


def discrepancy_markdown(items: list[dict]) -> str:
    lines = ["# Discrepancy report", ""]
    if not items:
        lines.append("No discrepancies recorded.")
        return "\n".join(lines) + "\n"
    lines += ["| check | source | residual | detail |", "|---|---|---|---|"]
    for d in items:
        r = d["residual"]
        rs = "" if r is None else (r if isinstance(r, str) else f"{r:.6g}")
        detail = d["detail"].replace("|", "\\|")
        lines.append(f"| {d['name']} | {d['citation']} | {rs} | {detail} |")
    return "\n".join(lines) + "\n"
