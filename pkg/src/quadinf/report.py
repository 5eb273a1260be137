"""Machine-readable reports and CSV plot data."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .inference import InferenceResult

SCHEMA = "quadinf-report/1"


@dataclass
class Report:
    """Container written as JSON by the command-line driver.

    ``meta`` holds the package version, seed and the effective
    configuration. ``tables`` maps a table name to ``{"columns": [...],
    "rows": [[...], ...]}``.
    """

    meta: dict = field(default_factory=dict)
    results: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def add_result(self, res: InferenceResult, label: str | None = None):
        d = res.to_dict()
        d["label"] = label or res.name
        self.results.append(d)
        for f in res.flags:
            self.warnings.append(f"{d['label']}: {f}")

    def add_table(self, name: str, columns, rows):
        self.tables[name] = {"columns": list(columns), "rows": [list(r) for r in rows]}

    def result_objects(self) -> list:
        out = []
        for d in self.results:
            d = dict(d)
            d.pop("label", None)
            out.append(InferenceResult.from_dict(d))
        return out

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "meta": self.meta, "results": self.results,
                "tables": self.tables, "warnings": self.warnings}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        return cls(meta=d.get("meta", {}), results=d.get("results", []),
                   tables=d.get("tables", {}), warnings=d.get("warnings", []))


def table_csv(table: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table["columns"])
    for row in table["rows"]:
        w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()
