"""Tabular results and their CSV / JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path


def format_float(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class ResultTable:
    """Row-major numeric records with a metadata block and a separate error list.

    Missing values are ``None``; they are written as empty CSV cells, never
    as NaN, and every missing value has an entry in ``errors``.
    """

    columns: list[str]
    rows: list[list] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    errors: list[dict] = field(default_factory=list)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row has {len(row)} values, expected {len(self.columns)}")
            for v in row:
                if v is not None and not math.isfinite(v):
                    raise ValueError("non-finite values must be reported as errors, not stored")

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [row[k] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow(["" if v is None else format_float(v) for v in row])
        return buf.getvalue()

    def sidecar(self) -> dict:
        return {"metadata": self.metadata, "errors": self.errors}

    def to_json(self) -> str:
        doc = {"columns": self.columns, "rows": self.rows, "metadata": self.metadata, "errors": self.errors}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write(self, path, fmt: str = "csv") -> list[Path]:
        """Write the table; CSV output gets a ``<path>.meta.json`` sidecar."""
        path = Path(path)
        if fmt == "json":
            path.write_text(self.to_json(), encoding="utf-8", newline="\n")
            return [path]
        path.write_text(self.to_csv(), encoding="utf-8", newline="\n")
        meta = path.with_name(path.name + ".meta.json")
        meta.write_text(json.dumps(self.sidecar(), indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
        return [path, meta]

    @classmethod
    def read(cls, path) -> "ResultTable":
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        if path.suffix == ".json":
            doc = json.loads(text)
            return cls(doc["columns"], doc["rows"], doc["metadata"], doc["errors"])
        reader = csv.reader(io.StringIO(text))
        columns = next(reader)
        rows = [[None if cell == "" else float(cell) for cell in row] for row in reader]
        meta_path = path.with_name(path.name + ".meta.json")
        side = json.loads(meta_path.read_text(encoding="utf-8")) if meta_path.exists() else {}
        return cls(columns, rows, side.get("metadata", {}), side.get("errors", []))
