"""Tabular output: CSV with a schema header line, and a JSON mirror.

CSV layout::

    # schema=<name>/<version> params={...}
    col1,col2,...
    ...rows...
    # truncated=true          (only when the producer was interrupted)

Floats use 17 significant digits (``%.17g``) so values round-trip exactly;
lines end with CRLF as in RFC 4180 on every platform.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass, field

SCHEMA_VERSION = "1"
TRUNCATION_MARKER = "# truncated=true"


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)  # list of dicts keyed by column
    params: dict = field(default_factory=dict)
    version: str = SCHEMA_VERSION
    truncated: bool = False

    def column(self, name):
        return [row.get(name) for row in self.rows]

    def append(self, row):
        unknown = set(row) - set(self.columns)
        if unknown:
            raise KeyError(f"unknown columns {sorted(unknown)}")
        self.rows.append(row)


def format_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return "%.17g" % v
    if hasattr(v, "dtype"):  # numpy scalar
        return format_value(v.item())
    return str(v)


def parse_value(s):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return format_value(v)
    if hasattr(v, "dtype"):
        return _json_safe(v.item())
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def header_line(table: Table):
    params = json.dumps(_json_safe(table.params), sort_keys=True, separators=(",", ":"))
    return f"# schema={table.name}/{table.version} params={params}"


def to_csv(table: Table) -> str:
    buf = _io.StringIO()
    buf.write(header_line(table) + "\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(row.get(c)) for c in table.columns])
    if table.truncated:
        buf.write(TRUNCATION_MARKER + "\r\n")
    return buf.getvalue()


def to_json(table: Table) -> str:
    doc = {
        "schema": f"{table.name}/{table.version}",
        "params": _json_safe(table.params),
        "columns": list(table.columns),
        "rows": [[_json_safe(row.get(c)) for c in table.columns] for row in table.rows],
        "truncated": table.truncated,
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def from_csv(text: str) -> Table:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# schema="):
        raise ValueError("missing '# schema=' header line")
    head = lines[0][len("# schema="):]
    schema, _, rest = head.partition(" params=")
    name, _, version = schema.partition("/")
    params = json.loads(rest) if rest else {}
    truncated = lines[-1] == TRUNCATION_MARKER
    body = lines[1:-1] if truncated else lines[1:]
    reader = csv.reader(body)
    columns = next(reader)
    rows = [dict(zip(columns, (parse_value(x) for x in rec))) for rec in reader]
    return Table(name, columns, rows, params, version, truncated)


def write_table(table: Table, path=None, as_json=False, stream=None):
    """Write to ``path`` (binary, so CRLF survives on every OS) or to a text stream."""
    text = to_json(table) if as_json else to_csv(table)
    if path is None:
        stream.write(text)
        stream.flush()
        return text
    with open(path, "wb") as fh:
        fh.write(text.encode("utf-8"))
    return text
