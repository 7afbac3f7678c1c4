"""Plain-text and JSON rendering for command-line reports.

Plain tables align a left-justified label column against
right-justified value columns.  JSON output is canonical
(2-space indent, insertion-ordered keys) so that parsing and
re-serialising a report reproduces it byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

__all__ = ["Table", "ReportDocument", "fmt_estimate", "fmt_pvalue", "render_json"]


def fmt_estimate(x: float) -> str:
    """Five-decimal fixed format used for estimates and deviances."""
    return f"{x:.5f}"


def fmt_pvalue(p: float) -> str:
    """Four significant figures."""
    return f"{p:.4g}"


@dataclass(frozen=True)
class Table:
    headers: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def render(self) -> str:
        widths = [len(h) for h in self.headers]
        for row in self.rows:
            for i, cell in enumerate(row):
                widths[i] = max(widths[i], len(cell))
        lines = []
        header_cells = [self.headers[0].ljust(widths[0])] + [
            h.rjust(widths[i + 1]) for i, h in enumerate(self.headers[1:])
        ]
        lines.append("  ".join(header_cells).rstrip())
        for row in self.rows:
            cells = [row[0].ljust(widths[0])] + [
                c.rjust(widths[i + 1]) for i, c in enumerate(row[1:])
            ]
            lines.append("  ".join(cells).rstrip())
        return "\n".join(lines)


@dataclass
class ReportDocument:
    """Ordered report sections plus the machine-readable payload."""

    sections: list = field(default_factory=list)
    json_payload: dict = field(default_factory=dict)

    def add_text(self, title: str, text: str) -> None:
        self.sections.append((title, text))

    def add_table(self, title: str, table: Table) -> None:
        self.sections.append((title, table))

    def render_plain(self) -> str:
        chunks = []
        for title, content in self.sections:
            body = content.render() if isinstance(content, Table) else content
            if title:
                chunks.append(f"{title}\n{body}")
            else:
                chunks.append(body)
        return "\n\n".join(chunks) + "\n"

    def render_json(self) -> str:
        return render_json(self.json_payload)


def render_json(payload: dict) -> str:
    """Canonical JSON text: reparsing and re-dumping is the identity."""
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
