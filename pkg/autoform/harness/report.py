"""
Metrics tables: per problem, per difficulty and type label, and aggregate.

Exported as TSV, aligned text, or PDF.
"""

import logging
import re
from dataclasses import dataclass, field
from io import BytesIO
from typing import Any, Dict, List, Optional, Sequence, Tuple

from autoform.harness import metrics
from autoform.harness.records import RunRecord

logger = logging.getLogger("autoform.harness.report")

_METRIC = re.compile(r"^(pass@|best-of-)(\d+)$")
SIMPLE_METRICS = ("accuracy", "entropy", "pruning")


def parse_metric(name: str) -> Tuple[str, Optional[int]]:
    """
    Split ``pass@3`` / ``best-of-5`` into kind and N.

    Raises:
        ValueError: Unknown metric name
    """
    name = name.strip().lower()
    if name in SIMPLE_METRICS:
        return name, None
    match = _METRIC.match(name)
    if not match or int(match.group(2)) < 1:
        raise ValueError(f"unknown metric {name!r} (pass@N, best-of-N, accuracy, entropy, pruning)")
    return ("pass" if match.group(1) == "pass@" else "best-of"), int(match.group(2))


def metric_value(record: RunRecord, metric: str) -> Optional[float]:
    """
    Per-problem value: booleans for accuracy metrics, reals for entropy and
    pruning; None when undefined (no ground truth, failed run, no tree).

    ``accuracy`` is Best-of-N over every distinct formulation found.
    """
    kind, n = parse_metric(metric)
    if record.error:
        return None
    gt = record.problem.ground_truth_objective
    if kind == "pass":
        return None if gt is None else metrics.pass_at_n(record.terminals, gt, n)
    if kind in ("best-of", "accuracy"):
        if gt is None:
            return None
        n = n or max(1, len(record.terminals))
        best = metrics.best_of_n(record.terminals, record.tree, n, record.lam)
        return best is not None and metrics.execution_accuracy(best.objective_value, gt)
    tree = record.tree
    if tree is None:
        return None
    if kind == "entropy":
        return metrics.tree_entropy(tree)
    return metrics.retained_fraction(tree)


@dataclass
class MetricsTable:
    metric: str
    rows: List[Tuple[str, str, str, Optional[float]]] = field(default_factory=list)
    groups: List[Tuple[str, Optional[float], int]] = field(default_factory=list)
    aggregate: Optional[float] = None

    @classmethod
    def build(cls, records: Sequence[RunRecord], metric: str) -> "MetricsTable":
        parse_metric(metric)
        table = cls(metric)
        by_label: Dict[str, List[Optional[float]]] = {}
        for record in records:
            value = metric_value(record, metric)
            difficulty = record.problem.difficulty.value if record.problem.difficulty else ""
            ptype = record.problem.problem_type.value if record.problem.problem_type else ""
            table.rows.append((record.problem.id, difficulty, ptype, value))
            if difficulty:
                by_label.setdefault(f"difficulty={difficulty}", []).append(value)
            if ptype:
                by_label.setdefault(f"type={ptype}", []).append(value)
        table.groups = [
            (label, metrics.mean(values), sum(v is not None for v in values))
            for label, values in sorted(by_label.items())
        ]
        table.aggregate = metrics.mean([r[3] for r in table.rows])
        return table

    @staticmethod
    def _fmt(value: Any) -> str:
        if value is None:
            return "-"
        if isinstance(value, bool):
            return "1" if value else "0"
        return f"{value:.4f}"

    def to_rows(self) -> List[List[str]]:
        rows = [["problem", "difficulty", "type", self.metric]]
        rows += [[pid, d or "-", t or "-", self._fmt(v)] for pid, d, t, v in self.rows]
        rows += [[label, "", f"n={n}", self._fmt(v)] for label, v, n in self.groups]
        rows.append(["aggregate", "", f"n={sum(v is not None for *_, v in self.rows)}", self._fmt(self.aggregate)])
        return rows

    def to_tsv(self) -> str:
        return "\n".join("\t".join(row) for row in self.to_rows()) + "\n"

    def to_text(self) -> str:
        rows = self.to_rows()
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        lines = []
        for i, row in enumerate(rows):
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
            if i == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    def to_pdf(self, title: str = "Autoformulation metrics") -> bytes:
        """
        Render the table as a PDF document.

        Returns:
            PDF content as bytes
        """
        from reportlab.lib import colors
        from reportlab.lib.pagesizes import letter
        from reportlab.lib.styles import getSampleStyleSheet
        from reportlab.lib.units import inch
        from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

        buffer = BytesIO()
        doc = SimpleDocTemplate(buffer, pagesize=letter)
        styles = getSampleStyleSheet()
        story = [Paragraph(title, styles["Heading1"]), Spacer(1, 0.2 * inch)]
        story.append(Paragraph(f"Metric: {self.metric}", styles["BodyText"]))
        story.append(Spacer(1, 0.2 * inch))
        grid = Table(self.to_rows(), repeatRows=1)
        grid.setStyle(TableStyle([
            ("BACKGROUND", (0, 0), (-1, 0), colors.HexColor("#1f77b4")),
            ("TEXTCOLOR", (0, 0), (-1, 0), colors.white),
            ("GRID", (0, 0), (-1, -1), 0.25, colors.grey),
            ("FONTNAME", (0, -1), (-1, -1), "Helvetica-Bold"),
        ]))
        story.append(grid)
        doc.build(story)
        logger.info(f"Rendered {len(self.rows)} rows to PDF")
        return buffer.getvalue()
