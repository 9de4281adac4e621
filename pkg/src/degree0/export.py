"""
Report export for degree0.

Renders classification reports and experiment results as canonical JSON,
CSV or plain text, and writes them to disk.
"""

import csv
import json
import logging
from io import StringIO
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from tabulate import tabulate

from .experiments import ExperimentSummary

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "text")


def canonical_json(data: Any) -> str:
    """Sorted keys and fixed indentation so equal reports give equal bytes."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _flatten(data: Any, prefix: str = "") -> List[Tuple[str, Any]]:
    if isinstance(data, dict):
        items = []
        for key in sorted(data):
            items.extend(_flatten(data[key], f"{prefix}.{key}" if prefix else key))
        return items
    if isinstance(data, list) and data and all(isinstance(x, (dict, list)) for x in data):
        return [(f"{prefix}", json.dumps(data, sort_keys=True))]
    if isinstance(data, list):
        return [(prefix, "(" + ", ".join("-" if x is None else str(x) for x in data) + ")")]
    return [(prefix, "-" if data is None else data)]


def _csv_cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return value


class ReportExporter:
    """Exports classification reports to various formats."""

    @staticmethod
    def export_to_json(report: Dict[str, Any]) -> str:
        return canonical_json(report)

    @staticmethod
    def export_to_csv(report: Dict[str, Any]) -> str:
        """One header line of flattened keys and one value line."""
        pairs = _flatten(report)
        output = StringIO()
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow([key for key, _ in pairs])
        writer.writerow([_csv_cell(value) for _, value in pairs])
        return output.getvalue()

    @staticmethod
    def export_to_text(report: Dict[str, Any]) -> str:
        family = report.get("family", "report")
        lines = [f"{family.upper()} CLASSIFICATION", "=" * 50]
        lines.append(tabulate(_flatten(report), headers=["field", "value"], tablefmt="simple"))
        return "\n".join(lines) + "\n"

    @classmethod
    def export(cls, report: Dict[str, Any], format_type: str = "json") -> str:
        if format_type == "json":
            return cls.export_to_json(report)
        if format_type == "csv":
            return cls.export_to_csv(report)
        if format_type == "text":
            return cls.export_to_text(report)
        raise ValueError(f"Unsupported format: {format_type}")


class ExperimentExporter:
    """Exports experiment rows and summaries."""

    @staticmethod
    def export_to_csv(columns: Sequence[str], rows: Sequence[Dict[str, Any]],
                      summary: Optional[ExperimentSummary] = None) -> str:
        """
        Rows in index order followed by the summary as '# key,value' lines.

        Runtime is left out so reruns are byte-identical.
        """
        output = StringIO()
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(row.get(column)) for column in columns])
        if summary is not None:
            for key, value in _flatten(summary.to_dict()):
                writer.writerow([f"# {key}", value])
        return output.getvalue()

    @staticmethod
    def export_to_json(rows: Sequence[Dict[str, Any]], summary: ExperimentSummary) -> str:
        return canonical_json({"rows": list(rows), "summary": summary.to_dict()})

    @staticmethod
    def export_to_text(columns: Sequence[str], rows: Sequence[Dict[str, Any]],
                       summary: ExperimentSummary) -> str:
        lines = [f"{summary.family.upper()} EXPERIMENT", "=" * 50]
        table = [["-" if row.get(c) is None else row.get(c) for c in columns] for row in rows]
        lines.append(tabulate(table, headers=list(columns), tablefmt="simple"))
        lines.append("")
        lines.append(f"Samples: {summary.total}")
        summary_table = [
            [name, getattr(summary, name), f"{fraction:.4f}"]
            for name, fraction in summary.fractions.items()
        ]
        lines.append(tabulate(summary_table, headers=["verdict", "count", "fraction"], tablefmt="simple"))
        return "\n".join(lines) + "\n"

    @classmethod
    def export(cls, columns: Sequence[str], rows: Sequence[Dict[str, Any]],
               summary: ExperimentSummary, format_type: str = "csv") -> str:
        if format_type == "csv":
            return cls.export_to_csv(columns, rows, summary)
        if format_type == "json":
            return cls.export_to_json(rows, summary)
        if format_type == "text":
            return cls.export_to_text(columns, rows, summary)
        raise ValueError(f"Unsupported format: {format_type}")


def save_to_file(content: str, file_path: str) -> bool:
    """
    Write exported content to a file.

    Returns:
        True if successful, False otherwise
    """
    try:
        path = Path(file_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(content)
        logger.info(f"Output written to {path}")
        return True
    except OSError as e:
        logger.error(f"Failed to write {file_path}: {e}")
        return False
