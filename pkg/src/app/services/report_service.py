"""
Report generation service: JSON bundles, aligned text tables and charts
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence

import pandas as pd

from src.app.schemas.error import DataError
from src.app.schemas.evaluation import DeltaRow, EvalReport
from src.app.schemas.learn import RankingRow

logger = logging.getLogger(__name__)

BUNDLE_KINDS = ("scan", "experiment", "transfer")


def _signed(value: float) -> str:
    return f"{value:+.2f}"


class ReportService:
    """
    Service for writing result files and rendering them as text tables
    """

    @staticmethod
    def write_json(payload: Dict[str, Any], path: Path) -> Path:
        """Sorted keys, two-space indent, LF endings"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
        return path

    @staticmethod
    def write_text(text: str, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8", newline="\n")
        return path

    @staticmethod
    def write_png(image: bytes, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(image)
        return path

    @staticmethod
    def read_bundle(path: Path) -> Dict[str, Any]:
        """
        Raises:
            DataError: unreadable file or unknown bundle kind
        """
        try:
            bundle = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as e:
            raise DataError(f"Cannot read report bundle {path}: {e}")
        if bundle.get("kind") not in BUNDLE_KINDS:
            raise DataError(f"{path} is not a report bundle", details={"kind": bundle.get("kind")})
        return bundle

    @staticmethod
    def _table(rows: List[Dict[str, Any]], columns: Sequence[str]) -> str:
        if not rows:
            return "(no rows)"
        return pd.DataFrame(rows, columns=list(columns)).to_string(index=False)

    # scan

    def context_table(self, summary: Dict[str, Any]) -> str:
        """Log statements by enclosing context, with shares"""
        histogram = summary["context_histogram"]
        rows = [
            {"context": context, "count": count, "share": f"{histogram['percentages'][context] * 100:.1f}%"}
            for context, count in histogram["counts"].items()
        ]
        rows.append({"context": "total", "count": histogram["total"], "share": "100.0%" if histogram["total"] else "0.0%"})
        return self._table(rows, ["context", "count", "share"])

    def summary_table(self, summary: Dict[str, Any]) -> str:
        files = summary["files_by_category"]
        density = summary["density_quantiles"]
        rows = [{"measure": f"files ({category})", "value": count} for category, count in files.items()]
        rows += [
            {"measure": "methods", "value": summary["methods"]},
            {"measure": "log statements", "value": summary["log_statements"]},
            {"measure": "logged methods", "value": summary["logged_methods"]},
            {"measure": "logged ratio", "value": f"{summary['logged_ratio'] * 100:.1f}%"},
        ]
        if not density.get("empty"):
            rows.append({
                "measure": "logs per logged method (min/q1/median/q3/max)",
                "value": "/".join(str(density[key]) for key in ("min", "q1", "median", "q3", "max")),
            })
        rows.append({"measure": "parse failures", "value": len(summary.get("parse_failures", {}))})
        return self._table(rows, ["measure", "value"])

    def distribution_table(self, distribution: Dict[str, Dict[str, float]]) -> str:
        """One row per statistic, one column per measured quantity"""
        if not distribution:
            return "(no projects)"
        frame = pd.DataFrame(distribution)
        frame = frame.reindex(["min", "q1", "median", "average", "q3", "max"])
        return frame.round(3).to_string()

    def selection_table(self, selection: Dict[str, Any]) -> str:
        """Kept and dropped projects under the selection thresholds"""
        rows = [{"project": name, "selected": "yes"} for name in selection.get("kept", [])]
        rows += [{"project": name, "selected": "no"} for name in selection.get("dropped", [])]
        table = self._table(sorted(rows, key=lambda row: row["project"]), ["project", "selected"])
        return (
            f"logged ratio > {selection['min_logged_ratio']:g} and production files > {selection['min_production_files']}\n"
            + table
        )

    # experiment

    def scores_table(self, reports: Sequence[EvalReport]) -> str:
        """Confusion counts and BA/Pr/Rec per model"""
        rows = []
        for report in reports:
            rows.append({
                "model": report.model_id,
                "TN": report.cm.TN,
                "FP": report.cm.FP,
                "FN": report.cm.FN,
                "TP": report.cm.TP,
                "BA": "failed" if report.failed else f"{report.BA:.2f}",
                "Pr": "-" if report.failed else f"{report.Pr:.2f}" + ("*" if "Pr" in report.undefined else ""),
                "Rec": "-" if report.failed else f"{report.Rec:.2f}" + ("*" if "Rec" in report.undefined else ""),
            })
        return self._table(rows, ["model", "TN", "FP", "FN", "TP", "BA", "Pr", "Rec"])

    def delta_table(self, deltas: Sequence[DeltaRow]) -> str:
        """Signed differences against the no-sampling run of the same algorithm"""
        rows = [
            {
                "model": delta.model_id,
                "sampler": delta.sampler,
                "dBA": _signed(delta.BA),
                "dPr": _signed(delta.Pr),
                "dRec": _signed(delta.Rec),
                "dFP": f"{delta.FP:+d}",
                "dFN": f"{delta.FN:+d}",
            }
            for delta in deltas
        ]
        return self._table(rows, ["model", "sampler", "dBA", "dPr", "dRec", "dFP", "dFN"])

    def ranking_table(self, ranking: Sequence[RankingRow]) -> str:
        """Feature frequency per top-k position across models"""
        if not ranking:
            return "(no rows)"
        k = len(ranking[0].positions)
        rows = []
        for row in ranking:
            entry = {"feature": row.feature, "scope": row.scope}
            entry.update({f"#{i + 1}": count for i, count in enumerate(row.positions)})
            entry["total"] = row.total
            rows.append(entry)
        return self._table(rows, ["feature", "scope"] + [f"#{i + 1}" for i in range(k)] + ["total"])

    # transfer

    def transfer_table(self, reports: Sequence[EvalReport]) -> str:
        """Training source, its size and scores on the fixed test set"""
        rows = [
            {
                "training data": report.train_id,
                "rows": report.train_size if report.train_size is not None else "-",
                "BA": "failed" if report.failed else f"{report.BA:.2f}",
                "Pr": "-" if report.failed else f"{report.Pr:.2f}",
                "Rec": "-" if report.failed else f"{report.Rec:.2f}",
            }
            for report in reports
        ]
        return self._table(rows, ["training data", "rows", "BA", "Pr", "Rec"])

    def render(self, bundle: Dict[str, Any]) -> str:
        """
        Render every table of a bundle as plain text

        Args:
            bundle: payload of a scan, experiment or transfer JSON file

        Returns:
            Text with one titled section per table
        """
        kind = bundle.get("kind")
        sections = []
        if kind == "scan":
            for name, summary in bundle["projects"].items():
                sections.append((f"{name}: corpus summary", self.summary_table(summary)))
                sections.append((f"{name}: log statements by enclosing context", self.context_table(summary)))
            if bundle.get("distribution"):
                sections.append(("Distribution across projects", self.distribution_table(bundle["distribution"])))
            if bundle.get("selection"):
                sections.append(("Project selection", self.selection_table(bundle["selection"])))
        elif kind == "experiment":
            reports = [EvalReport.model_validate(item) for item in bundle.get("reports", [])]
            baselines = [EvalReport.model_validate(item) for item in bundle.get("baselines", [])]
            plain = [report for report in reports if report.sampler == "none"]
            sampled = [report for report in reports if report.sampler != "none"]
            sections.append(("Models without sampling and baselines", self.scores_table(plain + baselines)))
            if sampled:
                sections.append(("Models with sampling", self.scores_table(sampled)))
            deltas = [DeltaRow.model_validate(item) for item in bundle.get("deltas", [])]
            sections.append(("Sampling gain against no sampling", self.delta_table(deltas)))
            ranking = [RankingRow.model_validate(item) for item in bundle.get("ranking", [])]
            sections.append(("Most recurrent top features across models", self.ranking_table(ranking)))
        elif kind == "transfer":
            reports = [EvalReport.model_validate(item) for item in bundle.get("reports", [])]
            algorithm = bundle.get("algorithm", "")
            sections.append((f"Transfer to the fixed test set ({algorithm}, by balanced accuracy)", self.transfer_table(reports)))
        else:
            raise DataError(f"unknown bundle kind {kind}")

        provenance = bundle.get("provenance", {})
        lines = []
        for title, table in sections:
            lines += [title, "=" * len(title), table, ""]
        lines.append("provenance: " + ", ".join(f"{key}={provenance[key]}" for key in sorted(provenance)))
        return "\n".join(lines) + "\n"

    def write_bundle(self, bundle: Dict[str, Any], out_dir: Path, name: str) -> Path:
        """Write <name>.json and its rendered <name>.txt"""
        out_dir = Path(out_dir)
        json_path = self.write_json(bundle, out_dir / f"{name}.json")
        self.write_text(self.render(bundle), out_dir / f"{name}.txt")
        logger.info(f"Report written to {json_path}")
        return json_path


# Global instance
report_service = ReportService()
