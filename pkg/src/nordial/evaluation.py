"""Per-class and macro precision/recall/F1 plus confusion matrices.

Macro averages always run over the fixed four-label set, including labels
absent from the data, and 0/0 ratios are defined as 0; both conventions
matter for the tiny Mixed class and keep runs comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import LABELS, Label
from .errors import AnalyticsError

SHORT_NAMES = {
    Label.BOKMAL: "BK",
    Label.NYNORSK: "NN",
    Label.DIALECT: "DI",
    Label.MIXED: "MIX",
}


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    """Evaluation summary over the canonical 4-label set."""

    per_class: dict[Label, ClassMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    confusion: np.ndarray  # (4, 4) counts, rows gold, columns predicted
    n: int

    def to_dict(self) -> dict:
        return {
            "schema": "nordial-eval-report",
            "version": 1,
            "n": self.n,
            "per_class": {
                label.value: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for label, m in self.per_class.items()
            },
            "macro": {
                "precision": self.macro_precision,
                "recall": self.macro_recall,
                "f1": self.macro_f1,
            },
            "confusion": {
                "labels": [l.value for l in LABELS],
                "matrix": [[int(c) for c in row] for row in self.confusion],
            },
        }


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def evaluate(gold: Sequence[Label], predicted: Sequence[Label]) -> EvalReport:
    """Score predictions against gold labels."""
    if len(gold) != len(predicted):
        raise AnalyticsError(f"{len(gold)} gold labels but {len(predicted)} predictions")
    if not gold:
        raise AnalyticsError("cannot evaluate an empty label list")
    index = {label: i for i, label in enumerate(LABELS)}
    k = len(LABELS)
    cells = [[0] * k for _ in range(k)]
    for g, p in zip(gold, predicted):
        cells[index[g]][index[p]] += 1
    confusion = np.array(cells, dtype=np.int64)
    col_totals = [sum(cells[r][c] for r in range(k)) for c in range(k)]
    per_class: dict[Label, ClassMetrics] = {}
    for label in LABELS:
        i = index[label]
        tp = cells[i][i]
        fp = col_totals[i] - tp
        fn = sum(cells[i]) - tp
        precision = _ratio(tp, tp + fp)
        recall = _ratio(tp, tp + fn)
        f1 = _ratio(2 * precision * recall, precision + recall)
        per_class[label] = ClassMetrics(precision, recall, f1, support=tp + fn)
    return EvalReport(
        per_class=per_class,
        macro_precision=sum(m.precision for m in per_class.values()) / len(LABELS),
        macro_recall=sum(m.recall for m in per_class.values()) / len(LABELS),
        macro_f1=sum(m.f1 for m in per_class.values()) / len(LABELS),
        confusion=confusion,
        n=len(gold),
    )


def per_label_metrics(report: EvalReport, label: Label) -> tuple[float, float, float]:
    """Precision, recall, F1 for a single label (single-label error analysis)."""
    m = report.per_class[label]
    return m.precision, m.recall, m.f1


def render_confusion(report: EvalReport) -> str:
    """Text confusion matrix: BK/NN/DI/MIX headers, gold rows, counts right-aligned."""
    headers = [SHORT_NAMES[l] for l in LABELS]
    rows = [[headers[i]] + [str(int(c)) for c in report.confusion[i]] for i in range(len(LABELS))]
    table = [[""] + headers] + rows
    widths = [max(len(r[i]) for r in table) for i in range(len(table[0]))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in table)


def render_report(report: EvalReport) -> str:
    """Human-readable metrics block plus the confusion matrix."""
    lines = [f"{'':9}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"]
    for label in LABELS:
        m = report.per_class[label]
        lines.append(
            f"{label.value:9}{m.precision:>10.4f}{m.recall:>10.4f}{m.f1:>10.4f}{m.support:>10d}"
        )
    lines.append(
        f"{'macro':9}{report.macro_precision:>10.4f}{report.macro_recall:>10.4f}"
        f"{report.macro_f1:>10.4f}{report.n:>10d}"
    )
    lines.append("")
    lines.append("confusion (rows gold, columns predicted):")
    lines.append(render_confusion(report))
    return "\n".join(lines)
