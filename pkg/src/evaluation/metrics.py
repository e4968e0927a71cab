"""
Labeling precision/recall and object recovery.
"""
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Hashable, Mapping, Optional, Union

import pandas as pd
from sklearn.metrics import confusion_matrix, precision_recall_fscore_support

from src.evaluation.labels import NONE_LABEL, is_label_symbol
from src.grammar.grammar import Grammar
from src.grammar.tree import ParseNode
from src.scene.io import write_json
from src.scene.tree import GroundTruthTree
from src.utils.errors import LabelDomainError
from src.utils.logging import get_logger

logger = get_logger("evaluation.metrics")

MACRO = "macro avg."


@dataclass(frozen=True)
class LabelReport:
    """Per-label precision and recall in percent, their unweighted means, and the confusion counts."""

    precision: Dict[str, float]
    recall: Dict[str, float]
    macro_precision: float
    macro_recall: float
    confusion: Dict[str, Dict[str, int]]
    support: Dict[str, int] = field(default_factory=dict)

    @property
    def labels(self):
        return list(self.recall)

    def table(self) -> pd.DataFrame:
        """Two rows (recall, precision), one column per label plus the macro average."""
        columns = self.labels + [MACRO]
        return pd.DataFrame(
            [
                [self.recall[l] for l in self.labels] + [self.macro_recall],
                [self.precision[l] for l in self.labels] + [self.macro_precision],
            ],
            index=["recall", "precision"],
            columns=columns,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "support": self.support,
            "confusion": self.confusion,
        }


def precision_recall(pred: Mapping[Hashable, str], gold: Mapping[Hashable, str]) -> LabelReport:
    """
    Compare predicted segment labels with gold labels.

    Every label present in gold other than ``"none"`` gets a column; the macro
    averages are unweighted means over those labels.

    Raises:
        LabelDomainError: The two maps do not cover the same segments.
    """
    if set(pred) != set(gold):
        missing = len(set(gold) - set(pred))
        extra = len(set(pred) - set(gold))
        raise LabelDomainError(f"label maps cover different segments ({missing} missing, {extra} extra)")
    keys = list(gold)
    y_true = [gold[k] for k in keys]
    y_pred = [pred[k] for k in keys]
    labels = sorted(set(y_true) - {NONE_LABEL})

    precision: Dict[str, float] = {}
    recall: Dict[str, float] = {}
    support: Dict[str, int] = {}
    if labels:
        p, r, _, s = precision_recall_fscore_support(y_true, y_pred, labels=labels, average=None, zero_division=0)
        for k, label in enumerate(labels):
            precision[label] = 100.0 * float(p[k])
            recall[label] = 100.0 * float(r[k])
            support[label] = int(s[k])

    everything = sorted(set(y_true) | set(y_pred))
    if len(everything) > 1:
        matrix = confusion_matrix(y_true, y_pred, labels=everything)
    else:
        # sklearn warns on a 1x1 matrix
        matrix = [[len(keys)]] if keys else []
    confusion = {
        t: {q: int(matrix[i][j]) for j, q in enumerate(everything) if matrix[i][j]}
        for i, t in enumerate(everything)
    }
    return LabelReport(
        precision=precision,
        recall=recall,
        macro_precision=math.fsum(precision.values()) / len(labels) if labels else 0.0,
        macro_recall=math.fsum(recall.values()) / len(labels) if labels else 0.0,
        confusion=confusion,
        support=support,
    )


def write_report(
    report: LabelReport,
    path: Union[str, Path],
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    """
    Write the report as a TSV table of rounded percentages plus a full-precision JSON sidecar.

    Returns:
        Path of the TSV file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    report.table().round(0).astype(int).to_csv(path, sep="\t")
    sidecar = report.to_dict()
    if extra:
        sidecar.update(extra)
    write_json(sidecar, path.with_suffix(".json"))
    logger.info(f"Wrote label report to {path}")
    return path


@dataclass
class RecoveryReport:
    """Gold object and part instances found in predicted trees with the same symbol and span."""

    recovered: Counter = field(default_factory=Counter)
    total: Counter = field(default_factory=Counter)

    def __add__(self, other: "RecoveryReport") -> "RecoveryReport":
        return RecoveryReport(self.recovered + other.recovered, self.total + other.total)

    @property
    def rate(self) -> float:
        total = sum(self.total.values())
        return 100.0 * sum(self.recovered.values()) / total if total else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "per_symbol": {s: {"recovered": self.recovered[s], "total": n} for s, n in sorted(self.total.items())},
            "rate": self.rate,
        }


def _gold_instances(node: GroundTruthTree, grammar: Optional[Grammar], out: set) -> None:
    if is_label_symbol(node.label, grammar):
        out.add((node.label, frozenset(node.leaves())))
    for child in node.children:
        if isinstance(child, GroundTruthTree):
            _gold_instances(child, grammar, out)


def object_recovery(pred: ParseNode, gold: GroundTruthTree, grammar: Optional[Grammar] = None) -> RecoveryReport:
    """Count the gold instances the predicted tree reproduces exactly."""
    gold_set: set = set()
    _gold_instances(gold, grammar, gold_set)
    predicted = {(n.symbol, n.span) for n in pred.internal_nodes()}
    report = RecoveryReport()
    for symbol, span in gold_set:
        report.total[symbol] += 1
        if (symbol, span) in predicted:
            report.recovered[symbol] += 1
    return report
