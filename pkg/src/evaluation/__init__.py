"""Segment labels, precision/recall reports, tree export and cross-validation."""
from src.evaluation.dot import export_dot
from src.evaluation.harness import EvaluationResult, cross_validate
from src.evaluation.labels import NONE_LABEL, extract_labels, is_label_symbol
from src.evaluation.metrics import LabelReport, RecoveryReport, object_recovery, precision_recall, write_report

__all__ = [
    "EvaluationResult",
    "LabelReport",
    "NONE_LABEL",
    "RecoveryReport",
    "cross_validate",
    "export_dot",
    "extract_labels",
    "is_label_symbol",
    "object_recovery",
    "precision_recall",
    "write_report",
]
