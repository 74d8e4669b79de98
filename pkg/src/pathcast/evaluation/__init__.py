"""Metrics, baseline, ablations, and report emission."""

from .metrics import NMSE_MODES, nmse, nmse_db, rmse
from .baseline import ConvBaseline
from .report import CSV_COLUMNS, NmseReport, NmseRow, emit_report, make_row, merge_reports
from .ablation import ABLATION_VARIANTS, run_ablation

__all__ = [
    "ABLATION_VARIANTS",
    "CSV_COLUMNS",
    "ConvBaseline",
    "NMSE_MODES",
    "NmseReport",
    "NmseRow",
    "emit_report",
    "make_row",
    "merge_reports",
    "nmse",
    "nmse_db",
    "rmse",
    "run_ablation",
]
