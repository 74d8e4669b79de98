"""Evaluation reports: tabular NMSE results plus run provenance."""

import csv
import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ContractViolationError
from .metrics import nmse

CSV_COLUMNS = (
    "train_tag",
    "test_tag",
    "mode",
    "fraction",
    "nmse_pooled",
    "nmse_mean",
    "nmse_db",
    "n_test",
    "seed",
    "checkpoint_ids",
)


@dataclass(frozen=True)
class NmseRow:
    """One evaluated (training setting, test condition) pair."""

    train_tag: str
    test_tag: str
    mode: str
    fraction: float
    nmse_pooled: float
    nmse_mean: float
    nmse_db: float
    n_test: int
    seed: int
    checkpoint_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.nmse_pooled < 0 or self.nmse_mean < 0:
            raise ContractViolationError("nmse values must be non-negative")
        expected = -math.inf if self.nmse_pooled == 0 else 10.0 * math.log10(self.nmse_pooled)
        if abs(self.nmse_db - expected) > 1e-9:
            raise ContractViolationError(
                f"nmse_db {self.nmse_db} inconsistent with nmse_pooled {self.nmse_pooled}"
            )
        object.__setattr__(self, "checkpoint_ids", tuple(self.checkpoint_ids))


def make_row(
    pred_db,
    true_db,
    train_tag: str,
    test_tag: str,
    mode: str,
    seed: int,
    fraction: float = 0.0,
    checkpoint_ids=(),
) -> NmseRow:
    """Evaluate both NMSE readings on a prediction batch and tag the row."""
    pooled = nmse(pred_db, true_db, mode="pooled")
    mean = nmse(pred_db, true_db, mode="mean_of_ratios")
    pred = np.asarray(pred_db)
    n_test = pred.shape[0] if pred.ndim == 3 else 1
    return NmseRow(
        train_tag=train_tag,
        test_tag=test_tag,
        mode=mode,
        fraction=fraction,
        nmse_pooled=pooled,
        nmse_mean=mean,
        nmse_db=-math.inf if pooled == 0 else 10.0 * math.log10(pooled),
        n_test=n_test,
        seed=seed,
        checkpoint_ids=tuple(checkpoint_ids),
    )


@dataclass
class NmseReport:
    """All rows of an evaluation run plus the provenance to reproduce it."""

    rows: list[NmseRow]
    provenance: dict = field(default_factory=dict)

    def to_json(self, path) -> None:
        """Full-precision JSON; loading it back reproduces this object."""
        payload = {
            "provenance": self.provenance,
            "rows": [dataclasses.asdict(r) for r in self.rows],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "NmseReport":
        with open(path) as fh:
            payload = json.load(fh)
        rows = [NmseRow(**r) for r in payload["rows"]]
        return cls(rows=rows, provenance=payload["provenance"])

    def to_csv(self, path) -> None:
        """Stable column order; floats carry six significant digits."""
        if not self.rows:
            raise ContractViolationError("refusing to emit an empty report")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in self.rows:
                writer.writerow(
                    [
                        r.train_tag,
                        r.test_tag,
                        r.mode,
                        f"{r.fraction:.6g}",
                        f"{r.nmse_pooled:.6g}",
                        f"{r.nmse_mean:.6g}",
                        f"{r.nmse_db:.6g}",
                        r.n_test,
                        r.seed,
                        "+".join(r.checkpoint_ids),
                    ]
                )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NmseReport)
            and self.rows == other.rows
            and self.provenance == other.provenance
        )


def merge_reports(reports) -> NmseReport:
    """Concatenate rows; provenance blocks must not disagree on shared keys."""
    rows: list[NmseRow] = []
    prov: dict = {}
    for rep in reports:
        rows.extend(rep.rows)
        for k, v in rep.provenance.items():
            if k in prov and prov[k] != v:
                raise ContractViolationError(
                    f"conflicting provenance for {k!r}: {prov[k]!r} vs {v!r}"
                )
            prov[k] = v
    return NmseReport(rows=rows, provenance=prov)


def write_json_csv(report: NmseReport, out_dir, stem: str = "report") -> tuple[Path, Path]:
    """Write both serializations of a report into a directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path, csv_path = out / f"{stem}.json", out / f"{stem}.csv"
    report.to_json(json_path)
    report.to_csv(csv_path)
    return json_path, csv_path


def emit_report(report: NmseReport, fmt: str, out) -> Path:
    """Write the report as csv or json; returns the written path."""
    if fmt not in ("csv", "json"):
        raise ContractViolationError(f"fmt must be 'csv' or 'json', got {fmt!r}")
    if not report.rows:
        raise ContractViolationError("refusing to emit an empty report")
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        report.to_csv(out)
    else:
        report.to_json(out)
    return out
