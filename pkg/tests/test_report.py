"""Report rows, JSON/CSV emission, and merging."""

import csv
import math

import numpy as np
import pytest

from pathcast.errors import ContractViolationError
from pathcast.evaluation.report import (
    CSV_COLUMNS,
    NmseReport,
    NmseRow,
    emit_report,
    make_row,
    merge_reports,
    write_json_csv,
)


def row(pooled=0.01, **kw):
    defaults = dict(
        train_tag="pipeline",
        test_tag="crossroad@70m@28GHz",
        mode="eval",
        fraction=0.0,
        nmse_pooled=pooled,
        nmse_mean=pooled,
        n_test=5,
        seed=0,
        checkpoint_ids=("aaaa", "bbbb"),
    )
    defaults.update(kw)
    if "nmse_db" not in defaults:
        defaults["nmse_db"] = -math.inf if pooled == 0 else 10 * math.log10(pooled)
    return NmseRow(**defaults)


class TestNmseRow:
    def test_db_consistency_enforced(self):
        with pytest.raises(ContractViolationError):
            row(nmse_db=-19.0)  # 0.01 -> -20 dB, off by 1

    def test_db_consistency_tolerance_is_tight(self):
        row(nmse_db=10 * math.log10(0.01) + 5e-10)  # inside 1e-9: fine
        with pytest.raises(ContractViolationError):
            row(nmse_db=10 * math.log10(0.01) + 5e-9)

    def test_zero_error_rows_use_negative_infinity(self):
        r = row(pooled=0.0, nmse_mean=0.0)
        assert r.nmse_db == -math.inf
        with pytest.raises(ContractViolationError):
            row(pooled=0.0, nmse_mean=0.0, nmse_db=-300.0)

    def test_rejects_negative_nmse(self):
        with pytest.raises(ContractViolationError):
            row(pooled=-0.5, nmse_db=0.0)

    def test_checkpoint_ids_coerced_to_tuple(self):
        r = row(checkpoint_ids=["x", "y"])
        assert r.checkpoint_ids == ("x", "y")

    def test_make_row_computes_both_readings(self):
        true = np.ones((3, 4, 4)) * 100.0
        pred = true + 10.0
        r = make_row(pred, true, train_tag="t", test_tag="c", mode="eval", seed=3)
        assert r.nmse_pooled == pytest.approx(0.01, abs=1e-12)
        assert r.nmse_mean == pytest.approx(0.01, abs=1e-12)
        assert r.nmse_db == pytest.approx(-20.0, abs=1e-9)
        assert r.n_test == 3 and r.seed == 3


class TestJsonRoundTrip:
    def test_equality_after_reload(self, tmp_path):
        rep = NmseReport(rows=[row(), row(pooled=0.04)], provenance={"seed": 0, "k": "v"})
        p = tmp_path / "r.json"
        rep.to_json(p)
        assert NmseReport.from_json(p) == rep

    def test_negative_infinity_survives(self, tmp_path):
        rep = NmseReport(rows=[row(pooled=0.0, nmse_mean=0.0)], provenance={})
        p = tmp_path / "r.json"
        rep.to_json(p)
        back = NmseReport.from_json(p)
        assert back.rows[0].nmse_db == -math.inf

    def test_write_is_deterministic(self, tmp_path):
        rep = NmseReport(rows=[row()], provenance={"b": 1, "a": 2})
        rep.to_json(tmp_path / "x.json")
        rep.to_json(tmp_path / "y.json")
        assert (tmp_path / "x.json").read_bytes() == (tmp_path / "y.json").read_bytes()


class TestCsv:
    def test_header_and_formatting(self, tmp_path):
        rep = NmseReport(rows=[row(pooled=0.0123456789)], provenance={})
        p = tmp_path / "r.csv"
        rep.to_csv(p)
        with open(p, newline="") as fh:
            rows = list(csv.reader(fh))
        assert tuple(rows[0]) == CSV_COLUMNS
        rec = dict(zip(rows[0], rows[1]))
        assert rec["nmse_pooled"] == "0.0123457"  # six significant digits
        assert rec["checkpoint_ids"] == "aaaa+bbbb"
        assert rec["n_test"] == "5"

    def test_empty_report_refused(self, tmp_path):
        with pytest.raises(ContractViolationError):
            NmseReport(rows=[], provenance={}).to_csv(tmp_path / "r.csv")

    def test_write_json_csv_pair(self, tmp_path):
        rep = NmseReport(rows=[row()], provenance={"seed": 1})
        jp, cp = write_json_csv(rep, tmp_path, stem="out")
        assert jp.name == "out.json" and cp.name == "out.csv"
        assert jp.exists() and cp.exists()

    def test_emit_report_validates_format(self, tmp_path):
        rep = NmseReport(rows=[row()], provenance={})
        out = emit_report(rep, "csv", tmp_path / "z.csv")
        assert out.exists()
        with pytest.raises(ContractViolationError):
            emit_report(rep, "xml", tmp_path / "z.xml")
        with pytest.raises(ContractViolationError):
            emit_report(NmseReport(rows=[], provenance={}), "json", tmp_path / "e.json")


class TestMerge:
    def test_concatenates_rows(self):
        a = NmseReport(rows=[row()], provenance={"seed": 0})
        b = NmseReport(rows=[row(pooled=0.04)], provenance={"mode": "eval"})
        merged = merge_reports([a, b])
        assert len(merged.rows) == 2
        assert merged.provenance == {"seed": 0, "mode": "eval"}

    def test_conflicting_provenance_rejected(self):
        a = NmseReport(rows=[row()], provenance={"seed": 0})
        b = NmseReport(rows=[row()], provenance={"seed": 1})
        with pytest.raises(ContractViolationError):
            merge_reports([a, b])
