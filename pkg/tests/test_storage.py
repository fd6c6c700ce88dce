"""
Result Storage Test Suite
- CSV writing
- summary.json schema validation
- Reading summaries back
"""
import json

import pandas as pd
import pytest

from tomochaos.state import ExperimentKind, RunSummary
from tomochaos.storage import ResultStore


def make_summary(**fields):
    values = dict(
        experiment=ExperimentKind.ANALYTIC_TABLE,
        seed=0,
        config={"experiment": "AnalyticTable", "j": 10.0, "seed": 0},
        analytic={"CUE": 5.547, "CUE_closed_form": 5.357},
        empirical={"CUE": 5.549, "CUE_closed_form": 5.549},
        tolerance={"CUE": 0.07, "CUE_closed_form": None},
        passed={"CUE": True, "CUE_closed_form": None},
        all_passed=True,
        files=["analytic_table.csv"],
    )
    values.update(fields)
    return RunSummary(**values)


@pytest.fixture
def store(tmp_path):
    return ResultStore(tmp_path / "out")


class TestCsvOutput:
    """Test per-experiment tables"""

    def test_write_csv_creates_directory(self, store):
        """Test that the output directory is created on first write"""
        path = store.write_csv("table.csv", pd.DataFrame({"n": [1, 2], "entropy": [0.5, 1.0 / 3.0]}))
        assert path.exists()
        assert store.files == ["table.csv"]

    def test_float_format(self, store):
        """Test that floats are written with ten significant digits"""
        path = store.write_csv("table.csv", pd.DataFrame({"x": [1.0 / 3.0]}))
        assert path.read_text().splitlines() == ["x", "0.3333333333"]


class TestSummarySchema:
    """Test summary.json validation against schema.json"""

    def test_schema_loads(self, store):
        """Test that the documented schema lists every summary key"""
        schema = store.get_schema()
        assert set(schema["required"]) == {
            "experiment", "seed", "config", "analytic", "empirical", "tolerance", "pass", "all_passed", "files"
        }

    def test_write_and_read_summary(self, store):
        """Test that a valid summary is written with the 'pass' alias and read back"""
        store.write_summary(make_summary())
        payload = store.read_summary()
        assert payload["pass"] == {"CUE": True, "CUE_closed_form": None}
        assert payload["tolerance"]["CUE_closed_form"] is None
        assert payload["experiment"] == "AnalyticTable"

    def test_summary_keys_sorted(self, store):
        """Test that the file is written with sorted keys"""
        path = store.write_summary(make_summary())
        keys = list(json.loads(path.read_text()))
        assert keys == sorted(keys)

    def test_rejects_nested_type_error(self, store):
        """Test that a verdict of the wrong type is rejected with its path"""
        payload = make_summary().model_dump(mode="json", by_alias=True)
        payload["pass"]["CUE"] = "yes"
        with pytest.raises(ValueError, match="pass/CUE"):
            store.validate_summary(payload)

    def test_rejects_missing_key(self, store):
        """Test that a payload without all_passed is rejected"""
        payload = make_summary().model_dump(mode="json", by_alias=True)
        del payload["all_passed"]
        with pytest.raises(ValueError, match="all_passed"):
            store.validate_summary(payload)

    def test_rejects_unknown_top_level_key(self, store):
        """Test that extra top-level keys are rejected"""
        payload = make_summary().model_dump(mode="json", by_alias=True)
        payload["notes"] = "extra"
        with pytest.raises(ValueError):
            store.validate_summary(payload)

    def test_rejects_negative_tolerance(self, store):
        """Test that tolerances must be non-negative"""
        payload = make_summary().model_dump(mode="json", by_alias=True)
        payload["tolerance"]["CUE"] = -0.1
        with pytest.raises(ValueError, match="tolerance/CUE"):
            store.validate_summary(payload)

    def test_rejects_non_csv_file_entry(self, store):
        """Test that listed files must be CSV tables"""
        with pytest.raises(ValueError, match="files/0"):
            store.write_summary(make_summary(files=["summary.json"]))
        assert store.read_summary() is None

    def test_read_missing_summary(self, store):
        """Test that an absent summary reads as None"""
        assert store.read_summary() is None
