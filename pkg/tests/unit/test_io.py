"""
Unit tests for artifact I/O and the thread-pool helpers.
"""

import math

import numpy as np
import pytest

from tvglasso.core.exceptions import ArtifactFormatError
from tvglasso.utils import io
from tvglasso.utils.parallel import ordered_map, resolve_threads


class TestJson:
    """Tests for JSON documents and JSON lines."""

    def test_numpy_values(self, tmp_path):
        """Test that numpy scalars and arrays are written as plain JSON."""
        path = tmp_path / "doc.json"
        io.write_json(path, {"a": np.float64(0.1), "b": np.arange(3), "c": np.int64(4)})
        assert io.read_json(path) == {"a": 0.1, "b": [0, 1, 2], "c": 4}
        assert path.read_text().endswith("}\n")

    def test_non_finite_rejected(self, tmp_path):
        """Test that NaN cannot be written."""
        with pytest.raises(ValueError):
            io.write_json(tmp_path / "nan.json", {"x": math.nan})

    def test_invalid_json(self, tmp_path):
        """Test ArtifactFormatError for a truncated document."""
        path = tmp_path / "bad.json"
        path.write_text('{"x": ')
        with pytest.raises(ArtifactFormatError):
            io.read_json(path)

    def test_jsonl_skips_blank_lines(self, tmp_path):
        """Test reading JSON lines with blank lines in between."""
        path = tmp_path / "records.jsonl"
        path.write_text('{"k": 1}\n\n{"k": 2}\n')
        assert io.read_jsonl(path) == [{"k": 1}, {"k": 2}]

    def test_jsonl_bad_line(self, tmp_path):
        """Test ArtifactFormatError naming the broken line."""
        path = tmp_path / "records.jsonl"
        path.write_text('{"k": 1}\nnot json\n')
        with pytest.raises(ArtifactFormatError, match=":2:"):
            io.read_jsonl(path)

    def test_deterministic_bytes(self, tmp_path):
        """Test byte-identical output for identical payloads."""
        payload = {"b": 1.0 / 3.0, "a": [1, 2]}
        io.write_json(tmp_path / "one.json", payload)
        io.write_json(tmp_path / "two.json", payload)
        assert (tmp_path / "one.json").read_bytes() == (tmp_path / "two.json").read_bytes()


class TestCsv:
    """Tests for CSV rows and frames."""

    def test_rows_with_missing_cells(self, tmp_path):
        """Test column order, integer cells and empty cells for None."""
        path = tmp_path / "rows.csv"
        io.write_rows(path, [{"step": 1, "value": None}, {"step": 2, "value": 0.5}], columns=["step", "value"])
        assert path.read_text().splitlines() == ["step,value", "1,", "2,0.5"]

    def test_float_round_trip(self, tmp_path):
        """Test exact float recovery."""
        path = tmp_path / "floats.csv"
        values = np.random.default_rng(0).standard_normal(50)
        io.write_rows(path, [{"x": float(v)} for v in values])
        np.testing.assert_array_equal(io.read_frame(path)["x"].to_numpy(), values)

    def test_empty_file(self, tmp_path):
        """Test ArtifactFormatError for an empty CSV."""
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ArtifactFormatError):
            io.read_frame(path)


class TestParallel:
    """Tests for ordered_map and resolve_threads."""

    def test_order_preserved(self):
        """Test results in input order for several workers."""
        assert ordered_map(lambda x: x * x, range(20), threads=4) == [x * x for x in range(20)]

    def test_empty(self):
        """Test an empty work list."""
        assert ordered_map(lambda x: x, [], threads=3) == []

    def test_resolve_threads(self, mocker):
        """Test explicit counts, the settings fallback and the lower bound."""
        mocker.patch("tvglasso.utils.parallel.settings.THREADS", 3)
        assert resolve_threads() == 3
        assert resolve_threads(5) == 5
        assert resolve_threads(0) == 1
