"""
Unit tests for utility helper functions
"""
import unittest
import sys
from pathlib import Path
import tempfile
import json

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))
from src.core.errors import InvalidParameter
from src.models.records import TimeSeries
from src.utils.helpers import (
    format_number,
    format_report,
    time_grid,
    write_json,
    write_rows_csv,
    write_series_csv
)


class TestTimeGrid(unittest.TestCase):
    """Test sample time grids"""

    def test_inclusive_endpoints(self):
        """Test the grid runs from 0 to t_max inclusive"""
        grid = time_grid(2.0, 5)
        np.testing.assert_allclose(grid, [0.0, 0.5, 1.0, 1.5, 2.0])

    def test_single_step(self):
        """Test one step gives only t = 0"""
        np.testing.assert_array_equal(time_grid(3.0, 1), [0.0])

    def test_invalid_arguments(self):
        """Test negative times, zero steps and booleans are rejected"""
        with self.assertRaises(InvalidParameter):
            time_grid(-1.0, 5)
        with self.assertRaises(InvalidParameter):
            time_grid(1.0, 0)
        with self.assertRaises(InvalidParameter):
            time_grid(float("inf"), 3)
        with self.assertRaises(InvalidParameter):
            time_grid(1.0, True)


class TestWriters(unittest.TestCase):
    """Test CSV and JSON writers"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_format_number(self):
        """Test 15 significant digits"""
        self.assertEqual(format_number(1 / 3), "0.333333333333333")
        self.assertEqual(format_number(2.0), "2")

    def test_rows_csv(self):
        """Test header, LF endings and nested directory creation"""
        path = write_rows_csv(self.root / "a" / "b.csv", ["family", "N", "amplitude"], [("w", 4, 0.5)])
        raw = path.read_bytes()
        self.assertNotIn(b"\r\n", raw)
        self.assertEqual(raw.decode("utf-8"), "family,N,amplitude\nw,4,0.5\n")

    def test_series_csv(self):
        """Test the series header and one row per sample"""
        series = TimeSeries(
            t=np.array([0.0, 1.0]),
            f0=np.array([1.0, 0.9]),
            c0=np.array([0.1, 0.2]),
            c1=np.array([0.0, 0.0]),
            e01=np.array([0.3, 0.25])
        )
        lines = write_series_csv(self.root / "s.csv", series).read_text().splitlines()
        self.assertEqual(lines[0], "t,F0,C0,C1,E01")
        self.assertEqual(lines[2], "1,0.9,0.2,0,0.25")
        self.assertEqual(len(lines), 3)

    def test_json(self):
        """Test JSON output loads back"""
        path = write_json(self.root / "fits.json", {"w": {"slope": -1.0}})
        self.assertEqual(json.loads(path.read_text()), {"w": {"slope": -1.0}})


class TestFormatReport(unittest.TestCase):
    """Test report formatting"""

    def test_format_simple_report(self):
        """Test formatting a simple report"""
        data = {
            'status': 'success',
            'count': 42
        }
        result = format_report(data, "Test Report")
        self.assertIn("Test Report", result)
        self.assertIn("status: success", result)
        self.assertIn("count: 42", result)
        self.assertIn("=" * 50, result)

    def test_format_nested_report(self):
        """Test formatting a report with nested data"""
        data = {
            'summary': {
                'total': 10,
                'passed': 8
            }
        }
        result = format_report(data, "Nested Report")
        self.assertIn("summary:", result)
        self.assertIn("  total: 10", result)
        self.assertIn("  passed: 8", result)

    def test_format_list_values(self):
        """Test list entries are listed one per line"""
        result = format_report({'n_range': [3, 4]})
        self.assertIn("n_range:\n  3\n  4", result)


if __name__ == '__main__':
    unittest.main()
