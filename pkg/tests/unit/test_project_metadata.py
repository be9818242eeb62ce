"""Unit tests for project metadata."""
import json
import unittest
from pathlib import Path


class TestProjectMetadata(unittest.TestCase):
    """Validate package.json metadata for the project."""

    def test_package_metadata(self):
        project_root = Path(__file__).resolve().parents[2]
        metadata_path = project_root / "package.json"
        self.assertTrue(metadata_path.exists())

        metadata = json.loads(metadata_path.read_text(encoding="utf-8"))
        self.assertEqual(metadata.get("name"), "central-spin-decoherence")
        self.assertEqual(metadata.get("version"), "1.0.0")
        self.assertTrue(metadata.get("description", "").startswith("Decoherence, coherence and entanglement"))
        self.assertIsNone(metadata.get("main"))
        self.assertEqual(metadata.get("license"), "MIT")
        self.assertIn("central-spin", metadata.get("keywords", []))

    def test_requirements_cover_numerics_and_api(self):
        project_root = Path(__file__).resolve().parents[2]
        requirements = (project_root / "requirements.txt").read_text(encoding="utf-8")
        for package in ("numpy", "scipy", "fastapi", "slowapi"):
            self.assertIn(package, requirements)


if __name__ == "__main__":
    unittest.main()
