"""Tests for atomic file output."""

import os
import shutil
import tempfile

from src.utils.fileio import atomic_write_text


class TestAtomicWrite:
    """Test atomic_write_text."""

    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()

    def teardown_method(self):
        shutil.rmtree(self.temp_dir)

    def test_writes_and_replaces(self):
        path = os.path.join(self.temp_dir, "out.csv")
        atomic_write_text(path, "a\n")
        atomic_write_text(path, "b\n")
        with open(path, encoding="utf-8") as f:
            assert f.read() == "b\n"
        assert os.listdir(self.temp_dir) == ["out.csv"]

    def test_creates_parent(self):
        path = os.path.join(self.temp_dir, "nested", "dir", "out.csv")
        atomic_write_text(path, "x")
        assert os.path.exists(path)
