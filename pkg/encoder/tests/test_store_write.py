import json
import struct

import numpy as np
import pytest

from vpencode import write_store
from vpencode.errors import InvalidInputError


class TestLayout:
    def test_manifest_fields(self, tmp_path):
        out = write_store(tmp_path / "s", ["a", "b"], np.ones((2, 3)))
        m = json.loads((out / "manifest.json").read_text())
        assert m == {
            "version": 1,
            "dim": 3,
            "count": 2,
            "dtype": "f32le",
            "l2_normalized": False,
            "ids": ["a", "b"],
        }

    def test_payload_is_row_major_f32le(self, tmp_path):
        rows = np.array([[1.0, -2.0, 0.5], [3.25, 0.0, -1.0]])
        out = write_store(tmp_path / "s", ["a", "b"], rows)
        assert (out / "data.bin").read_bytes() == struct.pack(
            "<6f", 1.0, -2.0, 0.5, 3.25, 0.0, -1.0
        )

    def test_one_encodes_to_3f800000_le(self, tmp_path):
        out = write_store(tmp_path / "s", ["u"], np.array([[1.0, 0.0]]))
        assert (out / "data.bin").read_bytes()[:4] == b"\x00\x00\x80\x3f"

    def test_l2_flag_recorded(self, tmp_path):
        out = write_store(tmp_path / "s", ["a"], np.array([[1.0, 0.0]]), l2_normalized=True)
        assert json.loads((out / "manifest.json").read_text())["l2_normalized"] is True

    def test_rewrite_is_bit_stable(self, tmp_path):
        rows = np.random.default_rng(5).standard_normal((4, 8))
        a = write_store(tmp_path / "a", ["w", "x", "y", "z"], rows)
        b = write_store(tmp_path / "b", ["w", "x", "y", "z"], rows)
        assert (a / "data.bin").read_bytes() == (b / "data.bin").read_bytes()
        assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()

    def test_overwrite_replaces_store(self, tmp_path):
        write_store(tmp_path / "s", ["a"], np.ones((1, 2)))
        out = write_store(tmp_path / "s", ["b", "c"], np.ones((2, 2)))
        m = json.loads((out / "manifest.json").read_text())
        assert m["ids"] == ["b", "c"]


class TestValidation:
    def test_empty_ids_rejected(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_store(tmp_path / "s", [], np.zeros((0, 3)))

    def test_duplicate_ids_rejected(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_store(tmp_path / "s", ["a", "a"], np.ones((2, 2)))

    def test_blank_id_rejected(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_store(tmp_path / "s", ["a", ""], np.ones((2, 2)))

    def test_count_mismatch_rejected(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_store(tmp_path / "s", ["a"], np.ones((2, 2)))

    def test_nan_rejected(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_store(tmp_path / "s", ["a"], np.array([[np.nan, 1.0]]))

    def test_non_matrix_rejected(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_store(tmp_path / "s", ["a"], np.ones(3))

    def test_failed_write_leaves_no_partial_dir(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_store(tmp_path / "s", ["a", "b"], np.ones((1, 2)))
        assert not (tmp_path / "s").exists()
        assert not any(p.name.startswith(".s.tmp-") for p in tmp_path.iterdir())
