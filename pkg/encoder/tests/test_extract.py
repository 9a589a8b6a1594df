import json

import numpy as np
import pytest

from vpencode import (
    ExtractionJob,
    HashEncoder,
    VideoEntry,
    extract_video_embedding,
    load_frames,
    read_manifest,
    run_video_job,
)
from vpencode.errors import DecodeError, InvalidInputError
from vpencode.sampling import sample_frame_indices


@pytest.fixture
def enc():
    return HashEncoder(dim=64)


def frame_stack(n, seed=0, size=8):
    rng = np.random.default_rng(seed)
    return rng.integers(0, 256, size=(n, size, size, 3), dtype=np.uint8)


def save_npy(tmp_path, name, stack):
    p = tmp_path / name
    np.save(p, stack)
    return p.with_suffix(".npy")


class TestLoadFrames:
    def test_npy_round_trip(self, tmp_path):
        stack = frame_stack(6)
        p = save_npy(tmp_path, "v.npy", stack)
        assert np.array_equal(load_frames(p), stack)

    def test_missing_file_is_decode_error(self, tmp_path):
        with pytest.raises(DecodeError):
            load_frames(tmp_path / "nope.npy")

    def test_wrong_shape_is_decode_error(self, tmp_path):
        p = save_npy(tmp_path, "bad.npy", np.zeros((4, 4), dtype=np.uint8))
        with pytest.raises(DecodeError):
            load_frames(p)

    def test_wrong_dtype_is_decode_error(self, tmp_path):
        p = save_npy(tmp_path, "f32.npy", np.zeros((2, 4, 4, 3), dtype=np.float32))
        with pytest.raises(DecodeError):
            load_frames(p)

    def test_real_video_file_decodes(self, tmp_path):
        cv2 = pytest.importorskip("cv2")
        path = str(tmp_path / "clip.avi")
        writer = cv2.VideoWriter(
            path, cv2.VideoWriter_fourcc(*"MJPG"), 10, (16, 16)
        )
        assert writer.isOpened()
        for f in frame_stack(6, size=16):
            writer.write(f)
        writer.release()
        frames = load_frames(path)
        assert frames.shape == (6, 16, 16, 3)
        assert frames.dtype == np.uint8

    def test_undecodable_file_is_decode_error(self, tmp_path):
        p = tmp_path / "junk.avi"
        p.write_bytes(b"this is not a video")
        with pytest.raises(DecodeError):
            load_frames(p)


class TestExtractVideoEmbedding:
    def test_output_unit_norm(self, enc, tmp_path):
        p = save_npy(tmp_path, "v.npy", frame_stack(40))
        vec = extract_video_embedding(p, 8, enc)
        assert vec.shape == (64,)
        assert abs(float(np.linalg.norm(vec)) - 1.0) <= 1e-12

    def test_constant_frames_equal_single_frame(self, enc):
        one = frame_stack(1, seed=3)
        stack = np.repeat(one, 12, axis=0)
        video_vec = extract_video_embedding(stack, 32, enc)
        frame_vec = enc.embed_images(one)[0]
        assert np.allclose(video_vec, frame_vec, atol=1e-5)

    def test_two_frame_mean_oracle(self, enc):
        # hand computation over captured per-frame rows: mean of the two
        # frame embeddings, renormalized
        stack = frame_stack(2, seed=9)
        rows = enc.embed_images(stack)
        expected = (rows[0] + rows[1]) / 2.0
        expected = expected / np.linalg.norm(expected)
        got = extract_video_embedding(stack, 2, enc)
        assert np.allclose(got, expected, atol=1e-12)

    def test_uses_sparse_sampling_formula(self, enc):
        # the embedding must be built from exactly the strided frames
        stack = frame_stack(20, seed=4)
        idx = sample_frame_indices(20, 6)
        rows = enc.embed_images(stack[idx])
        expected = rows.mean(axis=0)
        expected = expected / np.linalg.norm(expected)
        got = extract_video_embedding(stack, 6, enc)
        assert np.allclose(got, expected, atol=1e-12)

    def test_accepts_path_or_array(self, enc, tmp_path):
        stack = frame_stack(5, seed=8)
        p = save_npy(tmp_path, "v.npy", stack)
        assert np.array_equal(
            extract_video_embedding(p, 4, enc),
            extract_video_embedding(stack, 4, enc),
        )

    def test_zero_frames_requested_rejected(self, enc):
        with pytest.raises(InvalidInputError):
            extract_video_embedding(frame_stack(4), 0, enc)


class TestJob:
    def make_manifest(self, tmp_path, n_videos=3):
        entries = []
        for i in range(n_videos):
            p = save_npy(tmp_path, f"v{i}.npy", frame_stack(10, seed=i))
            entries.append({"id": f"vid-{i}", "path": p.name})
        m = tmp_path / "manifest.json"
        m.write_text(json.dumps(entries), encoding="utf-8")
        return m

    def test_read_manifest_resolves_relative_paths(self, tmp_path):
        m = self.make_manifest(tmp_path)
        entries = read_manifest(m)
        assert [e.id for e in entries] == ["vid-0", "vid-1", "vid-2"]
        assert all(e.path.exists() for e in entries)

    def test_manifest_requires_id_and_path(self, tmp_path):
        m = tmp_path / "m.json"
        m.write_text(json.dumps([{"id": "x"}]), encoding="utf-8")
        with pytest.raises(InvalidInputError):
            read_manifest(m)

    def test_job_rejects_missing_paths(self, tmp_path):
        with pytest.raises(InvalidInputError):
            ExtractionJob(
                videos=(VideoEntry("a", tmp_path / "absent.npy"),),
                out_store=tmp_path / "out",
            )

    def test_job_rejects_duplicate_ids(self, tmp_path):
        p = save_npy(tmp_path, "v.npy", frame_stack(4))
        with pytest.raises(InvalidInputError):
            ExtractionJob(
                videos=(VideoEntry("a", p), VideoEntry("a", p)),
                out_store=tmp_path / "out",
            )

    def test_job_rejects_bad_frame_count(self, tmp_path):
        p = save_npy(tmp_path, "v.npy", frame_stack(4))
        with pytest.raises(InvalidInputError):
            ExtractionJob(
                videos=(VideoEntry("a", p),),
                out_store=tmp_path / "out",
                n_frames=0,
            )

    def test_run_video_job_writes_rows_in_manifest_order(self, enc, tmp_path):
        m = self.make_manifest(tmp_path)
        job = ExtractionJob(
            videos=tuple(read_manifest(m)),
            out_store=tmp_path / "store",
            n_frames=4,
        )
        out = run_video_job(job, enc)
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["ids"] == ["vid-0", "vid-1", "vid-2"]
        assert manifest["l2_normalized"] is True
        expected = extract_video_embedding(tmp_path / "v1.npy", 4, enc)
        data = np.frombuffer((out / "data.bin").read_bytes(), dtype="<f4")
        got = data.reshape(3, 64)[1]
        assert np.allclose(got, expected, atol=1e-6)

    def test_parallel_job_matches_serial(self, enc, tmp_path):
        m = self.make_manifest(tmp_path, n_videos=6)
        entries = tuple(read_manifest(m))
        serial = run_video_job(
            ExtractionJob(entries, tmp_path / "s1", n_frames=4), enc, workers=1
        )
        parallel = run_video_job(
            ExtractionJob(entries, tmp_path / "s2", n_frames=4), enc, workers=4
        )
        assert (serial / "data.bin").read_bytes() == (parallel / "data.bin").read_bytes()
