"""Sidecar release criteria.

Each test is one acceptance criterion with its tolerance stated inline and
a single printed PASS line. The store and HTTP checks exercise the real
consuming engine (installed alongside in this repository) so the contract
is validated end to end, not against a copy of our own writer/server.
"""

import threading

import numpy as np
import pytest

from vpencode import (
    HashEncoder,
    embed_texts_to_store,
    extract_video_embedding,
    make_server,
    sample_frame_indices,
)

vidzero = pytest.importorskip(
    "vidzero", reason="contract tests need the consuming engine installed"
)


def _pass(line: str) -> None:
    print(f"[PASS] {line}")


class TestFrameIndexFormula:
    def test_320_frames_32_samples(self):
        """(320, 32) must yield exactly [0, 10, 20, ..., 310]."""
        assert sample_frame_indices(320, 32) == list(range(0, 320, 10))
        _pass("frame-index formula: (320, 32) -> [0, 10, ..., 310] exactly")


class TestConstantFramePooling:
    def test_constant_video_equals_single_frame(self):
        """A video whose frames are all identical must embed to its
        single-frame embedding within 1e-5."""
        enc = HashEncoder(dim=64)
        rng = np.random.default_rng(17)
        frame = rng.integers(0, 256, size=(1, 8, 8, 3), dtype=np.uint8)
        stack = np.repeat(frame, 40, axis=0)
        video_vec = extract_video_embedding(stack, 32, enc)
        frame_vec = enc.embed_images(frame)[0]
        worst = float(np.abs(video_vec - frame_vec).max())
        assert worst <= 1e-5
        _pass(
            "constant-frame pooling: video embedding equals single-frame "
            f"embedding (max |diff| {worst:.2e} <= 1e-5)"
        )


class TestExportedStoreLoadsInEngine:
    def test_store_passes_engine_validation(self, tmp_path):
        """A store exported by this package must load through the engine's
        reader with ids, dim, flag, and row values (to float32 precision)
        intact."""
        enc = HashEncoder(dim=48)
        texts = [f"a photo of a action {i}" for i in range(6)]
        out = embed_texts_to_store(texts, enc, tmp_path / "store")

        loaded = vidzero.read_store(out)
        assert list(loaded.ids) == texts
        assert loaded.dim == 48
        rows = enc.embed_texts(texts)
        assert np.allclose(loaded.vectors(), rows, atol=1e-6)

        # and the engine can use it directly as a prompt-keyed embedder
        embedder = vidzero.StoreTextEmbedder(loaded)
        again = embedder.embed([texts[2]])
        assert np.allclose(again[0], rows[2], atol=1e-6)
        _pass(
            "exported store: engine reader validates and loads 6 rows, "
            "values within 1e-6 of source, usable as a prompt store"
        )


class TestEmbedServiceContract:
    def test_engine_client_round_trip(self):
        """/embed responses must be unit-norm and deterministic, consumed
        through the engine's own HTTP embedder client."""
        srv = make_server(0, HashEncoder(dim=32))
        thread = threading.Thread(target=srv.serve_forever, daemon=True)
        thread.start()
        try:
            url = f"http://127.0.0.1:{srv.server_address[1]}"
            client = vidzero.HttpTextEmbedder(url)
            assert client.dim == 32
            texts = ["a photo of a drumming", "unrelated words"]
            first = client.embed(texts)
            second = client.embed(texts)
            assert np.allclose(np.linalg.norm(first, axis=1), 1.0, atol=1e-9)
            assert np.array_equal(first, second)

            clf = vidzero.build_classifier(
                ["drumming", "archery"], None, None, ("base",), client
            )
            assert clf.rows.shape == (2, 32)
        finally:
            srv.shutdown()
            srv.server_close()
        _pass(
            "/embed service: engine client reads dim 32, rows unit-norm "
            "within 1e-9, repeated calls identical, classifier builds over "
            "HTTP"
        )
