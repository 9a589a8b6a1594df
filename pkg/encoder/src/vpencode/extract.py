"""Turn raw videos and texts into embedding stores.

A video is decoded to an (N, H, W, 3) uint8 frame stack, a fixed number
of frames is sampled at a uniform stride, each sampled frame is embedded,
and the frame embeddings are averaged then renormalized to one unit
vector per video. Texts are embedded directly (the encoder truncates to
its context window). Both paths write the engine's store layout.

Hermetic deployments store their "videos" as .npy frame stacks; real
video files decode through OpenCV when it is installed.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .encoders import Encoder, as_frame_batch
from .errors import DecodeError, EncoderError, InvalidInputError
from .sampling import sample_frame_indices
from .store_io import write_store

DEFAULT_N_FRAMES = 32


@dataclass(frozen=True)
class VideoEntry:
    id: str
    path: Path

    def __post_init__(self):
        if not self.id:
            raise InvalidInputError("video id must be nonempty")


@dataclass(frozen=True)
class ExtractionJob:
    """One batch extraction: which videos, how many frames, where to."""

    videos: tuple[VideoEntry, ...]
    out_store: Path
    n_frames: int = DEFAULT_N_FRAMES
    encoder_name: str = "hash"

    def __post_init__(self):
        if not self.videos:
            raise InvalidInputError("extraction job has no videos")
        if self.n_frames < 1:
            raise InvalidInputError("n_frames must be >= 1")
        ids = [v.id for v in self.videos]
        if len(set(ids)) != len(ids):
            raise InvalidInputError("video ids must be unique")
        missing = [str(v.path) for v in self.videos if not Path(v.path).exists()]
        if missing:
            raise InvalidInputError(f"video paths do not exist: {missing[:5]}")


def read_manifest(path) -> list[VideoEntry]:
    """Load a job manifest: a JSON list of {"id", "path"} objects (or an
    object with a "videos" key holding that list). Relative paths resolve
    against the manifest's directory."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise InvalidInputError(f"cannot read manifest {path}: {exc}") from exc
    rows = doc.get("videos") if isinstance(doc, dict) else doc
    if not isinstance(rows, list) or not rows:
        raise InvalidInputError("manifest must be a nonempty list of {id, path}")
    entries = []
    for i, row in enumerate(rows):
        if not isinstance(row, dict) or "id" not in row or "path" not in row:
            raise InvalidInputError(f"manifest row {i} needs 'id' and 'path'")
        p = Path(row["path"])
        if not p.is_absolute():
            p = path.parent / p
        entries.append(VideoEntry(id=str(row["id"]), path=p))
    return entries


def load_frames(path) -> np.ndarray:
    """Decode a video file to an (N, H, W, 3) uint8 stack.

    .npy files hold the stack directly; anything else goes through OpenCV
    (an optional dependency), read as RGB frames.
    """
    path = Path(path)
    if not path.exists():
        raise DecodeError(f"no such video: {path}")
    if path.suffix == ".npy":
        try:
            arr = np.load(path)
        except (OSError, ValueError) as exc:
            raise DecodeError(f"cannot load frame stack {path}: {exc}") from exc
        try:
            return as_frame_batch(arr)
        except InvalidInputError as exc:
            raise DecodeError(f"{path}: {exc}") from exc
    try:
        import cv2
    except ImportError as exc:
        raise DecodeError(
            f"decoding {path.suffix!r} files needs the [video] extra (OpenCV)"
        ) from exc
    cap = cv2.VideoCapture(str(path))
    frames = []
    while True:
        ok, frame = cap.read()
        if not ok:
            break
        frames.append(cv2.cvtColor(frame, cv2.COLOR_BGR2RGB))
    cap.release()
    if not frames:
        raise DecodeError(f"no decodable frames in {path}")
    return np.stack(frames).astype(np.uint8)


def extract_video_embedding(
    video, n_frames: int, encoder: Encoder
) -> np.ndarray:
    """One unit vector for one video: sparse-sample, embed frames, mean,
    renormalize. ``video`` is a path or an already-decoded frame stack."""
    if n_frames < 1:
        raise InvalidInputError("n_frames must be >= 1")
    if isinstance(video, (str, Path)):
        frames = load_frames(video)
    else:
        frames = as_frame_batch(video)
    indices = sample_frame_indices(frames.shape[0], n_frames)
    rows = encoder.embed_images(frames[indices])
    mean = rows.mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        raise EncoderError("frame embeddings cancel out; no direction to keep")
    return mean / norm


def run_video_job(
    job: ExtractionJob, encoder: Encoder, workers: int = 1
) -> Path:
    """Extract every video in the job and write one store row per video,
    in manifest order, flagged l2_normalized."""
    def one(entry: VideoEntry) -> np.ndarray:
        return extract_video_embedding(entry.path, job.n_frames, encoder)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, job.videos))
    else:
        rows = [one(v) for v in job.videos]
    return write_store(
        job.out_store,
        [v.id for v in job.videos],
        np.stack(rows),
        l2_normalized=True,
    )


def embed_texts_to_store(
    texts: Sequence[str],
    encoder: Encoder,
    out_store,
    ids: Optional[Sequence[str]] = None,
) -> Path:
    """Embed texts and write them as a store.

    Row ids default to the exact text strings, so the engine can key
    prompt lookups straight off the store.
    """
    texts = list(texts)
    if not texts:
        raise InvalidInputError("no texts to embed")
    if ids is None:
        ids = texts
    ids = [str(i) for i in ids]
    if len(ids) != len(texts):
        raise InvalidInputError(f"{len(ids)} ids for {len(texts)} texts")
    rows = encoder.embed_texts(texts)
    return write_store(out_store, ids, rows, l2_normalized=True)
