"""Image-text encoders behind one small interface.

An encoder maps a batch of frames or a batch of texts to unit-norm
float64 rows of a fixed dimension, deterministically. The hash encoder
needs no weights and no network, which keeps extraction and the embed
service fully hermetic; the CLIP wrapper uses real pretrained weights
when they are installed locally.
"""
from __future__ import annotations

import hashlib
from typing import Protocol, Sequence

import numpy as np

from .errors import EncoderError, InvalidInputError

CONTEXT_LENGTH = 77  # tokens kept per text, mirroring CLIP's window


class Encoder(Protocol):
    dim: int
    context_length: int

    def embed_images(self, frames) -> np.ndarray: ...

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray: ...


def unit_rows(matrix, dim: int) -> np.ndarray:
    """Validate encoder output and renormalize to exact unit rows."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.size == 0:
        return np.zeros((0, dim))
    if m.ndim != 2 or m.shape[1] != dim:
        raise EncoderError(f"encoder returned shape {m.shape}, expected (*, {dim})")
    if not np.all(np.isfinite(m)):
        raise EncoderError("encoder returned NaN or Inf")
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise EncoderError("encoder returned a zero vector")
    return m / norms


def truncate_text(text: str, context_length: int) -> str:
    """Whitespace-token truncation to the encoder's context window."""
    return " ".join(text.split()[:context_length])


def as_frame_batch(frames) -> np.ndarray:
    """Coerce input to an (N, H, W, 3) uint8 frame stack."""
    arr = np.asarray(frames)
    if arr.ndim == 3:
        arr = arr[None]
    if arr.ndim != 4 or arr.shape[-1] != 3:
        raise InvalidInputError(
            f"expected frames shaped (N, H, W, 3), got {arr.shape}"
        )
    if arr.dtype != np.uint8:
        raise InvalidInputError(f"expected uint8 frames, got {arr.dtype}")
    return arr


class HashEncoder:
    """Deterministic stand-in encoder: the sha256 of the content seeds an
    RNG that draws a Gaussian vector, renormalized to unit length.

    Identical content always embeds identically and unrelated content
    lands nearly orthogonal, so pipelines exercise real geometry with zero
    weights. Image and text spaces are domain-separated so the same bytes
    never collide across modalities.
    """

    def __init__(self, dim: int = 64, context_length: int = CONTEXT_LENGTH):
        if dim < 2:
            raise EncoderError("hash encoder needs dim >= 2")
        if context_length < 1:
            raise EncoderError("context_length must be >= 1")
        self.dim = dim
        self.context_length = context_length

    def _one(self, domain: str, payload: bytes) -> np.ndarray:
        digest = hashlib.sha256(domain.encode("ascii") + payload).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        v = rng.standard_normal(self.dim)
        return v / np.linalg.norm(v)

    def embed_images(self, frames) -> np.ndarray:
        batch = as_frame_batch(frames)
        rows = [self._one("img:", f.tobytes()) for f in batch]
        return unit_rows(np.stack(rows), self.dim)

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim))
        rows = [
            self._one(
                "txt:", truncate_text(t, self.context_length).encode("utf-8")
            )
            for t in texts
        ]
        return unit_rows(np.stack(rows), self.dim)


class ClipEncoder:
    """Thin wrapper over a local pretrained CLIP checkpoint.

    Imports torch/transformers lazily so the package works without them;
    constructing this class where they (or the weights) are missing raises
    EncoderError rather than ImportError.
    """

    def __init__(self, model_name: str = "openai/clip-vit-base-patch32"):
        try:
            import torch
            from transformers import CLIPModel, CLIPProcessor
        except ImportError as exc:
            raise EncoderError(
                "ClipEncoder needs the [clip] extra (torch, transformers, pillow)"
            ) from exc
        try:
            self._model = CLIPModel.from_pretrained(model_name)
            self._processor = CLIPProcessor.from_pretrained(model_name)
        except Exception as exc:
            raise EncoderError(f"could not load weights {model_name!r}: {exc}") from exc
        self._torch = torch
        self._model.eval()
        self.dim = int(self._model.config.projection_dim)
        self.context_length = int(
            self._processor.tokenizer.model_max_length
        )

    def embed_images(self, frames) -> np.ndarray:
        batch = as_frame_batch(frames)
        inputs = self._processor(images=list(batch), return_tensors="pt")
        with self._torch.no_grad():
            feats = self._model.get_image_features(**inputs)
        return unit_rows(feats.cpu().numpy(), self.dim)

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim))
        inputs = self._processor(
            text=list(texts), return_tensors="pt", padding=True, truncation=True
        )
        with self._torch.no_grad():
            feats = self._model.get_text_features(**inputs)
        return unit_rows(feats.cpu().numpy(), self.dim)


def make_encoder(name: str, dim: int = 64) -> Encoder:
    """Encoder factory used by the CLI: 'hash' or 'clip[:model-name]'."""
    if name == "hash":
        return HashEncoder(dim=dim)
    if name == "clip" or name.startswith("clip:"):
        _, _, model = name.partition(":")
        return ClipEncoder(model) if model else ClipEncoder()
    raise InvalidInputError(f"unknown encoder {name!r}")
