"""Pluggable text embedders behind one interface.

An embedder turns a batch of strings into unit-norm float64 rows of a fixed
dimension, deterministically per text. Real deployments point at an encoder
service over HTTP or at a store of precomputed rows; tests and --mock runs
use the hash embedder, which needs no model and no network. Trimming
over-long texts to an encoder's context window is the embedder's duty, not
the caller's.
"""
from __future__ import annotations

import hashlib
from typing import Mapping, Optional, Protocol, Sequence

import numpy as np
import requests

from .core import ZERO_NORM, as_vector
from .errors import EmbedderError, UnknownIdError
from .store import EmbeddingStore


class TextEmbedder(Protocol):
    dim: int

    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


def unit_rows(matrix, dim: int) -> np.ndarray:
    """Validate/renormalize embedder output to exact float64 unit rows."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.size == 0:
        return np.zeros((0, dim))
    if m.ndim != 2 or m.shape[1] != dim:
        raise EmbedderError(f"embedder returned shape {m.shape}, expected (*, {dim})")
    if not np.all(np.isfinite(m)):
        raise EmbedderError("embedder returned NaN or Inf")
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    if np.any(norms <= ZERO_NORM):
        raise EmbedderError("embedder returned a zero vector")
    return m / norms


class HashTextEmbedder:
    """Deterministic model-free embedder: sha256 of the text seeds an RNG
    that draws a Gaussian vector, renormalized to unit length.

    Unrelated texts land nearly orthogonal in high dimensions; identical
    texts always land identically. This gives hermetic pipelines real
    geometry to work with, with zero network and zero weights.
    """

    def __init__(self, dim: int = 64):
        if dim < 2:
            raise EmbedderError("hash embedder needs dim >= 2")
        self.dim = dim

    def _one(self, text: str) -> np.ndarray:
        digest = hashlib.sha256(text.encode("utf-8")).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        v = rng.standard_normal(self.dim)
        return v / np.linalg.norm(v)

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim))
        return unit_rows(np.stack([self._one(t) for t in texts]), self.dim)


class MappingTextEmbedder:
    """Embedder backed by an explicit text -> vector table.

    Used to construct scenarios where geometry is chosen by hand. Unknown
    texts fall through to ``fallback`` when given, otherwise raise.
    """

    def __init__(self, table: Mapping[str, Sequence[float]], fallback: Optional[TextEmbedder] = None):
        if not table and fallback is None:
            raise EmbedderError("mapping embedder needs a nonempty table or a fallback")
        some = next(iter(table.values())) if table else None
        self.dim = len(some) if some is not None else fallback.dim
        self._table = {
            text: as_vector(vec) / np.linalg.norm(as_vector(vec))
            for text, vec in table.items()
        }
        self._fallback = fallback
        if fallback is not None and fallback.dim != self.dim:
            raise EmbedderError(
                f"fallback dim {fallback.dim} != table dim {self.dim}"
            )

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim))
        rows = []
        for text in texts:
            if text in self._table:
                rows.append(self._table[text])
            elif self._fallback is not None:
                rows.append(self._fallback.embed([text])[0])
            else:
                raise EmbedderError(f"mapping embedder has no entry for {text!r}")
        return unit_rows(np.stack(rows), self.dim)


class StoreTextEmbedder:
    """Embedder serving precomputed rows from an EmbeddingStore keyed by
    the exact text string."""

    def __init__(self, store: EmbeddingStore):
        self.store = store
        self.dim = store.dim

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim))
        try:
            rows = np.stack([self.store.vector(t) for t in texts])
        except UnknownIdError as exc:
            raise EmbedderError(f"store embedder: {exc}") from exc
        return unit_rows(rows, self.dim)


class HttpTextEmbedder:
    """Client for the `/embed` HTTP contract.

    POST ``{endpoint}/embed`` with ``{"texts": […]}``; the service answers
    ``{"dim": D, "embeddings": [[…], …]}`` with unit-norm rows.
    """

    def __init__(self, endpoint_url: str, timeout: float = 60.0, session=None):
        self.endpoint_url = endpoint_url.rstrip("/")
        self.timeout = timeout
        self._session = session or requests.Session()
        self._dim: Optional[int] = None

    @property
    def dim(self) -> int:
        if self._dim is None:
            self._dim = int(self._post(["dimension probe"])["dim"])
        return self._dim

    def _post(self, texts: Sequence[str]) -> dict:
        try:
            resp = self._session.post(
                f"{self.endpoint_url}/embed",
                json={"texts": list(texts)},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise EmbedderError(f"embed service unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise EmbedderError(
                f"embed service returned HTTP {resp.status_code}: {resp.text[:200]}"
            )
        try:
            doc = resp.json()
            if not isinstance(doc["dim"], int) or not isinstance(
                doc["embeddings"], list
            ):
                raise TypeError("bad field types")
        except (ValueError, KeyError, TypeError) as exc:
            raise EmbedderError(f"malformed embed response: {exc}") from exc
        return doc

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim))
        doc = self._post(texts)
        if self._dim is None:
            self._dim = int(doc["dim"])
        if len(doc["embeddings"]) != len(texts):
            raise EmbedderError(
                f"asked for {len(texts)} embeddings, got {len(doc['embeddings'])}"
            )
        return unit_rows(np.asarray(doc["embeddings"], dtype=np.float64), self._dim)
