"""Embedding-extraction sidecar for the zero-shot video engine.

Turns raw videos (sparse frame sampling + frame-embedding mean pooling)
and texts (context-window truncation) into the engine's binary embedding
stores, and optionally serves the /embed HTTP contract. The sidecar holds
no pipeline logic — it only produces and serves embeddings.
"""

__version__ = "0.1.0"

from .encoders import ClipEncoder, Encoder, HashEncoder, make_encoder
from .errors import DecodeError, EncodeError, EncoderError, InvalidInputError
from .extract import (
    DEFAULT_N_FRAMES,
    ExtractionJob,
    VideoEntry,
    embed_texts_to_store,
    extract_video_embedding,
    load_frames,
    read_manifest,
    run_video_job,
)
from .sampling import sample_frame_indices
from .service import make_server, serve_embed
from .store_io import write_store

__all__ = [
    "__version__",
    "ClipEncoder",
    "DecodeError",
    "DEFAULT_N_FRAMES",
    "EncodeError",
    "Encoder",
    "EncoderError",
    "ExtractionJob",
    "HashEncoder",
    "InvalidInputError",
    "VideoEntry",
    "embed_texts_to_store",
    "extract_video_embedding",
    "load_frames",
    "make_encoder",
    "make_server",
    "read_manifest",
    "run_video_job",
    "sample_frame_indices",
    "serve_embed",
    "write_store",
]
