"""Language-guided visual enhancement.

The query video's embedding is pulled toward the embeddings of its own
generated textual descriptions: fused = normalize(β₁·v + β₂·d̄), where d̄ is
the renormalized mean of the kept description embeddings and β₂ is the
video-description cosine (clamped at zero) or a fixed constant. In the
action-recognition setting only the top-k descriptions most similar to the
video are kept; retrieval and time evaluation fuse everything.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import FusionConfig, as_vector, cosine, cosine_many, normalize, renorm_mean
from .embedders import TextEmbedder
from .errors import EmptyListError, InvalidInputError, ZeroVectorError


@dataclass(frozen=True)
class EnhancedVisual:
    """A fused query-video vector plus how it was produced."""

    video_id: str
    vector: np.ndarray
    beta2_used: float
    descriptions_kept: tuple[int, ...] = ()


def filter_descriptions(video_emb, desc_embs, k: int) -> list[int]:
    """Indices of the k descriptions most similar to the video.

    Ties break toward the lower index; the result is sorted ascending.
    k >= len keeps everything.
    """
    video_emb = as_vector(video_emb)
    if k <= 0:
        raise InvalidInputError(f"filter k must be positive, got {k}")
    n = len(desc_embs)
    if n == 0:
        raise EmptyListError("no description embeddings to filter")
    if k >= n:
        return list(range(n))
    sims = cosine_many(video_emb, np.stack([as_vector(d) for d in desc_embs]))
    # lexsort: secondary key first. Primary: descending similarity;
    # secondary: ascending index (stable tie rule).
    order = np.lexsort((np.arange(n), -sims))
    return sorted(int(i) for i in order[:k])


def beta2(video_emb, desc_emb, config: FusionConfig) -> float:
    """The description weight for one (video, description) pair."""
    if config.beta2_mode == "fixed":
        return config.beta2_value
    c = cosine(video_emb, desc_emb)
    if config.clamp_negative:
        return max(0.0, c)
    return c


def enhance_visual(
    video_emb,
    desc_embs: Sequence,
    config: FusionConfig = FusionConfig(),
    video_id: str = "",
    kept: Optional[Sequence[int]] = None,
) -> EnhancedVisual:
    """Fuse a video embedding with its (already filtered) description
    embeddings.

    No descriptions, or a weight of exactly zero, passes the video
    embedding through bit-for-bit, so a β₂=0 run reproduces the plain
    pipeline exactly. ``kept`` only annotates which original indices the
    caller selected.
    """
    video_emb = as_vector(video_emb)
    kept = tuple(int(i) for i in kept) if kept is not None else tuple(
        range(len(desc_embs))
    )
    if len(desc_embs) == 0:
        return _passthrough(video_id, video_emb, config, ())

    # Normalizing every input first makes the fused *direction* invariant
    # under positive rescaling of the video or any description.
    rows = [normalize(as_vector(d)) for d in desc_embs]
    if config.beta2_per_description:
        weights = [beta2(video_emb, d, config) for d in rows]
        b2 = float(np.mean(weights))
        if all(w == 0.0 for w in weights):
            return _passthrough(video_id, video_emb, config, kept)
        mixed = config.beta1 * normalize(video_emb)
        for w, d in zip(weights, rows):
            mixed = mixed + (w / len(rows)) * d
        return EnhancedVisual(video_id, normalize(mixed), b2, kept)

    d_bar = rows[0] if len(rows) == 1 else renorm_mean(rows)
    b2 = beta2(video_emb, d_bar, config)
    if b2 == 0.0:
        return _passthrough(video_id, video_emb, config, kept)
    fused = normalize(config.beta1 * normalize(video_emb) + b2 * d_bar)
    return EnhancedVisual(video_id, fused, b2, kept)


def _passthrough(video_id, video_emb, config, kept) -> EnhancedVisual:
    if config.beta1 == 0.0:
        raise ZeroVectorError("beta1 and beta2 are both zero; nothing to fuse")
    return EnhancedVisual(video_id, video_emb, 0.0, kept)


def enhance_from_texts(
    video_id: str,
    video_emb,
    descriptions: Sequence[str],
    embedder: TextEmbedder,
    config: FusionConfig = FusionConfig(),
    apply_filter: Optional[bool] = None,
) -> EnhancedVisual:
    """Embed a video's description texts, filter them (action-recognition
    mode), and fuse. ``apply_filter`` defaults to the config flag."""
    descriptions = [d for d in descriptions if d and d.strip()]
    video_emb = as_vector(video_emb)
    if not descriptions:
        return EnhancedVisual(video_id, video_emb, 0.0, ())
    matrix = embedder.embed(descriptions)
    if apply_filter is None:
        apply_filter = config.filtering_enabled
    if apply_filter:
        kept = filter_descriptions(video_emb, list(matrix), config.filter_k)
    else:
        kept = list(range(len(descriptions)))
    return enhance_visual(
        video_emb, [matrix[i] for i in kept], config, video_id=video_id, kept=kept
    )
