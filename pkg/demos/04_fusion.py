"""
Description-guided visual enhancement
=====================================

Before a video is classified, embeddings of its own generated textual
descriptions are mixed into its visual embedding. Only the descriptions
most similar to the video survive a top-k filter, and the mixing weight
adapts to how well they agree with what is seen — a video whose
descriptions are off-topic keeps its original embedding.
"""

import numpy as np

from vidzero import (
    FusionConfig,
    HashTextEmbedder,
    cosine,
    enhance_from_texts,
    enhance_visual,
    filter_descriptions,
    normalize,
)

rng = np.random.default_rng(5)
embedder = HashTextEmbedder(dim=64)

# a synthetic "video" that genuinely looks like its first two descriptions
texts = [
    "a player dribbles a basketball down the court",
    "someone bounces a ball while running",
    "unrelated narration about the weather",
    "completely off topic text",
]
rows = embedder.embed(texts)
video = normalize(0.8 * rows[0] + 0.6 * rows[1] + 0.3 * rng.standard_normal(64))

# step 1: keep the k descriptions most similar to the video
kept = filter_descriptions(video, list(rows), k=2)
print("kept description indices:", kept)
for i in kept:
    print(f"  [{i}] cos={cosine(video, rows[i]):+.3f}  {texts[i]}")

# step 2: fuse — the adaptive weight is the cosine between the video and
# the (renormalized) mean of the surviving descriptions, clamped at 0
fused = enhance_from_texts("demo-video", video, texts, embedder)
print(f"\nadaptive weight used: {fused.beta2_used:.4f}")
print(f"fused vector norm:    {np.linalg.norm(fused.vector):.6f}")
print(f"cos(video, fused):    {cosine(video, fused.vector):.4f}")

# off-topic descriptions get a negative cosine, which clamps to zero and
# passes the original embedding through bit for bit
noise_video = normalize(-rows[2] - rows[3])
untouched = enhance_visual(noise_video, [rows[2], rows[3]])
print(f"\noff-topic weight: {untouched.beta2_used}")
print("vector unchanged: ",
      untouched.vector.tobytes() == np.asarray(noise_video).tobytes())

# a fixed weight of zero is an explicit baseline switch for ablations
off = FusionConfig(beta2_mode="fixed", beta2_value=0.0)
baseline = enhance_visual(video, list(rows), off)
print("fixed-zero passthrough:",
      baseline.vector.tobytes() == np.asarray(video).tobytes())

# the fused direction ignores the scale of its inputs: embeddings that
# differ only by a positive factor fuse to the same unit vector
rescaled = enhance_from_texts("demo-video", 3.7 * video, texts, embedder)
print(f"scale invariance: max|diff| = "
      f"{np.abs(rescaled.vector - fused.vector).max():.2e}")
