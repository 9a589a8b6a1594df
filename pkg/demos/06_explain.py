"""
Explaining a prediction through its attributes
==============================================

Why did the classifier call this video "dribbling basketball"? The
attribute attribution report scores the video embedding against each of
the predicted class's generated attributes individually, so the class
decision decomposes into named visual cues. Reports render as markdown,
CSV, or an SVG bar chart.
"""

import tempfile
from pathlib import Path

import numpy as np

from vidzero import HashTextEmbedder, attribute_contributions, normalize
from vidzero.explain import FORMATS, build_report, emit_report

embedder = HashTextEmbedder(dim=64)

attributes = [
    "bouncing a ball with one hand",
    "running down a court",
    "wearing a jersey",
    "crowd in the background",
]

# a video embedding that genuinely contains the first two cues
rows = embedder.embed(attributes)
rng = np.random.default_rng(3)
video = normalize(0.9 * rows[0] + 0.5 * rows[1] + 0.2 * rng.standard_normal(64))

scored = attribute_contributions(video, attributes, embedder)
print("attribute contributions (sorted):")
for attr, score in scored:
    bar = "#" * max(0, int(40 * score))
    print(f"  {score:+.3f} {bar:40s} {attr}")

# the report object also records prediction context for the header
report = build_report(
    video_id="clip-42",
    class_name="dribbling basketball",
    video_vec=video,
    attributes=attributes,
    embedder=embedder,
    predicted_class="dribbling basketball",
    predicted_score=0.71,
)

out = Path(tempfile.mkdtemp())
for fmt in FORMATS:
    path = emit_report(report, fmt, out)
    print(f"wrote {fmt:9s} -> {path.name} ({path.stat().st_size} bytes)")
