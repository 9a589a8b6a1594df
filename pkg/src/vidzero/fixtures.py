"""Deterministic synthetic datasets for hermetic runs, demos, and tests.

Everything is derived from the hash embedder and one seeded RNG, so two
builds with the same arguments produce byte-identical artifacts. Video
embeddings sit near their class's photo-prompt embedding with controlled
noise; each video carries one description that echoes the text the mock
backend will attach to its class (so description fusion has real signal)
plus one unrelated description.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .classifier import base_prompt
from .core import HierarchyMap, normalize
from .embedders import HashTextEmbedder
from .store import write_hierarchy, write_jsonl, write_store

DEFAULT_CLASSES = (
    "bouncing ball",
    "folding paper",
    "pouring water",
    "spinning top",
)


def make_synthetic_dataset(
    out_dir,
    dim: int = 64,
    per_class: int = 5,
    seed: int = 7,
    classes: Sequence[str] = DEFAULT_CLASSES,
    noise: float = 0.7,
) -> Path:
    """Build the full fixture directory; returns its path.

    Layout: classes.txt, videos/ (embedding store), labels.jsonl,
    descriptions.jsonl, captions.jsonl, attractors/ + distractors/
    (time-consistency stores), hierarchy.json.

    Each video mixes a weak photo-prompt component with stronger components
    of the texts the mock backend generates for its class, plus Gaussian
    noise — so a base-prompt-only classifier struggles, descriptor
    enrichment helps, and description fusion helps again on top.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    embedder = HashTextEmbedder(dim)

    (out_dir / "classes.txt").write_text(
        "".join(f"{c}\n" for c in classes), encoding="utf-8"
    )

    anchors = embedder.embed([base_prompt(c) for c in classes])
    attr_vecs = embedder.embed([f"mock-attr-1:{c}" for c in classes])
    desc_vecs = embedder.embed([f"mock-desc:{c}" for c in classes])

    ids, rows, labels, descriptions, captions = [], [], [], [], []
    attractor_rows, distractor_rows = [], []
    for ci, cls in enumerate(classes):
        for j in range(per_class):
            vid = f"v{ci * per_class + j:03d}"
            vec = normalize(
                0.5 * anchors[ci]
                + 0.6 * attr_vecs[ci]
                + 0.5 * desc_vecs[ci]
                + noise * rng.standard_normal(dim)
            )
            ids.append(vid)
            rows.append(vec)
            labels.append({"video_id": vid, "label": cls})
            descriptions.append(
                {
                    "video_id": vid,
                    "descriptions": [
                        f"mock-attr-1:{cls}",
                        f"mock-desc:{cls}",
                        f"unrelated background chatter {vid}",
                        f"noise phrase {ci}-{j}",
                    ],
                }
            )
            captions.append(
                {
                    "id": vid,
                    "caption": f"a person performs {cls}, take {j}",
                    "generated": [],
                }
            )
            attractor_rows.append(normalize(vec + 0.3 * rng.standard_normal(dim)))
            distractor_rows.append(normalize(rng.standard_normal(dim)))

    write_store(out_dir / "videos", ids, rows, l2_normalized=True)
    write_store(out_dir / "attractors", ids, attractor_rows, l2_normalized=True)
    write_store(out_dir / "distractors", ids, distractor_rows, l2_normalized=True)
    write_jsonl(out_dir / "labels.jsonl", labels)
    write_jsonl(out_dir / "descriptions.jsonl", descriptions)
    write_jsonl(out_dir / "captions.jsonl", captions)

    half = max(1, len(classes) // 2)
    write_hierarchy(
        HierarchyMap(
            parents={
                "object manipulation": tuple(classes[:half]),
                "other": tuple(classes[half:]),
            }
        ),
        out_dir / "hierarchy.json",
    )
    manifest = {
        "dim": dim,
        "per_class": per_class,
        "seed": seed,
        "classes": list(classes),
        "noise": noise,
    }
    (out_dir / "fixture.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return out_dir
