"""
The vp command line, end to end
===============================

The same pipeline the library exposes is scriptable as four shell steps:
generate class descriptors, build the classifier, fuse video embeddings
with their descriptions, classify. This walkthrough drives the real CLI
as subprocesses over the bundled synthetic dataset (all hermetic: mock
chat backend, hash text embedder), then runs the retrieval and temporal
scorers and an ablation grid the same way.

It reproduces the dataset's three-tier story: base prompts alone score
0.40, descriptor enrichment lifts it to 0.60, fusion to 0.80.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

DATASET = Path(__file__).resolve().parent.parent / "fixtures" / "synthetic"
WORK = Path(tempfile.mkdtemp())


def vp(*args):
    cmd = [sys.executable, "-m", "vidzero.cli"] + [str(a) for a in args]
    print(f"$ vp {' '.join(str(a) for a in args)}")
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(f"step failed:\n{proc.stderr}")
    for line in proc.stdout.strip().splitlines():
        print(f"  {line}")
    return proc


# 1. class descriptors from the hermetic mock backend
vp("descriptors", "gen", "--mock",
   "--classes", DATASET / "classes.txt",
   "--out", WORK / "descriptors")

# 2. classifier matrix: base prompt + attributes + description per class,
#    with parent-context prompts from the dataset hierarchy
vp("classifier", "build",
   "--classes", DATASET / "classes.txt",
   "--descriptors", WORK / "descriptors" / "descriptors.json",
   "--hierarchy", DATASET / "hierarchy.json",
   "--out", WORK / "classifier")

# 3. fuse each video with its own descriptions
vp("fuse",
   "--videos", DATASET / "videos",
   "--descriptions", DATASET / "descriptions.jsonl",
   "--out", WORK / "fused")

# 4. classify the fused embeddings and score against labels
vp("classify",
   "--fused", WORK / "fused" / "fused",
   "--classifier", WORK / "classifier" / "classifier",
   "--labels", DATASET / "labels.jsonl",
   "--out", WORK / "full")

# the baseline comparison: same classifier, raw (unfused) videos
vp("classify",
   "--fused", DATASET / "videos",
   "--classifier", WORK / "classifier" / "classifier",
   "--labels", DATASET / "labels.jsonl",
   "--out", WORK / "nofuse")

# and the plain zero-shot floor: base prompts only, raw videos
vp("classifier", "build",
   "--classes", DATASET / "classes.txt",
   "--components", "base",
   "--out", WORK / "plainclf")
vp("classify",
   "--fused", DATASET / "videos",
   "--classifier", WORK / "plainclf" / "classifier",
   "--labels", DATASET / "labels.jsonl",
   "--out", WORK / "plain")

print("\nthree-tier accuracy story:")
for tier, outdir in [("base prompts only", "plain"),
                     ("+ descriptor enrichment", "nofuse"),
                     ("+ description fusion", "full")]:
    metrics = json.loads((WORK / outdir / "metrics.json").read_text())
    print(f"  {tier:26s} top-1 = {metrics['top1_accuracy']:.2f}")

# 5. the other two evaluation surfaces drive the same stores: temporal
#    ordering over (video, attractor, distractor) triples, and text-video
#    retrieval from the dataset's captions (identity pairing by id)
vp("time-eval",
   "--videos", DATASET / "videos",
   "--attractors", DATASET / "attractors",
   "--distractors", DATASET / "distractors",
   "--out", WORK / "time")

vp("retrieve",
   "--videos", DATASET / "videos",
   "--captions", DATASET / "captions.jsonl",
   "--out", WORK / "retr")
