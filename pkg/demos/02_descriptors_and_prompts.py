"""
Generating class descriptors with a chat backend
================================================

Each action class gets a small text dossier — a list of visual attributes
and a one-paragraph description — produced by prompting a chat model.
This demo runs the hermetic mock backend (deterministic canned replies)
through the same code path the HTTP backend uses, including the on-disk
response cache, and replays a recorded real-model response from the
bundled fixture file.
"""

import tempfile
from pathlib import Path

from vidzero import (
    DiskCache,
    FixtureBackend,
    MockBackend,
    generate_descriptor_set,
    generate_video_descriptions,
    render_prompt,
)

# the prompt texts are frozen; bindings fill the braces
print("attribute prompt for 'archery':")
print(" ", render_prompt("attributes", {"class-name": "archery"}))
print("description prompt for 'archery':")
print(" ", render_prompt("description", {"class-name": "archery"}))

# --- mock backend: deterministic, no network ------------------------------
backend = MockBackend()
cache = DiskCache(Path(tempfile.mkdtemp()) / "cache")

dset = generate_descriptor_set("archery", backend, cache)
print("\nmock descriptor set for 'archery':")
print("  attributes: ", dset.attributes)
print("  description:", dset.description)

# a second call is served from the cache, not the backend
generate_descriptor_set("archery", backend, cache)
print(f"cache after two runs: hits={cache.hits} misses={cache.misses}")

# per-video descriptions come from the same machinery, keyed by video id
descs = generate_video_descriptions("clip-007", backend, cache, n=3)
print("\nmock video descriptions for clip-007:")
for d in descs:
    print("  -", d)

# --- replaying recorded real-model responses ------------------------------
# fixtures/llm/recorded.jsonl stores responses keyed by prompt digest, so
# pipelines can rerun against genuine model output with zero network
recorded = Path(__file__).resolve().parent.parent / "fixtures/llm/recorded.jsonl"
replay = FixtureBackend(recorded)
hopscotch = generate_descriptor_set("hopscotch", replay)
print("\nrecorded descriptor set for 'hopscotch':")
print("  attributes: ", hopscotch.attributes)
print("  description:", hopscotch.description[:72] + "...")
