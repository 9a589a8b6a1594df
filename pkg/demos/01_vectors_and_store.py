"""
Vectors and the on-disk embedding store
=======================================

The geometry everything else builds on: cosine similarity between unit
vectors, the renormalized mean that averages text embeddings, and the
little binary store format (manifest.json + data.bin) used to pass
embedding matrices between pipeline stages.
"""

import tempfile
from pathlib import Path

import numpy as np

from vidzero import cosine, normalize, renorm_mean, read_store, write_store

rng = np.random.default_rng(0)

# two random directions in a 64-dim space are nearly orthogonal
a = normalize(rng.standard_normal(64))
b = normalize(rng.standard_normal(64))
print(f"cosine of two random unit vectors: {cosine(a, b):+.4f}")
print(f"cosine of a vector with itself:    {cosine(a, a):+.4f}")

# the renormalized mean is the way several text embeddings become one
# class representation: average, then scale back onto the unit sphere
blend = renorm_mean([a, b])
print(f"renorm-mean norm: {np.linalg.norm(blend):.6f}")
print(f"cosine(blend, a): {cosine(blend, a):+.4f} (halfway between a and b)")

# --- the store: ids + float32 rows, written atomically -------------------
out = Path(tempfile.mkdtemp()) / "toy-store"
ids = [f"video-{i:02d}" for i in range(5)]
matrix = rng.standard_normal((5, 64))
write_store(out, ids, matrix)
print(f"\nwrote {out}:")
for name in sorted(p.name for p in out.iterdir()):
    print(f"  {name}  ({(out / name).stat().st_size} bytes)")

# rows are stored as float32 and decode to float64 for computation
st = read_store(out)
print(f"ids: {st.ids}")
print(f"decoded dtype: {st.vectors().dtype}, dim {st.dim}")

# the payload is raw little-endian IEEE-754 binary32, row-major: the
# first 4 bytes of a row holding 1.0 are 00 00 80 3f
tiny = Path(tempfile.mkdtemp()) / "one"
write_store(tiny, ["unit"], np.array([[1.0, 0.0, 0.0]]))
payload = (tiny / "data.bin").read_bytes()
print(f"\n1.0 on disk: {payload[:4].hex(' ')}")
