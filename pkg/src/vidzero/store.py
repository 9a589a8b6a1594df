"""Bit-exact on-disk formats: embedding stores, descriptor sets, hierarchies,
captions, video descriptions, predictions.

An embedding store is a directory holding ``manifest.json`` plus ``data.bin``
(row-major little-endian IEEE-754 binary32, no header, no padding). Ids live
only in the manifest; row order is the single source of alignment. Writers
emit to a temp directory and rename, so a crashed write never leaves a
half-store behind.
"""
from __future__ import annotations

import json
import os
import shutil
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .core import DescriptorSet, HierarchyMap, Provenance, align_hierarchy
from .errors import (
    CorruptStoreError,
    DuplicateIdError,
    InvalidInputError,
    RaggedMatrixError,
    SchemaError,
    UnknownIdError,
    UnsupportedVersionError,
)

STORE_VERSION = 1
STORE_DTYPE = "f32le"
MANIFEST_NAME = "manifest.json"
DATA_NAME = "data.bin"

# Stored rows are float32; unit-norm checks on them use a looser tolerance
# than the float64 in-memory math.
STORED_UNIT_TOL = 1e-4

_F32LE = np.dtype("<f4")


@dataclass(frozen=True)
class StoreManifest:
    version: int
    dim: int
    count: int
    dtype: str
    l2_normalized: bool
    ids: tuple[str, ...]


class EmbeddingStore:
    """An id-addressed collection of same-dimension embedding rows.

    ``matrix`` keeps the float32 payload exactly as stored, so a
    write -> read -> write cycle is byte-identical. Use :meth:`vector` for
    float64 copies suitable for math.
    """

    def __init__(self, manifest: StoreManifest, matrix: np.ndarray):
        if matrix.shape != (manifest.count, manifest.dim):
            raise CorruptStoreError(
                f"payload shape {matrix.shape} does not match manifest "
                f"({manifest.count}x{manifest.dim})"
            )
        self.manifest = manifest
        self.matrix = matrix
        self._row_of = {vid: i for i, vid in enumerate(manifest.ids)}
        if len(self._row_of) != manifest.count:
            raise DuplicateIdError("manifest ids are not unique")
        if manifest.l2_normalized and manifest.count:
            norms = np.linalg.norm(matrix.astype(np.float64), axis=1)
            worst = float(np.max(np.abs(norms - 1.0)))
            if worst > STORED_UNIT_TOL:
                raise CorruptStoreError(
                    f"store flagged l2_normalized but a row norm is off by {worst:.2e}"
                )

    @classmethod
    def from_arrays(
        cls, ids: Sequence[str], rows, l2_normalized: bool = False
    ) -> "EmbeddingStore":
        ids = [str(i) for i in ids]
        matrix = _coerce_rows(rows)
        if len(ids) != matrix.shape[0]:
            raise InvalidInputError(
                f"{len(ids)} ids for {matrix.shape[0]} rows"
            )
        if len(set(ids)) != len(ids):
            raise DuplicateIdError("ids are not unique")
        manifest = StoreManifest(
            version=STORE_VERSION,
            dim=int(matrix.shape[1]),
            count=int(matrix.shape[0]),
            dtype=STORE_DTYPE,
            l2_normalized=l2_normalized,
            ids=tuple(ids),
        )
        return cls(manifest, matrix)

    @property
    def ids(self) -> tuple[str, ...]:
        return self.manifest.ids

    @property
    def dim(self) -> int:
        return self.manifest.dim

    def __len__(self) -> int:
        return self.manifest.count

    def __contains__(self, vid: str) -> bool:
        return vid in self._row_of

    def index(self, vid: str) -> int:
        try:
            return self._row_of[vid]
        except KeyError:
            raise UnknownIdError(f"store has no id {vid!r}") from None

    def row(self, i: int) -> np.ndarray:
        return self.matrix[i]

    def vector(self, vid: str) -> np.ndarray:
        """Float64 copy of the row for ``vid``."""
        return self.matrix[self.index(vid)].astype(np.float64)

    def vectors(self) -> np.ndarray:
        """Float64 copy of the whole payload."""
        return self.matrix.astype(np.float64)


def _coerce_rows(rows) -> np.ndarray:
    if isinstance(rows, np.ndarray):
        if rows.ndim != 2:
            raise RaggedMatrixError(f"expected 2-D rows, got shape {rows.shape}")
        m = rows
    else:
        rows = list(rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise RaggedMatrixError("rows have differing lengths")
        m = np.asarray(rows, dtype=np.float64)
        if m.ndim != 2:
            raise RaggedMatrixError(f"expected 2-D rows, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m.astype(np.float64))):
        raise InvalidInputError("rows contain NaN or Inf")
    return np.ascontiguousarray(m, dtype=_F32LE)


def write_store(
    path, ids: Sequence[str], rows, l2_normalized: bool = False
) -> None:
    """Write an embedding store directory atomically.

    ``rows`` may be any rectangular float array-like; it is stored as
    little-endian float32. Re-reading reproduces the payload bit-exactly.
    """
    save_store(EmbeddingStore.from_arrays(ids, rows, l2_normalized), path)


def save_store(store: EmbeddingStore, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(
        tempfile.mkdtemp(prefix=f".{path.name}.tmp-", dir=path.parent)
    )
    try:
        manifest = {
            "version": store.manifest.version,
            "dim": store.manifest.dim,
            "count": store.manifest.count,
            "dtype": store.manifest.dtype,
            "l2_normalized": store.manifest.l2_normalized,
            "ids": list(store.manifest.ids),
        }
        (tmp / MANIFEST_NAME).write_text(
            json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
        )
        (tmp / DATA_NAME).write_bytes(
            np.ascontiguousarray(store.matrix, dtype=_F32LE).tobytes(order="C")
        )
        if path.exists():
            shutil.rmtree(path)
        os.replace(tmp, path)
    except Exception:
        shutil.rmtree(tmp, ignore_errors=True)
        raise


def read_store(path) -> EmbeddingStore:
    """Read and validate an embedding store directory."""
    path = Path(path)
    manifest_path = path / MANIFEST_NAME
    data_path = path / DATA_NAME
    if not manifest_path.is_file() or not data_path.is_file():
        raise CorruptStoreError(f"{path} is not an embedding store")
    raw = _load_json(manifest_path)

    version = raw.get("version")
    if version != STORE_VERSION:
        raise UnsupportedVersionError(f"store version {version!r}")
    if raw.get("dtype") != STORE_DTYPE:
        raise UnsupportedVersionError(f"store dtype {raw.get('dtype')!r}")
    dim, count = raw.get("dim"), raw.get("count")
    ids = raw.get("ids")
    if not isinstance(dim, int) or dim <= 0:
        raise CorruptStoreError("manifest dim must be a positive integer")
    if not isinstance(count, int) or count < 0:
        raise CorruptStoreError("manifest count must be a nonnegative integer")
    if not isinstance(ids, list) or len(ids) != count:
        raise CorruptStoreError("manifest ids do not match count")

    payload = data_path.read_bytes()
    expected = count * dim * 4
    if len(payload) != expected:
        raise CorruptStoreError(
            f"payload is {len(payload)} bytes, manifest implies {expected}"
        )
    matrix = np.frombuffer(payload, dtype=_F32LE).reshape(count, dim)
    manifest = StoreManifest(
        version=version,
        dim=dim,
        count=count,
        dtype=STORE_DTYPE,
        l2_normalized=bool(raw.get("l2_normalized", False)),
        ids=tuple(str(i) for i in ids),
    )
    return EmbeddingStore(manifest, matrix)


def _load_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorruptStoreError(f"{path}: {exc}") from exc


# -- descriptor sets --------------------------------------------------------


def write_descriptors(descriptors: Mapping[str, DescriptorSet], path) -> None:
    """JSON document holding every class's generated descriptors."""
    path = Path(path)
    sets = list(descriptors.values())
    doc = {
        "model": sets[0].provenance.model if sets else "",
        "temperature": sets[0].provenance.temperature if sets else 0.0,
        "template_version": sets[0].provenance.template_version if sets else 0,
        "backend": sets[0].provenance.backend if sets else "",
        "classes": {
            name: {
                "attributes": list(ds.attributes),
                "description": ds.description,
                "parent": ds.parent_context,
            }
            for name, ds in sorted(descriptors.items())
        },
    }
    _atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_descriptors(path) -> dict[str, DescriptorSet]:
    path = Path(path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise SchemaError(".", "expected a JSON object")
    classes = doc.get("classes")
    if not isinstance(classes, dict):
        raise SchemaError(".classes", "expected an object of class entries")
    provenance = Provenance(
        backend=str(doc.get("backend", "")),
        model=str(doc.get("model", "")),
        temperature=float(doc.get("temperature", 0.0)),
        template_version=int(doc.get("template_version", 0)),
    )
    out: dict[str, DescriptorSet] = {}
    for name, entry in classes.items():
        where = f".classes.{name}"
        if not isinstance(entry, dict):
            raise SchemaError(where, "expected an object")
        attributes = entry.get("attributes", [])
        if not isinstance(attributes, list) or any(
            not isinstance(a, str) for a in attributes
        ):
            raise SchemaError(f"{where}.attributes", "expected a list of strings")
        description = entry.get("description", "")
        if not isinstance(description, str):
            raise SchemaError(f"{where}.description", "expected a string")
        parent = entry.get("parent")
        if parent is not None and not isinstance(parent, str):
            raise SchemaError(f"{where}.parent", "expected a string or null")
        out[name] = DescriptorSet(
            class_name=name,
            attributes=attributes,
            description=description,
            parent_context=parent,
            provenance=provenance,
        )
    return out


# -- hierarchies ------------------------------------------------------------


def write_hierarchy(hierarchy: HierarchyMap, path) -> None:
    doc = {"parents": {p: list(names) for p, names in hierarchy.parents.items()}}
    _atomic_write_text(Path(path), json.dumps(doc, indent=2) + "\n")


def read_hierarchy(path, classes: Sequence[str]) -> HierarchyMap:
    """Load a (possibly hand-curated) hierarchy file and align it to the
    dataset's class list; unmatched classes land under "other"."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    parents = doc.get("parents") if isinstance(doc, dict) else None
    if not isinstance(parents, dict):
        raise SchemaError(".parents", "expected an object of parent -> class list")
    for parent, names in parents.items():
        if not isinstance(names, list) or any(not isinstance(n, str) for n in names):
            raise SchemaError(f".parents.{parent}", "expected a list of strings")
    return align_hierarchy(parents, classes)


# -- line-oriented sidecars ---------------------------------------------------


def write_jsonl(path, records: Iterable[Mapping]) -> None:
    path = Path(path)
    lines = [json.dumps(dict(r), sort_keys=True) for r in records]
    _atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def read_jsonl(path) -> list[dict]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise SchemaError(f"line {lineno}", str(exc)) from exc
    return out


def write_video_descriptions(path, descriptions: Mapping[str, Sequence[str]]) -> None:
    write_jsonl(
        path,
        (
            {"video_id": vid, "descriptions": list(descs)}
            for vid, descs in descriptions.items()
        ),
    )


def read_video_descriptions(path) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for i, rec in enumerate(read_jsonl(path)):
        vid = rec.get("video_id")
        descs = rec.get("descriptions")
        if not isinstance(vid, str) or not vid:
            raise SchemaError(f"line {i + 1}.video_id", "expected a nonempty string")
        if not isinstance(descs, list) or any(not isinstance(d, str) for d in descs):
            raise SchemaError(f"line {i + 1}.descriptions", "expected a list of strings")
        if vid in out:
            raise DuplicateIdError(f"video_id {vid!r} appears twice")
        out[vid] = descs
    return out


@dataclass(frozen=True)
class CaptionRecord:
    id: str
    caption: str
    generated: tuple[str, ...] = ()
    padded: bool = False


def write_captions(path, records: Iterable[CaptionRecord]) -> None:
    rows = []
    for r in records:
        row = {"id": r.id, "caption": r.caption, "generated": list(r.generated)}
        if r.padded:
            row["padded"] = True
        rows.append(row)
    write_jsonl(path, rows)


def read_captions(path) -> list[CaptionRecord]:
    out = []
    for i, rec in enumerate(read_jsonl(path)):
        cid, caption = rec.get("id"), rec.get("caption")
        generated = rec.get("generated", [])
        if not isinstance(cid, str) or not cid:
            raise SchemaError(f"line {i + 1}.id", "expected a nonempty string")
        if not isinstance(caption, str) or not caption:
            raise SchemaError(f"line {i + 1}.caption", "expected a nonempty string")
        if not isinstance(generated, list) or any(
            not isinstance(g, str) for g in generated
        ):
            raise SchemaError(f"line {i + 1}.generated", "expected a list of strings")
        out.append(
            CaptionRecord(
                id=cid,
                caption=caption,
                generated=tuple(generated),
                padded=bool(rec.get("padded", False)),
            )
        )
    return out


def write_predictions(path, predictions) -> None:
    """Predictions sidecar: one {video_id, predicted, score} object per line."""
    write_jsonl(
        path,
        (
            {
                "video_id": p.video_id,
                "predicted": p.predicted_class,
                "score": p.score,
            }
            for p in predictions
        ),
    )


def read_labels(path) -> dict[str, str]:
    """Labels sidecar: one {video_id, label} object per line."""
    out: dict[str, str] = {}
    for i, rec in enumerate(read_jsonl(path)):
        vid, label = rec.get("video_id"), rec.get("label")
        if not isinstance(vid, str) or not vid:
            raise SchemaError(f"line {i + 1}.video_id", "expected a nonempty string")
        if not isinstance(label, str) or not label:
            raise SchemaError(f"line {i + 1}.label", "expected a nonempty string")
        out[vid] = label
    return out


def read_class_list(path) -> list[str]:
    """One class name per line; blanks and #-comments ignored."""
    names = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            names.append(line)
    if not names:
        raise InvalidInputError(f"{path} lists no classes")
    return names


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
