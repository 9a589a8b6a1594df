"""Enriched class representations and retrieval-side caption representations.

A class row starts from the photo prompt, optionally rewritten into its
high-level context form, and is averaged with the embeddings of the class's
generated attribute list (one comma-joined string) and description. Rows are
unit-norm, aligned with the class list by index.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import (
    OTHER_PARENT,
    ClassEntry,
    DescriptorSet,
    HierarchyMap,
    make_class_entries,
    renorm_mean,
)
from .embedders import TextEmbedder
from .errors import (
    EmptyClassifierError,
    InvalidClassNameError,
    InvalidInputError,
    UnknownIdError,
)
from .genclient import render_prompt
from .store import EmbeddingStore, read_store, save_store

COMPONENTS = ("base", "context", "attributes", "description")

META_NAME = "classifier_meta.json"


def base_prompt(class_name: str) -> str:
    """The plain zero-shot photo prompt for a class."""
    if not class_name or not class_name.strip():
        raise InvalidClassNameError("class name must be nonempty")
    return render_prompt("base_prompt", {"class-name": class_name.strip()})


def context_prompt(class_name: str, parent: str) -> str:
    """The photo prompt rewritten with the class's high-level context.

    Callers must not pass the "other" bucket; classes there keep the base
    prompt (the build step enforces this).
    """
    if not class_name or not class_name.strip():
        raise InvalidClassNameError("class name must be nonempty")
    if not parent or not parent.strip() or parent.strip().casefold() == OTHER_PARENT:
        raise InvalidInputError(
            f'context prompt needs a real parent, got {parent!r}'
        )
    return render_prompt(
        "context_prompt",
        {"class-name": class_name.strip(), "parent": parent.strip()},
    )


def validate_components(components) -> tuple[str, ...]:
    """Normalize a component selection to canonical order."""
    chosen = set(components)
    unknown = chosen.difference(COMPONENTS)
    if unknown:
        raise InvalidInputError(f"unknown components {sorted(unknown)}")
    if not chosen:
        raise InvalidInputError("component set must be nonempty")
    return tuple(c for c in COMPONENTS if c in chosen)


def component_texts(
    class_name: str,
    descriptors: Optional[DescriptorSet],
    hierarchy: Optional[HierarchyMap],
    components: Sequence[str],
) -> tuple[dict[str, str], bool]:
    """Texts to embed for one class, keyed by component, plus a fallback flag.

    The context prompt replaces the base prompt when the class has a real
    parent (anything but "other"); otherwise context falls back to base.
    Attributes and description drop out silently when the descriptor set
    lacks them. If everything drops, the base prompt stands in and the
    fallback flag is set.
    """
    chosen = validate_components(components)
    texts: dict[str, str] = {}

    parent = hierarchy.parent_of(class_name) if hierarchy is not None else None
    if parent is not None and parent.casefold() == OTHER_PARENT:
        parent = None
    if "context" in chosen and parent is not None:
        texts["context"] = context_prompt(class_name, parent)
    elif "base" in chosen or "context" in chosen:
        texts["base"] = base_prompt(class_name)

    if descriptors is not None:
        if "attributes" in chosen and descriptors.attributes:
            texts["attributes"] = ", ".join(descriptors.attributes)
        if "description" in chosen and descriptors.description:
            texts["description"] = descriptors.description

    fell_back = not texts
    if fell_back:
        texts["base"] = base_prompt(class_name)
    return texts, fell_back


@dataclass(frozen=True)
class ClassRepresentation:
    class_name: str
    vector: np.ndarray
    components_used: tuple[str, ...]
    fell_back: bool


def _mean_or_single(rows: Sequence[np.ndarray]) -> np.ndarray:
    # A single component passes through untouched so that, e.g., a
    # base-only build equals the plain zero-shot classifier bit for bit.
    if len(rows) == 1:
        return rows[0]
    return renorm_mean(rows)


def build_class_representation(
    class_name: str,
    descriptors: Optional[DescriptorSet],
    hierarchy: Optional[HierarchyMap],
    components: Sequence[str],
    embedder: TextEmbedder,
) -> ClassRepresentation:
    """One enriched class row: renormalized mean over the embeddings of the
    enabled, available component texts."""
    texts, fell_back = component_texts(class_name, descriptors, hierarchy, components)
    order = [c for c in COMPONENTS if c in texts]
    matrix = embedder.embed([texts[c] for c in order])
    return ClassRepresentation(
        class_name=class_name,
        vector=_mean_or_single([matrix[i] for i in range(len(order))]),
        components_used=tuple(order),
        fell_back=fell_back,
    )


@dataclass
class ClassifierMatrix:
    """Per-class rows f̃_T, row i belonging to classes[i]."""

    classes: list[ClassEntry]
    rows: np.ndarray
    components: tuple[str, ...]
    per_class: list[ClassRepresentation] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.classes) == 0:
            raise EmptyClassifierError("classifier has no classes")
        if self.rows.shape[0] != len(self.classes):
            raise InvalidInputError(
                f"{self.rows.shape[0]} rows for {len(self.classes)} classes"
            )

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])

    def class_names(self) -> list[str]:
        return [c.name for c in self.classes]

    def row_for(self, class_name: str) -> np.ndarray:
        for c in self.classes:
            if c.name == class_name:
                return self.rows[c.index]
        raise UnknownIdError(f"classifier has no class {class_name!r}")


def build_classifier(
    classes: Sequence[str],
    descriptors_map: Optional[Mapping[str, DescriptorSet]],
    hierarchy: Optional[HierarchyMap],
    components: Sequence[str],
    embedder: TextEmbedder,
) -> ClassifierMatrix:
    """Build all class rows. Deterministic for fixed inputs; classes whose
    descriptors are missing fall back per component."""
    if not classes:
        raise EmptyClassifierError("classifier needs at least one class")
    entries = make_class_entries(classes)
    chosen = validate_components(components)
    descriptors_map = descriptors_map or {}

    reps = [
        build_class_representation(
            e.name, descriptors_map.get(e.name), hierarchy, chosen, embedder
        )
        for e in entries
    ]
    rows = np.stack([r.vector for r in reps])
    fallbacks = [r.class_name for r in reps if r.fell_back]
    return ClassifierMatrix(
        classes=entries,
        rows=rows,
        components=chosen,
        per_class=reps,
        provenance={
            "components": list(chosen),
            "dim": int(rows.shape[1]),
            "hierarchy": hierarchy is not None,
            "fallback_classes": fallbacks,
        },
    )


def build_caption_representation(
    caption: str, generated: Sequence[str], embedder: TextEmbedder
) -> np.ndarray:
    """Retrieval-side text vector: mean over the original caption and its
    generated variants, renormalized. No variants -> the caption embedding
    itself, untouched."""
    if not caption or not caption.strip():
        raise InvalidInputError("caption must be nonempty")
    texts = [caption] + [g for g in generated if g and g.strip()]
    matrix = embedder.embed(texts)
    return _mean_or_single([matrix[i] for i in range(len(texts))])


def save_classifier(matrix: ClassifierMatrix, path) -> None:
    """Persist as an embedding store (ids = class names, order = index)
    plus a metadata sidecar inside the store directory."""
    save_store(
        EmbeddingStore.from_arrays(matrix.class_names(), matrix.rows, l2_normalized=True),
        path,
    )
    meta = {
        "components": list(matrix.components),
        "provenance": matrix.provenance,
        "per_class": [
            {
                "class": r.class_name,
                "components_used": list(r.components_used),
                "fell_back": r.fell_back,
            }
            for r in matrix.per_class
        ],
    }
    (Path(path) / META_NAME).write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_classifier(path) -> ClassifierMatrix:
    store = read_store(path)
    meta_path = Path(path) / META_NAME
    meta = (
        json.loads(meta_path.read_text(encoding="utf-8"))
        if meta_path.is_file()
        else {}
    )
    components = tuple(meta.get("components", ["base"]))
    return ClassifierMatrix(
        classes=make_class_entries(store.ids),
        rows=store.vectors(),
        components=components,
        per_class=[],
        provenance=meta.get("provenance", {}),
    )
