"""Domain types and deterministic vector math shared by every other module.

All in-memory math runs in float64 regardless of how vectors are stored on
disk, so that results are stable enough to compare against independent
oracles. Directions are the only meaningful content of an embedding here;
every aggregation therefore ends in a renormalization to unit length.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import (
    DimMismatchError,
    DuplicateAssignmentError,
    EmptyListError,
    InvalidInputError,
    ZeroVectorError,
)

# Below this, a norm is treated as zero (direction undefined).
ZERO_NORM = 1e-12

# Tolerance for "is this vector unit-norm" checks on float64 data.
UNIT_TOL = 1e-5

OTHER_PARENT = "other"


def as_vector(values) -> np.ndarray:
    """Coerce to a finite 1-D float64 vector."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise InvalidInputError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("vector contains NaN or Inf")
    return v


def as_matrix(rows) -> np.ndarray:
    """Coerce to a finite 2-D float64 matrix; ragged input raises."""
    from .errors import RaggedMatrixError

    try:
        m = np.asarray(rows, dtype=np.float64)
    except ValueError as exc:
        raise RaggedMatrixError(str(exc)) from exc
    if m.ndim != 2:
        raise RaggedMatrixError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix contains NaN or Inf")
    return m


def is_unit(v: np.ndarray, tol: float = UNIT_TOL) -> bool:
    return abs(float(np.linalg.norm(v)) - 1.0) <= tol


def cosine(a, b) -> float:
    """Cosine similarity of two vectors, clipped into [-1, 1].

    Raises DimMismatchError on different dimensions and ZeroVectorError if
    either operand has (near-)zero norm.
    """
    va, vb = as_vector(a), as_vector(b)
    if va.shape[0] != vb.shape[0]:
        raise DimMismatchError(f"dim {va.shape[0]} vs {vb.shape[0]}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na <= ZERO_NORM or nb <= ZERO_NORM:
        raise ZeroVectorError("cosine of a zero vector is undefined")
    return float(np.clip(np.dot(va, vb) / (na * nb), -1.0, 1.0))


def cosine_many(query, rows) -> np.ndarray:
    """Cosine similarity of one query against every row of a matrix."""
    q = as_vector(query)
    m = as_matrix(rows)
    if m.shape[1] != q.shape[0]:
        raise DimMismatchError(f"dim {m.shape[1]} vs {q.shape[0]}")
    qn = float(np.linalg.norm(q))
    rn = np.linalg.norm(m, axis=1)
    if qn <= ZERO_NORM or np.any(rn <= ZERO_NORM):
        raise ZeroVectorError("cosine of a zero vector is undefined")
    return np.clip((m @ q) / (rn * qn), -1.0, 1.0)


def normalize(v) -> np.ndarray:
    """Scale to unit L2 norm, preserving direction."""
    vv = as_vector(v)
    n = float(np.linalg.norm(vv))
    if n <= ZERO_NORM:
        raise ZeroVectorError("cannot normalize a zero vector")
    return vv / n


def renorm_mean(vectors: Sequence) -> np.ndarray:
    """Arithmetic mean of the vectors, renormalized to unit length.

    The mean is accumulated in float64. Exact cancellation (a zero mean)
    is a hard error, never silently replaced.
    """
    if len(vectors) == 0:
        raise EmptyListError("renorm_mean of zero vectors")
    m = as_matrix(np.stack([as_vector(v) for v in vectors]))
    return normalize(m.mean(axis=0))


def canonical_name(name: str) -> str:
    """Case- and separator-insensitive key for class-name matching."""
    return re.sub(r"[^0-9a-z]", "", name.casefold())


# -- domain records --------------------------------------------------------


@dataclass(frozen=True)
class ClassEntry:
    name: str
    index: int


@dataclass(frozen=True)
class VideoRecord:
    """A query video: its id, embedding, and any generated descriptions."""

    id: str
    embedding: np.ndarray
    descriptions: tuple[str, ...] = ()
    label: Optional[str] = None

    def __post_init__(self):
        if not self.id:
            raise InvalidInputError("video id must be nonempty")


@dataclass(frozen=True)
class Provenance:
    """Where a generated artifact came from."""

    backend: str = ""
    model: str = ""
    temperature: float = 0.0
    template_version: int = 0


@dataclass
class DescriptorSet:
    """Per-class generated descriptors: attribute phrases, a how-it-is-done
    description, and optionally the high-level parent context."""

    class_name: str
    attributes: list[str] = field(default_factory=list)
    description: str = ""
    parent_context: Optional[str] = None
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self):
        cleaned = [a.strip() for a in self.attributes]
        if any(not a for a in cleaned):
            raise InvalidInputError(
                f"descriptor set for {self.class_name!r} has an empty attribute"
            )
        self.attributes = cleaned


def make_class_entries(names: Sequence[str]) -> list[ClassEntry]:
    """Contiguously indexed entries; duplicate names (after trimming) raise."""
    entries = []
    seen = set()
    for i, name in enumerate(names):
        name = name.strip()
        if not name:
            raise InvalidInputError(f"class {i} has an empty name")
        if name in seen:
            raise InvalidInputError(f"duplicate class name {name!r}")
        seen.add(name)
        entries.append(ClassEntry(name=name, index=i))
    return entries


@dataclass(frozen=True)
class HierarchyMap:
    """Grouping of every dataset class under exactly one parent context.

    ``parents`` maps a parent-context string to the classes under it. An
    ``"other"`` parent always exists, possibly empty; classes under it take
    no context prompt.
    """

    parents: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        if OTHER_PARENT not in self.parents:
            raise InvalidInputError('hierarchy must contain an "other" parent')
        seen: dict[str, str] = {}
        for parent, names in self.parents.items():
            for name in names:
                if name in seen:
                    raise DuplicateAssignmentError(
                        f"{name!r} assigned to both {seen[name]!r} and {parent!r}"
                    )
                seen[name] = parent

    def parent_of(self, class_name: str) -> Optional[str]:
        key = canonical_name(class_name)
        for parent, names in self.parents.items():
            for name in names:
                if canonical_name(name) == key:
                    return parent
        return None

    def class_names(self) -> list[str]:
        return [name for names in self.parents.values() for name in names]


def align_hierarchy(
    assignments: Mapping[str, Sequence[str]], classes: Sequence[str]
) -> HierarchyMap:
    """Build a valid HierarchyMap from raw parent->children assignments.

    Matching against ``classes`` is case- and separator-insensitive; raw
    names that match nothing are dropped; dataset classes that match
    nothing are assigned to "other". A dataset class matched under two
    different parents raises DuplicateAssignmentError.
    """
    canon_to_class: dict[str, str] = {}
    for c in classes:
        key = canonical_name(c)
        if key in canon_to_class and canon_to_class[key] != c:
            raise InvalidInputError(
                f"classes {canon_to_class[key]!r} and {c!r} collide under canonical matching"
            )
        canon_to_class[key] = c

    assigned: dict[str, str] = {}  # dataset class -> parent
    parent_order: list[str] = []
    grouped: dict[str, list[str]] = {}
    for raw_parent, children in assignments.items():
        parent = raw_parent.strip().casefold()
        if parent in ("others", OTHER_PARENT):
            parent = OTHER_PARENT
        if not parent:
            continue
        if parent not in grouped:
            grouped[parent] = []
            parent_order.append(parent)
        for raw in children:
            match = canon_to_class.get(canonical_name(raw))
            if match is None:
                continue  # stray name outside the dataset, e.g. a typo
            if match in assigned:
                if assigned[match] != parent:
                    raise DuplicateAssignmentError(
                        f"{match!r} assigned to both {assigned[match]!r} and {parent!r}"
                    )
                continue
            assigned[match] = parent
            grouped[parent].append(match)

    if OTHER_PARENT not in grouped:
        grouped[OTHER_PARENT] = []
        parent_order.append(OTHER_PARENT)
    for c in classes:
        if c not in assigned:
            grouped[OTHER_PARENT].append(c)

    return HierarchyMap(
        parents={p: tuple(grouped[p]) for p in parent_order}
    )


# -- fusion configuration ---------------------------------------------------


@dataclass(frozen=True)
class FusionConfig:
    """Weights and filtering policy for description-guided enhancement.

    ``beta2_mode`` is either "cosine" (weight = similarity between the query
    video and its description embedding, clamped at zero by default) or
    "fixed" with ``beta2_value`` in [0, 1]. ``beta2_per_description``
    switches from one weight against the mean description to one weight per
    description; ablations sweep it.
    """

    beta1: float = 1.0
    beta2_mode: str = "cosine"
    beta2_value: float = 0.0
    clamp_negative: bool = True
    filter_k: int = 3
    filtering_enabled: bool = True
    beta2_per_description: bool = False

    def __post_init__(self):
        if self.beta1 < 0:
            raise InvalidInputError("beta1 must be nonnegative")
        if self.beta2_mode not in ("cosine", "fixed"):
            raise InvalidInputError(f"unknown beta2 mode {self.beta2_mode!r}")
        if self.beta2_mode == "fixed" and not 0.0 <= self.beta2_value <= 1.0:
            raise InvalidInputError("fixed beta2 must lie in [0, 1]")
        if self.filter_k < 1:
            raise InvalidInputError("filter_k must be >= 1")
