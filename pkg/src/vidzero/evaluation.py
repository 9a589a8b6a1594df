"""Zero-shot evaluation: nearest-neighbor classification, bidirectional
retrieval recall, time-consistency scoring, and the ablation grid runner.

Everything here is exact brute force over cosine similarities — no
approximate index, no RNG — so results are deterministic for fixed inputs
and independent of worker count. All ranking ties break toward the lower
index for reproducibility.
"""
from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .classifier import ClassifierMatrix, build_classifier
from .core import FusionConfig, VideoRecord, as_vector, canonical_name, cosine_many
from .embedders import TextEmbedder
from .errors import (
    EmptyGridError,
    InvalidInputError,
    MissingLabelError,
    UnknownIdError,
)
from .fusion import EnhancedVisual, enhance_from_texts
from .store import EmbeddingStore


@dataclass(frozen=True)
class Prediction:
    video_id: str
    predicted_class: str
    score: float
    ranked: Optional[tuple[tuple[str, float], ...]] = None


@dataclass
class EvalReport:
    metrics: dict[str, float]
    per_item: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, value in self.metrics.items():
            if not 0.0 <= value <= 1.0:
                raise InvalidInputError(f"metric {name}={value} outside [0, 1]")


def classify(
    fused: Union[EnhancedVisual, np.ndarray, Sequence[float]],
    classifier: ClassifierMatrix,
    top_m: Optional[int] = None,
) -> Prediction:
    """Nearest class row by cosine; ties go to the lowest class index."""
    if isinstance(fused, EnhancedVisual):
        vid, vec = fused.video_id, fused.vector
    else:
        vid, vec = "", as_vector(fused)
    sims = cosine_many(vec, classifier.rows)
    idx = int(np.argmax(sims))  # first occurrence of the max = lowest index
    ranked = None
    if top_m is not None:
        order = np.lexsort((np.arange(len(sims)), -sims))
        ranked = tuple(
            (classifier.classes[int(i)].name, float(sims[int(i)]))
            for i in order[: max(0, top_m)]
        )
    return Prediction(
        video_id=vid,
        predicted_class=classifier.classes[idx].name,
        score=float(sims[idx]),
        ranked=ranked,
    )


def top1_accuracy(
    predictions: Sequence[Prediction], labels: Mapping[str, str]
) -> float:
    """Fraction of predictions whose class matches the video's label.

    Names are compared canonically (casefolded, separators dropped), the
    same rule used for hierarchy alignment, so "Kick_Ball" labels match a
    "kick ball" class list.
    """
    if not predictions:
        raise InvalidInputError("no predictions to score")
    correct = 0
    for p in predictions:
        if p.video_id not in labels:
            raise MissingLabelError(f"no label for video {p.video_id!r}")
        correct += canonical_name(p.predicted_class) == canonical_name(
            labels[p.video_id]
        )
    return correct / len(predictions)


VectorSource = Union[EmbeddingStore, Mapping[str, Sequence[float]]]


def _ids_matrix(source: VectorSource) -> tuple[list[str], np.ndarray]:
    if isinstance(source, EmbeddingStore):
        return list(source.ids), source.vectors()
    ids = list(source.keys())
    return ids, np.stack([as_vector(source[i]) for i in ids])


def rank_of(sims: np.ndarray, target: int) -> int:
    """1-based rank of ``target`` under descending similarity, ties broken
    by ascending index."""
    s = sims[target]
    ahead = int(np.sum(sims > s)) + int(np.sum(sims[:target] == s))
    return 1 + ahead


def recall_at_k(
    queries: VectorSource,
    gallery: VectorSource,
    ground_truth: Mapping[str, str],
    ks: Sequence[int],
) -> dict[int, float]:
    """For each K: the fraction of queries whose ground-truth gallery item
    ranks within the top K by cosine."""
    ks = [int(k) for k in ks]
    if not ks or any(k < 1 for k in ks):
        raise InvalidInputError("ks must be positive integers")
    q_ids, q_matrix = _ids_matrix(queries)
    g_ids, g_matrix = _ids_matrix(gallery)
    if not q_ids:
        raise InvalidInputError("no queries")
    g_index = {gid: i for i, gid in enumerate(g_ids)}

    hits = {k: 0 for k in ks}
    for qi, qid in enumerate(q_ids):
        if qid not in ground_truth:
            raise UnknownIdError(f"no ground-truth pairing for query {qid!r}")
        gt = ground_truth[qid]
        if gt not in g_index:
            raise UnknownIdError(f"ground-truth item {gt!r} not in gallery")
        sims = cosine_many(q_matrix[qi], g_matrix)
        rank = rank_of(sims, g_index[gt])
        for k in ks:
            hits[k] += rank <= k
    return {k: hits[k] / len(q_ids) for k in ks}


def time_consistency(
    videos: VectorSource, attractors: VectorSource, distractors: VectorSource
) -> float:
    """Mean over triples: 1 if the video is closer to its attractor than to
    its distractor, 0.5 on a tie, 0 otherwise.

    The mean is folded so that swapping the attractor and distractor stores
    maps the score s to exactly 1.0 - s in floating point, in both
    directions. Only the larger of the two complementary counts is ever
    divided, giving a quotient in [0.5, 1]; the smaller side returns
    1.0 minus that quotient, which is exact there (Sterbenz), so the two
    orientations are bit-exact complements. (Naive w/n division breaks
    exact antisymmetry for most n.)
    """
    v_ids, v_matrix = _ids_matrix(videos)
    if not v_ids:
        raise InvalidInputError("no triples to score")
    a_ids, a_matrix = _ids_matrix(attractors)
    d_ids, d_matrix = _ids_matrix(distractors)
    a_index = {i: j for j, i in enumerate(a_ids)}
    d_index = {i: j for j, i in enumerate(d_ids)}

    num = 0  # 2*wins + ties
    for vi, vid in enumerate(v_ids):
        if vid not in a_index:
            raise UnknownIdError(f"no attractor for video {vid!r}")
        if vid not in d_index:
            raise UnknownIdError(f"no distractor for video {vid!r}")
        both = cosine_many(
            v_matrix[vi], np.stack([a_matrix[a_index[vid]], d_matrix[d_index[vid]]])
        )
        sa, sd = float(both[0]), float(both[1])
        num += 2 if sa > sd else (1 if sa == sd else 0)

    n = len(v_ids)
    big = max(num, 2 * n - num)
    quotient = big / (2 * n)
    return quotient if num >= n else 1.0 - quotient


# -- ablation grid -----------------------------------------------------------

GRID_AXES = (
    "components",
    "filtering",
    "filter_k",
    "beta2",
    "beta2_per_description",
    "desc_count",
)


@dataclass
class AblationInputs:
    """Everything one classification run needs, independent of settings."""

    classes: list[str]
    videos: list[VideoRecord]
    embedder: TextEmbedder
    descriptors_map: Optional[Mapping] = None
    hierarchy: Optional[object] = None


@dataclass
class AblationCell:
    settings: dict
    metrics: Optional[dict[str, float]] = None
    error: Optional[str] = None


def _cell_config(settings: dict) -> FusionConfig:
    beta2 = settings.get("beta2", "cosine")
    if beta2 == "cosine":
        mode, value = "cosine", 0.0
    else:
        mode, value = "fixed", float(beta2)
    return FusionConfig(
        beta2_mode=mode,
        beta2_value=value,
        filter_k=int(settings.get("filter_k", 3)),
        filtering_enabled=bool(settings.get("filtering", True)),
        beta2_per_description=bool(settings.get("beta2_per_description", False)),
    )


def run_cell(settings: dict, inputs: AblationInputs) -> EvalReport:
    """One grid point: build the classifier, fuse, classify, score."""
    config = _cell_config(settings)
    components = tuple(settings.get("components", ("base",)))
    matrix = build_classifier(
        inputs.classes,
        inputs.descriptors_map,
        inputs.hierarchy,
        components,
        inputs.embedder,
    )
    desc_count = settings.get("desc_count")
    predictions = []
    labels = {}
    for video in inputs.videos:
        descriptions = list(video.descriptions)
        if desc_count is not None:
            descriptions = descriptions[: int(desc_count)]
        fused = enhance_from_texts(
            video.id, video.embedding, descriptions, inputs.embedder, config
        )
        predictions.append(classify(fused, matrix))
        if video.label is None:
            raise MissingLabelError(f"video {video.id!r} has no label")
        labels[video.id] = video.label
    accuracy = top1_accuracy(predictions, labels)
    return EvalReport(
        metrics={"top1_accuracy": accuracy},
        per_item=[
            {"video_id": p.video_id, "predicted": p.predicted_class, "score": p.score}
            for p in predictions
        ],
        config={"settings": _printable_settings(settings)},
    )


def run_ablation(grid: Mapping[str, Sequence], inputs: AblationInputs) -> list[AblationCell]:
    """Run every lattice point of the grid; a failing cell is recorded as
    failed without aborting its siblings. Order is the deterministic
    cartesian product over canonically ordered axes."""
    if not grid:
        raise EmptyGridError("ablation grid has no axes")
    unknown = set(grid).difference(GRID_AXES)
    if unknown:
        raise InvalidInputError(f"unknown grid axes {sorted(unknown)}")
    axes = [a for a in GRID_AXES if a in grid]
    values = [list(grid[a]) for a in axes]
    if any(not v for v in values):
        raise EmptyGridError("an ablation grid axis has no values")

    cells = []
    for point in itertools.product(*values):
        settings = dict(zip(axes, point))
        try:
            report = run_cell(settings, inputs)
            cells.append(
                AblationCell(settings=_printable_settings(settings), metrics=report.metrics)
            )
        except Exception as exc:  # record, keep going
            cells.append(
                AblationCell(settings=_printable_settings(settings), error=str(exc))
            )
    return cells


def _printable_settings(settings: dict) -> dict:
    out = {}
    for key, value in settings.items():
        if key == "components":
            out[key] = "+".join(value)
        else:
            out[key] = value
    return out


def write_ablation_csv(cells: Sequence[AblationCell], path) -> None:
    """One lattice point per row; header row; RFC-4180 quoting."""
    axis_keys = [a for a in GRID_AXES if any(a in c.settings for c in cells)]
    metric_keys = sorted({m for c in cells if c.metrics for m in c.metrics})
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(axis_keys + metric_keys + ["error"])
        for cell in cells:
            row = [cell.settings.get(a, "") for a in axis_keys]
            row += [
                ("" if cell.metrics is None else cell.metrics.get(m, ""))
                for m in metric_keys
            ]
            row.append(cell.error or "")
            writer.writerow(row)


def write_ablation_json(cells: Sequence[AblationCell], path) -> None:
    doc = [
        {"settings": c.settings, "metrics": c.metrics, "error": c.error}
        for c in cells
    ]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
