"""Command-line surface: one subcommand per pipeline stage.

Stages are independently runnable and cacheable because generator outputs
are expensive; every stage writes its artifacts plus a ``run.json``
provenance snapshot (resolved config, template version, cache counters)
under the output directory. ``--mock`` swaps every backend for the
deterministic in-process mock, making any stage hermetic.

Exit codes: 0 success, 1 input/validation error, 2 backend failure. Errors
are emitted as one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .classifier import (
    build_caption_representation,
    build_classifier,
    load_classifier,
    save_classifier,
)
from .core import FusionConfig, VideoRecord
from .embedders import (
    HashTextEmbedder,
    HttpTextEmbedder,
    StoreTextEmbedder,
    TextEmbedder,
)
from .errors import (
    BackendError,
    InputError,
    InvalidInputError,
    VidZeroError,
)
from .evaluation import (
    AblationInputs,
    classify,
    recall_at_k,
    run_ablation,
    time_consistency,
    top1_accuracy,
    write_ablation_csv,
    write_ablation_json,
)
from .explain import build_report, emit_report
from .fusion import enhance_from_texts
from .genclient import (
    TEMPLATE_VERSION,
    BackendConfig,
    DiskCache,
    MockBackend,
    augment_caption,
    generate_descriptor_set,
    generate_hierarchy,
    generate_video_descriptions,
    make_backend,
    parse_hierarchy,
)
from .store import (
    CaptionRecord,
    read_captions,
    read_class_list,
    read_descriptors,
    read_hierarchy,
    read_labels,
    read_store,
    read_video_descriptions,
    write_captions,
    write_descriptors,
    write_hierarchy,
    write_jsonl,
    write_predictions,
    write_store,
)

ENV_PREFIX = "VP_"


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so errors map to exit 1."""

    def error(self, message):
        raise InvalidInputError(message)


def _emit_error(kind: str, exc: Exception) -> None:
    doc = {"error": {"type": type(exc).__name__, "kind": kind, "message": str(exc)}}
    path = getattr(exc, "path", None)
    if path is not None:
        doc["error"]["field"] = path
    sys.stderr.write(json.dumps(doc, sort_keys=True) + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        if not hasattr(args, "func"):
            raise InvalidInputError("a subcommand is required (see vp --help)")
        args.func(args)
        return 0
    except InputError as exc:
        _emit_error("input", exc)
        return 1
    except BackendError as exc:
        _emit_error("backend", exc)
        return 2
    except VidZeroError as exc:
        _emit_error("input", exc)
        return 1
    except OSError as exc:
        _emit_error("input", exc)
        return 1


# -- shared flag plumbing -----------------------------------------------------


def _add_common(p: argparse.ArgumentParser, cache: bool = False) -> None:
    p.add_argument("--out", required=True, help="output directory for artifacts")
    p.add_argument(
        "--workers",
        type=int,
        default=0,
        help="parallel workers for data-parallel stages (0 = available cores)",
    )
    p.add_argument("--config", help="JSON config file; flags override its values")
    if cache:
        p.add_argument(
            "--cache",
            help=f"response cache directory (default ${ENV_PREFIX}CACHE_DIR)",
        )
        p.add_argument(
            "--mock",
            action="store_true",
            help="use the deterministic in-process mock backend (hermetic)",
        )
        p.add_argument("--backend-config", help="backend config JSON file")


def _add_embedder(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--embedder",
        default="hash",
        help='text embedder: "hash", "http:<url>", or "store:<path>"',
    )
    p.add_argument(
        "--dim", type=int, default=64, help="dimension for the hash embedder"
    )


def _env(name: str) -> Optional[str]:
    return os.environ.get(ENV_PREFIX + name)


def _config_layer(args) -> dict:
    """flags < config file < built-in defaults, resolved for run.json."""
    doc = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise InvalidInputError(f"--config {args.config}: no such file")
        doc = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(doc, dict):
            raise InvalidInputError(f"--config {args.config}: expected a JSON object")
    return doc


def _setting(args, config: dict, name: str, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    env = _env(name.upper())
    if env is not None:
        return env
    return default


def _workers(args) -> int:
    n = int(getattr(args, "workers", 0) or 0)
    if n < 0:
        raise InvalidInputError("--workers must be >= 0")
    return n or (os.cpu_count() or 1)


def _pmap(fn, items, workers: int) -> list:
    """Order-preserving parallel map; results are independent of N."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _make_gen_backend(args, config: dict):
    if getattr(args, "mock", False) or config.get("mock"):
        return MockBackend()
    backend_path = _setting(args, config, "backend_config")
    if backend_path is None:
        raise InvalidInputError(
            "a backend is required: pass --mock or --backend-config FILE"
        )
    doc = json.loads(Path(backend_path).read_text(encoding="utf-8"))
    return make_backend(BackendConfig(**doc))


def _make_cache(args, config: dict) -> Optional[DiskCache]:
    cache_dir = _setting(args, config, "cache") or _env("CACHE_DIR")
    return DiskCache(cache_dir) if cache_dir else None


def _make_embedder(args) -> TextEmbedder:
    spec = getattr(args, "embedder", "hash") or "hash"
    if spec == "hash":
        return HashTextEmbedder(int(getattr(args, "dim", 64)))
    if spec.startswith("http:") or spec.startswith("https:"):
        return HttpTextEmbedder(spec)
    if spec.startswith("store:"):
        return StoreTextEmbedder(read_store(spec[len("store:"):]))
    raise InvalidInputError(f"unknown embedder {spec!r}")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_json(
    out: Path, command: str, resolved: dict, cache: Optional[DiskCache]
) -> None:
    doc = {
        "command": command,
        "version": __version__,
        "template_version": TEMPLATE_VERSION,
        "config": resolved,
        "cache": (
            {"hits": cache.hits, "misses": cache.misses}
            if cache is not None
            else None
        ),
    }
    (out / "run.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _write_metrics(out: Path, metrics: dict) -> None:
    (out / "metrics.json").write_text(
        json.dumps(metrics, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _require_file(value: Optional[str], flag: str) -> Path:
    if not value:
        raise InvalidInputError(f"{flag} is required")
    path = Path(value)
    if not path.exists():
        raise InvalidInputError(f"{flag} {value}: no such path")
    return path


# -- subcommands --------------------------------------------------------------


def cmd_descriptors_gen(args) -> None:
    config = _config_layer(args)
    classes = read_class_list(_require_file(args.classes, "--classes"))
    backend = _make_gen_backend(args, config)
    cache = _make_cache(args, config)
    out = _out_dir(args)
    temperature = float(_setting(args, config, "temperature", 0.2))
    workers = _workers(args)

    sets = _pmap(
        lambda c: generate_descriptor_set(c, backend, cache, temperature),
        classes,
        workers,
    )
    write_descriptors({s.class_name: s for s in sets}, out / "descriptors.json")
    _write_run_json(
        out,
        "descriptors gen",
        {
            "classes": str(args.classes),
            "backend": backend.kind,
            "model": backend.model_name,
            "temperature": temperature,
            "workers_requested": workers,
        },
        cache,
    )
    print(f"wrote descriptors for {len(sets)} classes to {out / 'descriptors.json'}")


def cmd_hierarchy_gen(args) -> None:
    config = _config_layer(args)
    classes = read_class_list(_require_file(args.classes, "--classes"))
    backend = _make_gen_backend(args, config)
    cache = _make_cache(args, config)
    out = _out_dir(args)
    temperature = float(_setting(args, config, "temperature", 0.2))

    response = generate_hierarchy(classes, backend, cache, temperature)
    (out / "hierarchy_response.txt").write_text(response + "\n", encoding="utf-8")
    hierarchy = parse_hierarchy(response, classes)
    write_hierarchy(hierarchy, out / "hierarchy.json")
    _write_run_json(
        out,
        "hierarchy gen",
        {
            "classes": str(args.classes),
            "backend": backend.kind,
            "model": backend.model_name,
            "temperature": temperature,
            "parents": len(hierarchy.parents),
        },
        cache,
    )
    print(
        f"wrote hierarchy with {len(hierarchy.parents)} parents to {out / 'hierarchy.json'}"
    )


def cmd_videodesc_gen(args) -> None:
    config = _config_layer(args)
    videos = read_store(_require_file(args.videos, "--videos"))
    backend = _make_gen_backend(args, config)
    cache = _make_cache(args, config)
    out = _out_dir(args)
    n = int(_setting(args, config, "n", 3))
    temperature = float(_setting(args, config, "temperature", 0.5))
    workers = _workers(args)

    all_descs = _pmap(
        lambda vid: generate_video_descriptions(vid, backend, cache, n, temperature),
        videos.ids,
        workers,
    )
    write_jsonl(
        out / "descriptions.jsonl",
        (
            {"video_id": vid, "descriptions": descs}
            for vid, descs in zip(videos.ids, all_descs)
        ),
    )
    _write_run_json(
        out,
        "videodesc gen",
        {
            "videos": str(args.videos),
            "backend": backend.kind,
            "n": n,
            "temperature": temperature,
            "workers_requested": workers,
        },
        cache,
    )
    print(f"wrote {n} descriptions x {len(videos)} videos to {out / 'descriptions.jsonl'}")


def cmd_classifier_build(args) -> None:
    config = _config_layer(args)
    classes = read_class_list(_require_file(args.classes, "--classes"))
    components = tuple(
        c.strip() for c in str(_setting(args, config, "components", "base")).split(",")
    )
    descriptors = (
        read_descriptors(_require_file(args.descriptors, "--descriptors"))
        if args.descriptors
        else None
    )
    hierarchy = (
        read_hierarchy(_require_file(args.hierarchy, "--hierarchy"), classes)
        if args.hierarchy
        else None
    )
    embedder = _make_embedder(args)
    out = _out_dir(args)

    matrix = build_classifier(classes, descriptors, hierarchy, components, embedder)
    save_classifier(matrix, out / "classifier")
    _write_run_json(
        out,
        "classifier build",
        {
            "classes": str(args.classes),
            "components": list(matrix.components),
            "descriptors": args.descriptors,
            "hierarchy": args.hierarchy,
            "dim": matrix.dim,
            "fallback_classes": matrix.provenance.get("fallback_classes", []),
        },
        None,
    )
    print(f"built classifier: {len(matrix.classes)} classes, dim {matrix.dim}")


def _fusion_config(args, config: dict) -> FusionConfig:
    beta2 = str(_setting(args, config, "beta2", "cosine"))
    if beta2 == "cosine":
        mode, value = "cosine", 0.0
    else:
        mode, value = "fixed", float(beta2)
    return FusionConfig(
        beta1=float(_setting(args, config, "beta1", 1.0)),
        beta2_mode=mode,
        beta2_value=value,
        filter_k=int(_setting(args, config, "filter_k", 3)),
        filtering_enabled=not bool(getattr(args, "no_filter", False)),
        beta2_per_description=bool(getattr(args, "beta2_per_description", False)),
    )


def cmd_fuse(args) -> None:
    config = _config_layer(args)
    videos = read_store(_require_file(args.videos, "--videos"))
    descriptions = read_video_descriptions(
        _require_file(args.descriptions, "--descriptions")
    )
    embedder = _make_embedder(args)
    fusion = _fusion_config(args, config)
    out = _out_dir(args)
    workers = _workers(args)

    def fuse_one(vid: str):
        return enhance_from_texts(
            vid,
            videos.vector(vid),
            descriptions.get(vid, []),
            embedder,
            fusion,
        )

    enhanced = _pmap(fuse_one, videos.ids, workers)
    write_store(
        out / "fused",
        [e.video_id for e in enhanced],
        np.stack([e.vector for e in enhanced]),
        l2_normalized=True,
    )
    write_jsonl(
        out / "fused_meta.jsonl",
        (
            {
                "video_id": e.video_id,
                "beta2_used": e.beta2_used,
                "descriptions_kept": list(e.descriptions_kept),
            }
            for e in enhanced
        ),
    )
    _write_run_json(
        out,
        "fuse",
        {
            "videos": str(args.videos),
            "descriptions": str(args.descriptions),
            "beta1": fusion.beta1,
            "beta2_mode": fusion.beta2_mode,
            "beta2_value": fusion.beta2_value,
            "filter_k": fusion.filter_k,
            "filtering_enabled": fusion.filtering_enabled,
            "workers_requested": workers,
        },
        None,
    )
    print(f"fused {len(enhanced)} videos into {out / 'fused'}")


def cmd_classify(args) -> None:
    config = _config_layer(args)
    fused = read_store(_require_file(args.fused, "--fused"))
    matrix = load_classifier(_require_file(args.classifier, "--classifier"))
    labels = (
        read_labels(_require_file(args.labels, "--labels")) if args.labels else None
    )
    out = _out_dir(args)
    workers = _workers(args)
    top_m = int(_setting(args, config, "top_m", 5))

    def classify_one(vid: str):
        return replace(classify(fused.vector(vid), matrix, top_m=top_m), video_id=vid)

    predictions = _pmap(classify_one, fused.ids, workers)
    write_predictions(out / "predictions.jsonl", predictions)
    metrics = {"count": len(predictions)}
    if labels is not None:
        metrics["top1_accuracy"] = top1_accuracy(predictions, labels)
    _write_metrics(out, metrics)
    _write_run_json(
        out,
        "classify",
        {
            "fused": str(args.fused),
            "classifier": str(args.classifier),
            "labels": args.labels,
            "top_m": top_m,
            "classes": len(matrix.classes),
            "workers_requested": workers,
        },
        None,
    )
    line = f"classified {len(predictions)} videos"
    if "top1_accuracy" in metrics:
        line += f"; top-1 accuracy {metrics['top1_accuracy']:.4f}"
    print(line)


def cmd_retrieve(args) -> None:
    config = _config_layer(args)
    videos = read_store(_require_file(args.videos, "--videos"))
    captions = read_captions(_require_file(args.captions, "--captions"))
    embedder = _make_embedder(args)
    out = _out_dir(args)
    ks = [int(k) for k in str(_setting(args, config, "ks", "1,5")).split(",")]
    workers = _workers(args)

    cache = _make_cache(args, config)
    if getattr(args, "augment", False):
        backend = _make_gen_backend(args, config)
        n = int(_setting(args, config, "n", 2))

        def augment_one(rec: CaptionRecord) -> CaptionRecord:
            generated, padded = augment_caption(rec.caption, backend, cache, n)
            return CaptionRecord(rec.id, rec.caption, tuple(generated), padded)

        captions = _pmap(augment_one, captions, workers)
        write_captions(out / "captions_augmented.jsonl", captions)

    caption_vecs = _pmap(
        lambda rec: build_caption_representation(
            rec.caption, list(rec.generated), embedder
        ),
        captions,
        workers,
    )
    text_store = {rec.id: vec for rec, vec in zip(captions, caption_vecs)}

    pairs = (
        json.loads(Path(args.pairs).read_text(encoding="utf-8"))
        if args.pairs
        else {rec.id: rec.id for rec in captions}
    )
    reverse_pairs = {g: q for q, g in pairs.items()}

    t2v = recall_at_k(text_store, videos, pairs, ks)
    v2t = recall_at_k(videos, text_store, reverse_pairs, ks)
    metrics = {
        **{f"t2v_r_at_{k}": v for k, v in t2v.items()},
        **{f"v2t_r_at_{k}": v for k, v in v2t.items()},
    }
    _write_metrics(out, metrics)
    _write_run_json(
        out,
        "retrieve",
        {
            "videos": str(args.videos),
            "captions": str(args.captions),
            "ks": ks,
            "augmented": bool(getattr(args, "augment", False)),
            "workers_requested": workers,
        },
        cache,
    )
    print(
        "retrieval "
        + " ".join(f"{name}={value:.4f}" for name, value in sorted(metrics.items()))
    )


def cmd_time_eval(args) -> None:
    videos = read_store(_require_file(args.videos, "--videos"))
    attractors = read_store(_require_file(args.attractors, "--attractors"))
    distractors = read_store(_require_file(args.distractors, "--distractors"))
    out = _out_dir(args)

    score = time_consistency(videos, attractors, distractors)
    _write_metrics(out, {"time_consistency": score})
    _write_run_json(
        out,
        "time-eval",
        {
            "videos": str(args.videos),
            "attractors": str(args.attractors),
            "distractors": str(args.distractors),
            "triples": len(videos),
        },
        None,
    )
    print(f"time consistency {score:.4f} over {len(videos)} triples")


def cmd_explain(args) -> None:
    videos = read_store(_require_file(args.videos, "--videos"))
    if args.video_id not in videos:
        raise InvalidInputError(f"--video-id {args.video_id!r} not in the store")
    if args.attributes:
        attributes = [a.strip() for a in args.attributes.split(",") if a.strip()]
    else:
        descriptors = read_descriptors(
            _require_file(args.descriptors, "--descriptors")
        )
        if args.class_name not in descriptors:
            raise InvalidInputError(
                f"--class {args.class_name!r} has no descriptor set"
            )
        attributes = list(descriptors[args.class_name].attributes)
    embedder = _make_embedder(args)
    out = _out_dir(args)

    predicted = None
    score = None
    if args.classifier:
        matrix = load_classifier(Path(args.classifier))
        p = classify(videos.vector(args.video_id), matrix)
        predicted, score = p.predicted_class, p.score

    report = build_report(
        args.video_id,
        args.class_name,
        videos.vector(args.video_id),
        attributes,
        embedder,
        predicted_class=predicted,
        predicted_score=score,
    )
    formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    paths = [emit_report(report, fmt, out) for fmt in formats]
    _write_run_json(
        out,
        "explain",
        {
            "video_id": args.video_id,
            "class": args.class_name,
            "attributes": len(attributes),
            "formats": formats,
        },
        None,
    )
    print("wrote " + ", ".join(str(p) for p in paths))


def cmd_ablate(args) -> None:
    config = _config_layer(args)
    grid = config.get("grid")
    if grid is None:
        raise InvalidInputError(
            '--config must define a "grid" object of axis -> value list'
        )
    classes = read_class_list(_require_file(args.classes, "--classes"))
    videos = read_store(_require_file(args.videos, "--videos"))
    descriptions = read_video_descriptions(
        _require_file(args.descriptions, "--descriptions")
    )
    labels = read_labels(_require_file(args.labels, "--labels"))
    descriptors = (
        read_descriptors(_require_file(args.descriptors, "--descriptors"))
        if args.descriptors
        else None
    )
    hierarchy = (
        read_hierarchy(_require_file(args.hierarchy, "--hierarchy"), classes)
        if args.hierarchy
        else None
    )
    embedder = _make_embedder(args)
    out = _out_dir(args)

    records = [
        VideoRecord(
            id=vid,
            embedding=videos.vector(vid),
            descriptions=tuple(descriptions.get(vid, [])),
            label=labels.get(vid),
        )
        for vid in videos.ids
    ]
    inputs = AblationInputs(
        classes=classes,
        videos=records,
        embedder=embedder,
        descriptors_map=descriptors,
        hierarchy=hierarchy,
    )
    cells = run_ablation(grid, inputs)
    write_ablation_csv(cells, out / "ablation.csv")
    write_ablation_json(cells, out / "ablation.json")
    failed = sum(1 for c in cells if c.error)
    _write_run_json(
        out,
        "ablate",
        {
            "grid": grid,
            "classes": str(args.classes),
            "videos": str(args.videos),
            "cells": len(cells),
            "failed_cells": failed,
        },
        None,
    )
    print(f"ran {len(cells)} ablation cells ({failed} failed) -> {out / 'ablation.csv'}")


def cmd_make_fixture(args) -> None:
    from .fixtures import make_synthetic_dataset

    out = make_synthetic_dataset(
        args.out, dim=args.dim, per_class=args.per_class, seed=args.seed
    )
    print(f"wrote synthetic fixture to {out}")


# -- parser ------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="vp", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("descriptors", help="generate per-class descriptors")
    dsub = p.add_subparsers(dest="subcommand")
    g = dsub.add_parser("gen", help="attributes + description per class")
    g.add_argument("--classes", required=True)
    g.add_argument("--temperature", type=float)
    _add_common(g, cache=True)
    g.set_defaults(func=cmd_descriptors_gen)

    p = sub.add_parser("hierarchy", help="generate the class hierarchy")
    hsub = p.add_subparsers(dest="subcommand")
    g = hsub.add_parser("gen", help="group classes under parent contexts")
    g.add_argument("--classes", required=True)
    g.add_argument("--temperature", type=float)
    _add_common(g, cache=True)
    g.set_defaults(func=cmd_hierarchy_gen)

    p = sub.add_parser("videodesc", help="generate query-video descriptions")
    vsub = p.add_subparsers(dest="subcommand")
    g = vsub.add_parser("gen", help="n descriptions per video")
    g.add_argument("--videos", required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--temperature", type=float)
    _add_common(g, cache=True)
    g.set_defaults(func=cmd_videodesc_gen)

    g = sub.add_parser("classifier", help="build enriched class representations")
    csub = g.add_subparsers(dest="subcommand")
    b = csub.add_parser("build")
    b.add_argument("--classes", required=True)
    b.add_argument("--descriptors")
    b.add_argument("--hierarchy")
    b.add_argument("--components", default="base,attributes,description")
    _add_embedder(b)
    _add_common(b)
    b.set_defaults(func=cmd_classifier_build)

    f = sub.add_parser("fuse", help="description-guided visual enhancement")
    f.add_argument("--videos", required=True)
    f.add_argument("--descriptions", required=True)
    f.add_argument("--beta1", type=float)
    f.add_argument("--beta2", help='"cosine" or a fixed value in [0,1]')
    f.add_argument("--filter-k", dest="filter_k", type=int)
    f.add_argument("--no-filter", dest="no_filter", action="store_true")
    f.add_argument(
        "--beta2-per-description", dest="beta2_per_description", action="store_true"
    )
    _add_embedder(f)
    _add_common(f)
    f.set_defaults(func=cmd_fuse)

    c = sub.add_parser("classify", help="nearest-class prediction + accuracy")
    c.add_argument("--fused", required=True, help="fused (or raw) video store")
    c.add_argument("--classifier", required=True)
    c.add_argument("--labels")
    c.add_argument("--top-m", dest="top_m", type=int)
    _add_common(c)
    c.set_defaults(func=cmd_classify)

    r = sub.add_parser("retrieve", help="bidirectional text-video recall")
    r.add_argument("--videos", required=True)
    r.add_argument("--captions", required=True)
    r.add_argument("--pairs", help="JSON map query id -> gallery id (default identity)")
    r.add_argument("--ks", help="comma-separated K values (default 1,5)")
    r.add_argument("--augment", action="store_true", help="generate caption variants")
    r.add_argument("--n", type=int, help="variants per caption when augmenting")
    _add_embedder(r)
    _add_common(r, cache=True)
    r.set_defaults(func=cmd_retrieve)

    t = sub.add_parser("time-eval", help="attractor/distractor time consistency")
    t.add_argument("--videos", required=True)
    t.add_argument("--attractors", required=True)
    t.add_argument("--distractors", required=True)
    _add_common(t)
    t.set_defaults(func=cmd_time_eval)

    e = sub.add_parser("explain", help="per-attribute similarity report")
    e.add_argument("--videos", required=True)
    e.add_argument("--video-id", dest="video_id", required=True)
    e.add_argument("--class", dest="class_name", required=True)
    e.add_argument("--descriptors")
    e.add_argument("--attributes", help="comma-separated attributes (overrides file)")
    e.add_argument("--classifier", help="optional: include the prediction context")
    e.add_argument("--formats", default="markdown,csv,svg_bar")
    _add_embedder(e)
    _add_common(e)
    e.set_defaults(func=cmd_explain)

    a = sub.add_parser("ablate", help="run a component/filter/beta grid")
    a.add_argument("--classes", required=True)
    a.add_argument("--videos", required=True)
    a.add_argument("--descriptions", required=True)
    a.add_argument("--labels", required=True)
    a.add_argument("--descriptors")
    a.add_argument("--hierarchy")
    _add_embedder(a)
    _add_common(a)
    a.set_defaults(func=cmd_ablate)

    m = sub.add_parser("make-fixture", help="build the synthetic demo dataset")
    m.add_argument("--out", required=True)
    m.add_argument("--dim", type=int, default=64)
    m.add_argument("--per-class", dest="per_class", type=int, default=5)
    m.add_argument("--seed", type=int, default=7)
    m.set_defaults(func=cmd_make_fixture)

    return parser


if __name__ == "__main__":
    sys.exit(main())
