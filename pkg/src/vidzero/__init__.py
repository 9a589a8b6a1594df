"""Training-free zero-shot video understanding.

Both sides of a vision-language model's similarity computation are
enriched before the nearest-neighbor decision: the query video's embedding
is fused with embeddings of its own generated textual descriptions, and
each class's text representation is averaged from its photo prompt
(optionally rewritten with a high-level action context), generated
attribute list, and generated description. Evaluation covers action
recognition, bidirectional text-video retrieval, and temporal consistency.
"""

__version__ = "0.1.0"

from .core import (
    ClassEntry,
    DescriptorSet,
    FusionConfig,
    HierarchyMap,
    Provenance,
    VideoRecord,
    align_hierarchy,
    canonical_name,
    cosine,
    cosine_many,
    normalize,
    renorm_mean,
)
from .embedders import (
    HashTextEmbedder,
    HttpTextEmbedder,
    MappingTextEmbedder,
    StoreTextEmbedder,
    TextEmbedder,
)
from .store import (
    EmbeddingStore,
    read_store,
    save_store,
    write_store,
)
from .genclient import (
    BackendConfig,
    DiskCache,
    FixtureBackend,
    HttpChatBackend,
    MockBackend,
    augment_caption,
    generate_descriptor_set,
    generate_hierarchy,
    generate_video_descriptions,
    parse_hierarchy,
    render_prompt,
)
from .classifier import (
    ClassifierMatrix,
    base_prompt,
    build_caption_representation,
    build_class_representation,
    build_classifier,
    context_prompt,
)
from .fusion import (
    EnhancedVisual,
    beta2,
    enhance_from_texts,
    enhance_visual,
    filter_descriptions,
)
from .evaluation import (
    EvalReport,
    Prediction,
    classify,
    recall_at_k,
    run_ablation,
    time_consistency,
    top1_accuracy,
)
from .explain import AttributionReport, attribute_contributions, build_report, emit_report

__all__ = [
    "__version__",
    # core
    "ClassEntry",
    "DescriptorSet",
    "FusionConfig",
    "HierarchyMap",
    "Provenance",
    "VideoRecord",
    "align_hierarchy",
    "canonical_name",
    "cosine",
    "cosine_many",
    "normalize",
    "renorm_mean",
    # embedders
    "HashTextEmbedder",
    "HttpTextEmbedder",
    "MappingTextEmbedder",
    "StoreTextEmbedder",
    "TextEmbedder",
    # store
    "EmbeddingStore",
    "read_store",
    "save_store",
    "write_store",
    # genclient
    "BackendConfig",
    "DiskCache",
    "FixtureBackend",
    "HttpChatBackend",
    "MockBackend",
    "augment_caption",
    "generate_descriptor_set",
    "generate_hierarchy",
    "generate_video_descriptions",
    "parse_hierarchy",
    "render_prompt",
    # classifier
    "ClassifierMatrix",
    "base_prompt",
    "build_caption_representation",
    "build_class_representation",
    "build_classifier",
    "context_prompt",
    # fusion
    "EnhancedVisual",
    "beta2",
    "enhance_from_texts",
    "enhance_visual",
    "filter_descriptions",
    # evaluation
    "EvalReport",
    "Prediction",
    "classify",
    "recall_at_k",
    "run_ablation",
    "time_consistency",
    "top1_accuracy",
    # explain
    "AttributionReport",
    "attribute_contributions",
    "build_report",
    "emit_report",
]
