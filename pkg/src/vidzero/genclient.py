"""Uniform access to the generative backends: prompt templates, an
OpenAI-compatible HTTP chat client with retries, a recorded-fixture backend,
a deterministic mock, and a content-addressed disk cache.

Two kinds of generator sit behind the same interface: a text-to-text model
that produces class descriptors, hierarchies, and caption variants, and a
video-to-text model that produces query-video descriptions (reached through
recorded fixtures or a multimodal-capable endpoint).
"""
from __future__ import annotations

import hashlib
import json
import os
import random
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Protocol, Sequence

import requests

from .core import DescriptorSet, HierarchyMap, Provenance, align_hierarchy
from .errors import (
    BackendUnavailableError,
    EmptyResponseError,
    InvalidClassNameError,
    InvalidInputError,
    MissingFixtureError,
    UnboundPlaceholderError,
)

TEMPLATE_VERSION = 1

# Defaults for generation temperature and sample counts: low temperature for
# focused, deterministic class descriptors; higher temperature for diverse
# video descriptions. Action recognition uses 3 descriptions per video;
# retrieval and time-sensitive evaluation use 10.
TEXT_TEMPERATURE = 0.2
VIDEO_TEMPERATURE = 0.5
N_DESC_ACTION = 3
N_DESC_RETRIEVAL = 10
N_CAPTION_VARIANTS = 2


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    text: str
    version: int = TEMPLATE_VERSION


TEMPLATES: dict[str, PromptTemplate] = {
    t.id: t
    for t in (
        PromptTemplate(
            "attributes",
            "What are the distinct visual characteristics to identify a "
            "{class-name} video action?",
        ),
        PromptTemplate("description", "How {class-name} action is performed visually?"),
        PromptTemplate(
            "hierarchy",
            "Divide the list of {class-names} into parent and child classes. "
            "Such that actions that are visually similar to each other are in "
            "the same group. If the action is not similar to any other action "
            "in the list, assign it to others.",
        ),
        PromptTemplate(
            "caption_augment",
            "Given a caption: {input caption}, generate a visually similar captions.",
        ),
        PromptTemplate("video_desc", "describe the activity in the video"),
        PromptTemplate("base_prompt", "a photo of a {class-name}"),
        PromptTemplate("context_prompt", "a photo of a {parent} i.e., {class-name}"),
    )
}

_PLACEHOLDER = re.compile(r"\{([^{}]+)\}")


def render_prompt(template_id: str, bindings: Mapping[str, str] = ()) -> str:
    """Substitute bindings into the named template, verbatim."""
    try:
        template = TEMPLATES[template_id]
    except KeyError:
        raise InvalidInputError(f"unknown template {template_id!r}") from None
    bindings = dict(bindings)

    def sub(match):
        key = match.group(1)
        if key not in bindings:
            raise UnboundPlaceholderError(
                f"template {template_id!r} placeholder {{{key}}} is unbound"
            )
        return str(bindings[key])

    return _PLACEHOLDER.sub(sub, template.text)


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "mock"  # chat_http | fixture_file | mock
    endpoint_url: Optional[str] = None
    model_name: str = "mock"
    temperature: float = TEXT_TEMPERATURE
    max_retries: int = 3
    timeout: float = 30.0
    api_key_env: str = "VP_API_KEY"
    fixture_path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("chat_http", "fixture_file", "mock"):
            raise InvalidInputError(f"unknown backend kind {self.kind!r}")
        if self.kind == "chat_http" and not self.endpoint_url:
            raise InvalidInputError("chat_http backend requires endpoint_url")
        if self.kind == "fixture_file" and not self.fixture_path:
            raise InvalidInputError("fixture_file backend requires fixture_path")
        if self.temperature < 0:
            raise InvalidInputError("temperature must be >= 0")
        if self.max_retries < 1:
            raise InvalidInputError("max_retries must be >= 1")


@dataclass(frozen=True)
class GenRequest:
    """One completion request; everything that identifies the output."""

    template_id: str
    bindings: tuple[tuple[str, str], ...] = ()
    temperature: float = TEXT_TEMPERATURE
    sample_index: int = 0
    video_id: Optional[str] = None

    @property
    def prompt(self) -> str:
        return render_prompt(self.template_id, dict(self.bindings))


def cache_key(request: GenRequest, backend: "Backend") -> str:
    """Content digest of everything that determines a response."""
    payload = {
        "kind": backend.kind,
        "model": backend.model_name,
        "template_id": request.template_id,
        "template_version": TEMPLATES[request.template_id].version,
        "prompt": request.prompt,
        "temperature": request.temperature,
        "sample_index": request.sample_index,
        "video_id": request.video_id,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class Backend(Protocol):
    kind: str
    model_name: str

    def complete(self, request: GenRequest) -> str: ...


class MockBackend:
    """Deterministic stand-in: a pure function of template id, bindings,
    and sample index. Makes every pipeline hermetic under --mock."""

    kind = "mock"
    model_name = "mock"

    def complete(self, request: GenRequest) -> str:
        b = dict(request.bindings)
        i = request.sample_index
        tid = request.template_id
        if tid == "attributes":
            return f"mock-attr-{i + 1}:{b['class-name']}"
        if tid == "description":
            return f"mock-desc:{b['class-name']}"
        if tid == "hierarchy":
            return f"mock-parent: {b['class-names']}\nother:"
        if tid == "caption_augment":
            return f"mock-cap-{i}:{b['input caption']}"
        if tid == "video_desc":
            return f"mock-vdesc-{i}:{request.video_id}"
        raise InvalidInputError(f"mock backend has no rule for {tid!r}")


class FixtureBackend:
    """Replays recorded responses from a JSONL file.

    Rows are either ``{"video_id": …, "descriptions": […]}`` (video-to-text)
    or ``{"prompt": …, "responses": […]}`` (text-to-text; looked up by the
    sha256 digest of the rendered prompt, which may be given directly as
    ``"prompt_digest"`` instead of the prompt text).
    """

    kind = "fixture_file"

    def __init__(self, path, model_name: str = "fixture"):
        self.model_name = model_name
        self.path = Path(path)
        self._by_video: dict[str, list[str]] = {}
        self._by_digest: dict[str, list[str]] = {}
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                row = json.loads(line)
                if "video_id" in row:
                    self._by_video[row["video_id"]] = list(row["descriptions"])
                    continue
                digest = row.get("prompt_digest") or hashlib.sha256(
                    row["prompt"].encode("utf-8")
                ).hexdigest()
                self._by_digest[digest] = (
                    list(row["responses"])
                    if "responses" in row
                    else [row["response"]]
                )

    def complete(self, request: GenRequest) -> str:
        if request.template_id == "video_desc":
            vid = request.video_id or ""
            if vid not in self._by_video:
                raise MissingFixtureError(f"no recorded descriptions for video {vid!r}")
            samples = self._by_video[vid]
            if request.sample_index >= len(samples):
                raise MissingFixtureError(
                    f"video {vid!r} has {len(samples)} recorded descriptions, "
                    f"sample {request.sample_index} requested"
                )
            return samples[request.sample_index]
        digest = hashlib.sha256(request.prompt.encode("utf-8")).hexdigest()
        if digest not in self._by_digest:
            raise MissingFixtureError(
                f"no recorded response for prompt {request.prompt[:80]!r}"
            )
        samples = self._by_digest[digest]
        # Recorded draws beyond what the file holds reuse the last one; the
        # caption-augment pad rule marks the duplication downstream.
        return samples[min(request.sample_index, len(samples) - 1)]


class HttpChatBackend:
    """OpenAI-compatible chat-completions client.

    Sends the rendered prompt as a single user message. Retries transport
    errors, 5xx, and 429 with exponential backoff plus jitter, up to
    max_retries attempts; any other 4xx fails immediately.
    """

    kind = "chat_http"

    def __init__(self, config: BackendConfig, session=None, sleep=time.sleep, rng=None):
        if config.kind != "chat_http":
            raise InvalidInputError("HttpChatBackend requires a chat_http config")
        self.config = config
        self.model_name = config.model_name
        self._session = session or requests.Session()
        self._sleep = sleep
        self._rng = rng or random.Random()

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.config.api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def complete(self, request: GenRequest) -> str:
        url = self.config.endpoint_url.rstrip("/") + "/v1/chat/completions"
        body = {
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "n": 1,
        }
        last_error = None
        for attempt in range(self.config.max_retries):
            if attempt:
                delay = min(8.0, 0.5 * 2 ** (attempt - 1))
                self._sleep(delay + self._rng.uniform(0, delay / 4))
            try:
                resp = self._session.post(
                    url,
                    json=body,
                    headers=self._headers(),
                    timeout=self.config.timeout,
                )
            except requests.RequestException as exc:
                last_error = f"transport error: {exc}"
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = f"HTTP {resp.status_code}"
                continue
            if resp.status_code >= 400:
                raise BackendUnavailableError(
                    f"backend rejected request: HTTP {resp.status_code}: {resp.text[:200]}"
                )
            try:
                payload = resp.json()
                return payload["choices"][0]["message"]["content"] or ""
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise BackendUnavailableError(
                    f"malformed backend response: {exc}"
                ) from exc
        raise BackendUnavailableError(
            f"backend unavailable after {self.config.max_retries} attempts ({last_error})"
        )


def make_backend(config: BackendConfig, **http_kwargs) -> Backend:
    if config.kind == "mock":
        return MockBackend()
    if config.kind == "fixture_file":
        return FixtureBackend(config.fixture_path, model_name=config.model_name)
    return HttpChatBackend(config, **http_kwargs)


class DiskCache:
    """Content-addressed response cache: ``<root>/<2-hex>/<digest>.json``.

    Writes are atomic (temp file + rename); an in-process per-key lock
    keeps concurrent workers from issuing duplicate backend calls for the
    same key. Empty responses are never stored, so retries reach the
    backend.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.hits = 0
        self.misses = 0
        self._master = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def lock(self, key: str) -> threading.Lock:
        with self._master:
            if key not in self._locks:
                self._locks[key] = threading.Lock()
            return self._locks[key]

    def get(self, key: str) -> Optional[str]:
        path = self._path(key)
        if not path.is_file():
            with self._master:
                self.misses += 1
            return None
        doc = json.loads(path.read_text(encoding="utf-8"))
        with self._master:
            self.hits += 1
        return doc["response"]

    def put(self, key: str, request: GenRequest, response: str) -> None:
        if not response.strip():
            return
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        doc = {
            "key": key,
            "template_id": request.template_id,
            "prompt": request.prompt,
            "temperature": request.temperature,
            "sample_index": request.sample_index,
            "video_id": request.video_id,
            "response": response,
        }
        tmp = path.with_name(f".{path.name}.{os.getpid()}.{threading.get_ident()}")
        tmp.write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")
        os.replace(tmp, path)


def complete_cached(
    request: GenRequest, backend: Backend, cache: Optional[DiskCache] = None
) -> str:
    """One completion, via the cache when one is given.

    A response that comes back empty is retried (fresh backend call) up to
    the standard attempt count; still-empty raises EmptyResponse and is
    never cached.
    """
    if cache is None:
        return _complete_nonempty(request, backend)
    key = cache_key(request, backend)
    with cache.lock(key):
        hit = cache.get(key)
        if hit is not None:
            return hit
        text = _complete_nonempty(request, backend)
        cache.put(key, request, text)
        return text


_EMPTY_ATTEMPTS = 3


def _complete_nonempty(request: GenRequest, backend: Backend) -> str:
    attempts = getattr(backend, "config", None)
    attempts = attempts.max_retries if attempts is not None else _EMPTY_ATTEMPTS
    for _ in range(max(1, attempts)):
        text = backend.complete(request)
        if text and text.strip():
            return text.strip()
    raise EmptyResponseError(
        f"backend returned an empty response for template "
        f"{request.template_id!r} (sample {request.sample_index})"
    )


# -- attribute / description generation -------------------------------------

_BULLET = re.compile(r"^\s*(?:[-*•·]+|\d+[.)])\s*")
_LABEL = re.compile(
    r"^\s*(?:attributes|characteristics|answer)\s*:\s*", re.IGNORECASE
)


def parse_attributes(text: str) -> list[str]:
    """Tolerant split of a free-form attribute response into phrases.

    Splits on commas and newlines; strips bullets, numbering, and a leading
    label; drops empties and duplicates (first occurrence wins).
    """
    out: list[str] = []
    seen = set()
    for line in text.splitlines():
        line = _LABEL.sub("", _BULLET.sub("", line))
        for piece in line.split(","):
            piece = piece.strip().strip(".").strip()
            if piece and piece.casefold() not in seen:
                seen.add(piece.casefold())
                out.append(piece)
    return out


def _provenance(backend: Backend, temperature: float) -> Provenance:
    return Provenance(
        backend=backend.kind,
        model=backend.model_name,
        temperature=temperature,
        template_version=TEMPLATE_VERSION,
    )


def generate_descriptor_set(
    class_name: str,
    backend: Backend,
    cache: Optional[DiskCache] = None,
    temperature: float = TEXT_TEMPERATURE,
) -> DescriptorSet:
    """Attributes plus description for one class.

    A field whose response stays empty after retries is marked absent (the
    classifier falls back per component); only when every field is absent
    does the call raise EmptyResponse.
    """
    if not class_name or not class_name.strip():
        raise InvalidClassNameError("class name must be nonempty")
    class_name = class_name.strip()
    bindings = (("class-name", class_name),)

    attributes: list[str] = []
    description = ""
    failures = 0
    try:
        attributes = parse_attributes(
            complete_cached(
                GenRequest("attributes", bindings, temperature), backend, cache
            )
        )
    except EmptyResponseError:
        failures += 1
    try:
        description = complete_cached(
            GenRequest("description", bindings, temperature), backend, cache
        )
    except EmptyResponseError:
        failures += 1
    if failures == 2:
        raise EmptyResponseError(
            f"backend produced no usable descriptors for {class_name!r}"
        )
    return DescriptorSet(
        class_name=class_name,
        attributes=attributes,
        description=description,
        parent_context=None,
        provenance=_provenance(backend, temperature),
    )


def generate_hierarchy(
    classes: Sequence[str],
    backend: Backend,
    cache: Optional[DiskCache] = None,
    temperature: float = TEXT_TEMPERATURE,
) -> str:
    """One completion asking the model to group the classes; raw text out."""
    classes = [c.strip() for c in classes if c and c.strip()]
    if not classes:
        raise InvalidInputError("hierarchy generation needs at least one class")
    request = GenRequest(
        "hierarchy", (("class-names", ", ".join(classes)),), temperature
    )
    return complete_cached(request, backend, cache)


def parse_hierarchy(response: str, classes: Sequence[str]) -> HierarchyMap:
    """Parse ``parent: child, child, …`` lines and align to the class list.

    Classes absent from the response land in "other"; a class under two
    parents raises DuplicateAssignment. Matching is case- and
    separator-insensitive.
    """
    assignments: dict[str, list[str]] = {}
    for line in response.splitlines():
        line = _BULLET.sub("", line).strip()
        if not line or ":" not in line:
            continue
        parent, _, rest = line.partition(":")
        parent = parent.strip()
        if not parent:
            continue
        children = [c.strip() for c in rest.split(",") if c.strip()]
        assignments.setdefault(parent, []).extend(children)
    return align_hierarchy(assignments, classes)


def augment_caption(
    caption: str,
    backend: Backend,
    cache: Optional[DiskCache] = None,
    n: int = N_CAPTION_VARIANTS,
    temperature: float = TEXT_TEMPERATURE,
) -> tuple[list[str], bool]:
    """n generated caption variants, distinct when the backend cooperates.

    Returns (variants, padded): if fewer than n distinct strings come back
    after one extra round of draws, the last variant is duplicated to
    length n and padded=True so provenance can record it.
    """
    if not caption or not caption.strip():
        raise InvalidInputError("caption must be nonempty")
    caption = caption.strip()
    bindings = (("input caption", caption),)

    variants: list[str] = []
    seen = set()
    # Up to 2n draws to find n distinct variants.
    for i in range(2 * n):
        if len(variants) == n:
            break
        text = complete_cached(
            GenRequest("caption_augment", bindings, temperature, sample_index=i),
            backend,
            cache,
        )
        if text not in seen:
            seen.add(text)
            variants.append(text)
    padded = len(variants) < n
    if padded and not variants:
        raise EmptyResponseError(f"no caption variants generated for {caption!r}")
    while len(variants) < n:
        variants.append(variants[-1])
    return variants, padded


def generate_video_descriptions(
    video_id: str,
    backend: Backend,
    cache: Optional[DiskCache] = None,
    n: int = N_DESC_ACTION,
    temperature: float = VIDEO_TEMPERATURE,
) -> list[str]:
    """Exactly n descriptions of one video from a video-capable backend
    (recorded fixture, multimodal endpoint, or the mock)."""
    if not video_id:
        raise InvalidInputError("video_id must be nonempty")
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    out = []
    for i in range(n):
        request = GenRequest(
            "video_desc", (), temperature, sample_index=i, video_id=video_id
        )
        out.append(complete_cached(request, backend, cache))
    return out
