import json
import os
import threading

import pytest
import requests

from vidzero.errors import (
    BackendUnavailableError,
    EmptyResponseError,
    InvalidInputError,
    MissingFixtureError,
    UnboundPlaceholderError,
)
from vidzero.genclient import (
    N_CAPTION_VARIANTS,
    N_DESC_ACTION,
    N_DESC_RETRIEVAL,
    TEMPLATE_VERSION,
    TEMPLATES,
    TEXT_TEMPERATURE,
    VIDEO_TEMPERATURE,
    BackendConfig,
    DiskCache,
    FixtureBackend,
    GenRequest,
    HttpChatBackend,
    MockBackend,
    augment_caption,
    cache_key,
    complete_cached,
    generate_descriptor_set,
    generate_hierarchy,
    generate_video_descriptions,
    make_backend,
    parse_attributes,
    parse_hierarchy,
    render_prompt,
)

EXPECTED_TEMPLATES = {
    "attributes": (
        "What are the distinct visual characteristics to identify a "
        "{class-name} video action?"
    ),
    "description": "How {class-name} action is performed visually?",
    "hierarchy": (
        "Divide the list of {class-names} into parent and child classes. "
        "Such that actions that are visually similar to each other are in "
        "the same group. If the action is not similar to any other action "
        "in the list, assign it to others."
    ),
    "caption_augment": (
        "Given a caption: {input caption}, generate a visually similar captions."
    ),
    "video_desc": "describe the activity in the video",
    "base_prompt": "a photo of a {class-name}",
    "context_prompt": "a photo of a {parent} i.e., {class-name}",
}


class TestTemplates:
    def test_template_texts_are_frozen(self):
        assert TEMPLATE_VERSION == 1
        for tid, text in EXPECTED_TEMPLATES.items():
            assert TEMPLATES[tid].text == text, tid

    def test_no_extra_templates(self):
        assert set(TEMPLATES) == set(EXPECTED_TEMPLATES)

    def test_render_substitutes(self):
        got = render_prompt("attributes", {"class-name": "hopscotch"})
        assert got == (
            "What are the distinct visual characteristics to identify a "
            "hopscotch video action?"
        )

    def test_render_context_prompt_two_placeholders(self):
        got = render_prompt(
            "context_prompt", {"parent": "playing music", "class-name": "drumming"}
        )
        assert got == "a photo of a playing music i.e., drumming"

    def test_render_unbound_placeholder_raises(self):
        with pytest.raises(UnboundPlaceholderError):
            render_prompt("attributes", {})

    def test_render_unknown_template_raises(self):
        with pytest.raises(InvalidInputError):
            render_prompt("nonexistent", {})

    def test_sampling_defaults(self):
        assert TEXT_TEMPERATURE == 0.2
        assert VIDEO_TEMPERATURE == 0.5
        assert N_DESC_ACTION == 3
        assert N_DESC_RETRIEVAL == 10
        assert N_CAPTION_VARIANTS == 2


class TestCacheKey:
    def backend(self):
        return MockBackend()

    def req(self, **kw):
        base = dict(
            template_id="attributes",
            bindings=(("class-name", "hopscotch"),),
            temperature=0.2,
            sample_index=0,
        )
        base.update(kw)
        return GenRequest(**base)

    def test_key_is_sha256_hex(self):
        key = cache_key(self.req(), self.backend())
        assert len(key) == 64
        int(key, 16)

    def test_key_stable(self):
        assert cache_key(self.req(), self.backend()) == cache_key(
            self.req(), self.backend()
        )

    @pytest.mark.parametrize(
        "kw",
        [
            {"template_id": "description", "bindings": (("class-name", "hopscotch"),)},
            {"bindings": (("class-name", "drumming"),)},
            {"temperature": 0.5},
            {"sample_index": 1},
            {"video_id": "v1"},
        ],
    )
    def test_key_sensitive_to_fields(self, kw):
        assert cache_key(self.req(), self.backend()) != cache_key(
            self.req(**kw), self.backend()
        )

    def test_key_sensitive_to_model(self):
        class OtherModel(MockBackend):
            model_name = "other"

        assert cache_key(self.req(), self.backend()) != cache_key(
            self.req(), OtherModel()
        )


class TestMockBackend:
    def test_attribute_samples(self):
        be = MockBackend()
        req = GenRequest("attributes", (("class-name", "hopscotch"),), sample_index=2)
        assert be.complete(req) == "mock-attr-3:hopscotch"

    def test_description(self):
        be = MockBackend()
        req = GenRequest("description", (("class-name", "hopscotch"),))
        assert be.complete(req) == "mock-desc:hopscotch"

    def test_hierarchy(self):
        be = MockBackend()
        req = GenRequest("hierarchy", (("class-names", "a, b"),))
        assert be.complete(req) == "mock-parent: a, b\nother:"

    def test_caption(self):
        be = MockBackend()
        req = GenRequest("caption_augment", (("input caption", "c"),), sample_index=1)
        assert be.complete(req) == "mock-cap-1:c"

    def test_video_desc(self):
        be = MockBackend()
        req = GenRequest("video_desc", video_id="v7", sample_index=0)
        assert be.complete(req) == "mock-vdesc-0:v7"


class TestFixtureBackend:
    def write_fixture(self, tmp_path, rows):
        p = tmp_path / "fx.jsonl"
        with open(p, "w") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
        return p

    def test_replay_by_prompt(self, tmp_path):
        prompt = render_prompt("attributes", {"class-name": "x"})
        p = self.write_fixture(tmp_path, [{"prompt": prompt, "responses": ["a, b"]}])
        be = FixtureBackend(p)
        assert be.complete(GenRequest("attributes", (("class-name", "x"),))) == "a, b"

    def test_replay_by_video_id(self, tmp_path):
        p = self.write_fixture(
            tmp_path, [{"video_id": "v1", "descriptions": ["d0", "d1"]}]
        )
        be = FixtureBackend(p)
        assert be.complete(GenRequest("video_desc", video_id="v1")) == "d0"
        assert (
            be.complete(GenRequest("video_desc", video_id="v1", sample_index=1))
            == "d1"
        )

    def test_missing_prompt_raises(self, tmp_path):
        p = self.write_fixture(tmp_path, [])
        be = FixtureBackend(p)
        with pytest.raises(MissingFixtureError):
            be.complete(GenRequest("attributes", (("class-name", "x"),)))

    def test_extra_samples_reuse_last_recorded(self, tmp_path):
        prompt = render_prompt("description", {"class-name": "x"})
        p = self.write_fixture(tmp_path, [{"prompt": prompt, "response": "only"}])
        be = FixtureBackend(p)
        req = GenRequest("description", (("class-name", "x"),), sample_index=5)
        assert be.complete(req) == "only"


class CountingBackend:
    kind = "mock"
    model_name = "counting"

    def __init__(self, responses=None):
        self.calls = 0
        self.responses = responses

    def complete(self, request):
        self.calls += 1
        if self.responses is not None:
            r = self.responses[min(self.calls - 1, len(self.responses) - 1)]
            return r
        return f"resp-{request.sample_index}"


class TestDiskCache:
    def test_miss_then_hit(self, tmp_path):
        cache = DiskCache(tmp_path)
        be = CountingBackend()
        req = GenRequest("description", (("class-name", "x"),))
        first = complete_cached(req, be, cache)
        second = complete_cached(req, be, cache)
        assert first == second
        assert be.calls == 1
        assert cache.misses == 1
        assert cache.hits == 1

    def test_layout_is_sharded_by_prefix(self, tmp_path):
        cache = DiskCache(tmp_path)
        be = CountingBackend()
        req = GenRequest("description", (("class-name", "x"),))
        complete_cached(req, be, cache)
        key = cache_key(req, be)
        assert (tmp_path / key[:2] / f"{key}.json").is_file()

    def test_empty_response_never_stored(self, tmp_path):
        cache = DiskCache(tmp_path)
        cache.put("ab" * 32, GenRequest("description", (("class-name", "x"),)), "  ")
        assert cache.get("ab" * 32) is None
        assert list(tmp_path.rglob("*.json")) == []

    def test_cached_document_fields(self, tmp_path):
        cache = DiskCache(tmp_path)
        be = CountingBackend()
        req = GenRequest("description", (("class-name", "x"),), video_id="v0")
        complete_cached(req, be, cache)
        key = cache_key(req, be)
        doc = json.loads((tmp_path / key[:2] / f"{key}.json").read_text())
        assert doc["key"] == key
        assert doc["template_id"] == "description"
        assert doc["response"] == "resp-0"
        assert doc["video_id"] == "v0"

    def test_concurrent_same_key_single_backend_call(self, tmp_path):
        cache = DiskCache(tmp_path)

        class SlowBackend(CountingBackend):
            def complete(self, request):
                import time

                time.sleep(0.05)
                return super().complete(request)

        be = SlowBackend()
        req = GenRequest("description", (("class-name", "x"),))
        results = []

        def work():
            results.append(complete_cached(req, be, cache))

        threads = [threading.Thread(target=work) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(set(results)) == 1
        assert be.calls == 1


class FakeResponse:
    def __init__(self, status_code, payload=None, text=""):
        self.status_code = status_code
        self._payload = payload
        self.text = text

    def json(self):
        if self._payload is None:
            raise ValueError("no json")
        return self._payload


def chat_payload(content):
    return {"choices": [{"message": {"content": content}}]}


class FakeSession:
    def __init__(self, script):
        self.script = list(script)
        self.requests = []

    def post(self, url, json=None, headers=None, timeout=None):
        self.requests.append(
            {"url": url, "json": json, "headers": headers, "timeout": timeout}
        )
        step = self.script.pop(0)
        if isinstance(step, Exception):
            raise step
        return step


def http_config(**kw):
    base = dict(
        kind="chat_http",
        endpoint_url="http://llm.test",
        model_name="gpt-test",
        max_retries=3,
    )
    base.update(kw)
    return BackendConfig(**base)


class TestHttpChatBackend:
    def test_success_parses_content(self):
        session = FakeSession([FakeResponse(200, chat_payload("hello"))])
        be = HttpChatBackend(http_config(), session=session, sleep=lambda s: None)
        out = be.complete(GenRequest("description", (("class-name", "x"),)))
        assert out == "hello"
        sent = session.requests[0]
        assert sent["url"] == "http://llm.test/v1/chat/completions"
        assert sent["json"]["model"] == "gpt-test"
        assert sent["json"]["messages"][0]["content"] == render_prompt(
            "description", {"class-name": "x"}
        )
        assert sent["json"]["temperature"] == 0.2

    def test_bearer_header_from_env(self, monkeypatch):
        monkeypatch.setenv("VP_API_KEY", "sekrit")
        session = FakeSession([FakeResponse(200, chat_payload("ok"))])
        be = HttpChatBackend(http_config(), session=session, sleep=lambda s: None)
        be.complete(GenRequest("description", (("class-name", "x"),)))
        assert session.requests[0]["headers"]["Authorization"] == "Bearer sekrit"

    def test_retries_on_429_then_succeeds(self):
        session = FakeSession(
            [FakeResponse(429), FakeResponse(200, chat_payload("ok"))]
        )
        sleeps = []
        be = HttpChatBackend(
            http_config(),
            session=session,
            sleep=sleeps.append,
            rng=__import__("random").Random(0),
        )
        assert (
            be.complete(GenRequest("description", (("class-name", "x"),))) == "ok"
        )
        assert len(session.requests) == 2
        assert len(sleeps) == 1
        assert 0.5 <= sleeps[0] <= 0.5 + 0.125

    def test_retries_on_transport_error(self):
        session = FakeSession(
            [
                requests.ConnectionError("boom"),
                FakeResponse(200, chat_payload("ok")),
            ]
        )
        be = HttpChatBackend(http_config(), session=session, sleep=lambda s: None)
        assert (
            be.complete(GenRequest("description", (("class-name", "x"),))) == "ok"
        )

    def test_client_error_fails_immediately(self):
        session = FakeSession([FakeResponse(400, text="bad request")])
        be = HttpChatBackend(http_config(), session=session, sleep=lambda s: None)
        with pytest.raises(BackendUnavailableError):
            be.complete(GenRequest("description", (("class-name", "x"),)))
        assert len(session.requests) == 1

    def test_server_errors_exhaust_retries(self):
        session = FakeSession([FakeResponse(500)] * 3)
        sleeps = []
        be = HttpChatBackend(
            http_config(),
            session=session,
            sleep=sleeps.append,
            rng=__import__("random").Random(0),
        )
        with pytest.raises(BackendUnavailableError):
            be.complete(GenRequest("description", (("class-name", "x"),)))
        assert len(session.requests) == 3
        assert len(sleeps) == 2
        assert 0.5 <= sleeps[0] <= 0.625
        assert 1.0 <= sleeps[1] <= 1.25

    def test_malformed_payload_raises(self):
        session = FakeSession([FakeResponse(200, {"nope": []})])
        be = HttpChatBackend(http_config(), session=session, sleep=lambda s: None)
        with pytest.raises(BackendUnavailableError):
            be.complete(GenRequest("description", (("class-name", "x"),)))


class TestMakeBackend:
    def test_mock(self):
        assert isinstance(make_backend(BackendConfig(kind="mock")), MockBackend)

    def test_fixture_requires_path(self):
        with pytest.raises(InvalidInputError):
            BackendConfig(kind="fixture_file")

    def test_chat_requires_endpoint(self):
        with pytest.raises(InvalidInputError):
            BackendConfig(kind="chat_http")

    def test_unknown_kind_rejected(self):
        with pytest.raises(InvalidInputError):
            BackendConfig(kind="telepathy")

    def test_max_retries_positive(self):
        with pytest.raises(InvalidInputError):
            BackendConfig(kind="mock", max_retries=0)


class TestParseAttributes:
    @pytest.mark.parametrize(
        "text,want",
        [
            ("baby, crawling, hand, knees", ["baby", "crawling", "hand", "knees"]),
            ("a,\nb", ["a", "b"]),
            ("- grid markings\n- hopping", ["grid markings", "hopping"]),
            ("1. one\n2. two", ["one", "two"]),
            ("Attributes: x, y", ["x", "y"]),
            ("dup, Dup, DUP", ["dup"]),
            ("", []),
            ("  \n ", []),
        ],
    )
    def test_parse(self, text, want):
        assert parse_attributes(text) == want


class TestDescriptorGeneration:
    def test_mock_descriptor_set(self):
        ds = generate_descriptor_set("hopscotch", MockBackend())
        assert ds.class_name == "hopscotch"
        assert list(ds.attributes) == ["mock-attr-1:hopscotch"]
        assert ds.description == "mock-desc:hopscotch"
        assert ds.provenance.backend == "mock"
        assert ds.provenance.template_version == TEMPLATE_VERSION

    def test_empty_class_name_raises(self):
        with pytest.raises(InvalidInputError):
            generate_descriptor_set("  ", MockBackend())

    def test_partial_empty_marks_field_absent(self):
        class HalfEmpty:
            kind = "mock"
            model_name = "half"

            def complete(self, request):
                if request.template_id == "description":
                    return ""
                return "a, b"

        ds = generate_descriptor_set("x", HalfEmpty())
        assert list(ds.attributes) == ["a", "b"]
        assert ds.description == ""

    def test_all_empty_raises(self):
        class AlwaysEmpty:
            kind = "mock"
            model_name = "empty"

            def complete(self, request):
                return "   "

        with pytest.raises(EmptyResponseError):
            generate_descriptor_set("x", AlwaysEmpty())

    def test_empty_then_success_retries(self):
        calls = {"n": 0}

        class FlakyEmpty:
            kind = "mock"
            model_name = "flaky"

            def complete(self, request):
                if request.template_id != "attributes":
                    return "desc"
                calls["n"] += 1
                return "" if calls["n"] == 1 else "a, b"

        ds = generate_descriptor_set("x", FlakyEmpty())
        assert list(ds.attributes) == ["a", "b"]
        assert calls["n"] == 2


class TestHierarchyGeneration:
    def test_mock_round_trip(self):
        classes = ["run", "sit"]
        text = generate_hierarchy(classes, MockBackend())
        hmap = parse_hierarchy(text, classes)
        assert hmap.parent_of("run") == "mock-parent"
        assert hmap.parent_of("sit") == "mock-parent"
        assert "other" in hmap.parents

    def test_empty_class_list_raises(self):
        with pytest.raises(InvalidInputError):
            generate_hierarchy([], MockBackend())

    def test_parse_plain_format(self):
        text = "sports: run, swim\nother: sit"
        hmap = parse_hierarchy(text, ["run", "swim", "sit", "sleep"])
        assert hmap.parent_of("run") == "sports"
        assert hmap.parent_of("sleep") == "other"

    def test_parse_tolerates_case_and_spacing(self):
        text = "Sports:  Run , SWIM\nOthers: sit"
        hmap = parse_hierarchy(text, ["run", "swim", "sit"])
        assert hmap.parent_of("run") == "sports"
        assert hmap.parent_of("sit") == "other"


class TestCaptionAugment:
    def test_mock_variants(self):
        variants, padded = augment_caption("a cat sits", MockBackend())
        assert variants == ["mock-cap-0:a cat sits", "mock-cap-1:a cat sits"]
        assert not padded

    def test_duplicates_padded_with_flag(self):
        class SameAlways:
            kind = "mock"
            model_name = "same"

            def complete(self, request):
                return "identical caption"

        variants, padded = augment_caption("c", SameAlways(), n=2)
        assert variants == ["identical caption", "identical caption"]
        assert padded

    def test_all_empty_raises(self):
        class Empty:
            kind = "mock"
            model_name = "e"

            def complete(self, request):
                return ""

        with pytest.raises(EmptyResponseError):
            augment_caption("c", Empty())

    def test_empty_caption_raises(self):
        with pytest.raises(InvalidInputError):
            augment_caption("   ", MockBackend())


class TestVideoDescriptions:
    def test_mock_samples(self):
        descs = generate_video_descriptions("v9", MockBackend(), n=3)
        assert descs == ["mock-vdesc-0:v9", "mock-vdesc-1:v9", "mock-vdesc-2:v9"]

    def test_cached_by_video(self, tmp_path):
        cache = DiskCache(tmp_path)
        be = MockBackend()
        a = generate_video_descriptions("v1", be, cache, n=2)
        b = generate_video_descriptions("v1", be, cache, n=2)
        assert a == b
        assert cache.hits == 2

    def test_distinct_videos_do_not_collide_in_cache(self, tmp_path):
        cache = DiskCache(tmp_path)
        be = MockBackend()
        a = generate_video_descriptions("v1", be, cache, n=1)
        b = generate_video_descriptions("v2", be, cache, n=1)
        assert a != b
        assert cache.hits == 0
