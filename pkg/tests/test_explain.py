import csv
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from vidzero.core import cosine, normalize
from vidzero.errors import InvalidInputError
from vidzero.explain import (
    FORMATS,
    attribute_contributions,
    build_report,
    emit_report,
    report_filename,
)


class TestContributions:
    def test_scores_are_per_attribute_cosines(self, rng, embedder):
        v = normalize(rng.standard_normal(embedder.dim))
        attrs = ["grid markings", "hopping", "jumping"]
        out = attribute_contributions(v, attrs, embedder)
        want = {a: cosine(v, embedder.embed([a])[0]) for a in attrs}
        assert set(a for a, _ in out) == set(attrs)
        for a, s in out:
            assert s == pytest.approx(want[a], abs=1e-9)

    def test_sorted_descending(self, rng, embedder):
        v = normalize(rng.standard_normal(embedder.dim))
        out = attribute_contributions(v, [f"attr {i}" for i in range(6)], embedder)
        scores = [s for _, s in out]
        assert scores == sorted(scores, reverse=True)

    def test_raw_attribute_text_is_embedded(self, embedder):
        """The attribute string itself is embedded, with no prompt wrapper."""
        attr = "grid markings"
        v = embedder.embed([attr])[0]
        out = attribute_contributions(v, [attr], embedder)
        assert out[0][1] == pytest.approx(1.0, abs=1e-9)

    def test_empty_attributes_raise(self, rng, embedder):
        v = normalize(rng.standard_normal(embedder.dim))
        with pytest.raises(InvalidInputError):
            attribute_contributions(v, [], embedder)


class TestReport:
    def make_report(self, rng, embedder):
        v = normalize(rng.standard_normal(embedder.dim))
        return build_report(
            "v1",
            "hopscotch",
            v,
            ["grid markings", "hopping"],
            embedder,
            predicted_class="hopscotch",
            predicted_score=0.73,
        )

    def test_fields(self, rng, embedder):
        r = self.make_report(rng, embedder)
        assert r.video_id == "v1"
        assert r.class_name == "hopscotch"
        assert len(r.entries) == 2
        assert r.predicted_class == "hopscotch"

    def test_filenames(self, rng, embedder):
        r = self.make_report(rng, embedder)
        assert report_filename(r, "markdown") == "explain_v1_hopscotch.md"
        assert report_filename(r, "csv") == "explain_v1_hopscotch.csv"
        assert report_filename(r, "svg_bar") == "explain_v1_hopscotch.svg"

    def test_unknown_format_rejected(self, rng, embedder, tmp_path):
        r = self.make_report(rng, embedder)
        with pytest.raises(InvalidInputError):
            emit_report(r, "pdf", tmp_path)

    def test_markdown_contains_table(self, rng, embedder, tmp_path):
        r = self.make_report(rng, embedder)
        path = emit_report(r, "markdown", tmp_path)
        text = path.read_text()
        assert "grid markings" in text
        assert "|" in text
        assert "hopscotch" in text

    def test_csv_parses_with_header(self, rng, embedder, tmp_path):
        r = self.make_report(rng, embedder)
        path = emit_report(r, "csv", tmp_path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["attribute", "cosine"]
        assert len(rows) == 3
        float(rows[1][1])

    def test_svg_is_wellformed_xml_with_bars(self, rng, embedder, tmp_path):
        r = self.make_report(rng, embedder)
        path = emit_report(r, "svg_bar", tmp_path)
        root = ET.fromstring(path.read_text())
        assert root.tag.endswith("svg")
        rects = [el for el in root.iter() if el.tag.endswith("rect")]
        assert len(rects) >= 2

    def test_svg_escapes_special_chars(self, embedder, tmp_path, rng):
        v = normalize(rng.standard_normal(embedder.dim))
        r = build_report("v<1>", 'cls & "co"', v, ["a<b>&c"], embedder)
        path = emit_report(r, "svg_bar", tmp_path)
        ET.fromstring(path.read_text())  # parses despite hostile names

    def test_formats_constant(self):
        assert FORMATS == ("markdown", "csv", "svg_bar")
