"""Deterministic SVG rendering of weight maps and prediction scatters."""

import xml.etree.ElementTree as ET

import numpy as np
import pytest

from vigilkit.report import (diverging_color, render_heatmap, render_scatter,
                             save_svg)

ROWS = [f"R{i}" for i in range(4)]
COLS = [f"c{j}" for j in range(3)]


def parse_svg(text):
    return ET.fromstring(text)


def tags(root, name):
    return [el for el in root.iter() if el.tag.endswith("}" + name) or el.tag == name]


class TestDivergingColor:
    def test_endpoints_and_midpoint(self):
        assert diverging_color(-1.0, 1.0) == "#1a2c5c"
        assert diverging_color(1.0, 1.0) == "#fffacd"
        assert diverging_color(0.0, 1.0) == "#808080"

    def test_flat_matrix_maps_to_midpoint(self):
        assert diverging_color(0.0, 0.0) == "#808080"

    def test_values_clipped_to_range(self):
        assert diverging_color(-5.0, 1.0) == "#1a2c5c"
        assert diverging_color(5.0, 1.0) == "#fffacd"

    def test_monotone_in_value(self):
        def red(v):
            return int(diverging_color(v, 1.0)[1:3], 16)
        values = [red(v) for v in np.linspace(-1, 1, 9)]
        assert values == sorted(values)


class TestHeatmap:
    def test_valid_xml_with_one_rect_per_cell(self, rng):
        matrix = rng.standard_normal((4, 3))
        svg = render_heatmap(matrix, ROWS, COLS, title="weights")
        root = parse_svg(svg)
        assert len(tags(root, "rect")) == 12

    def test_labels_present(self, rng):
        svg = render_heatmap(rng.standard_normal((4, 3)), ROWS, COLS, title="map")
        for label in ROWS + COLS + ["map"]:
            assert f">{label}<" in svg

    def test_deterministic_bytes(self, rng):
        matrix = rng.standard_normal((4, 3))
        a = render_heatmap(matrix, ROWS, COLS, title="t")
        b = render_heatmap(matrix, ROWS, COLS, title="t")
        assert a == b

    def test_label_count_validation(self, rng):
        with pytest.raises(ValueError, match="label counts"):
            render_heatmap(rng.standard_normal((4, 3)), ROWS[:2], COLS, title="t")
        with pytest.raises(ValueError, match="label counts"):
            render_heatmap(rng.standard_normal((4, 3)), ROWS, COLS[:1], title="t")

    def test_nonfinite_rejected(self, rng):
        matrix = rng.standard_normal((4, 3))
        matrix[0, 0] = np.nan
        with pytest.raises(ValueError, match="finite"):
            render_heatmap(matrix, ROWS, COLS, title="t")

    def test_special_characters_escaped(self, rng):
        svg = render_heatmap(rng.standard_normal((4, 3)), ROWS, COLS,
                             title="a<b & c>d")
        parse_svg(svg)
        assert "a&lt;b &amp; c&gt;d" in svg

    def test_full_feature_grid(self, rng):
        matrix = rng.standard_normal((14, 12))
        svg = render_heatmap(matrix, [f"roi{i}" for i in range(14)],
                             [f"b{j}" for j in range(12)], title="relevance")
        root = parse_svg(svg)
        assert len(tags(root, "rect")) == 168

    def test_extreme_cells_get_palette_endpoints(self):
        matrix = np.array([[2.0, -2.0], [0.0, 1.0]])
        svg = render_heatmap(matrix, ["a", "b"], ["x", "y"], title="")
        assert "#fffacd" in svg and "#1a2c5c" in svg and "#808080" in svg


class TestScatter:
    def test_valid_xml_with_one_marker_per_point(self, rng):
        true = rng.standard_normal(10)
        pred = true + 0.1 * rng.standard_normal(10)
        svg = render_scatter(true, pred, pearson_r=0.97, p_value=0.0001, title="fit")
        root = parse_svg(svg)
        assert len(tags(root, "circle")) == 10

    def test_annotation_carries_r_and_stars(self, rng):
        true = rng.standard_normal(10)
        svg = render_scatter(true, true, pearson_r=0.876, p_value=0.0005, title="t")
        assert "r = 0.876***" in svg
        svg = render_scatter(true, true, pearson_r=0.5, p_value=0.2, title="t")
        assert "r = 0.500" in svg
        assert "*" not in svg.split("r = 0.500")[1][:6]

    def test_identity_line_present(self, rng):
        true = rng.standard_normal(8)
        svg = render_scatter(true, true, 1.0, 0.0, title="t")
        root = parse_svg(svg)
        assert len(tags(root, "line")) == 1

    def test_deterministic_bytes(self, rng):
        true = rng.standard_normal(8)
        pred = rng.standard_normal(8)
        assert render_scatter(true, pred, 0.1, 0.5, title="x") == \
            render_scatter(true, pred, 0.1, 0.5, title="x")

    def test_length_mismatch_rejected(self, rng):
        with pytest.raises(ValueError):
            render_scatter(rng.standard_normal(5), rng.standard_normal(6),
                           0.5, 0.1, title="t")

    def test_constant_values_still_render(self):
        svg = render_scatter(np.full(4, 2.0), np.full(4, 2.0), float("nan"),
                             float("nan"), title="flat")
        assert "r undefined" in svg
        parse_svg(svg)


class TestSaveSvg:
    def test_writes_utf8_with_unix_newlines(self, rng, tmp_path):
        svg = render_heatmap(rng.standard_normal((4, 3)), ROWS, COLS, title="t")
        path = tmp_path / "out.svg"
        save_svg(svg, path)
        raw = path.read_bytes()
        assert b"\r\n" not in raw
        assert raw.decode("utf-8") == svg
