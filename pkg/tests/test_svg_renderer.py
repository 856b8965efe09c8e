import xml.etree.ElementTree as ET

import pytest

from kpistat.analyzers import ClusterAnalyzer, DistanceAnalyzer
from kpistat.errors import DomainError, NumericError
from kpistat.models import Dendrogram, DistanceMatrix, KpiFrame
from kpistat.svg_renderer import HEIGHT, WIDTH, render_dendrogram, render_scatter, render_series

SVG = "{http://www.w3.org/2000/svg}"


def _parse(svg: str) -> ET.Element:
    return ET.fromstring(svg.encode("utf-8"))


def _by_class(root: ET.Element, tag: str, css_class: str):
    return [element for element in root.iter(f"{SVG}{tag}") if element.get("class") == css_class]


@pytest.fixture
def three_leaf_tree():
    points = KpiFrame.from_matrix(["p0", "p1", "p2"], ["x"], [""], [[0.0], [1.0], [10.0]])
    return ClusterAnalyzer.agglomerate(DistanceAnalyzer.distance_matrix(points))


def test_dendrogram_structure(three_leaf_tree):
    root = _parse(render_dendrogram(three_leaf_tree))
    assert root.tag == f"{SVG}svg"
    assert root.get("width") == str(WIDTH) and root.get("height") == str(HEIGHT)
    assert len(_by_class(root, "path", "bracket")) == 2
    labels = [element.text for element in _by_class(root, "text", "label")]
    assert labels == ClusterAnalyzer.leaf_order(three_leaf_tree)
    assert _by_class(root, "text", "title")[0].text == "Dendrogram"


def test_dendrogram_is_deterministic(table1_zscored):
    tree = ClusterAnalyzer.agglomerate(DistanceAnalyzer.distance_matrix(table1_zscored))
    first = render_dendrogram(tree)
    assert first == render_dendrogram(tree)
    assert len(_by_class(_parse(first), "text", "label")) == 20


def test_zero_height_dendrogram():
    tree = ClusterAnalyzer.agglomerate(DistanceMatrix(labels=["a", "b"], d=[[0.0, 0.0], [0.0, 0.0]]))
    root = _parse(render_dendrogram(tree))
    assert len(_by_class(root, "path", "bracket")) == 1
    assert [element.text for element in _by_class(root, "text", "tick")] == ["0"]


def test_dendrogram_without_leaves():
    with pytest.raises(DomainError):
        render_dendrogram(Dendrogram(leaf_labels=[], merges=[]))


def test_scatter_with_two_point_sets():
    svg = render_scatter(
        [("Hr 1", 0.5, -0.25), ("Hr 2", -1.0, 0.75)],
        [("Latency", 0.1, 0.2)],
        title="Correspondence analysis",
    )
    root = _parse(svg)
    assert len(_by_class(root, "circle", "point")) == 2
    assert len(_by_class(root, "rect", "column-point")) == 1
    assert [element.text for element in _by_class(root, "text", "label")] == ["Hr 1", "Hr 2", "Latency"]


def test_scatter_escapes_labels():
    root = _parse(render_scatter([("a<b & \"c\"", 0.0, 0.0)]))
    assert _by_class(root, "text", "label")[0].text == "a<b & \"c\""


def test_scatter_points_stay_on_canvas(rng):
    points = [(f"s{i}", x, y) for i, (x, y) in enumerate(rng.normal(size=(15, 2)))]
    root = _parse(render_scatter(points))
    for circle in _by_class(root, "circle", "point"):
        assert 0 <= float(circle.get("cx")) <= WIDTH
        assert 0 <= float(circle.get("cy")) <= HEIGHT


def test_scatter_rejects_empty_and_non_finite():
    with pytest.raises(DomainError):
        render_scatter([])
    with pytest.raises(NumericError):
        render_scatter([("a", float("nan"), 0.0)])


def test_series(table1):
    root = _parse(render_series(table1, "Gi throughput"))
    polyline, = _by_class(root, "polyline", "series")
    assert len(polyline.get("points").split()) == 20
    assert _by_class(root, "text", "title")[0].text == "Gi throughput (Mbps)"
    assert len(_by_class(root, "text", "label")) == 20


def test_series_of_a_constant_kpi():
    frame = KpiFrame.from_matrix(["a", "b"], ["flat"], [""], [[2.0], [2.0]])
    root = _parse(render_series(frame, "flat"))
    assert _by_class(root, "text", "title")[0].text == "flat"


def test_series_unknown_variable(table1):
    with pytest.raises(DomainError):
        render_series(table1, "Jitter")
