"""
Self-contained SVG figures: dendrogram, labeled scatter / CA joint plot and a
KPI time series. Output is plain text on a fixed 800x600 canvas with every
number written to 6 significant digits, so equal input gives equal bytes.
"""
from typing import Dict, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .analyzers import ClusterAnalyzer
from .errors import DomainError, NumericError
from .models import Dendrogram, KpiFrame

WIDTH = 800
HEIGHT = 600
MARGIN = 60
RANGE_PADDING = 0.05
MARKER_SIZE = 4

LabeledPoints = Sequence[Tuple[str, float, float]]


def _num(value: float) -> str:
    text = f"{float(value):.6g}"
    return "0" if text == "-0" else text


class SvgDocument:
    def __init__(self, width: int = WIDTH, height: int = HEIGHT):
        self.width = width
        self.height = height
        self.parts: List[str] = []

    def _element(self, tag: str, attrs: Dict[str, object], body: Optional[str] = None) -> None:
        rendered = " ".join(
            f"{key.replace('_', '-')}={quoteattr(_num(value) if isinstance(value, (int, float)) else str(value))}"
            for key, value in attrs.items()
        )
        if body is None:
            self.parts.append(f"<{tag} {rendered}/>")
        else:
            self.parts.append(f"<{tag} {rendered}>{escape(body)}</{tag}>")

    def line(self, x1: float, y1: float, x2: float, y2: float, css_class: str = "axis") -> None:
        self._element("line", {"class": css_class, "x1": x1, "y1": y1, "x2": x2, "y2": y2, "stroke": "black"})

    def path(self, commands: str, css_class: str) -> None:
        self._element("path", {"class": css_class, "d": commands, "fill": "none", "stroke": "black"})

    def circle(self, x: float, y: float, css_class: str) -> None:
        self._element("circle", {"class": css_class, "cx": x, "cy": y, "r": MARKER_SIZE, "fill": "steelblue"})

    def square(self, x: float, y: float, css_class: str) -> None:
        self._element("rect", {
            "class": css_class,
            "x": x - MARKER_SIZE, "y": y - MARKER_SIZE,
            "width": 2 * MARKER_SIZE, "height": 2 * MARKER_SIZE,
            "fill": "darkred",
        })

    def polyline(self, points: Sequence[Tuple[float, float]], css_class: str) -> None:
        coordinates = " ".join(f"{_num(x)},{_num(y)}" for x, y in points)
        self._element("polyline", {"class": css_class, "points": coordinates, "fill": "none", "stroke": "steelblue"})

    def text(self, x: float, y: float, content: str, css_class: str = "label", anchor: str = "start") -> None:
        self._element("text", {"class": css_class, "x": x, "y": y, "font-size": 11, "text-anchor": anchor}, content)

    def to_string(self) -> str:
        header = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
        )
        return header + "".join(f"{part}\n" for part in self.parts) + "</svg>\n"


class _Axis:
    """Affine map from a padded data range onto a pixel interval"""

    def __init__(self, values: Sequence[float], low_pixel: float, high_pixel: float):
        low, high = float(min(values)), float(max(values))
        span = high - low
        if span == 0.0:
            span = max(1.0, abs(low))
            low, high = low - span / 2.0, high + span / 2.0
        self.low = low - RANGE_PADDING * span
        self.high = high + RANGE_PADDING * span
        self.low_pixel = low_pixel
        self.high_pixel = high_pixel

    def __call__(self, value: float) -> float:
        fraction = (value - self.low) / (self.high - self.low)
        return self.low_pixel + fraction * (self.high_pixel - self.low_pixel)

    def contains(self, value: float) -> bool:
        return self.low <= value <= self.high


def render_dendrogram(tree: Dendrogram, title: str = "Dendrogram") -> str:
    """Leaves along the bottom in dendrogram order, merge heights upward"""
    n = len(tree.leaf_labels)
    if n == 0:
        raise DomainError("dendrogram has no leaves")
    document = SvgDocument()
    order = ClusterAnalyzer.leaf_order(tree)
    step = (WIDTH - 2 * MARGIN) / max(n, 1)
    x_of = {tree.leaf_labels.index(label): MARGIN + step * (i + 0.5) for i, label in enumerate(order)}
    heights = ClusterAnalyzer.node_heights(tree)
    top = max(heights) if heights else 0.0
    baseline = HEIGHT - 2 * MARGIN

    def y_of(height: float) -> float:
        if top == 0.0:
            return baseline
        return baseline - (height / top) * (baseline - MARGIN)

    document.text(WIDTH / 2, MARGIN / 2, title, css_class="title", anchor="middle")
    document.line(MARGIN / 2, baseline, MARGIN / 2, y_of(top))
    document.text(MARGIN / 2 - 4, baseline, _num(0.0), css_class="tick", anchor="end")
    if top > 0.0:
        document.text(MARGIN / 2 - 4, y_of(top), _num(top), css_class="tick", anchor="end")

    for offset, merge in enumerate(tree.merges):
        node = n + offset
        left_x, right_x = x_of[merge.left], x_of[merge.right]
        merge_y = y_of(merge.height)
        document.path(
            f"M{_num(left_x)} {_num(y_of(heights[merge.left]))} V{_num(merge_y)} "
            f"H{_num(right_x)} V{_num(y_of(heights[merge.right]))}",
            css_class="bracket",
        )
        x_of[node] = (left_x + right_x) / 2.0

    for label in order:
        document.text(x_of[tree.leaf_labels.index(label)], baseline + 16, label, anchor="middle")
    return document.to_string()


def render_scatter(
    points: LabeledPoints,
    second_set: Optional[LabeledPoints] = None,
    title: str = "",
) -> str:
    """
    Labeled 2-D scatter. Points of `second_set` (e.g. CA column points) are drawn
    as squares, the first set as circles.
    """
    if not points:
        raise DomainError("scatter plot needs at least one point")
    everything = list(points) + list(second_set or [])
    xs = [float(x) for _, x, _ in everything]
    ys = [float(y) for _, _, y in everything]
    if not np.all(np.isfinite(xs + ys)):
        raise NumericError("scatter coordinates must be finite")

    document = SvgDocument()
    x_axis = _Axis(xs, MARGIN, WIDTH - MARGIN)
    y_axis = _Axis(ys, HEIGHT - MARGIN, MARGIN)
    if title:
        document.text(WIDTH / 2, MARGIN / 2, title, css_class="title", anchor="middle")
    if y_axis.contains(0.0):
        document.line(MARGIN, y_axis(0.0), WIDTH - MARGIN, y_axis(0.0))
    if x_axis.contains(0.0):
        document.line(x_axis(0.0), HEIGHT - MARGIN, x_axis(0.0), MARGIN)

    for label, x, y in points:
        document.circle(x_axis(x), y_axis(y), css_class="point")
        document.text(x_axis(x) + MARKER_SIZE + 2, y_axis(y) - MARKER_SIZE, label)
    for label, x, y in second_set or []:
        document.square(x_axis(x), y_axis(y), css_class="column-point")
        document.text(x_axis(x) + MARKER_SIZE + 2, y_axis(y) - MARKER_SIZE, label)
    return document.to_string()


def render_series(frame: KpiFrame, variable: str) -> str:
    """One KPI plotted against the sample periods in dataset order"""
    if variable not in frame.variable_labels:
        raise DomainError(f"unknown variable '{variable}'")
    values = frame.column(variable).tolist()
    document = SvgDocument()
    x_axis = _Axis(list(range(len(values))), MARGIN, WIDTH - MARGIN)
    y_axis = _Axis(values, HEIGHT - MARGIN, MARGIN)

    unit = frame.units[frame.variable_labels.index(variable)]
    document.text(WIDTH / 2, MARGIN / 2, f"{variable} ({unit})" if unit else variable,
                  css_class="title", anchor="middle")
    document.line(MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN)
    document.line(MARGIN, HEIGHT - MARGIN, MARGIN, MARGIN)
    document.text(MARGIN - 4, y_axis(min(values)), _num(min(values)), css_class="tick", anchor="end")
    document.text(MARGIN - 4, y_axis(max(values)), _num(max(values)), css_class="tick", anchor="end")
    document.polyline([(x_axis(i), y_axis(value)) for i, value in enumerate(values)], css_class="series")
    for i, label in enumerate(frame.sample_labels):
        document.text(x_axis(i), HEIGHT - MARGIN + 16, label, anchor="middle")
    return document.to_string()
