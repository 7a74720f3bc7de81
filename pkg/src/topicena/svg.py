"""Deterministic SVG rendering of co-registered networks.

Node radius is affine in node strength and edge stroke width affine in
absolute edge weight, each capped so the largest element hits a fixed
maximum. Zero-weight edges are omitted. Subtraction edges are colored by
sign: positive toward the first group's color, negative toward the second's.
Element order is fixed (points, edges by pair order, nodes by topic_id,
labels) and floats are written with fixed precision, so rendering the same
inputs twice yields byte-identical documents.
"""
from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import MissingLayout
from .network import NetworkGraph, NodeLayout
from .projection import UnitPoint


@dataclass(frozen=True)
class PlotOptions:
    width: int = 640
    height: int = 640
    margin: float = 48.0
    node_radius_min: float = 3.0
    node_radius_max: float = 18.0
    edge_width_min: float = 0.5
    edge_width_max: float = 8.0
    point_radius: float = 1.8
    color_pair: tuple[str, str] = ("blue", "red")
    edge_color: str | None = None  # overrides sign/group coloring when set
    node_color: str | None = None
    show_points: bool = True
    show_labels: bool = True
    font_size: int = 11
    axes: bool = True


def _fmt(value: float) -> str:
    return f"{value:.3f}"


class _Frame:
    """Affine map from data coordinates to the SVG viewport (y flipped)."""

    def __init__(self, xs, ys, options: PlotOptions):
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        x_lo, x_hi = float(xs.min()), float(xs.max())
        y_lo, y_hi = float(ys.min()), float(ys.max())
        span = max(x_hi - x_lo, y_hi - y_lo, 1e-9)
        # uniform scale, centered
        self.scale = min(
            (options.width - 2 * options.margin) / span,
            (options.height - 2 * options.margin) / span,
        )
        self.cx = (x_lo + x_hi) / 2.0
        self.cy = (y_lo + y_hi) / 2.0
        self.ox = options.width / 2.0
        self.oy = options.height / 2.0

    def x(self, v: float) -> float:
        return self.ox + (v - self.cx) * self.scale

    def y(self, v: float) -> float:
        return self.oy - (v - self.cy) * self.scale


def _affine(value: float, max_value: float, lo: float, hi: float) -> float:
    if max_value <= 0.0:
        return lo
    return lo + (hi - lo) * (value / max_value)


def render_network_svg(
    graph: NetworkGraph,
    layout: NodeLayout,
    points: list[UnitPoint] | None = None,
    options: PlotOptions = PlotOptions(),
    group_colors: dict[str, str] | None = None,
) -> str:
    """Render a network over its node layout, optionally with unit points."""
    if layout is None:
        raise MissingLayout("rendering requires a node layout")
    if layout.positions.shape[1] < 2:
        raise MissingLayout(
            f"layout must have >= 2 dimensions, got {layout.positions.shape[1]}"
        )

    pos = {tid: layout.positions[k, :2] for k, tid in enumerate(layout.topic_ids)}
    xs = [p[0] for p in pos.values()]
    ys = [p[1] for p in pos.values()]
    if points and options.show_points:
        xs += [float(pt.coords[0]) for pt in points]
        ys += [float(pt.coords[1]) for pt in points]
    frame = _Frame(xs, ys, options)

    strength = graph.node_strength()
    max_strength = max((abs(s) for s in strength.values()), default=0.0)
    max_weight = float(np.abs(graph.weights).max()) if len(graph.weights) else 0.0

    first_color, second_color = options.color_pair
    if group_colors is None:
        group_colors = {}
        if graph.kind == "group_mean" and graph.group:
            group_colors[graph.group] = first_color
        if graph.groups_compared:
            group_colors.setdefault(graph.groups_compared[0], first_color)
            group_colors.setdefault(graph.groups_compared[1], second_color)

    def edge_color(weight: float) -> str:
        if options.edge_color is not None:
            return options.edge_color
        if graph.kind == "subtraction":
            return first_color if weight > 0 else second_color
        return first_color

    def node_color(topic_strength: float) -> str:
        if options.node_color is not None:
            return options.node_color
        if graph.kind == "subtraction":
            return first_color if topic_strength >= 0 else second_color
        return edge_color(1.0)

    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{options.width}" height="{options.height}" '
        f'viewBox="0 0 {options.width} {options.height}">',
        f'<rect width="{options.width}" height="{options.height}" fill="white"/>',
    ]

    if options.axes:
        out.append(
            f'<line x1="{_fmt(frame.x(frame.cx) - options.width)}" '
            f'y1="{_fmt(frame.y(0.0))}" '
            f'x2="{_fmt(frame.x(frame.cx) + options.width)}" '
            f'y2="{_fmt(frame.y(0.0))}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<line x1="{_fmt(frame.x(0.0))}" '
            f'y1="{_fmt(frame.y(frame.cy) - options.height)}" '
            f'x2="{_fmt(frame.x(0.0))}" '
            f'y2="{_fmt(frame.y(frame.cy) + options.height)}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )

    if points and options.show_points:
        for pt in points:
            color = group_colors.get(pt.group or "", "#888888")
            out.append(
                f'<circle cx="{_fmt(frame.x(float(pt.coords[0])))}" '
                f'cy="{_fmt(frame.y(float(pt.coords[1])))}" '
                f'r="{_fmt(options.point_radius)}" fill="{color}" fill-opacity="0.35"/>'
            )

    for (i, j), weight in zip(graph.pair_order, graph.weights):
        w = float(weight)
        if w == 0.0:
            continue
        width = _affine(abs(w), max_weight, options.edge_width_min, options.edge_width_max)
        xi, yi = pos[i]
        xj, yj = pos[j]
        out.append(
            f'<line x1="{_fmt(frame.x(xi))}" y1="{_fmt(frame.y(yi))}" '
            f'x2="{_fmt(frame.x(xj))}" y2="{_fmt(frame.y(yj))}" '
            f'stroke="{edge_color(w)}" stroke-width="{_fmt(width)}" '
            'stroke-opacity="0.8"/>'
        )

    for topic in graph.topics:
        s = strength[topic.topic_id]
        radius = _affine(
            abs(s), max_strength, options.node_radius_min, options.node_radius_max
        )
        x, y = pos[topic.topic_id]
        out.append(
            f'<circle cx="{_fmt(frame.x(x))}" cy="{_fmt(frame.y(y))}" '
            f'r="{_fmt(radius)}" fill="{node_color(s)}" fill-opacity="0.9"/>'
        )

    if options.show_labels:
        for topic in graph.topics:
            x, y = pos[topic.topic_id]
            out.append(
                f'<text x="{_fmt(frame.x(x) + 6.0)}" y="{_fmt(frame.y(y) - 6.0)}" '
                f'font-family="sans-serif" font-size="{options.font_size}" '
                f'fill="#222222">{escape(topic.label)}</text>'
            )

    out.append("</svg>")
    return "\n".join(out) + "\n"
