"""
Minimal log-log SVG emitter for the experiment plots.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Union
from xml.sax.saxutils import escape
import logging
import math

logger = logging.getLogger(__name__)

WIDTH = 560
HEIGHT = 400
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 40
MARGIN_BOTTOM = 55
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
GUIDE_COLOR = "#7f7f7f"


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    guide: bool = False


@dataclass
class LogLogPlot:
    title: str
    xlabel: str
    ylabel: str
    series: List[Series] = field(default_factory=list)

    def add(self, label: str, x: Sequence[float], y: Sequence[float], guide: bool = False) -> "LogLogPlot":
        if len(x) != len(y):
            raise ValueError(f"Series '{label}' has {len(x)} x values and {len(y)} y values")
        if any(v <= 0 for v in list(x) + list(y)):
            raise ValueError(f"Series '{label}' has non-positive values, not representable on log axes")
        self.series.append(Series(label, list(x), list(y), guide))
        return self

    def _bounds(self, values: List[float]):
        low = math.log10(min(values))
        high = math.log10(max(values))
        if high - low < 1e-12:
            low -= 0.5
            high += 0.5
        pad = 0.05 * (high - low)
        return low - pad, high + pad

    def render(self) -> str:
        if not self.series:
            raise ValueError("Nothing to plot")
        xs = [v for s in self.series for v in s.x]
        ys = [v for s in self.series for v in s.y]
        x_low, x_high = self._bounds(xs)
        y_low, y_high = self._bounds(ys)
        plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

        def px(x: float) -> float:
            return MARGIN_LEFT + (math.log10(x) - x_low) / (x_high - x_low) * plot_w

        def py(y: float) -> float:
            return MARGIN_TOP + (y_high - math.log10(y)) / (y_high - y_low) * plot_h

        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(self.title)}</text>',
            f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
            f'fill="none" stroke="black"/>',
        ]

        for value in sorted(set(xs)):
            x = px(value)
            parts.append(f'<line x1="{x:.2f}" y1="{MARGIN_TOP + plot_h}" x2="{x:.2f}" '
                         f'y2="{MARGIN_TOP + plot_h + 5}" stroke="black"/>')
            parts.append(f'<text x="{x:.2f}" y="{MARGIN_TOP + plot_h + 18}" '
                         f'text-anchor="middle">{value:g}</text>')
        for exponent in range(math.ceil(y_low), math.floor(y_high) + 1):
            y = py(10.0 ** exponent)
            parts.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{y:.2f}" x2="{MARGIN_LEFT}" y2="{y:.2f}" stroke="black"/>')
            parts.append(f'<text x="{MARGIN_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">1e{exponent}</text>')

        parts.append(f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 12}" '
                     f'text-anchor="middle">{escape(self.xlabel)}</text>')
        parts.append(f'<text x="16" y="{MARGIN_TOP + plot_h / 2:.1f}" text-anchor="middle" '
                     f'transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2:.1f})">{escape(self.ylabel)}</text>')

        data_index = 0
        for index, s in enumerate(self.series):
            points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s.x, s.y))
            if s.guide:
                color = GUIDE_COLOR
                parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-dasharray="6 4"/>')
            else:
                color = COLORS[data_index % len(COLORS)]
                data_index += 1
                parts.append(f'<polyline points="{points}" fill="none" stroke="{color}"/>')
                for x, y in zip(s.x, s.y):
                    parts.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="{color}"/>')
            legend_y = MARGIN_TOP + 16 + 16 * index
            dash = ' stroke-dasharray="6 4"' if s.guide else ""
            parts.append(f'<line x1="{MARGIN_LEFT + 10}" y1="{legend_y - 4}" x2="{MARGIN_LEFT + 30}" '
                         f'y2="{legend_y - 4}" stroke="{color}"{dash}/>')
            parts.append(f'<text x="{MARGIN_LEFT + 36}" y="{legend_y}">{escape(s.label)}</text>')

        parts.append("</svg>")
        return "\n".join(parts) + "\n"

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with open(path, "w") as f:
            f.write(self.render())
        logger.info(f"Wrote plot to {path}")
        return path


def reference_curve(model: Sequence[float], anchor: float) -> List[float]:
    """Scale a model curve so that it passes through the first data value."""
    if not model or model[0] <= 0:
        raise ValueError("Reference model must start with a positive value")
    scale = anchor / model[0]
    return [scale * value for value in model]
