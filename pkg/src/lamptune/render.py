"""Deterministic SVG scatter plots of 2-D projections."""

import dataclasses
from xml.sax.saxutils import escape

import numpy as np

# colour-blind friendly qualitative palette (Okabe-Ito)
PALETTE = ("#E69F00", "#56B4E9", "#009E73", "#F0E442",
           "#0072B2", "#D55E00", "#CC79A7", "#000000")


@dataclasses.dataclass(frozen=True)
class RenderSpec:
    width: int = 480
    height: int = 480
    point_radius: float = 3.0
    palette: tuple = PALETTE
    annotation: str = None
    margin: int = 16

    def __post_init__(self):
        if self.width < 64 or self.height < 64:
            raise ValueError("width and height must be at least 64 pixels")
        if not self.palette:
            raise ValueError("palette must not be empty")


def _fmt(v):
    return f"{v:.3f}".rstrip("0").rstrip(".")


def render_scatter(coords, labels, spec=None):
    """SVG text with one circle per row, filled by class rank.

    Coordinates are fitted into the viewport with a single scale factor, so
    the aspect ratio of the layout is preserved; y grows upwards.
    """
    spec = spec or RenderSpec()
    coords = np.asarray(getattr(coords, "coords", coords), dtype=np.float64)
    if coords.ndim != 2 or coords.shape[1] != 2 or coords.shape[0] == 0:
        raise ValueError("need a non-empty (n, 2) coordinate array")
    classes, codes = np.unique(np.asarray(labels), return_inverse=True)

    lo = coords.min(axis=0)
    span = coords.max(axis=0) - lo
    inner_w = spec.width - 2 * spec.margin
    inner_h = spec.height - 2 * spec.margin
    extent = float(span.max())
    if extent > 0:
        factor = min(inner_w / span[0] if span[0] > 0 else np.inf,
                     inner_h / span[1] if span[1] > 0 else np.inf)
        mid = lo + span / 2
        px = spec.width / 2 + (coords[:, 0] - mid[0]) * factor
        py = spec.height / 2 - (coords[:, 1] - mid[1]) * factor
    else:
        px = np.full(len(coords), spec.width / 2)
        py = np.full(len(coords), spec.height / 2)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" '
        f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">',
        f'<rect width="{spec.width}" height="{spec.height}" fill="#ffffff"/>',
    ]
    for x, y, c in zip(px, py, codes):
        fill = spec.palette[c % len(spec.palette)]
        lines.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(spec.point_radius)}" '
                     f'fill="{fill}" fill-opacity="0.8"/>')
    for rank, name in enumerate(classes):
        fill = spec.palette[rank % len(spec.palette)]
        ly = spec.margin + 12 * rank
        lines.append(f'<text x="{spec.width - spec.margin}" y="{ly + 4}" font-size="10" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'fill="{fill}">{escape(str(name))}</text>')
    if spec.annotation:
        lines.append(f'<text x="{spec.margin}" y="{spec.height - 4}" font-size="11" '
                     f'font-family="sans-serif">{escape(spec.annotation)}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
