# zsm/render.py
"""
Self-contained SVG rendering: AOI outline in black, footprints in red,
estimate in magenta, truth as a green cross.
"""

from typing import Optional

import numpy as np

from zsm.geometry.polygon import MultiPolygon2D

CANVAS = 800.0
MARGIN = 20.0


def render_svg(
    aoi: MultiPolygon2D,
    estimate: Optional[MultiPolygon2D] = None,
    footprints: Optional[MultiPolygon2D] = None,
    truth=None,
    candidates: Optional[np.ndarray] = None,
    highlight: Optional[np.ndarray] = None,
    title: str = "",
) -> str:
    """
    Draw the scene in the AOI bounding box, north up.

    candidates are drawn as small grey dots, highlight (best SM candidates)
    as magenta dots.
    """
    if aoi.is_empty:
        raise ValueError("Cannot render an empty AOI")
    xmin, ymin, xmax, ymax = aoi.bounds
    extent = max(xmax - xmin, ymax - ymin)
    scale = (CANVAS - 2 * MARGIN) / extent
    width = (xmax - xmin) * scale + 2 * MARGIN
    height = (ymax - ymin) * scale + 2 * MARGIN

    def to_canvas(xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        return np.column_stack(
            [MARGIN + (xy[:, 0] - xmin) * scale, MARGIN + (ymax - xy[:, 1]) * scale]
        )

    body = [f'<rect width="{width:.1f}" height="{height:.1f}" style="fill:white"/>']
    if title:
        body.append(f"<title>{title}</title>")
    if footprints is not None and not footprints.is_empty:
        body.append(
            f'<path d="{footprints.svg_path(to_canvas)}" '
            'style="fill:#ff0000;fill-opacity:0.6;stroke:#ff0000;fill-rule:evenodd"/>'
        )
    if estimate is not None and not estimate.is_empty:
        body.append(
            f'<path d="{estimate.svg_path(to_canvas)}" '
            'style="fill:#ff00ff;fill-opacity:0.7;stroke:#ff00ff;stroke-width:1;fill-rule:evenodd"/>'
        )
    body.append(
        f'<path d="{aoi.svg_path(to_canvas)}" '
        'style="fill:none;stroke:#000000;stroke-width:2;fill-rule:evenodd"/>'
    )
    for points, style in ((candidates, "fill:#808080"), (highlight, "fill:#ff00ff")):
        if points is None:
            continue
        for x, y in to_canvas(points):
            body.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" style="{style}"/>')
    if truth is not None:
        x, y = to_canvas(truth)[0]
        body.append(
            f'<path d="M{x - 6:.3f},{y - 6:.3f} L{x + 6:.3f},{y + 6:.3f} '
            f'M{x - 6:.3f},{y + 6:.3f} L{x + 6:.3f},{y - 6:.3f}" '
            'style="stroke:#00a000;stroke-width:2"/>'
        )
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{width:.1f}" height="{height:.1f}" viewBox="0 0 {width:.1f} {height:.1f}">\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )
