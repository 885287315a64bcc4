"""SVG pictures of moment cross-sections.

Vertices are exact until emission; the chart drops the coordinate in which R is
largest and rescales the remaining two to the canvas.
"""

from __future__ import annotations

import pathlib

import numpy as np
import structlog

from .cone import GoodCone
from .reeb import ReebVector, isotropy_profile, moment_polygon, rank_of

logger = structlog.get_logger(__name__)


SIZE = 400
MARGIN = 40


def _chart(cone: GoodCone, reeb: ReebVector) -> np.ndarray:
    polygon = moment_polygon(cone, reeb)
    points = np.array([[float(x) for x in v] for v in polygon.vertices], dtype=np.float64)
    drop = int(np.argmax(np.abs([float(x) for x in reeb.value])))
    xy = np.delete(points, drop, axis=1)

    lo, hi = xy.min(axis=0), xy.max(axis=0)
    extent = float(np.max(hi - lo)) or 1.0
    scaled = (xy - lo) * ((SIZE - 2 * MARGIN) / extent) + MARGIN
    scaled[:, 1] = SIZE - scaled[:, 1]
    return scaled


def render_svg(cone: GoodCone, reeb: ReebVector) -> str:
    """SVG polygon with edges labelled by k-values and flat faces highlighted."""
    points = _chart(cone, reeb)
    profile = isotropy_profile(cone, reeb) if rank_of(reeb) == 2 else None

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        '<polygon fill="#eef2f7" stroke="none" points="'
        + " ".join(f"{x:.3f},{y:.3f}" for x, y in points)
        + '"/>',
    ]
    size = len(cone)
    for i in range(size):
        # face i runs from vertex i-1 to vertex i
        (x1, y1), (x2, y2) = points[i - 1], points[i]
        flat = profile is not None and profile.is_flat(i)
        colour, width = ("#c0392b", 3) if flat else ("#2c3e50", 1.5)
        label = f"k={profile.k[i]}" if profile is not None else f"n{i}"
        lines.append(
            f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
            f'stroke="{colour}" stroke-width="{width}" class="{"flat" if flat else "face"}"/>'
        )
        lines.append(
            f'<text x="{(x1 + x2) / 2:.3f}" y="{(y1 + y2) / 2:.3f}" font-size="12" '
            f'text-anchor="middle">{label}</text>'
        )
    for x, y in points:
        lines.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" fill="#2c3e50"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(cone: GoodCone, reeb: ReebVector, path: str | pathlib.Path):
    text = render_svg(cone, reeb)
    with open(path, "w") as f:
        f.write(text)
    logger.info("rendered", path=str(path), faces=len(cone))
