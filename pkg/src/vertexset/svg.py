"""Minimal deterministic SVG emitter for curve plots.

Hand-rolled so identical inputs produce identical bytes; no external
assets, fonts, or libraries.  World coordinates are mathematical (y up);
the emitted document flips the axis once in a group transform.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

_HEADER = ('<svg xmlns="http://www.w3.org/2000/svg" width="640" height="640" '
           'viewBox="{vb}">\n'
           '<rect x="{x0}" y="{y0}" width="{side}" height="{side}" '
           'fill="white"/>\n'
           '<g transform="scale(1,-1)">\n')
_FOOTER = "</g>\n</svg>\n"


def _fmt(v: float) -> str:
    return f"{float(v):.8g}"


class SvgPlot:
    """Accumulates curve layers in world coordinates and renders once.

    ``world_radius`` fixes the square view box; geometry outside it is
    clipped by the viewer, not by us.
    """

    def __init__(self, world_radius: float):
        if world_radius <= 0:
            raise InputError("world_radius must be positive")
        self.radius = float(world_radius)
        self.elements: list = []

    @property
    def _stroke_width(self) -> float:
        return self.radius / 240.0

    def _dash_attr(self, dash: str | None) -> str:
        # dash lengths are in stroke-width units so patterns look the same
        # at any world scale
        if not dash:
            return ""
        scaled = " ".join(_fmt(float(p) * self._stroke_width)
                          for p in dash.split())
        return f' stroke-dasharray="{scaled}"'

    def polyline(self, pts, color: str = "#1f6fb4", *, dash: str | None = None,
                 width_factor: float = 1.0) -> None:
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise InputError("polyline needs an (n >= 2, 2) array")
        d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in pts)
        self.elements.append(
            f'<path d="{d}" fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(self._stroke_width * width_factor)}"'
            f'{self._dash_attr(dash)}/>'
        )

    def circle(self, cx: float, cy: float, r: float, color: str = "#888888",
               *, dash: str | None = "4 3") -> None:
        self.elements.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" '
            f'fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(self._stroke_width)}"{self._dash_attr(dash)}/>'
        )

    def dot(self, x: float, y: float, color: str = "#d62728",
            *, size_factor: float = 1.0) -> None:
        self.elements.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" '
            f'r="{_fmt(self.radius / 70.0 * size_factor)}" fill="{color}"/>'
        )

    def render(self) -> str:
        pad = 1.06 * self.radius
        vb = f"{_fmt(-pad)} {_fmt(-pad)} {_fmt(2 * pad)} {_fmt(2 * pad)}"
        head = _HEADER.format(vb=vb, x0=_fmt(-pad), y0=_fmt(-pad),
                              side=_fmt(2 * pad))
        return head + "\n".join(self.elements) + "\n" + _FOOTER

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.render())
