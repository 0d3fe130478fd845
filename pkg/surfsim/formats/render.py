#!/usr/bin/env python

"""
SVG drawings of configurations and trace frames with toyplot.

Square lattices draw one square per cell; triangular lattices draw
hexagon-packed circles. Cells are labeled by state name and colored
by state family (the name up to its first bracket or separator), so
every generated species of one source state shares a color. Expanded
amoebot particles draw a link between head and tail.
"""

import hashlib
import re
import xml.etree.ElementTree as xml
from pathlib import Path
from typing import Hashable, List, Optional, Tuple, Union

import numpy as np
import toyplot
import toyplot.svg
from loguru import logger

from surfsim.base.configuration import Configuration
from surfsim.base.lattice import Coord, LatticeKind, Region, TRIANGULAR6
from surfsim.base.system import Event, ModelSystem, replay
from surfsim.models.amoebot import HEAD, Occupant, partner_node

SQRT3 = np.sqrt(3)
FAMILY = re.compile(r"[\[\]^:>|<]")
GRID_COLOR = "#f2f2f2"


def position(c: Coord, kind: LatticeKind) -> Tuple[float, float]:
    """Drawing position of a lattice cell."""
    if kind is TRIANGULAR6:
        return c.x + c.y / 2, c.y * SQRT3 / 2
    return float(c.x), float(c.y)


def state_label(state: Hashable) -> str:
    if isinstance(state, Occupant):
        return state.phi
    return str(state)


def family(state: Hashable) -> str:
    text = state_label(state)
    head = FAMILY.split(text, 1)[0]
    return head or text


def state_color(state: Hashable) -> str:
    """CSS color hashed (stably across runs) from the state family."""
    palette = toyplot.color.Palette()
    digest = hashlib.md5(family(state).encode("utf-8")).hexdigest()
    return palette.css(int(digest, 16) % len(palette))


def _cells(cfg: Configuration, region: Optional[Region]) -> List[Coord]:
    cells = set(cfg)
    if region is not None:
        cells |= set(region)
    return sorted(cells, key=lambda c: (c.y, c.x))


def render_configuration(
    cfg: Configuration,
    region: Optional[Region] = None,
    title: Optional[str] = None,
    **kwargs,
    ):
    """
    Draws cfg over the cells of region (the support alone when no
    region is given). Returns (canvas, axes, mark) like the other
    toyplot drawing functions; the mark is the state scatterplot or
    None for an empty configuration.
    """
    kind = cfg.kind
    cells = _cells(cfg, region)
    unit = kwargs.get("unit", 40)
    if cells:
        xs, ys = zip(*(position(c, kind) for c in cells))
        span = (max(xs) - min(xs) + 2, max(ys) - min(ys) + 2)
    else:
        xs, ys, span = (), (), (3, 3)
    canvas = toyplot.Canvas(
        kwargs.get("width", max(150, unit * span[0])),
        kwargs.get("height", max(150, unit * span[1])),
    )
    axes = canvas.cartesian(show=False, label=title, padding=unit / 2)
    axes.aspect = "fit-range"
    marker = "o" if kind is TRIANGULAR6 else "s"
    size = unit * 0.8

    if cells:
        axes.scatterplot(
            xs, ys, marker=marker, size=size,
            mstyle={"fill": GRID_COLOR, "stroke": "#cccccc"},
        )

    # expanded particles: one link per head
    for coord, state in cfg.items_sorted():
        if isinstance(state, Occupant) and state.role == HEAD:
            x0, y0 = position(coord, kind)
            x1, y1 = position(partner_node(coord, state), kind)
            axes.plot([x0, x1], [y0, y1], color="#262626", stroke_width=size / 4)

    mark = None
    items = cfg.items_sorted()
    if items:
        pxs, pys = zip(*(position(c, kind) for c, _ in items))
        mark = axes.scatterplot(
            pxs, pys, marker=marker, size=size,
            color=[state_color(s) for _, s in items],
            mstyle={"stroke": "#262626", "stroke-width": 1},
        )
        axes.text(
            pxs, pys, [state_label(s) for _, s in items],
            style={"font-size": f"{max(6, unit // 5)}px", "fill": "#262626"},
        )
    return canvas, axes, mark


def render_frame(
    system: ModelSystem,
    events: List[Event],
    frame: int,
    region: Optional[Region] = None,
    **kwargs,
    ):
    """Draws the configuration after `frame` events of a trace."""
    visited = replay(system, events)
    if not 0 <= frame < len(visited):
        raise IndexError(f"frame {frame} outside 0..{len(visited) - 1}")
    return render_configuration(visited[frame], region, title=f"step {frame}", **kwargs)


def write_svg(canvas, path: Union[str, Path]):
    toyplot.svg.render(canvas, str(path))
    logger.debug(f"wrote {path}")


def svg_text(canvas) -> str:
    """The SVG document of a canvas as a string."""
    return xml.tostring(toyplot.svg.render(canvas), encoding="unicode")


__all__ = [
    "render_configuration", "render_frame", "write_svg", "svg_text",
    "state_color", "family", "position",
]
