#!/usr/bin/env python

"""
Coordinates, neighborhoods, blocks and lattice symmetries.

Square cells use the compass order N, E, S, W. Triangular cells are
stored on axial integer coordinates with six directions in clockwise
order, direction 0 pointing to the global right:

          (-1,1)  (0,1)
      (-1,0)   (x,y)   (1,0)
           (0,-1)  (1,-1)
"""

import enum
from typing import Iterable, List, NamedTuple, Optional, Tuple

import numpy as np
from loguru import logger


class LatticeKind(enum.Enum):
    SQUARE4 = "square"
    TRIANGULAR6 = "triangular"

    @property
    def degree(self) -> int:
        return len(OFFSETS[self])


SQUARE4 = LatticeKind.SQUARE4
TRIANGULAR6 = LatticeKind.TRIANGULAR6

OFFSETS = {
    SQUARE4: ((0, 1), (1, 0), (0, -1), (-1, 0)),
    TRIANGULAR6: ((1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)),
}

COMPASS = ("N", "E", "S", "W")


class Coord(NamedTuple):
    x: int
    y: int

    def __add__(self, other):
        return Coord(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Coord(self.x - other[0], self.y - other[1])

    def __str__(self):
        return f"({self.x},{self.y})"


ORIGIN = Coord(0, 0)


def neighbors(c: Coord, kind: LatticeKind = SQUARE4) -> List[Coord]:
    """
    Returns the neighbors of c in canonical direction order:
    [N, E, S, W] on the square lattice and directions 0..5
    clockwise from the global right on the triangular lattice.
    """
    return [Coord(c[0] + dx, c[1] + dy) for dx, dy in OFFSETS[kind]]


def neighbor(c: Coord, direction: int, kind: LatticeKind = SQUARE4) -> Coord:
    """Returns the neighbor of c in the given direction index."""
    dx, dy = OFFSETS[kind][direction % kind.degree]
    return Coord(c[0] + dx, c[1] + dy)


def opposite(direction: int, kind: LatticeKind = SQUARE4) -> int:
    """Returns the index of the reverse direction."""
    return (direction + kind.degree // 2) % kind.degree


def direction_between(a: Coord, b: Coord, kind: LatticeKind = SQUARE4) -> int:
    """Returns the direction index leading from a to the adjacent cell b."""
    delta = (b[0] - a[0], b[1] - a[1])
    try:
        return OFFSETS[kind].index(delta)
    except ValueError:
        raise ValueError(f"{a} and {b} are not adjacent on the {kind.value} lattice")


def compass(direction: int) -> str:
    """Square direction index to its letter."""
    return COMPASS[direction]


def compass_index(letter: str) -> int:
    """Square direction letter (N,E,S,W) to its index."""
    try:
        return COMPASS.index(letter.upper())
    except ValueError:
        logger.error(f"unknown direction {letter!r}, options are {COMPASS}")
        raise


def block(u: Coord) -> frozenset:
    """
    The 9 cells at max-norm distance at most 1 from u on the
    square lattice.
    """
    return frozenset(
        Coord(u[0] + dx, u[1] + dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)
    )


def norm(c: Coord, kind: LatticeKind = SQUARE4) -> int:
    """
    Max-norm distance from the origin; cube coordinates are used on
    the triangular lattice so that balls are hexagons.
    """
    if kind is SQUARE4:
        return max(abs(c[0]), abs(c[1]))
    return max(abs(c[0]), abs(c[1]), abs(c[0] + c[1]))


# point symmetries as integer matrices acting on column vectors (x, y)
_ROTATE = {
    SQUARE4: np.array([[0, -1], [1, 0]]),
    TRIANGULAR6: np.array([[1, 1], [-1, 0]]),
}
_REFLECT = {
    SQUARE4: np.array([[1, 0], [0, -1]]),
    TRIANGULAR6: np.array([[0, 1], [1, 0]]),
}


def symmetries(kind: LatticeKind = SQUARE4) -> List[np.ndarray]:
    """
    All point symmetries fixing the origin: the dihedral group of
    order 8 on the square lattice and of order 12 on the triangular
    lattice. The identity comes first.
    """
    rot = _ROTATE[kind]
    mats = []
    current = np.eye(2, dtype=int)
    for _ in range(kind.degree):
        mats.append(current)
        current = rot @ current
    mats += [mat @ _REFLECT[kind] for mat in mats]
    return mats


def transform(c: Coord, mat: np.ndarray) -> Coord:
    """Applies a symmetry matrix to a coordinate."""
    x, y = mat @ np.array([c[0], c[1]])
    return Coord(int(x), int(y))


class Region:
    """
    A finite arena bounding every search. By default the max-norm
    ball of a radius around the origin; an explicit cell set can be
    given for small toy arenas (lines, boxes).
    """
    def __init__(
        self,
        radius: int,
        kind: LatticeKind = SQUARE4,
        cells: Optional[Iterable[Coord]] = None,
        ):

        if radius < 0:
            raise ValueError("radius must be non-negative")
        self.kind = kind
        if cells is None:
            rng = range(-radius, radius + 1)
            cells = (Coord(x, y) for x in rng for y in rng)
            cells = [c for c in cells if norm(c, kind) <= radius]
        self._cells = frozenset(Coord(*c) for c in cells)
        if ORIGIN not in self._cells:
            raise ValueError("a region must contain the origin")
        self.radius = max(norm(c, kind) for c in self._cells)
        self._sorted = sorted(self._cells, key=lambda c: (c.y, c.x))
        self._boundary = None

    @classmethod
    def from_cells(cls, cells: Iterable[Coord], kind: LatticeKind = SQUARE4):
        cells = [Coord(*c) for c in cells]
        return cls(0, kind, cells)

    @classmethod
    def line(cls, length: int, kind: LatticeKind = SQUARE4):
        """A horizontal line of cells starting at the origin."""
        return cls.from_cells([(x, 0) for x in range(length)], kind)

    @classmethod
    def box(cls, width: int, height: int, kind: LatticeKind = SQUARE4):
        """A width x height rectangle with the origin at its lower left."""
        cells = [(x, y) for x in range(width) for y in range(height)]
        return cls.from_cells(cells, kind)

    def __repr__(self):
        return f"<Region: radius={self.radius}, cells={len(self._cells)}, {self.kind.value}>"

    def __contains__(self, c) -> bool:
        return c in self._cells

    def __len__(self):
        return len(self._cells)

    def __iter__(self):
        return iter(self._sorted)

    def __eq__(self, other):
        return (
            isinstance(other, Region)
            and self.kind is other.kind
            and self._cells == other._cells
        )

    def __hash__(self):
        return hash((self.kind, self._cells))

    @property
    def cells(self) -> frozenset:
        return self._cells

    def is_ball(self) -> bool:
        """True if this region is the default max-norm ball."""
        return self == Region(self.radius, self.kind)

    def boundary(self) -> frozenset:
        """Cells of the region with at least one neighbor outside it."""
        if self._boundary is None:
            self._boundary = frozenset(
                c for c in self._cells
                if any(n not in self._cells for n in neighbors(c, self.kind))
            )
        return self._boundary

    def to_text(self) -> str:
        """Compact description used in trace file headers."""
        if self.is_ball():
            return f"radius={self.radius}"
        return "cells=" + ";".join(f"{c.x},{c.y}" for c in self._sorted)

    @classmethod
    def from_text(cls, text: str, kind: LatticeKind = SQUARE4):
        """Inverse of to_text."""
        key, _, value = text.partition("=")
        if key == "radius":
            return cls(int(value), kind)
        if key == "cells":
            cells = [tuple(int(i) for i in item.split(",")) for item in value.split(";")]
            return cls.from_cells(cells, kind)
        raise ValueError(f"cannot read region from {text!r}")


def parse_coord(text: str) -> Coord:
    """Reads '(x,y)' or 'x,y' into a Coord."""
    inner = text.strip().strip("()")
    x, y = inner.split(",")
    return Coord(int(x), int(y))


def coords_to_text(coords: Tuple[Coord, ...]) -> str:
    return ",".join(str(c) for c in coords)


if __name__ == "__main__":
    print(neighbors(ORIGIN, TRIANGULAR6))
    print(sorted(block(Coord(5, 5))))
    print(Region(2), Region.line(3))
