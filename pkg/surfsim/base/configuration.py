#!/usr/bin/env python

"""
Sparse lattice configurations and their symmetry canonical form.

A Configuration maps coordinates to states over a blank default and
never stores the blank itself. Configurations are immutable values:
every update returns a new object, so they can be hashed, used as
search keys and shared between worker threads.
"""

from typing import Dict, Hashable, Iterable, Iterator, Mapping, Optional, Tuple

from surfsim.base.defaults import BLANK
from surfsim.base.lattice import Coord, LatticeKind, SQUARE4, symmetries, transform


class Configuration(Mapping):
    """
    Immutable sparse mapping Coord -> state. Indexing a coordinate
    that is not stored returns the blank state.
    """
    __slots__ = ("_cells", "blank", "kind", "_hash")

    def __init__(
        self,
        cells: Optional[Mapping] = None,
        blank: Hashable = BLANK,
        kind: LatticeKind = SQUARE4,
        ):

        self.blank = blank
        self.kind = kind
        self._cells: Dict[Coord, Hashable] = {}
        self._hash = None
        if cells:
            items = cells.items() if isinstance(cells, Mapping) else cells
            for coord, state in items:
                if state != blank:
                    self._cells[Coord(*coord)] = state

    # Mapping interface over the non-blank support
    def __getitem__(self, coord):
        return self._cells.get(coord, self.blank)

    def __iter__(self) -> Iterator[Coord]:
        return iter(self._cells)

    def __len__(self):
        return len(self._cells)

    def __contains__(self, coord):
        return coord in self._cells

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return (
            self.blank == other.blank
            and self.kind is other.kind
            and self._cells == other._cells
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.blank, self.kind, frozenset(self._cells.items())))
        return self._hash

    def __repr__(self):
        cells = ", ".join(f"{c}:{s}" for c, s in self.items_sorted()[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"<Configuration: {{{cells}{more}}}>"

    @property
    def support(self) -> Dict[Coord, Hashable]:
        """Copy of the non-blank cells."""
        return dict(self._cells)

    def items_sorted(self):
        """Non-blank cells in row-major order (by y, then x)."""
        return sorted(self._cells.items(), key=lambda item: (item[0].y, item[0].x))

    def replace(self, writes: Iterable[Tuple[Coord, Hashable]]) -> "Configuration":
        """Returns a new configuration with the given cells rewritten."""
        new = Configuration.__new__(Configuration)
        new.blank = self.blank
        new.kind = self.kind
        new._hash = None
        new._cells = dict(self._cells)
        for coord, state in writes:
            if state == self.blank:
                new._cells.pop(coord, None)
            else:
                new._cells[coord] = state
        return new

    def relabel(self, func, blank=None, kind=None) -> "Configuration":
        """Cell-wise state map into a new blank/lattice."""
        blank = self.blank if blank is None else blank
        kind = self.kind if kind is None else kind
        return Configuration(
            {c: func(s) for c, s in self._cells.items()}, blank=blank, kind=kind)

    def translate(self, dx: int, dy: int) -> "Configuration":
        return Configuration(
            {Coord(c.x + dx, c.y + dy): s for c, s in self._cells.items()},
            blank=self.blank, kind=self.kind,
        )

    def transform(self, mat) -> "Configuration":
        """Applies a point symmetry matrix to every coordinate."""
        return Configuration(
            {transform(c, mat): s for c, s in self._cells.items()},
            blank=self.blank, kind=self.kind,
        )

    def bbox(self) -> Optional[Tuple[int, int, int, int]]:
        """(xmin, ymin, xmax, ymax) of the support, None when empty."""
        if not self._cells:
            return None
        xs = [c.x for c in self._cells]
        ys = [c.y for c in self._cells]
        return min(xs), min(ys), max(xs), max(ys)

    def key(self) -> Tuple:
        """Row-major ordered (y, x, state-name) tuple used for comparisons."""
        return tuple(sorted((c.y, c.x, str(s)) for c, s in self._cells.items()))

    def to_text(self) -> str:
        """One 'x y state' line per non-blank cell."""
        return "\n".join(f"{c.x} {c.y} {s}" for c, s in self.items_sorted())


def canonicalize(cfg: Configuration) -> Configuration:
    """
    Returns the lexicographically least image of cfg under all point
    symmetries of its lattice, each followed by the translation that
    brings the support's bounding-box corner to the origin.
    Idempotent, and invariant under every lattice symmetry.
    """
    if not cfg:
        return cfg
    best = None
    best_key = None
    for mat in symmetries(cfg.kind):
        image = cfg.transform(mat)
        xmin, ymin, _, _ = image.bbox()
        image = image.translate(-xmin, -ymin)
        key = image.key()
        if best_key is None or key < best_key:
            best, best_key = image, key
    return best


if __name__ == "__main__":
    cfg = Configuration({(0, 0): "A", (1, 0): "B", (0, 1): "C"})
    print(cfg, canonicalize(cfg))
