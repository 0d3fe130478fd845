#!/usr/bin/env python

"""Coordinates, neighborhoods, symmetries and regions."""

import numpy as np
import pytest

from surfsim.base.lattice import (
    Coord, ORIGIN, Region, SQUARE4, TRIANGULAR6,
    block, compass, compass_index, direction_between, neighbor, neighbors,
    norm, opposite, symmetries, transform,
)


def test_square_neighbors_in_compass_order():
    assert neighbors(ORIGIN) == [(0, 1), (1, 0), (0, -1), (-1, 0)]
    assert [compass(d) for d in range(4)] == ["N", "E", "S", "W"]
    assert compass_index("w") == 3


def test_triangular_neighbors_clockwise_from_the_right():
    assert neighbors(ORIGIN, TRIANGULAR6) == [
        (1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)]


@pytest.mark.parametrize("kind", [SQUARE4, TRIANGULAR6])
def test_opposite_directions_lead_back(kind):
    c = Coord(2, -1)
    for d in range(kind.degree):
        there = neighbor(c, d, kind)
        assert neighbor(there, opposite(d, kind), kind) == c
        assert direction_between(c, there, kind) == d


def test_direction_between_rejects_distant_cells():
    with pytest.raises(ValueError):
        direction_between(ORIGIN, Coord(2, 0))


def test_block_is_three_by_three():
    cells = block(Coord(5, 5))
    assert len(cells) == 9
    assert Coord(4, 6) in cells and Coord(6, 4) in cells


@pytest.mark.parametrize("kind, count", [(SQUARE4, 8), (TRIANGULAR6, 12)])
def test_symmetries_form_the_dihedral_group(kind, count):
    mats = symmetries(kind)
    assert len(mats) == count
    assert np.array_equal(mats[0], np.eye(2, dtype=int))
    images = {tuple(m.flatten()) for m in mats}
    assert len(images) == count
    # symmetries preserve the neighborhood of the origin
    ring = set(neighbors(ORIGIN, kind))
    for mat in mats:
        assert {transform(c, mat) for c in ring} == ring


def test_triangular_norm_is_hexagonal():
    assert norm(Coord(1, -1), TRIANGULAR6) == 1
    assert norm(Coord(1, 1), TRIANGULAR6) == 2
    assert len(Region(1, TRIANGULAR6)) == 7
    assert len(Region(2, TRIANGULAR6)) == 19


def test_region_ball_and_boundary():
    region = Region(2)
    assert len(region) == 25
    assert region.is_ball()
    assert Coord(2, 0) in region.boundary()
    assert Coord(1, 1) not in region.boundary()
    assert Coord(3, 0) not in region


def test_region_line_and_box():
    line = Region.line(3)
    assert list(line) == [(0, 0), (1, 0), (2, 0)]
    assert line.radius == 2
    assert not line.is_ball()
    # every cell of a line touches the outside
    assert line.boundary() == line.cells
    assert len(Region.box(2, 3)) == 6


def test_region_needs_the_origin():
    with pytest.raises(ValueError):
        Region.from_cells([(1, 0)])


@pytest.mark.parametrize("region", [Region(3), Region.line(3), Region.box(2, 2)])
def test_region_text_round_trip(region):
    assert Region.from_text(region.to_text()) == region
