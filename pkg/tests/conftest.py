#!/usr/bin/env python

"""Toy systems shared by the test modules."""

import pytest

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import BLANK, EPSILON, NULL
from surfsim.base.lattice import Coord, Region, TRIANGULAR6
from surfsim.models.amoebot import (
    AmoebotSystem, CONTRACTED, Movement, Occupant, TransitionEntry, Turn,
)
from surfsim.models.assembly import AtamSystem, Tile
from surfsim.models.ca import CaRule, CaSystem
from surfsim.models.scrn import Flavor, Reaction, ScrnSystem

REST = ("r",) * 10


def contracted(phi, o=0):
    return Occupant(phi, o, EPSILON, ("r",) * 6 + (EPSILON,) * 4, CONTRACTED)


@pytest.fixture
def line_scrn():
    """C + A -> B + C sweeping over C A A on three cells."""
    return ScrnSystem(
        species=["A", "B", "C"],
        reactions=[Reaction(("C", "A"), ("B", "C"))],
        initial=Configuration({(0, 0): "C", (1, 0): "A", (2, 0): "A"}),
    )


@pytest.fixture
def walker():
    """A seed walking east and leaving A behind."""
    return ScrnSystem(
        species=["s", "A"],
        reactions=[Reaction(("s", BLANK), ("A", "s"), 1)],
        initial=Configuration({(0, 0): "s"}),
        flavor=Flavor.DIRECTED,
    )


@pytest.fixture
def pair_target():
    """A next to B becomes C next to B."""
    return ScrnSystem(
        species=["A", "B", "C"],
        reactions=[Reaction(("A", "B"), ("C", "B"))],
        initial=Configuration({(0, 0): "A", (1, 0): "B"}),
    )


@pytest.fixture
def pair_simulator():
    """Same as pair_target through a transient X."""
    return ScrnSystem(
        species=["A", "B", "C", "X"],
        reactions=[Reaction(("A", "B"), ("X", "B")), Reaction(("X",), ("C",))],
        initial=Configuration({(0, 0): "A", (1, 0): "B"}),
    )


@pytest.fixture
def atam_pair():
    """Seed S binds T on its east side at temperature 1."""
    tiles = [Tile("S", NULL, "a", NULL, NULL), Tile("T", NULL, NULL, NULL, "a")]
    return AtamSystem(tiles, {"a": 1}, "S", tau=1)


@pytest.fixture
def spread_ca():
    """State 1 spreads east over quiescent 0."""
    return CaSystem(
        states=["0", "1"],
        rules=[CaRule(["0", "*", "*", "*", "1"], ["1"])],
        initial=Configuration({(0, 0): "1"}, blank="0"),
        quiescent="0",
    )


@pytest.fixture
def mover():
    """One particle: a expands right into b, b contracts into c."""
    stars = ["*"] * 10
    delta = [
        TransitionEntry("a", stars, EPSILON, [Turn("b", REST, Movement("expand", 0))]),
        TransitionEntry("b", stars, "*", [Turn("c", REST, Movement("contract", 0))]),
    ]
    initial = Configuration({Coord(0, 0): contracted("a")}, blank=BLANK, kind=TRIANGULAR6)
    return AmoebotSystem(["a", "b", "c"], ["r"], delta, initial)


@pytest.fixture
def line3():
    return Region.line(3)
