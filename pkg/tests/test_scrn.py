#!/usr/bin/env python

"""Plain, directed and clockwise surface CRNs."""

import pytest

from surfsim.base.configuration import Configuration
from surfsim.base.lattice import Coord, Region, TRIANGULAR6
from surfsim.models.scrn import Flavor, Reaction, ScrnSystem, is_growing
from surfsim.utils import ModelError


def test_plain_reactions_match_either_orientation():
    sys = ScrnSystem(
        species=["A", "B", "C"],
        reactions=[Reaction(("C", "A"), ("B", "C"))],
        initial=Configuration({(0, 0): "A", (1, 0): "C"}),
    )
    events = sys.events(sys.initial(), Region(2))
    assert len(events) == 1
    assert events[0].sites == (Coord(1, 0), Coord(0, 0))
    after = sys.apply(sys.initial(), events[0])
    assert dict(after) == {Coord(1, 0): "B", Coord(0, 0): "C"}


def test_directed_south_is_stored_as_north():
    rxn = Reaction(("A", "O"), ("A", "B"), 2)
    assert rxn.normalized() == Reaction(("O", "A"), ("B", "A"), 0)
    sys = ScrnSystem(["A", "B"], [rxn], Configuration({(0, 0): "A"}), flavor=Flavor.DIRECTED)
    events = sys.events(sys.initial(), Region(2))
    assert [ev.writes for ev in events] == [((Coord(0, -1), "B"), (Coord(0, 0), "A"))]
    assert sys.reactions[0].text(Flavor.DIRECTED) == "O + A -> B + A N"


def test_clockwise_directions_turn_with_the_frame():
    sys = ScrnSystem(
        species=["a", "b"],
        reactions=[Reaction(("a", "O"), ("a", "b"), 0)],
        initial=Configuration({(0, 0): "a"}),
        flavor=Flavor.CLOCKWISE,
        frames={"a": 1},
    )
    assert sys.kind is TRIANGULAR6
    events = sys.events(sys.initial(), Region(1, TRIANGULAR6))
    assert len(events) == 1
    assert events[0].sites == (Coord(0, 0), Coord(1, -1))


def test_events_touching_outside_cells_are_disabled():
    sys = ScrnSystem(
        species=["A", "B"],
        reactions=[Reaction(("O", "A"), ("O", "B"))],
        initial=Configuration({(0, 0): "A"}),
    )
    region = Region.from_cells([(0, 0)])
    events, blocked = sys.explore(sys.initial(), region)
    assert events == [] and blocked
    # inside a bigger region the same reaction fires toward every blank
    events, blocked = sys.explore(sys.initial(), Region(1))
    assert len(events) == 4 and not blocked
    assert all(ev.writes[1] == (Coord(0, 0), "B") for ev in events)


def test_writes_outside_the_region_are_blocked(walker):
    region = Region.from_cells([(0, 0)])
    events, blocked = walker.explore(walker.initial(), region)
    assert events == [] and blocked


def test_unit_seeded_systems_reject_blank_only_reactions():
    with pytest.raises(ModelError, match="only blank reactants"):
        ScrnSystem(["s"], [Reaction(("O",), ("s",))], Configuration({(0, 0): "s"}))


def test_directed_reactions_need_a_direction():
    with pytest.raises(ModelError):
        ScrnSystem(
            ["A"], [Reaction(("A", "O"), ("A", "A"))], Configuration({(0, 0): "A"}),
            flavor=Flavor.DIRECTED)


def test_plain_reactions_take_no_direction():
    with pytest.raises(ModelError):
        ScrnSystem(["A"], [Reaction(("A", "O"), ("A", "A"), 1)], Configuration({(0, 0): "A"}))


def test_undeclared_species_are_rejected():
    with pytest.raises(ModelError, match="undeclared species"):
        ScrnSystem(["A"], [Reaction(("A",), ("Z",))], Configuration({(0, 0): "A"}))


def test_seed_and_growth_helpers(walker):
    assert walker.unit_seeded and walker.seed == "s"
    assert is_growing(walker.reactions[0])
    assert not is_growing(Reaction(("A", "B"), ("C", "D"), 1))
    assert not is_growing(Reaction(("A",), ("B",)))
