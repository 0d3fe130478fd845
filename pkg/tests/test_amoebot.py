#!/usr/bin/env python

"""Amoebot particles: labels, turns and movements."""

import pytest

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import BLANK, EPSILON
from surfsim.base.lattice import Coord, Region, TRIANGULAR6
from surfsim.base.system import reachable_set
from surfsim.models.amoebot import (
    CONTRACTED, HEAD, TAIL, AmoebotSystem, Movement, Occupant, TransitionEntry, Turn,
    apply_turn, contraction_tables, edge_label, enabled_turns, keeps_head, label_edge,
    parse_occupant, particles,
)
from surfsim.utils import InvalidTurnError, ModelError

from conftest import REST, contracted


def _expanded(phi, o, tail):
    occ = Occupant(phi, o, tail, REST, HEAD)
    return occ, occ.with_role(TAIL)


@pytest.mark.parametrize("kind", range(6))
def test_labels_round_trip_through_edges(kind):
    occ = Occupant("x", 2, (kind + 3) % 6, REST, HEAD)
    for label in range(10):
        role, direction = label_edge(occ, label)
        assert edge_label(occ.with_role(role), direction) == label
    # label 0 points along the orientation
    assert label_edge(occ, 0)[1] == 2


def test_contracted_labels():
    occ = contracted("a", o=4)
    assert label_edge(occ, 3) == (CONTRACTED, 1)
    assert edge_label(occ, 1) == 3
    with pytest.raises(ValueError):
        label_edge(occ, 6)


def test_contraction_tables_pick_the_right_half():
    c_tail, c_head = contraction_tables()
    for kind in range(6):
        assert keeps_head(c_head[kind], kind)
        assert not keeps_head(c_tail[kind], kind)


def test_occupant_text_round_trip():
    head, _ = _expanded("b", 1, 4)
    for occ in (contracted("a"), head):
        assert parse_occupant(str(occ)) == occ
    with pytest.raises(ModelError):
        parse_occupant("a:0:-:r:C")
    assert str(contracted("a")) == "a:0:-:r.r.r.r.r.r.-.-.-.-:C"


def test_movements_parse():
    assert Movement.parse("idle") == Movement("idle")
    assert str(Movement.parse("handover_9")) == "handover_9"
    for bad in ("expand_6", "fly_1", "contract_x"):
        with pytest.raises(ModelError):
            Movement.parse(bad)


def test_expand_then_contract(mover):
    region = Region(1, TRIANGULAR6)
    reach = reachable_set(mover, region)
    assert reach.exact and len(reach) == 3
    expanded = reach.configs[1]
    assert expanded[Coord(1, 0)].role == HEAD
    assert expanded[Coord(0, 0)].role == TAIL
    assert [p.nodes for p in particles(expanded)] == [(Coord(1, 0), Coord(0, 0))]
    (final,) = reach.terminal
    assert list(final) == [Coord(1, 0)]
    assert final[Coord(1, 0)].phi == "c" and final[Coord(1, 0)].contracted


def test_expansion_needs_an_empty_node(mover):
    cfg = Configuration(
        {(0, 0): contracted("a"), (1, 0): contracted("c")}, blank=BLANK, kind=TRIANGULAR6)
    (check,) = enabled_turns(mover, cfg, (0, 0))
    assert not check.valid and "occupied" in check.reason
    with pytest.raises(InvalidTurnError):
        apply_turn(mover, cfg, (0, 0), check.turn)


def test_push_contracts_the_pushed_particle():
    stars = ["*"] * 10
    delta = [TransitionEntry("a", stars, EPSILON, [Turn("b", REST, Movement("handover", 0))])]
    head, tail = _expanded("q", 0, 0)
    initial = Configuration(
        {(0, 0): contracted("a"), (1, 0): head, (2, 0): tail}, blank=BLANK, kind=TRIANGULAR6)
    sys = AmoebotSystem(["a", "b", "q"], ["r"], delta, initial)
    (check,) = enabled_turns(sys, initial, (0, 0))
    assert check.valid
    after = apply_turn(sys, initial, (0, 0), check.turn)
    assert after[Coord(2, 0)].phi == "q" and after[Coord(2, 0)].contracted
    assert after[Coord(1, 0)].phi == "b" and after[Coord(1, 0)].role == HEAD
    assert after[Coord(0, 0)].role == TAIL


def test_validation():
    far = Configuration(
        {(0, 0): contracted("a"), (3, 0): contracted("a")}, blank=BLANK, kind=TRIANGULAR6)
    with pytest.raises(ModelError, match="connected"):
        AmoebotSystem(["a"], ["r"], [], far)
    with pytest.raises(ModelError):
        AmoebotSystem(["a"], ["r.s"], [], Configuration(kind=TRIANGULAR6))
    with pytest.raises(ModelError):
        AmoebotSystem(["a"], [], [], Configuration(kind=TRIANGULAR6))
