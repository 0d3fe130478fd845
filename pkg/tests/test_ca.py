#!/usr/bin/env python

"""Asynchronous nondeterministic cellular automata."""

import pytest

from surfsim.base.configuration import Configuration
from surfsim.base.lattice import Coord, Region
from surfsim.base.system import reachable_set
from surfsim.models.ca import (
    CaRule, CaSystem, ca_step, ca_steps, is_fixed_point, local_outcomes, parse_slot, slot_text,
)
from surfsim.utils import ModelError, StaleEventError


def test_slots():
    assert parse_slot("*") is None
    assert parse_slot("{B,A}") == frozenset({"A", "B"})
    assert slot_text(parse_slot("{B,A}")) == "{A,B}"
    with pytest.raises(ModelError):
        parse_slot("{}")


def test_unmatched_neighborhoods_keep_their_state(spread_ca):
    cfg = spread_ca.initial()
    assert local_outcomes(spread_ca, cfg, (1, 0)) == {"1"}
    assert local_outcomes(spread_ca, cfg, (0, 1)) == {"0"}
    assert local_outcomes(spread_ca, cfg, (0, 0)) == {"1"}


def test_spread_reaches_a_fixed_point(spread_ca, line3):
    reach = reachable_set(spread_ca, line3)
    assert reach.exact and len(reach) == 3
    final = reach.terminal[0]
    assert dict(final) == {Coord(0, 0): "1", Coord(1, 0): "1", Coord(2, 0): "1"}
    assert is_fixed_point(spread_ca, final, line3)
    assert not is_fixed_point(spread_ca, spread_ca.initial(), line3)
    # the east neighbor of the line would change next
    assert reach.blocked


def test_events_read_the_whole_neighborhood(spread_ca, line3):
    (ev,) = spread_ca.events(spread_ca.initial(), line3)
    assert ev.sites == (Coord(1, 0),)
    assert len(ev.reads) == 5
    assert ev.writes == ((Coord(1, 0), "1"),)


def test_matching_rules_are_united():
    ca = CaSystem(
        states=["0", "1", "2"],
        rules=[
            CaRule(["0", "*", "*", "*", "1"], ["1"]),
            CaRule(["0", "*", "*", "*", "{1,2}"], ["2"]),
        ],
        initial=Configuration({(0, 0): "1"}, blank="0"),
        quiescent="0",
    )
    succ = ca_steps(ca, ca.initial(), Region(1))
    assert {s[Coord(1, 0)] for s in succ} == {"1", "2"}


def test_chosen_outcome_must_be_allowed(spread_ca):
    cfg = ca_step(spread_ca, spread_ca.initial(), (1, 0), "1")
    assert cfg[Coord(1, 0)] == "1"
    with pytest.raises(StaleEventError):
        ca_step(spread_ca, spread_ca.initial(), (0, 1), "1")


def test_quiescent_neighborhood_must_be_fixed():
    with pytest.raises(ModelError, match="quiescent"):
        CaSystem(
            states=["0", "1"],
            rules=[CaRule(["0", "*", "*", "*", "*"], ["1"])],
            initial=Configuration(blank="0"),
            quiescent="0",
        )
