#!/usr/bin/env python

"""Scheduler, replay and bounded reachability shared by every model."""

import pytest

from surfsim.base.configuration import Configuration
from surfsim.base.lattice import Coord, Region
from surfsim.base.system import (
    apply_event, reachable_set, replay, run_trace, simulate, terminal_set,
)
from surfsim.models.scrn import Reaction, ScrnSystem
from surfsim.utils import StaleEventError


@pytest.fixture
def grower():
    """s + O -> s + s: nondeterministic growth from one seed."""
    return ScrnSystem(
        species=["s"],
        reactions=[Reaction(("s", "O"), ("s", "s"))],
        initial=Configuration({(0, 0): "s"}),
    )


def test_line_reachability_is_exact(line_scrn, line3):
    reach = reachable_set(line_scrn, line3)
    assert reach.exact and not reach.truncated
    assert len(reach) == 3
    assert reach.max_depth == 2
    final = Configuration({(0, 0): "B", (1, 0): "B", (2, 0): "C"})
    assert reach.terminal == [final]
    assert terminal_set(line_scrn, line3) == [final]
    assert list(reach.summary()["configurations"]) == [1, 1, 1]


def test_path_to_replays_to_the_configuration(line_scrn, line3):
    reach = reachable_set(line_scrn, line3)
    idx = len(reach) - 1
    path = reach.path_to(idx)
    assert len(path) == 2
    assert replay(line_scrn, path)[-1] == reach.configs[idx]


def test_blocked_events_are_flagged(walker):
    reach = reachable_set(walker, Region(3))
    assert reach.exact
    assert len(reach) == 4
    last = reach.lookup(Configuration({(0, 0): "A", (1, 0): "A", (2, 0): "A", (3, 0): "s"}))
    assert last is not None
    assert reach.blocked == {last}
    assert reach.tainted


def test_depth_cut_is_not_exact(walker):
    reach = reachable_set(walker, Region(3), max_depth=1)
    assert not reach.exact and not reach.truncated
    assert len(reach) == 2
    assert terminal_set(walker, Region(3), max_depth=1) is None


def test_state_budget_truncates(walker):
    reach = reachable_set(walker, Region(3), max_states=2)
    assert reach.truncated and not reach.exact
    assert len(reach) == 2


def test_canonical_search_merges_symmetric_shapes(grower):
    plain = reachable_set(grower, Region(1))
    canon = reachable_set(grower, Region(1), canonical=True)
    assert plain.exact and canon.exact
    assert len(canon) < len(plain)


def test_worker_count_does_not_change_the_result(grower):
    one = reachable_set(grower, Region(1), workers=1)
    two = reachable_set(grower, Region(1), workers=2)
    assert one.configs == two.configs
    assert one.depth == two.depth


def test_scheduler_is_seeded(grower):
    first = run_trace(grower, Region(2), seed=7, max_steps=6)
    again = run_trace(grower, Region(2), seed=7, max_steps=6)
    assert first == again
    assert len(first) == 6


def test_simulate_stops_when_terminal(walker):
    events, final = simulate(walker, Region(3), seed=1, max_steps=50)
    assert len(events) == 3
    assert final[Coord(3, 0)] == "s"
    assert replay(walker, events)[-1] == final


def test_stale_events_are_rejected(walker):
    cfg = walker.initial()
    ev = walker.events(cfg, Region(3))[0]
    moved = apply_event(cfg, ev)
    with pytest.raises(StaleEventError):
        apply_event(moved, ev)


def test_event_line_format(walker):
    ev = walker.events(walker.initial(), Region(3))[0]
    assert ev.to_line(1) == "step=1 rule=0 at=(0,0),(1,0) dir=1 out=A,s"
