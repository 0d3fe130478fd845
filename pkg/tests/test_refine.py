#!/usr/bin/env python

"""Bounded follows, models and equivalent-production checks."""

import pytest

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import UND
from surfsim.base.lattice import Region
from surfsim.base.system import reachable_set
from surfsim.compile import RepresentationMap, compile_system
from surfsim.models.scrn import Flavor, Reaction, ScrnSystem
from surfsim.utils import SearchError, SurfsimError
from surfsim.verify import (
    FAIL, INDETERMINATE, PASS, check_equiv_productions, check_follows, check_models, run_check,
)
from surfsim.verify.refine import _segment_to

PAIR = {(0, 0): "A", (1, 0): "B"}


@pytest.fixture
def rep():
    return RepresentationMap({"A": "A", "B": "B", "X": UND, "C": "C"})


@pytest.fixture
def wrong():
    """Rewrites both cells at once."""
    return ScrnSystem(["A", "B", "C"], [Reaction(("A", "B"), ("C", "C"))], Configuration(PAIR))


@pytest.mark.parametrize("check", ["follows", "models", "equiv"])
def test_transient_state_simulates(pair_simulator, pair_target, rep, check):
    report = run_check(check, pair_simulator, pair_target, rep, Region(2), depth=10)
    assert report.verdict == PASS, report.to_text()
    assert report
    assert report.exit_code() == 0


def test_follows_counts_segments(pair_simulator, pair_target, rep):
    report = check_follows(pair_simulator, pair_target, rep, Region(2), depth=10)
    assert report.counts == {"segments": 1, "defined": 2, "undefined": 1, "undecided": 0}


def test_follows_fails_with_a_trace(wrong, pair_target, rep):
    report = check_follows(wrong, pair_target, rep, Region(2), depth=10)
    assert report.verdict == FAIL and report.exit_code() == 1
    assert len(report.counterexample) == 1
    text = report.to_text()
    assert "verdict: fail" in text
    assert "counterexample (simulator, 1 steps):" in text
    assert "step=1 rule=0" in text


def test_equiv_rejects_foreign_images(wrong, pair_target, rep):
    report = check_equiv_productions(wrong, pair_target, rep, Region(2), depth=10)
    assert report.verdict == FAIL
    assert report.message.startswith("simulator produces an image")


def test_models_needs_every_step(pair_target, rep):
    idle = ScrnSystem(["A", "B", "C"], [], Configuration(PAIR))
    report = check_models(idle, pair_target, rep, Region(2), depth=10)
    assert report.verdict == FAIL
    assert "cannot realize" in report.message
    assert set(report.stats["system"]) == {"simulator", "simulated"}


def test_boundary_violations_are_indeterminate(wrong, pair_target, rep):
    report = check_follows(wrong, pair_target, rep, Region.line(2), depth=10)
    assert report.verdict == INDETERMINATE and report.exit_code() == 2
    assert report.message.startswith("boundary-tainted:")
    assert report.counterexample is not None


def test_bounds_that_decide_nothing(pair_simulator, pair_target, rep):
    assert check_follows(pair_simulator, pair_target, rep, Region(2), depth=0).verdict == INDETERMINATE
    report = check_follows(pair_simulator, pair_target, rep, Region(2), depth=10, max_states=2)
    assert report.verdict == INDETERMINATE
    assert report.message == "state budget exhausted"


def test_identity_and_symmetry(line_scrn, line3, pair_simulator, pair_target, rep):
    same = RepresentationMap.identity_map()
    for check in (check_follows, check_equiv_productions):
        assert check(line_scrn, line_scrn, same, line3, depth=10).verdict == PASS
    report = check_equiv_productions(
        pair_simulator, pair_target, rep, Region(2), depth=10, modulo_symmetry=True)
    assert report.verdict == PASS, report.to_text()


def test_unknown_check(pair_simulator, pair_target, rep):
    with pytest.raises(ValueError):
        run_check("bogus", pair_simulator, pair_target, rep, Region(2))


def _chain(length):
    """A reaches B through `length` transient species next to P -> Q."""
    mids = [f"X{i}" for i in range(1, length + 1)]
    steps = ["A"] + mids + ["B"]
    reactions = [Reaction((a,), (b,)) for a, b in zip(steps, steps[1:])]
    reactions.append(Reaction(("P",), ("Q",)))
    initial = Configuration({(0, 0): "A", (1, 0): "P"})
    table = {s: UND for s in mids}
    table.update({s: s for s in ("A", "B", "P", "Q")})
    return ScrnSystem(steps + ["P", "Q"], reactions, initial), RepresentationMap(table)


@pytest.fixture
def chain_target():
    return ScrnSystem(
        ["A", "B", "P", "Q"],
        [Reaction(("A",), ("B",)), Reaction(("P",), ("Q",))],
        Configuration({(0, 0): "A", (1, 0): "P"}))


def test_models_steps_beyond_the_depth_are_undecided(chain_target):
    simulator, rep = _chain(5)
    report = check_models(simulator, chain_target, rep, Region(2), depth=3)
    assert report.verdict == INDETERMINATE, report.to_text()
    assert report.counts == {"pairs": 3, "realized": 1, "frontier": 2, "unmatched": 2}
    assert "undecided" in report.message


def test_models_decides_once_the_search_is_exact(chain_target):
    simulator, rep = _chain(5)
    report = check_models(simulator, chain_target, rep, Region(2), depth=10)
    assert report.verdict == PASS, report.to_text()
    assert report.counts["frontier"] == report.counts["unmatched"] == 0


def test_follows_allows_several_simulated_steps_per_segment():
    """Two handshakes interleave, so one UND window covers two source events."""
    source = ScrnSystem(
        ["A", "B", "C", "D"],
        [Reaction(("A", "B"), ("C", "D"), 1)],
        Configuration({(0, 0): "A", (0, 1): "A", (1, 0): "B", (1, 1): "B"}),
        flavor=Flavor.DIRECTED,
    )
    compiled = compile_system(source, "ca")
    report = check_follows(
        compiled.target, source, compiled.representation, Region(2), depth=12)
    assert report.verdict == PASS, report.to_text()
    assert report.counts["undecided"] == 0


def test_follows_undecided_when_the_simulated_search_is_cut():
    jump = ScrnSystem(["A", "C"], [Reaction(("A",), ("C",))], Configuration({(0, 0): "A"}))
    slow = ScrnSystem(
        ["A", "M1", "M2", "C"],
        [Reaction(("A",), ("M1",)), Reaction(("M1",), ("M2",)), Reaction(("M2",), ("C",))],
        Configuration({(0, 0): "A"}))
    same = RepresentationMap.identity_map()
    report = check_follows(jump, slow, same, Region(2), depth=2)
    assert report.verdict == INDETERMINATE, report.to_text()
    assert report.counts["undecided"] == 1
    assert check_follows(jump, slow, same, Region(2), depth=3).verdict == PASS


def test_missing_segment_raises_a_search_error(pair_simulator):
    reach = reachable_set(pair_simulator, Region(2))
    ids = [None] * len(reach)
    with pytest.raises(SearchError) as err:
        _segment_to(reach, ids, 0, {0})
    assert isinstance(err.value, SurfsimError)
