#!/usr/bin/env python

"""Particle parts for amoebots and particle systems for clockwise sCRNs."""

import pytest

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import BLANK, EPSILON, UND
from surfsim.base.lattice import Coord, Region, TRIANGULAR6
from surfsim.base.system import replay, simulate
from surfsim.compile import compile_system
from surfsim.compile.particles import (
    PartState, ParticleSchema, accept_state, compile_cscrn_to_amoebot, decode_part,
    invite_state, parse_part, part_configuration, particle,
)
from surfsim.models.amoebot import (
    HEAD, IDLE, TAIL, AmoebotSystem, Movement, Occupant, TransitionEntry, Turn, apply_turn,
    enabled_turns,
)
from surfsim.models.scrn import Flavor, Reaction, ScrnSystem
from surfsim.utils import CompileError
from surfsim.verify import FAIL, PASS, check_equiv_productions, check_follows

from conftest import REST, contracted


@pytest.fixture
def hexagon():
    return Region(1, TRIANGULAR6)


@pytest.fixture
def clockwise_walker():
    """A seed walking along direction 0 and leaving A behind."""
    return ScrnSystem(
        species=["s", "A"],
        reactions=[Reaction(("s", BLANK), ("A", "s"), 0)],
        initial=Configuration({(0, 0): "s"}, kind=TRIANGULAR6),
        flavor=Flavor.CLOCKWISE,
    )


def test_part_text_round_trip():
    part = PartState(contracted("a"), ("?",) * 6, ("-",) * 6)
    assert str(part) == "pt[a:0:-:r.r.r.r.r.r.-.-.-.-:C|?.?.?.?.?.?|------|00|-]"
    assert parse_part(str(part)) == part
    assert parse_part("A") is None
    assert decode_part(str(part)) == contracted("a")
    assert decode_part(str(part._replace(aux="e"))) == UND
    assert decode_part("A") == UND


def test_part_configuration_walls(mover, hexagon):
    cfg = part_configuration(mover, hexagon)
    assert len(cfg) == 7
    east = cfg[Coord(1, 0)]
    assert east == "pt[O|~.~.?.?.?.~|ww---w|00|-]"
    assert decode_part(east) == BLANK
    assert decode_part(cfg[Coord(0, 0)]) == contracted("a")


def test_particles_must_lie_inside_the_region(hexagon):
    far = AmoebotSystem(
        ["a"], ["r"], [],
        Configuration({(2, 0): contracted("a")}, blank=BLANK, kind=TRIANGULAR6))
    with pytest.raises(CompileError, match="outside"):
        compile_system(far, "cscrn", hexagon)


def test_pull_handovers_are_refused(hexagon):
    stars = ["*"] * 10
    delta = [TransitionEntry("a", stars, "*", [Turn("a", REST, Movement("handover", 0))])]
    sys = AmoebotSystem(
        ["a"], ["r"], delta,
        Configuration({(0, 0): contracted("a")}, blank=BLANK, kind=TRIANGULAR6))
    with pytest.raises(CompileError, match="pull"):
        compile_system(sys, "cscrn", hexagon)


def test_parts_lock_in_slot_order(mover):
    schema = ParticleSchema(mover)
    x = PartState(contracted("a"), ("?",) * 6, ("-",) * 6)
    empty = PartState(None, ("?",) * 6, ("-",) * 6)
    # slot 1 waits for slot 0
    assert schema.bi(str(x), str(empty), 1) == []
    ((item, rxn),) = schema.bi(str(x), str(empty), 0)
    assert item == 1
    locker, locked = (parse_part(s) for s in rxn.products)
    assert locker.locks[0] == "1" and locker.records[0] == "~"
    assert locked.locks[3] == "0"


def test_cscrn_target(mover, hexagon):
    compiled = compile_system(mover, "cscrn", hexagon)
    target = compiled.target
    assert target.flavor is Flavor.CLOCKWISE and not target.unit_seeded
    assert target.frame(str(PartState(contracted("a", o=2), ("?",) * 6, ("-",) * 6))) == 2
    assert compiled.image(target.initial()) == mover.initial()


def test_expansion_follows_the_amoebot(mover, hexagon):
    compiled = compile_system(mover, "cscrn", hexagon)
    report = check_follows(compiled.target, mover, compiled.representation, hexagon, depth=8)
    assert report.verdict == PASS, report.to_text()
    # six locks and the expansion
    assert report.counts["defined"] >= 8


@pytest.mark.slow
def test_whole_move_follows_the_amoebot(mover, hexagon):
    compiled = compile_system(mover, "cscrn", hexagon)
    report = check_follows(compiled.target, mover, compiled.representation, hexagon, depth=40)
    assert report.verdict == PASS, report.to_text()


def test_invite_accept_particles(clockwise_walker):
    region = Region.line(3, TRIANGULAR6)
    compiled = compile_system(clockwise_walker, "amoebot", region)
    target = compiled.target
    assert invite_state("s", "O", 0) in target.states
    assert accept_state("O", "s", 3) in target.states
    start = target.initial()
    assert len(start) == 3 and start[Coord(1, 0)] == particle("O")
    assert compiled.representation(particle("inv>s>O>0")) == "s"
    assert compiled.representation(particle("acc<O<s<3")) == UND
    assert compiled.image(start) == clockwise_walker.initial()
    assert all(p.tail == EPSILON for p in target.delta)


@pytest.mark.slow
@pytest.mark.parametrize("check", [check_follows, check_equiv_productions])
def test_particles_simulate_the_clockwise_walker(clockwise_walker, check):
    region = Region.line(3, TRIANGULAR6)
    compiled = compile_system(clockwise_walker, "amoebot", region)
    report = check(compiled.target, clockwise_walker, compiled.representation, region, depth=30)
    assert report.verdict == PASS, report.to_text()


def test_particle_compilation_needs_a_clockwise_source(walker):
    with pytest.raises(CompileError, match="clockwise"):
        compile_cscrn_to_amoebot(walker)


class MislabeledSchema(ParticleSchema):
    """Expansions come out in state c instead of the state δ names."""
    def _expanded(self, x, turn, y, g):
        return super()._expanded(x, turn._replace(phi="c"), y, g)


def test_wrong_expansion_state_is_caught(mover):
    region = Region(2, TRIANGULAR6)
    compiled = compile_system(mover, "cscrn", region)
    schema = MislabeledSchema(mover)
    schema.region = region
    broken = ScrnSystem(
        compiled.target.species, schema, compiled.target.initial(),
        flavor=Flavor.CLOCKWISE, unit_seeded=False)
    report = check_follows(broken, mover, compiled.representation, region, depth=8)
    assert report.verdict == FAIL, report.to_text()
    # six locks, then the expansion
    assert len(report.counterexample) == 7


def test_wrong_accept_rewrite_is_caught(clockwise_walker):
    region = Region(2, TRIANGULAR6)
    compiled = compile_system(clockwise_walker, "amoebot", region)
    target = compiled.target
    prov = compiled.provenance
    rewrites = set(prov.loc[(prov["protocol"] == "rewrite") & (prov["item"] == "3.2"), "rule"])
    wrong = [Turn("A", particle("A").flags, IDLE)]
    delta = [
        TransitionEntry(e.phi, e.reads, e.tail, wrong) if i in rewrites else e
        for i, e in enumerate(target.delta)
    ]
    broken = AmoebotSystem(target.states, target.flags, delta, target.initial())
    report = check_follows(broken, clockwise_walker, compiled.representation, region, depth=6)
    assert report.verdict == FAIL, report.to_text()
    end = compiled.image(replay(broken, report.counterexample)[-1])
    assert sorted(end.support.values()) == ["A", "A"]


@pytest.fixture
def pusher():
    """a pushes the expanded q out of its way and becomes b."""
    stars = ["*"] * 10
    delta = [TransitionEntry("a", stars, EPSILON, [Turn("b", REST, Movement("handover", 0))])]
    head = Occupant("q", 0, 0, REST, HEAD)
    initial = Configuration(
        {(0, 0): contracted("a"), (1, 0): head, (2, 0): head.with_role(TAIL)},
        blank=BLANK, kind=TRIANGULAR6)
    return AmoebotSystem(["a", "b", "q"], ["r"], delta, initial)


@pytest.mark.slow
@pytest.mark.parametrize("seed", [3, 11, 42])
def test_push_handover_is_one_visible_step(pusher, seed):
    region = Region(2, TRIANGULAR6)
    compiled = compile_system(pusher, "cscrn", region)
    pre = pusher.initial()
    (check,) = enabled_turns(pusher, pre, (0, 0))
    post = apply_turn(pusher, pre, (0, 0), check.turn)

    events, _ = simulate(compiled.target, region, seed=seed, max_steps=4000)
    seen = []
    for cfg in replay(compiled.target, events):
        image = compiled.image(cfg)
        if image != UND and (not seen or image != seen[-1]):
            seen.append(image)
    assert seen == [pre, post]
