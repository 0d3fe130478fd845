#!/usr/bin/env python

"""Lock protocol for CAs and invite/accept CAs for directed sCRNs."""

import pytest

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import BLANK, UND
from surfsim.base.lattice import Coord, Region
from surfsim.base.system import replay
from surfsim.compile import compile_system
from surfsim.compile.cellular import (
    CellularLockSchema, LockedState, accept, compile_dscrn_to_ca, decode_locked, invite,
    locked_configuration, pair_reactions, parse_locked, represent_invite_accept,
)
from surfsim.models.ca import CaSystem
from surfsim.models.scrn import Flavor, Reaction, ScrnSystem
from surfsim.utils import CompileError
from surfsim.verify import FAIL, PASS, check_equiv_productions, check_follows, check_models


def test_locked_state_text():
    lk = LockedState.fresh("1", walls=[0, 2, 3], quiescent="0")
    assert str(lk) == "lk[1|0:-:0:0|w-ww|00]"
    assert parse_locked(str(lk)) == lk
    assert parse_locked("A") is None and parse_locked("lk[1|0]") is None
    assert decode_locked(str(lk)) == "1"
    assert decode_locked("A") == UND


def test_locked_configuration_walls_off_the_outside(spread_ca):
    cfg = locked_configuration(spread_ca, Region.line(2))
    assert dict(cfg) == {
        Coord(0, 0): "lk[1|0:-:0:0|w-ww|00]",
        Coord(1, 0): "lk[0|0:0:0:-|www-|00]",
    }


def test_lock_protocol_items(spread_ca):
    schema = CellularLockSchema(spread_ca)
    # identity outcome pauses
    ((item, rxn),) = schema.uni("lk[1|0:0:0:0|w1ww|00]")
    assert item == 4 and rxn.products == ("lk[1|0:0:0:0|w1ww|11]",)
    # a real outcome rewrites σ and enters release
    ((item, rxn),) = schema.uni("lk[0|0:0:0:1|www1|00]")
    assert item == 3 and rxn.products == ("lk[1|0:0:0:1|www1|10]",)
    # a paused cell notices a changed neighbor
    items = {item for item, _ in schema.bi("lk[1|0:0:0:0|w-ww|01]", "lk[1|0:0:0:0|www-|00]", 1)}
    assert 7 in items
    assert schema.uni("A") == []


def test_ca_target_is_schema_backed(spread_ca):
    compiled = compile_system(spread_ca, "dscrn", Region.line(2))
    assert compiled.target.flavor is Flavor.DIRECTED
    assert compiled.rule_count is None
    assert list(compiled.provenance["item"]) == list(range(1, 8))
    assert compiled.image(compiled.target.initial()) == spread_ca.initial()


@pytest.mark.slow
@pytest.mark.parametrize("check", [check_follows, check_models])
def test_lock_protocol_simulates_the_ca(spread_ca, check):
    region = Region.line(2)
    compiled = compile_system(spread_ca, "dscrn", region)
    report = check(compiled.target, spread_ca, compiled.representation, region, depth=60)
    assert report.verdict == PASS, report.to_text()


def test_invite_accept_names(walker):
    assert invite("s", "O", 1) == "inv:s:O:E"
    assert accept("O", "s", 3) == "acc:O:s:W"
    assert represent_invite_accept("inv:s:O:E") == "s"
    assert represent_invite_accept("acc:O:s:W") == UND
    assert represent_invite_accept("A") == "A"
    pairs = pair_reactions(walker)
    assert [(p.a, p.b, p.direction) for p in pairs] == [("s", BLANK, 1), (BLANK, "s", 3)]


def test_invite_accept_rules(walker):
    compiled = compile_system(walker, "ca")
    protocols = compiled.provenance.groupby("protocol").size().to_dict()
    assert protocols == {"invite": 2, "accept": 2, "rewrite": 4, "rollback": 2}
    assert compiled.target.quiescent == BLANK
    assert "inv:s:O:E" in compiled.target.states


@pytest.mark.slow
@pytest.mark.parametrize("check", [check_follows, check_equiv_productions])
def test_invite_accept_simulates_the_walker(walker, line3, check):
    compiled = compile_system(walker, "ca")
    report = check(compiled.target, walker, compiled.representation, line3, depth=30)
    assert report.verdict == PASS, report.to_text()


def test_invite_accept_refusals(line_scrn):
    with pytest.raises(CompileError, match="directed"):
        compile_dscrn_to_ca(line_scrn)
    blanks = ScrnSystem(
        ["A"], [Reaction((BLANK, BLANK), ("A", BLANK), 1)],
        Configuration({(0, 0): "A", (1, 0): "A"}), flavor=Flavor.DIRECTED)
    with pytest.raises(CompileError, match="blank"):
        compile_dscrn_to_ca(blanks)


class VanishingSchema(CellularLockSchema):
    """A cell in state 1 turns quiescent where it should pause."""
    def _uni(self, a):
        for item, rxn in super()._uni(a):
            x = parse_locked(a)
            if item == 4 and x.sigma == "1":
                rxn = Reaction((a,), (str(x._replace(sigma="0", nu=1, b=0)),))
            yield item, rxn


def test_wrong_lock_outcome_is_caught(spread_ca):
    plus = Region.from_cells([(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)])
    compiled = compile_system(spread_ca, "dscrn", plus)
    schema = VanishingSchema(spread_ca)
    schema.region = plus
    broken = ScrnSystem(
        compiled.target.species, schema, compiled.target.initial(),
        flavor=Flavor.DIRECTED, unit_seeded=False)
    report = check_follows(broken, spread_ca, compiled.representation, plus, depth=6)
    assert report.verdict == FAIL, report.to_text()
    final = replay(broken, report.counterexample)[-1]
    assert not compiled.image(final)


@pytest.fixture
def sweep():
    """C + A -> B + C east over C A A."""
    return ScrnSystem(
        species=["A", "B", "C"],
        reactions=[Reaction(("C", "A"), ("B", "C"), 1)],
        initial=Configuration({(-1, 0): "C", (0, 0): "A", (1, 0): "A"}),
        flavor=Flavor.DIRECTED,
    )


def test_invite_accept_models_the_sweep(sweep):
    compiled = compile_system(sweep, "ca")
    report = check_models(
        compiled.target, sweep, compiled.representation, Region(2), depth=30)
    assert report.verdict == PASS, report.to_text()
    assert report.counts["realized"] == report.counts["pairs"]


def test_invites_without_rollback_deadlock(sweep):
    compiled = compile_system(sweep, "ca")
    target = compiled.target
    prov = compiled.provenance
    rollback = set(prov.loc[prov["protocol"] == "rollback", "rule"])
    assert rollback
    rules = [r for i, r in enumerate(target.rules) if i not in rollback]
    broken = CaSystem(target.states, rules, target.initial(), target.quiescent)
    report = check_models(broken, sweep, compiled.representation, Region(2), depth=30)
    assert report.verdict == FAIL, report.to_text()
    assert "cannot realize" in report.message
    # both neighbors invite each other and nothing can move
    stuck = replay(broken, report.counterexample)[-1]
    assert set(stuck.support.values()) == {"inv:C:A:E", "inv:A:C:W", "A"}
