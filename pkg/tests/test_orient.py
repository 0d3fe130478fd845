#!/usr/bin/env python

"""Block coloring compiler from directed to plain sCRNs."""

import numpy as np
import pytest

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import BLANK
from surfsim.base.lattice import Coord, Region, symmetries
from surfsim.compile import compile_system
from surfsim.compile.orient import (
    BOOT, PI_2, PI_3, PI_4, TABLES, Permutation9, check_complete_coloring, color_of,
    colored, compile_dscrn_to_scrn, emit_bootstrap, growing_direction, identity_color,
    is_colored_species, orientation_of, post_bootstrap_configuration, represent,
)
from surfsim.models.scrn import Flavor, Reaction, ScrnSystem
from surfsim.utils import CompileError
from surfsim.verify import FAIL, PASS, check_equiv_productions, check_follows


def test_rotations_compose():
    rot = Permutation9(PI_2)
    assert rot.compose(rot) == Permutation9(PI_3)
    assert rot.compose(rot).compose(rot) == Permutation9(PI_4)
    four = rot.compose(rot).compose(rot).compose(rot)
    assert four == Permutation9(range(1, 10))
    assert np.array_equal(rot.as_matrix() @ rot.as_matrix(), Permutation9(PI_3).as_matrix())


def test_translations_cancel():
    r, l, u, d = (TABLES[k] for k in "rlud")
    ident = tuple(range(1, 10))
    assert r.compose(l) == ident and u.compose(d) == ident
    for family in TABLES["families"].values():
        assert len(set(family)) == 9


def test_not_a_permutation():
    with pytest.raises(ValueError):
        Permutation9([1, 1, 2, 3, 4, 5, 6, 7, 8])


def test_identity_layout():
    assert identity_color(Coord(0, 0)) == 5
    assert identity_color(Coord(-1, -1)) == 1
    # color 2 east of 1, color 4 north of 1
    assert identity_color(Coord(0, -1)) == 2
    assert identity_color(Coord(-1, 0)) == 4
    assert identity_color(Coord(3, 3)) == 5


def test_state_names():
    assert color_of(colored("A", 7)) == 7
    assert color_of("chi[1->2]p") == 2
    assert color_of("A") is None and color_of(BOOT["0"]) is None
    assert is_colored_species("A^3")
    assert not is_colored_species("O^3") and not is_colored_species("chi^3")
    assert represent("A^3", "s") == "A"
    assert represent(BOOT["0"], "s") == "s"
    assert represent("chi[1->2]01", "s") == "O"


def test_bootstrap_has_seventeen_reactions():
    rxns = emit_bootstrap("s")
    assert len(rxns) == 17
    assert rxns[0] == Reaction(("s", "O"), (BOOT["0"], BOOT["1"]))
    assert rxns[-4] == Reaction(("O^4", BOOT["0"]), ("O^4", "s^5"))


def test_growing_direction(walker):
    assert growing_direction(walker.reactions[0]) == ("s", "A", "s", 1)
    flipped = Reaction(("O", "s"), ("s", "A"), 0)
    assert growing_direction(flipped) == ("s", "A", "s", 2)
    assert growing_direction(Reaction(("A", "B"), ("C", "D"), 0)) is None


def test_post_bootstrap_coloring_is_complete(walker):
    cfg = post_bootstrap_configuration(walker)
    assert len(cfg) == 9
    assert cfg[Coord(0, 0)] == "s^5"
    assert check_complete_coloring(cfg)
    assert np.array_equal(orientation_of(cfg), np.eye(2, dtype=int))
    # every lattice symmetry of the block is recovered
    for mat in symmetries():
        moved = cfg.transform(mat)
        found = orientation_of(moved)
        assert found is not None
        assert all(
            identity_color(Coord(*(found @ np.array(c)))) == color_of(s)
            for c, s in moved.items())


def test_partial_block_is_incomplete(walker):
    cfg = post_bootstrap_configuration(walker).replace([(Coord(1, 1), "O")])
    assert not check_complete_coloring(cfg)


def test_compiled_target_is_plain_and_unit_seeded(walker):
    compiled = compile_system(walker, "scrn")
    target = compiled.target
    assert target.flavor is Flavor.PLAIN
    assert target.unit_seeded and target.seed == "s"
    rep = compiled.representation
    assert rep("s^5") == "s" and rep("A^2") == "A" and rep("chi^3") == "O"
    assert set(compiled.provenance["protocol"]) == {"orientation", "growing"}
    assert compiled.rule_count == len(target.reactions)
    # every generated reaction is traced back to a protocol item
    assert set(compiled.provenance["rule"]) == set(range(compiled.rule_count))


def test_source_checks():
    plain = ScrnSystem(["s"], [], Configuration({(0, 0): "s"}))
    with pytest.raises(CompileError):
        compile_dscrn_to_scrn(plain)
    clash = ScrnSystem(
        ["s", "a^b"], [], Configuration({(0, 0): "s"}), flavor=Flavor.DIRECTED)
    with pytest.raises(CompileError):
        compile_dscrn_to_scrn(clash)
    spread = ScrnSystem(
        ["s"], [], Configuration({(0, 0): "s", (1, 0): "s"}), flavor=Flavor.DIRECTED)
    with pytest.raises(CompileError):
        compile_dscrn_to_scrn(spread)


@pytest.fixture
def stopper():
    """The seed grows once to the east and stops."""
    return ScrnSystem(
        species=["s", "A", "B"],
        reactions=[Reaction(("s", BLANK), ("A", "B"), 1)],
        initial=Configuration({(0, 0): "s"}),
        flavor=Flavor.DIRECTED,
    )


def _from_block(source, target, reactions=None, mat=None):
    """The compiled rules started from the colored seed block."""
    block = post_bootstrap_configuration(source)
    if mat is not None:
        block = block.transform(mat)
    rules = target.reactions if reactions is None else reactions
    return ScrnSystem(target.species, rules, block, flavor=Flavor.PLAIN, unit_seeded=False)


def test_walker_follows_from_its_seed(walker):
    compiled = compile_system(walker, "scrn")
    report = check_follows(
        compiled.target, walker, compiled.representation, Region(3), depth=12)
    assert report.verdict == PASS, report.to_text()


def test_growth_from_the_block_follows(stopper):
    compiled = compile_system(stopper, "scrn")
    simulator = _from_block(stopper, compiled.target)
    report = check_follows(simulator, stopper, compiled.representation, Region(3), depth=12)
    assert report.verdict == PASS, report.to_text()


@pytest.mark.slow
def test_rotated_growth_needs_canonical_images(stopper):
    compiled = compile_system(stopper, "scrn")
    quarter = np.array([[0, -1], [1, 0]])
    simulator = _from_block(stopper, compiled.target, mat=quarter)
    args = (simulator, stopper, compiled.representation, Region(3))
    report = check_equiv_productions(*args, depth=40, modulo_symmetry=True)
    assert report.verdict == PASS, report.to_text()
    report = check_equiv_productions(*args, depth=40)
    assert report.verdict == FAIL, report.to_text()
    assert report.message.startswith("simulator produces an image")


def test_unswapped_final_growth_is_caught(stopper):
    compiled = compile_system(stopper, "scrn")
    prov = compiled.provenance
    final = set(prov.loc[(prov["protocol"] == "growing") & (prov["item"] == 11), "rule"])
    assert final
    reactions = [
        Reaction(r.reactants, r.products[::-1]) if i in final else r
        for i, r in enumerate(compiled.target.reactions)
    ]
    simulator = _from_block(stopper, compiled.target, reactions)
    report = check_follows(simulator, stopper, compiled.representation, Region(3), depth=12)
    assert report.verdict == FAIL, report.to_text()
    assert report.counterexample[-1].rule in final
