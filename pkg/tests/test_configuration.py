#!/usr/bin/env python

"""Sparse configurations and their canonical form."""

import pytest

from surfsim.base.configuration import Configuration, canonicalize
from surfsim.base.lattice import Coord, TRIANGULAR6, symmetries


def test_blank_cells_are_never_stored():
    cfg = Configuration({(0, 0): "A", (1, 0): "O"})
    assert len(cfg) == 1
    assert cfg[Coord(5, 5)] == "O"
    assert Coord(1, 0) not in cfg


def test_replace_returns_a_new_value():
    cfg = Configuration({(0, 0): "A"})
    new = cfg.replace([(Coord(0, 0), "O"), (Coord(1, 0), "B")])
    assert cfg[Coord(0, 0)] == "A"
    assert dict(new) == {Coord(1, 0): "B"}
    assert new != cfg


def test_equal_configurations_hash_alike():
    a = Configuration({(0, 0): "A", (1, 0): "B"})
    b = Configuration({(1, 0): "B", (0, 0): "A"})
    assert a == b and hash(a) == hash(b)
    assert a != Configuration({(0, 0): "A", (1, 0): "B"}, blank="null")


def test_text_is_row_major():
    cfg = Configuration({(1, 1): "C", (1, 0): "B", (0, 0): "A"})
    assert cfg.to_text() == "0 0 A\n1 0 B\n1 1 C"
    assert cfg.bbox() == (0, 0, 1, 1)


def test_empty_configuration_has_no_box():
    assert Configuration().bbox() is None
    assert canonicalize(Configuration()) == Configuration()


@pytest.mark.parametrize("kind", [None, TRIANGULAR6])
def test_canonical_form_is_symmetry_invariant(kind):
    kwargs = {} if kind is None else {"kind": kind}
    cfg = Configuration({(0, 0): "A", (1, 0): "B", (1, 1): "C", (3, 0): "A"}, **kwargs)
    canon = canonicalize(cfg)
    assert canonicalize(canon) == canon
    for mat in symmetries(cfg.kind):
        moved = cfg.transform(mat).translate(7, -4)
        assert canonicalize(moved) == canon


def test_canonical_form_starts_at_the_origin():
    canon = canonicalize(Configuration({(5, 5): "A", (6, 5): "B"}))
    assert canon.bbox()[:2] == (0, 0)
    assert len(canon) == 2


def test_relabel_changes_blank_and_states():
    cfg = Configuration({(0, 0): "A", (1, 0): "B"})
    out = cfg.relabel(str.lower, blank="null")
    assert out.blank == "null"
    assert dict(out) == {Coord(0, 0): "a", Coord(1, 0): "b"}
