#!/usr/bin/env python

"""Trace files: writing, reading and replaying."""

import pytest

from surfsim.base.lattice import Coord, Region
from surfsim.base.system import simulate
from surfsim.formats.modelfile import parse_model_text, print_model
from surfsim.formats.trace import (
    model_hash, parse_trace_text, read_trace, replay_trace, trace_text, write_trace,
)
from surfsim.utils import ParseError, StaleEventError


@pytest.fixture
def walk(walker):
    region = Region(3)
    events, final = simulate(walker, region, seed=1, max_steps=10)
    return region, events, final


def test_trace_header(walker, walk):
    region, events, _ = walk
    text = trace_text(walker, events, region, 1)
    lines = text.splitlines()
    assert lines[:4] == [
        "# surfsim trace", f"model {model_hash(walker)}", "seed 1", "region radius=3"]
    assert lines[4] == "step=1 rule=0 at=(0,0),(1,0) dir=1 out=A,s"
    assert len(lines) == 4 + len(events) == 7


def test_replay_reaches_the_final_configuration(walker, walk, tmp_path):
    region, events, final = walk
    path = tmp_path / "walk.trace"
    write_trace(path, walker, events, region, 1)
    trace = read_trace(path)
    assert len(trace) == 3 and trace.seed == 1
    visited = replay_trace(walker, trace)
    assert len(visited) == 4
    assert visited[-1] == final
    assert final[Coord(3, 0)] == "s"


def test_stale_lines_are_rejected(walker, walk):
    region, events, _ = walk
    text = trace_text(walker, events, region, None).replace("out=A,s", "out=s,A", 1)
    trace = parse_trace_text(text)
    assert trace.seed is None
    with pytest.raises(StaleEventError):
        replay_trace(walker, trace)


def test_model_hash_follows_the_canonical_text(walker, line_scrn):
    digest = model_hash(walker)
    assert len(digest) == 16
    assert model_hash(parse_model_text(print_model(walker))) == digest
    assert model_hash(line_scrn) != digest


def test_malformed_traces():
    with pytest.raises(ParseError, match="not a surfsim trace"):
        parse_trace_text("step=1 rule=0\n")
    with pytest.raises(ParseError, match="lacks"):
        parse_trace_text("# surfsim trace\nmodel abc\nseed 1\n")
    with pytest.raises(ParseError) as err:
        parse_trace_text("# surfsim trace\nmodel abc\nseed 1\nregion radius=1\nstep=1 rule=x\n")
    assert err.value.lineno == 5
