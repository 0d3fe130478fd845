#!/usr/bin/env python

"""
Trace files: a short header naming the model (by hash), the scheduler
seed and the region, then one event line per step:

    # surfsim trace
    model 3f2a9c0d1e4b5a67
    seed 42
    region radius=3
    step=1 rule=0 at=(0,0),(0,1) dir=0 out=s,A

Events are matched back against the enabled events of the model when
a trace is replayed, so a trace stays valid as long as the model file
it was recorded from does not change.
"""

import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

from loguru import logger

from surfsim.base.configuration import Configuration
from surfsim.base.lattice import Coord, Region
from surfsim.base.system import Event, ModelSystem
from surfsim.formats.modelfile import print_model
from surfsim.utils import ParseError, StaleEventError

MAGIC = "# surfsim trace"
SITE = re.compile(r"\((-?\d+),(-?\d+)\)")


def model_hash(system: ModelSystem) -> str:
    """First 16 hex digits of the sha256 of the canonical model text."""
    return hashlib.sha256(print_model(system).encode("utf-8")).hexdigest()[:16]


@dataclass
class StepLine:
    """One parsed event line."""
    step: int
    rule: int
    sites: Tuple[Coord, ...]
    direction: Optional[int]
    out: Tuple[str, ...]

    def matches(self, ev: Event) -> bool:
        return (
            ev.rule == self.rule
            and tuple(ev.sites) == self.sites
            and ev.direction == self.direction
            and tuple(str(s) for _, s in ev.writes) == self.out
        )


@dataclass
class TraceFile:
    model: str
    seed: Optional[int]
    region: str
    steps: List[StepLine] = field(default_factory=list)

    def __repr__(self):
        return f"<TraceFile: {len(self.steps)} steps, seed={self.seed}>"

    def __len__(self):
        return len(self.steps)


def trace_text(
    system: ModelSystem,
    events: List[Event],
    region: Region,
    seed: Optional[int],
    ) -> str:
    lines = [
        MAGIC,
        f"model {model_hash(system)}",
        f"seed {'-' if seed is None else seed}",
        f"region {region.to_text()}",
    ]
    lines += [ev.to_line(i) for i, ev in enumerate(events, 1)]
    return "\n".join(lines) + "\n"


def write_trace(
    path: Union[str, Path],
    system: ModelSystem,
    events: List[Event],
    region: Region,
    seed: Optional[int],
    ):
    Path(path).write_text(trace_text(system, events, region, seed), encoding="utf-8")
    logger.debug(f"wrote {len(events)} trace steps to {path}")


def _step(text: str, path, lineno: int) -> StepLine:
    fields = dict(item.partition("=")[::2] for item in text.split())
    try:
        sites = tuple(Coord(int(x), int(y)) for x, y in SITE.findall(fields["at"]))
        direction = None if fields["dir"] == "-" else int(fields["dir"])
        out = tuple(fields["out"].split(",")) if fields["out"] else ()
        return StepLine(int(fields["step"]), int(fields["rule"]), sites, direction, out)
    except (KeyError, ValueError):
        raise ParseError(f"malformed trace line {text!r}", path, lineno)


def parse_trace_text(text: str, path=None) -> TraceFile:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise ParseError("not a surfsim trace", path, 1)
    header = {}
    steps = []
    for lineno, line in enumerate(lines[1:], 2):
        line = line.strip()
        if not line:
            continue
        if line.startswith("step="):
            steps.append(_step(line, path, lineno))
        else:
            key, _, value = line.partition(" ")
            header[key] = value
    for key in ("model", "seed", "region"):
        if key not in header:
            raise ParseError(f"trace header lacks '{key}'", path, 1)
    seed = None if header["seed"] == "-" else int(header["seed"])
    return TraceFile(header["model"], seed, header["region"], steps)


def read_trace(path: Union[str, Path]) -> TraceFile:
    path = Path(path)
    return parse_trace_text(path.read_text(encoding="utf-8"), str(path))


def replay_trace(
    system: ModelSystem,
    trace: TraceFile,
    initial: Optional[Configuration] = None,
    ) -> List[Configuration]:
    """
    Every configuration visited by the trace, starting from the
    system's initial configuration. Raises StaleEventError when a
    line matches no enabled event.
    """
    if trace.model != model_hash(system):
        logger.warning("trace was recorded from a different model text")
    region = Region.from_text(trace.region, system.kind)
    cfg = system.initial() if initial is None else initial
    visited = [cfg]
    for line in trace.steps:
        match = [ev for ev in system.events(cfg, region) if line.matches(ev)]
        if not match:
            raise StaleEventError(f"trace step {line.step} matches no enabled event")
        cfg = system.apply(cfg, match[0])
        visited.append(cfg)
    return visited


__all__ = [
    "TraceFile", "StepLine", "model_hash", "trace_text", "write_trace",
    "parse_trace_text", "read_trace", "replay_trace",
]
