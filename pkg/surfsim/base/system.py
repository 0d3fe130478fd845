#!/usr/bin/env python

"""
Model-independent machinery: events, the abstract system interface,
the seeded scheduler and bounded breadth-first reachability.

Every model module (scrn, assembly, ca, amoebot) subclasses
ModelSystem and only has to enumerate events; stepping, tracing and
searching are shared.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, List, Optional, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from surfsim.base import defaults
from surfsim.base.configuration import Configuration, canonicalize
from surfsim.base.lattice import Coord, LatticeKind, Region, SQUARE4
from surfsim.utils import StaleEventError


@dataclass(frozen=True)
class Event:
    """
    One enabled local transition. `reads` lists every cell whose
    state the event depends on, `writes` the cells it rewrites.
    """
    rule: int
    sites: Tuple[Coord, ...]
    direction: Optional[int]
    reads: Tuple[Tuple[Coord, Hashable], ...]
    writes: Tuple[Tuple[Coord, Hashable], ...]
    label: str = field(default="", compare=False)

    def __repr__(self):
        at = ",".join(str(c) for c in self.sites)
        return f"<Event: rule={self.rule} at={at} {self.label}>"

    def to_line(self, step: int) -> str:
        """Wire format of a trace line."""
        at = ",".join(str(c) for c in self.sites)
        direc = "-" if self.direction is None else self.direction
        out = ",".join(str(state) for _, state in self.writes)
        return f"step={step} rule={self.rule} at={at} dir={direc} out={out}"


def apply_event(cfg: Configuration, ev: Event) -> Configuration:
    """
    Rewrites exactly the event's written cells. Raises StaleEventError
    if any cell the event read has changed since enumeration.
    """
    for coord, state in ev.reads:
        if cfg[coord] != state:
            raise StaleEventError(
                f"event {ev} expected {state} at {coord}, found {cfg[coord]}")
    return cfg.replace(ev.writes)


class ModelSystem:
    """
    Base class of the five model families. Subclasses set `model`
    (the model file section name), `kind` and `blank`, and implement
    `initial` and `explore`.
    """
    model = "abstract"
    kind: LatticeKind = SQUARE4
    blank: Hashable = defaults.BLANK

    def __repr__(self):
        return f"<{type(self).__name__}: {self.model}>"

    def initial(self) -> Configuration:
        raise NotImplementedError

    def explore(self, cfg: Configuration, region: Region) -> Tuple[List[Event], bool]:
        """
        Returns (events, blocked): every event enabled in cfg inside
        the region, and whether some event was suppressed only
        because it needs a cell outside the region.
        """
        raise NotImplementedError

    def events(self, cfg: Configuration, region: Region) -> List[Event]:
        return self.explore(cfg, region)[0]

    def apply(self, cfg: Configuration, ev: Event) -> Configuration:
        return apply_event(cfg, ev)

    def is_terminal(self, cfg: Configuration, region: Region) -> bool:
        return not self.events(cfg, region)

    def state_name(self, state) -> str:
        return str(state)

    def parse_state(self, text: str):
        """Inverse of state_name for states read back from text."""
        return text

    def empty(self) -> Configuration:
        return Configuration(blank=self.blank, kind=self.kind)


def run_trace(
    system: ModelSystem,
    region: Region,
    seed: Optional[int] = defaults.DEFAULT_SEED,
    max_steps: int = defaults.DEFAULT_STEPS,
    initial: Optional[Configuration] = None,
    ) -> List[Event]:
    """
    Uniform random scheduler over enabled events. A deterministic
    function of (system, region, seed, max_steps); stops early when
    no event is enabled.
    """
    return simulate(system, region, seed, max_steps, initial)[0]


def simulate(
    system: ModelSystem,
    region: Region,
    seed: Optional[int] = defaults.DEFAULT_SEED,
    max_steps: int = defaults.DEFAULT_STEPS,
    initial: Optional[Configuration] = None,
    ) -> Tuple[List[Event], Configuration]:
    """Same as run_trace but also returns the final configuration."""
    rng = np.random.default_rng(seed)
    cfg = system.initial() if initial is None else initial
    trace = []
    for _ in range(max_steps):
        evs = system.events(cfg, region)
        if not evs:
            logger.debug(f"terminal after {len(trace)} steps")
            break
        ev = evs[int(rng.integers(len(evs)))]
        cfg = system.apply(cfg, ev)
        trace.append(ev)
    return trace, cfg


def replay(system: ModelSystem, events: List[Event], initial=None) -> List[Configuration]:
    """Applies events in order, returning every visited configuration."""
    cfg = system.initial() if initial is None else initial
    visited = [cfg]
    for ev in events:
        cfg = system.apply(cfg, ev)
        visited.append(cfg)
    return visited


class Reachability:
    """
    Result of a bounded breadth-first search. Configurations are
    indexed by insertion order; `parent` holds the BFS tree so that
    any stored configuration can be reached by a replayable path.
    """
    def __init__(self, system: ModelSystem, region: Region, canonical: bool):
        self.system = system
        self.region = region
        self.canonical = canonical
        self.configs: List[Configuration] = []
        self.index: Dict[Any, int] = {}
        self.depth: List[int] = []
        self.parent: List[Optional[Tuple[int, Event]]] = []
        self.successors: Dict[int, List[Tuple[Event, int]]] = {}
        self.blocked: set = set()
        self.exact = False
        self.truncated = False
        self.max_depth = 0

    def __repr__(self):
        flag = "exact" if self.exact else "bounded"
        return f"<Reachability: {len(self.configs)} configurations, {flag}>"

    def __len__(self):
        return len(self.configs)

    def __iter__(self):
        return iter(self.configs)

    def key(self, cfg: Configuration):
        return canonicalize(cfg) if self.canonical else cfg

    def __contains__(self, cfg):
        return self.key(cfg) in self.index

    def lookup(self, cfg) -> Optional[int]:
        return self.index.get(self.key(cfg))

    def _add(self, cfg, depth, parent) -> Tuple[int, bool]:
        key = self.key(cfg)
        idx = self.index.get(key)
        if idx is not None:
            return idx, False
        idx = len(self.configs)
        self.index[key] = idx
        self.configs.append(cfg)
        self.depth.append(depth)
        self.parent.append(parent)
        return idx, True

    @property
    def tainted(self) -> bool:
        """Some explored configuration had an event cut off by the region."""
        return bool(self.blocked)

    @property
    def terminal(self) -> List[Configuration]:
        """Expanded configurations with no enabled event."""
        return [self.configs[i] for i, succ in self.successors.items() if not succ]

    def expanded(self, idx: int) -> bool:
        return idx in self.successors

    def path_to(self, idx: int) -> List[Event]:
        """Events leading from the initial configuration to configs[idx]."""
        path = []
        while self.parent[idx] is not None:
            idx, ev = self.parent[idx]
            path.append(ev)
        return path[::-1]

    def summary(self) -> pd.DataFrame:
        """Number of configurations discovered per BFS layer."""
        frame = pd.Series(self.depth, dtype=int).value_counts().sort_index()
        frame = frame.rename_axis("depth").reset_index(name="configurations")
        return frame


def reachable_set(
    system: ModelSystem,
    region: Region,
    max_depth: int = defaults.DEFAULT_DEPTH,
    canonical: bool = False,
    max_states: int = defaults.MAX_STATES,
    workers: Optional[int] = None,
    initial: Optional[Configuration] = None,
    ) -> Reachability:
    """
    Breadth-first closure of the one-step relation restricted to the
    region and cut at max_depth. The result is exact when the frontier
    was exhausted: every successor of every stored configuration is
    stored too. Exceeding max_states stops the search with an explicit
    truncation flag. With `canonical` configurations are merged up to
    lattice symmetry (sound only for orientation-free systems).

    Frontier layers are expanded by `workers` threads; the merge is
    sequential in frontier order so results do not depend on the
    worker count.
    """
    if workers is None:
        workers = defaults.workers_from_env()
    result = Reachability(system, region, canonical)
    start = system.initial() if initial is None else initial
    idx, _ = result._add(start, 0, None)
    frontier = [idx]
    depth = 0

    def expand(i):
        cfg = result.configs[i]
        evs, blocked = system.explore(cfg, region)
        return [(ev, system.apply(cfg, ev)) for ev in evs], blocked

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while frontier:
            if pool is None:
                expansions = [expand(i) for i in frontier]
            else:
                expansions = list(pool.map(expand, frontier))
            nxt = []
            complete = True
            for i, (succ, blocked) in zip(frontier, expansions):
                if blocked:
                    result.blocked.add(i)
                edges = []
                for ev, cfg in succ:
                    if depth < max_depth and not result.truncated:
                        j, new = result._add(cfg, depth + 1, (i, ev))
                        if new:
                            nxt.append(j)
                            if len(result.configs) >= max_states:
                                result.truncated = True
                                logger.warning(
                                    f"reachable set truncated at {max_states} configurations")
                    else:
                        j = result.lookup(cfg)
                        if j is None:
                            complete = False
                            continue
                    edges.append((ev, j))
                result.successors[i] = edges
            logger.debug(f"depth {depth}: {len(frontier)} expanded, {len(nxt)} new")
            result.max_depth = depth
            if not complete:
                break
            frontier = nxt
            depth += 1
            if result.truncated:
                # newly added states past the budget are left unexpanded
                break
    finally:
        if pool is not None:
            pool.shutdown()

    unexpanded = len(result.configs) - len(result.successors)
    result.exact = not result.truncated and unexpanded == 0 and complete
    if result.tainted:
        logger.debug("reachable set touches the region boundary")
    return result


def terminal_set(
    system: ModelSystem,
    region: Region,
    max_depth: int = defaults.DEFAULT_DEPTH,
    **kwargs,
    ) -> Optional[List[Configuration]]:
    """
    Reachable configurations with no enabled event in the region, or
    None (indeterminate) when the reachable set is not exact.
    """
    reach = reachable_set(system, region, max_depth, **kwargs)
    if not reach.exact:
        logger.warning("terminal set is indeterminate: reachable set was cut off")
        return None
    return reach.terminal
