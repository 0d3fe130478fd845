#!/usr/bin/env python

"""
Bounded refinement checks between a simulator system S and a
simulated system T under a representation map R.

follows:   every S step (or run of steps through UND) moves the
           R*-image to a configuration T reaches from the old one.
models:    every T step out of a reachable α can be realized from
           every reachable preimage of α.
equiv:     S and T produce the same reachable and terminal images.

All searches are bounded by a region and a depth. A violation is a
fail with a replayable trace unless it touches the region boundary,
in which case bounded semantics may be the cause and the verdict is
indeterminate, as is any check cut off by the state budget.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, List, Optional, Set, Tuple

import networkx as nx
import pandas as pd
from loguru import logger

from surfsim.base import defaults
from surfsim.base.configuration import Configuration, canonicalize
from surfsim.base.defaults import UND
from surfsim.base.lattice import Region
from surfsim.base.system import Event, ModelSystem, Reachability, reachable_set
from surfsim.compile.base import RepresentationMap
from surfsim.utils import SearchError

PASS, FAIL, INDETERMINATE = "pass", "fail", "indeterminate"
EXIT_CODES = {PASS: 0, FAIL: 1, INDETERMINATE: 2}
CHECKS = ("follows", "models", "equiv")


@dataclass
class RefinementReport:
    """
    Verdict of one check. A fail carries the trace that replays to the
    violation from the initial configuration of `trace_system`.
    """
    check: str
    verdict: str
    message: str = ""
    counterexample: Optional[List[Event]] = None
    trace_system: str = "simulator"
    stats: pd.DataFrame = field(default_factory=pd.DataFrame)
    counts: Dict[str, int] = field(default_factory=dict)

    def __repr__(self):
        return f"<RefinementReport: {self.check} {self.verdict}>"

    def __bool__(self):
        return self.verdict == PASS

    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_text(self) -> str:
        lines = [
            f"check: {self.check}",
            f"verdict: {self.verdict}",
        ]
        if self.message:
            lines.append(f"message: {self.message}")
        for key, value in self.counts.items():
            lines.append(f"{key}: {value}")
        if not self.stats.empty:
            lines.append("statistics:")
            lines += ["  " + row for row in self.stats.to_string(index=False).splitlines()]
        if self.counterexample is not None:
            lines.append(
                f"counterexample ({self.trace_system}, {len(self.counterexample)} steps):")
            lines += [ev.to_line(i) for i, ev in enumerate(self.counterexample, 1)]
        return "\n".join(lines) + "\n"


class _Images:
    """
    R*-images of simulator configurations as target configurations,
    plus integer ids of their (optionally canonical) forms so that
    images from different sources compare by value.
    """
    def __init__(
        self,
        simulated: ModelSystem,
        representation: RepresentationMap,
        region: Region,
        modulo_symmetry: bool,
        depth: int = defaults.DEFAULT_DEPTH,
        max_states: int = defaults.MAX_STATES,
        workers: Optional[int] = None,
        ):
        self.simulated = simulated
        self.representation = representation
        self.region = region
        self.modulo_symmetry = modulo_symmetry
        self.depth = depth
        self.max_states = max_states
        self.workers = workers
        self._ids: Dict[FrozenSet, int] = {}
        self._reach: Dict[FrozenSet, Tuple[Set[int], bool]] = {}

    def image(self, cfg: Configuration):
        """Target configuration represented by cfg, or UND."""
        img = self.representation.map_config(cfg)
        if img == UND:
            return UND
        cells = {}
        for coord, state in img.items():
            cells[coord] = self.simulated.parse_state(state) if isinstance(state, str) else state
        return Configuration(cells, blank=self.simulated.blank, kind=self.simulated.kind)

    def raw_key(self, target: Configuration) -> FrozenSet:
        blank = str(self.simulated.blank)
        return frozenset((c, str(s)) for c, s in target.items() if str(s) != blank)

    def target_id(self, target: Configuration) -> int:
        if self.modulo_symmetry:
            target = canonicalize(target)
        key = self.raw_key(target)
        return self._ids.setdefault(key, len(self._ids))

    def image_id(self, cfg: Configuration) -> Optional[int]:
        """Id of cfg's image, None when the image is UND."""
        img = self.image(cfg)
        if img == UND:
            return None
        return self.target_id(img)

    def reach_ids(self, target: Configuration) -> Tuple[Set[int], bool]:
        """
        Ids of every configuration T reaches from target within the
        depth bound, and whether that search was exhaustive.
        """
        key = self.raw_key(target)
        if key not in self._reach:
            found = reachable_set(
                self.simulated, self.region, max_depth=self.depth,
                max_states=self.max_states, workers=self.workers, initial=target)
            self._reach[key] = ({self.target_id(cfg) for cfg in found.configs}, found.exact)
        return self._reach[key]

    def touches_boundary(self, *targets) -> bool:
        ring = self.region.boundary()
        return any(c in ring for target in targets if target != UND for c in target)


def _is_open(reach: Reachability, idx: int) -> bool:
    """True if idx may have successors the bounded search did not store."""
    if not reach.expanded(idx):
        return True
    return not reach.exact and reach.depth[idx] >= reach.max_depth


def _is_terminal(reach: Reachability, idx: int) -> bool:
    return reach.expanded(idx) and not reach.successors[idx] and not _is_open(reach, idx)


def _graph(reach: Reachability, nodes=None) -> nx.DiGraph:
    graph = nx.DiGraph()
    keep = range(len(reach)) if nodes is None else nodes
    graph.add_nodes_from(keep)
    for i in keep:
        for _, j in reach.successors.get(i, ()):
            if j in graph:
                graph.add_edge(i, j)
    return graph


def _stats(**reaches: Reachability) -> pd.DataFrame:
    rows = []
    for name, reach in reaches.items():
        rows.append((
            name, len(reach), reach.max_depth, reach.exact, reach.truncated, len(reach.blocked)))
    return pd.DataFrame(
        rows, columns=["system", "configurations", "depth", "exact", "truncated", "blocked"])


def _search(simulator, region, depth, max_states, workers) -> Reachability:
    return reachable_set(
        simulator, region, max_depth=depth, max_states=max_states, workers=workers)


def _violation(check, images, targets, message, trace, trace_system, stats, counts):
    """A fail, or indeterminate when the violating images reach the boundary."""
    if images.touches_boundary(*targets):
        logger.warning(f"{check}: violation touches the region boundary, {message}")
        return RefinementReport(
            check, INDETERMINATE, f"boundary-tainted: {message}", trace, trace_system,
            stats, counts)
    logger.info(f"{check}: fail, {message}")
    return RefinementReport(check, FAIL, message, trace, trace_system, stats, counts)


def _finish(check, stats, counts, truncated, message="") -> RefinementReport:
    if truncated:
        logger.warning(f"{check}: search truncated by the state budget")
        return RefinementReport(
            check, INDETERMINATE, "state budget exhausted", stats=stats, counts=counts)
    logger.info(f"{check}: pass {counts}")
    return RefinementReport(check, PASS, message, stats=stats, counts=counts)


def _depth_zero(check) -> RefinementReport:
    logger.warning(f"{check}: depth 0 decides nothing")
    return RefinementReport(check, INDETERMINATE, "depth 0 explores no step")


def check_follows(
    simulator: ModelSystem,
    simulated: ModelSystem,
    representation: RepresentationMap,
    region: Region,
    depth: int = defaults.DEFAULT_DEPTH,
    modulo_symmetry: bool = False,
    max_states: int = defaults.MAX_STATES,
    workers: Optional[int] = None,
    ) -> RefinementReport:
    """
    T follows S: from every defined simulator configuration, every
    run through UND configurations ends at a configuration whose image
    T reaches from the start image. The T search from each start image
    shares the depth bound; an end image it did not find is a fail only
    when that search was exhaustive.
    """
    if depth < 1:
        return _depth_zero("follows")
    images = _Images(
        simulated, representation, region, modulo_symmetry, depth, max_states, workers)
    reach = _search(simulator, region, depth, max_states, workers)
    ids = [images.image_id(cfg) for cfg in reach.configs]
    undefined = [i for i, v in enumerate(ids) if v is None]
    stats = _stats(simulator=reach)

    # defined images reachable from each UND node through UND nodes only
    graph = _graph(reach, undefined)
    cond = nx.condensation(graph)
    members = cond.graph["mapping"]
    exits: Dict[int, Set[int]] = {}
    for scc in reversed(list(nx.topological_sort(cond))):
        out = set()
        for i in cond.nodes[scc]["members"]:
            for _, j in reach.successors.get(i, ()):
                if ids[j] is not None:
                    out.add(ids[j])
        for nxt in cond.successors(scc):
            out |= exits[nxt]
        exits[scc] = out

    segments = undecided = 0
    for i, aid in enumerate(ids):
        if aid is None or not reach.expanded(i):
            continue
        reached = set()
        for _, j in reach.successors[i]:
            if ids[j] is None:
                reached |= exits[members[j]]
            else:
                reached.add(ids[j])
        segments += len(reached)
        start = images.image(reach.configs[i])
        known, exact = images.reach_ids(start)
        bad = reached - known
        if not bad:
            continue
        if not exact:
            undecided += 1
            continue
        tail, end = _segment_to(reach, ids, i, bad)
        trace = reach.path_to(i) + tail
        message = (
            f"image changed to one the simulated system cannot reach after "
            f"{len(trace)} simulator steps")
        counts = {"segments": segments, "undecided": undecided}
        return _violation(
            "follows", images, (start, images.image(end)), message, trace, "simulator",
            stats, counts)

    counts = {
        "segments": segments, "defined": len(ids) - len(undefined),
        "undefined": len(undefined), "undecided": undecided}
    if undecided and not reach.truncated:
        logger.warning(f"follows: {undecided} segments end beyond the simulated search")
        return RefinementReport(
            "follows", INDETERMINATE, "segment ends the bounded simulated search did not reach",
            stats=stats, counts=counts)
    return _finish("follows", stats, counts, reach.truncated)


def _segment_to(reach, ids, start, targets) -> Tuple[List[Event], Configuration]:
    """Shortest run from start through UND nodes to an image in targets."""
    queue = [(start, [])]
    seen = {start}
    while queue:
        nxt = []
        for i, path in queue:
            for ev, j in reach.successors.get(i, ()):
                if j in seen:
                    continue
                seen.add(j)
                if ids[j] in targets:
                    return path + [ev], reach.configs[j]
                if ids[j] is None:
                    nxt.append((j, path + [ev]))
        queue = nxt
    raise SearchError("segment target not reachable from its start")


def check_models(
    simulator: ModelSystem,
    simulated: ModelSystem,
    representation: RepresentationMap,
    region: Region,
    depth: int = defaults.DEFAULT_DEPTH,
    modulo_symmetry: bool = False,
    max_states: int = defaults.MAX_STATES,
    workers: Optional[int] = None,
    ) -> RefinementReport:
    """
    S models T: Π(α) is the set of reachable simulator configurations
    whose image is α. For every T step α -> β, every member of Π(α)
    must reach some configuration whose image is β. With Π(α) taken as
    the whole reachable preimage, the closure condition on predecessors
    holds by reflexivity inside the bound.
    """
    if depth < 1:
        return _depth_zero("models")
    images = _Images(simulated, representation, region, modulo_symmetry)
    target_reach = _search(simulated, region, depth, max_states, workers)
    reach = _search(simulator, region, depth, max_states, workers)
    stats = _stats(simulator=reach, simulated=target_reach)
    ids = [images.image_id(cfg) for cfg in reach.configs]
    preimage: Dict[int, List[int]] = {}
    for i, v in enumerate(ids):
        if v is not None:
            preimage.setdefault(v, []).append(i)

    # defined images reachable from every simulator node, and whether
    # some reachable node lies beyond the bound
    cond = nx.condensation(_graph(reach))
    members = cond.graph["mapping"]
    closure: Dict[int, Set[int]] = {}
    is_open: Dict[int, bool] = {}
    for scc in reversed(list(nx.topological_sort(cond))):
        nodes = cond.nodes[scc]["members"]
        out = {ids[i] for i in nodes if ids[i] is not None}
        flag = any(_is_open(reach, i) for i in nodes)
        for nxt in cond.successors(scc):
            out |= closure[nxt]
            flag = flag or is_open[nxt]
        closure[scc] = out
        is_open[scc] = flag

    counts = {"pairs": 0, "realized": 0, "frontier": 0, "unmatched": 0}
    for a, alpha in enumerate(target_reach.configs):
        aid = images.target_id(alpha)
        pi = preimage.get(aid, [])
        if not pi:
            if reach.exact:
                return _violation(
                    "models", images, (alpha,), "a simulated configuration has no preimage",
                    target_reach.path_to(a), "simulated", stats, counts)
            counts["unmatched"] += 1
            continue
        evs, _ = simulated.explore(alpha, region)
        for ev in evs:
            beta = simulated.apply(alpha, ev)
            bid = images.target_id(beta)
            if bid == aid:
                continue
            for i in pi:
                counts["pairs"] += 1
                scc = members[i]
                if bid in closure[scc]:
                    counts["realized"] += 1
                elif is_open[scc]:
                    counts["frontier"] += 1
                else:
                    message = (
                        f"a preimage of a depth-{target_reach.depth[a]} simulated "
                        f"configuration cannot realize its step {ev.label or ev.rule}")
                    return _violation(
                        "models", images, (alpha, beta), message, reach.path_to(i),
                        "simulator", stats, counts)

    undecided = counts["frontier"] + counts["unmatched"]
    if undecided and not (reach.truncated or target_reach.truncated):
        if counts["realized"]:
            message = (
                f"{counts['frontier']} steps and {counts['unmatched']} simulated "
                f"configurations left undecided by the bound")
        else:
            message = "no step decided within the bound"
        logger.warning(f"models: {message}")
        return RefinementReport("models", INDETERMINATE, message, stats=stats, counts=counts)
    return _finish("models", stats, counts, reach.truncated or target_reach.truncated)


def check_equiv_productions(
    simulator: ModelSystem,
    simulated: ModelSystem,
    representation: RepresentationMap,
    region: Region,
    depth: int = defaults.DEFAULT_DEPTH,
    modulo_symmetry: bool = False,
    max_states: int = defaults.MAX_STATES,
    workers: Optional[int] = None,
    ) -> RefinementReport:
    """
    Reachable images equal the simulated reachable set (plus UND), and
    terminal images equal the simulated terminal set. An inclusion is
    decided in a direction only when the side that would have to
    contain the witness was searched exhaustively.
    """
    if depth < 1:
        return _depth_zero("equiv")
    images = _Images(simulated, representation, region, modulo_symmetry)
    target_reach = _search(simulated, region, depth, max_states, workers)
    reach = _search(simulator, region, depth, max_states, workers)
    stats = _stats(simulator=reach, simulated=target_reach)
    ids = [images.image_id(cfg) for cfg in reach.configs]
    target_ids = [images.target_id(cfg) for cfg in target_reach.configs]
    produced = set(ids) - {None}
    known = set(target_ids)
    counts = {"images": len(produced), "simulated": len(known), "unresolved": 0}

    for i, v in enumerate(ids):
        if v is None or v in known:
            continue
        if target_reach.exact:
            img = images.image(reach.configs[i])
            return _violation(
                "equiv", images, (img,), "simulator produces an image the simulated system cannot",
                reach.path_to(i), "simulator", stats, counts)
        counts["unresolved"] += 1

    for a, v in enumerate(target_ids):
        if v in produced:
            continue
        if reach.exact:
            return _violation(
                "equiv", images, (target_reach.configs[a],),
                "a simulated configuration is never produced", target_reach.path_to(a),
                "simulated", stats, counts)
        counts["unresolved"] += 1

    # terminal images
    target_terminal = {
        target_ids[a] for a in range(len(target_reach)) if _is_terminal(target_reach, a)}
    terminal_images = set()
    for i in range(len(reach)):
        if not _is_terminal(reach, i):
            continue
        img = images.image(reach.configs[i])
        if img == UND:
            return _violation(
                "equiv", images, (), "a terminal simulator configuration maps to UND",
                reach.path_to(i), "simulator", stats, counts)
        terminal_images.add(ids[i])
        if modulo_symmetry:
            if not target_reach.exact:
                counts["unresolved"] += 1
                continue
            ok = ids[i] in target_terminal
        else:
            ok = simulated.is_terminal(img, region)
        if not ok:
            return _violation(
                "equiv", images, (img,), "a terminal simulator image is not terminal",
                reach.path_to(i), "simulator", stats, counts)
    for a in range(len(target_reach)):
        if target_ids[a] not in target_terminal or target_ids[a] in terminal_images:
            continue
        if reach.exact:
            return _violation(
                "equiv", images, (target_reach.configs[a],),
                "a terminal simulated configuration is not a terminal image",
                target_reach.path_to(a), "simulated", stats, counts)
        counts["unresolved"] += 1
    counts["terminal"] = len(terminal_images)

    if counts["unresolved"]:
        logger.warning(f"equiv: {counts['unresolved']} inclusions left undecided by the bound")
        return RefinementReport(
            "equiv", INDETERMINATE, "bounded search left inclusions undecided",
            stats=stats, counts=counts)
    return _finish("equiv", stats, counts, reach.truncated or target_reach.truncated)


def run_check(check: str, *args, **kwargs) -> RefinementReport:
    """Dispatches by check name: follows, models or equiv."""
    funcs = {
        "follows": check_follows,
        "models": check_models,
        "equiv": check_equiv_productions,
    }
    if check not in funcs:
        logger.error(f"unknown check {check!r}, options are {list(funcs)}")
        raise ValueError(f"unknown check {check!r}")
    return funcs[check](*args, **kwargs)


__all__ = [
    "RefinementReport", "check_follows", "check_models", "check_equiv_productions",
    "run_check", "CHECKS", "PASS", "FAIL", "INDETERMINATE",
]
