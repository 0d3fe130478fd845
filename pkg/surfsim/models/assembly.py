#!/usr/bin/env python

"""
Seeded self-assembly: the abstract tile assembly model (aTAM) and
tile automata (TA) with affinity-strengthening transition rules.

Empty positions hold the null state. Both models grow monotonically
from a stable seed, so attachment only needs the local strength sum;
`is_stable` checks the global min-cut.
"""

from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx
from loguru import logger

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import NULL
from surfsim.base.lattice import Coord, Region, SQUARE4, neighbor, neighbors, opposite
from surfsim.base.system import Event, ModelSystem, reachable_set, terminal_set
from surfsim.utils import ModelError, OccupiedError

# square directions
N, E, S, W = range(4)

# TA orientations: vertical (first operand above) and horizontal (first left)
VERTICAL = "v"
HORIZONTAL = "h"
ORIENTS = (VERTICAL, HORIZONTAL)


class Tile(NamedTuple):
    """A named tile type with glue labels in N, E, S, W order."""
    name: str
    north: str = NULL
    east: str = NULL
    south: str = NULL
    west: str = NULL

    @property
    def glues(self) -> Tuple[str, str, str, str]:
        return (self.north, self.east, self.south, self.west)

    def glue(self, direction: int) -> str:
        return self.glues[direction]


class Glue(NamedTuple):
    label: str
    strength: int


class AtamSystem(ModelSystem):
    """
    Γ = (tiles, seed, glue strengths, τ). Configurations map cells to
    tile names over the null default.
    """
    model = "atam"
    blank = NULL

    def __init__(
        self,
        tiles: Sequence[Tile],
        glues: Union[Dict[str, int], Iterable[Glue]],
        seed: str,
        tau: int = 1,
        ):

        if tau < 1:
            logger.error(f"temperature must be >= 1, got {tau}")
            raise ModelError("tau must be a positive integer")
        if not isinstance(glues, dict):
            glues = {g.label: g.strength for g in glues}
        self.glues: Dict[str, int] = {NULL: 0, **glues}
        self.tiles: List[Tile] = list(tiles)
        self.tau = tau
        self._by_name = {t.name: t for t in self.tiles}
        if len(self._by_name) != len(self.tiles):
            raise ModelError("tile names must be unique")
        if seed not in self._by_name:
            raise ModelError(f"seed {seed!r} is not a declared tile")
        for tile in self.tiles:
            for label in tile.glues:
                if label not in self.glues:
                    raise ModelError(f"tile {tile.name} uses undeclared glue {label!r}")
                if self.glues[label] < 0:
                    raise ModelError(f"negative glue strength for {label!r}")
        self.glues[NULL] = 0
        self.seed = seed

    def __repr__(self):
        return f"<AtamSystem: {len(self.tiles)} tiles, tau={self.tau}>"

    def tile(self, name: str) -> Tile:
        return self._by_name[name]

    def initial(self) -> Configuration:
        return Configuration({Coord(0, 0): self.seed}, blank=NULL)

    def strength(self, a: str, b: str) -> int:
        """g(a, b): the glue strength if the labels match, else 0."""
        if a != b or a == NULL:
            return 0
        return self.glues[a]

    def bond(self, here: str, there: str, direction: int) -> int:
        """Strength between tile `here` and tile `there` in `direction`."""
        if here == NULL or there == NULL:
            return 0
        return self.strength(
            self.tile(here).glue(direction), self.tile(there).glue(opposite(direction)))

    def binding(self, asm: Configuration, pos: Coord, tile: Tile) -> int:
        """Sum of matching glue strengths of tile placed at pos."""
        total = 0
        for d, nbr in enumerate(neighbors(pos)):
            other = asm[nbr]
            if other != NULL:
                total += self.strength(tile.glue(d), self.tile(other).glue(opposite(d)))
        return total

    def explore(self, cfg: Configuration, region: Region):
        events = []
        blocked = False
        for pos in frontier(cfg):
            for idx, tile in enumerate(self.tiles):
                if self.binding(cfg, pos, tile) < self.tau:
                    continue
                if pos not in region:
                    blocked = True
                    continue
                events.append(Event(
                    idx, (pos,), None, ((pos, NULL),), ((pos, tile.name),),
                    f"attach {tile.name}"))
        return events, blocked


class TaRule(NamedTuple):
    """
    Transition (a, b) -> (c, d). Vertical rules have a directly
    above b; horizontal rules have a directly left of b.
    """
    a: str
    b: str
    c: str
    d: str
    orient: str

    @property
    def direction(self) -> int:
        """Square direction from the first to the second operand."""
        return S if self.orient == VERTICAL else E

    def __str__(self):
        return f"{self.a} {self.b} -> {self.c} {self.d} {self.orient}"


class AffinityCheck(NamedTuple):
    """Result of the affinity-strengthening validator."""
    passed: bool
    rule: Optional[TaRule] = None
    state: Optional[str] = None
    orient: Optional[str] = None

    def __bool__(self):
        return self.passed


class TaSystem(ModelSystem):
    """
    Γ = (Q, S, I, g, R, τ). `affinities` maps (s1, s2, orient) to a
    strength; missing keys and null have affinity 0.
    """
    model = "ta"
    blank = NULL

    def __init__(
        self,
        states: Iterable[str],
        attachable: Iterable[str],
        affinities: Dict[Tuple[str, str, str], int],
        rules: Sequence[TaRule],
        seed: Optional[str] = None,
        tau: int = 1,
        initial: Optional[Configuration] = None,
        ):

        self.states = sorted(set(states))
        self.attachable_states = [s for s in attachable]
        self.affinities = {k: v for k, v in affinities.items() if v}
        self.rules: List[TaRule] = list(rules)
        self.tau = tau
        self.seed = seed
        if tau < 1:
            raise ModelError("tau must be a positive integer")
        known = set(self.states)
        for state in self.attachable_states:
            if state not in known:
                raise ModelError(f"attachable state {state!r} is not declared")
        for (a, b, orient), value in self.affinities.items():
            if a not in known or b not in known or orient not in ORIENTS or value < 0:
                raise ModelError(f"invalid affinity entry {(a, b, orient)}={value}")
        for rule in self.rules:
            if rule.orient not in ORIENTS:
                raise ModelError(f"rule orientation must be v or h: {rule}")
            for state in rule[:4]:
                if state not in known:
                    raise ModelError(f"undeclared state {state!r} in rule '{rule}'")

        if initial is None:
            if seed is None:
                raise ModelError("a TA system needs a seed or an initial assembly")
            initial = Configuration({Coord(0, 0): seed}, blank=NULL)
        elif initial.blank != NULL:
            initial = Configuration(initial.support, blank=NULL)
        self._initial = initial
        self._rules_by_pair: Dict[Tuple[str, str, str], List[Tuple[int, TaRule]]] = {}
        for idx, rule in enumerate(self.rules):
            self._rules_by_pair.setdefault((rule.a, rule.b, rule.orient), []).append((idx, rule))

    def __repr__(self):
        return (
            f"<TaSystem: {len(self.states)} states, {len(self.rules)} rules, "
            f"tau={self.tau}>")

    def initial(self) -> Configuration:
        return self._initial

    def affinity(self, a: str, b: str, orient: str) -> int:
        if a == NULL or b == NULL:
            return 0
        return self.affinities.get((a, b, orient), 0)

    def bond(self, here: str, there: str, direction: int) -> int:
        """Affinity between `here` and its neighbor `there` in direction."""
        if direction == N:
            return self.affinity(there, here, VERTICAL)
        if direction == S:
            return self.affinity(here, there, VERTICAL)
        if direction == E:
            return self.affinity(here, there, HORIZONTAL)
        return self.affinity(there, here, HORIZONTAL)

    def binding(self, asm: Configuration, pos: Coord, state: str) -> int:
        return sum(
            self.bond(state, asm[nbr], d) for d, nbr in enumerate(neighbors(pos)))

    def explore(self, cfg: Configuration, region: Region):
        events = []
        blocked = False
        nrules = len(self.rules)
        for pos in frontier(cfg):
            for k, state in enumerate(self.attachable_states):
                if self.binding(cfg, pos, state) < self.tau:
                    continue
                if pos not in region:
                    blocked = True
                    continue
                events.append(Event(
                    nrules + k, (pos,), None, ((pos, NULL),), ((pos, state),),
                    f"attach {state}"))
        for u, a in cfg.items_sorted():
            for orient in ORIENTS:
                direction = S if orient == VERTICAL else E
                v = neighbor(u, direction)
                b = cfg[v]
                if b == NULL:
                    continue
                for idx, rule in self._rules_by_pair.get((a, b, orient), []):
                    if (rule.c, rule.d) == (a, b):
                        continue
                    events.append(Event(
                        idx, (u, v), direction, ((u, a), (v, b)),
                        ((u, rule.c), (v, rule.d)), str(rule)))
        return events, blocked


def frontier(asm: Configuration) -> List[Coord]:
    """Empty cells adjacent to the assembly, in row-major order."""
    cells = set()
    for coord in asm:
        for nbr in neighbors(coord, SQUARE4):
            if nbr not in asm:
                cells.add(nbr)
    return sorted(cells, key=lambda c: (c.y, c.x))


def attachable(
    sys: Union[AtamSystem, TaSystem],
    asm: Configuration,
    pos: Coord,
    t: Union[Tile, str],
    ) -> bool:
    """
    True iff the matching strengths of t against the four neighbors
    of the empty position pos sum to at least τ.
    """
    pos = Coord(*pos)
    if asm[pos] != NULL:
        raise OccupiedError(f"position {pos} is occupied by {asm[pos]}")
    if isinstance(sys, AtamSystem):
        tile = sys.tile(t) if isinstance(t, str) else t
        return sys.binding(asm, pos, tile) >= sys.tau
    return sys.binding(asm, pos, t) >= sys.tau


def atam_steps(sys: AtamSystem, asm: Configuration, rg: Region) -> List[Tuple[Coord, Tile]]:
    """Every attachable (position, tile) pair inside the region."""
    return [(ev.sites[0], sys.tiles[ev.rule]) for ev in sys.events(asm, rg)]


def ta_steps(sys: TaSystem, asm: Configuration, rg: Region) -> List[Event]:
    """Enabled attachments of I-states and enabled pairwise transitions."""
    return sys.events(asm, rg)


def check_affinity_strengthening(sys: TaSystem) -> AffinityCheck:
    """
    Verifies that no transition rule decreases any affinity: for every
    rule rewriting x to y, every state z and both orientations, the
    affinity of y towards z is at least that of x, on either side.
    Returns the first violation found.
    """
    for rule in sys.rules:
        for old, new in ((rule.a, rule.c), (rule.b, rule.d)):
            if old == new:
                continue
            for other in sys.states:
                for orient in ORIENTS:
                    if sys.affinity(old, other, orient) > sys.affinity(new, other, orient):
                        return AffinityCheck(False, rule, other, orient)
                    if sys.affinity(other, old, orient) > sys.affinity(other, new, orient):
                        return AffinityCheck(False, rule, other, orient)
    return AffinityCheck(True)


def is_stable(sys: Union[AtamSystem, TaSystem], asm: Configuration) -> bool:
    """
    τ-stability: the minimum cut of the bond-weighted adjacency graph
    of the assembly is at least τ (Stoer-Wagner).
    """
    if len(asm) <= 1:
        return True
    graph = nx.Graph()
    graph.add_nodes_from(asm)
    for u, a in asm.items():
        for d in (N, E):
            v = neighbor(u, d)
            if v in asm:
                weight = sys.bond(a, asm[v], d)
                if weight:
                    graph.add_edge(u, v, weight=weight)
    if not nx.is_connected(graph):
        return False
    cut, _ = nx.stoer_wagner(graph, weight="weight")
    return cut >= sys.tau


def terminal_assemblies(sys, rg: Region, max_depth: int, **kwargs):
    """Reachable assemblies without any enabled step in the region."""
    return terminal_set(sys, rg, max_depth, **kwargs)


__all__ = [
    "Tile", "Glue", "AtamSystem", "TaRule", "TaSystem", "AffinityCheck",
    "VERTICAL", "HORIZONTAL", "frontier", "attachable", "atam_steps",
    "ta_steps", "check_affinity_strengthening", "is_stable",
    "terminal_assemblies", "reachable_set",
]


if __name__ == "__main__":
    tiles = [Tile("S", east="a"), Tile("T", west="a")]
    sys = AtamSystem(tiles, {"a": 1}, "S", tau=1)
    print(sys, atam_steps(sys, sys.initial(), Region(2)))
