#!/usr/bin/env python

"""
Surface chemical reaction networks on a lattice.

Three flavors share one engine:

    Plain      bimolecular reactions match in both orientations of an edge
    Directed   (A,B,C,D,d): B must lie in compass direction d from A
    Clockwise  triangular lattice; d is counted clockwise in A's frame

Usage:
------
sys = ScrnSystem(
    species=["s", "A"],
    reactions=[Reaction(("s", "O"), ("s", "A"), 1)],
    initial=Configuration({(0, 0): "s"}),
    flavor=Flavor.DIRECTED,
)
trace = run_trace(sys, Region(3), seed=42, max_steps=10)
"""

import enum
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from loguru import logger

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import BLANK
from surfsim.base.lattice import (
    LatticeKind, Region, SQUARE4, TRIANGULAR6, COMPASS,
    neighbor, neighbors, opposite,
)
from surfsim.base.system import (
    Event, ModelSystem, apply_event, run_trace, reachable_set, terminal_set,
)
from surfsim.utils import ModelError


class Flavor(enum.Enum):
    PLAIN = "scrn"
    DIRECTED = "dscrn"
    CLOCKWISE = "cscrn"


@dataclass(frozen=True)
class Reaction:
    """
    A unimolecular (one reactant) or bimolecular (two reactants)
    reaction. Operand order is significant: the first product
    replaces the first reactant. `direction` is None for unimolecular
    and undirected reactions, a compass index (N=0,E=1,S=2,W=3) for
    directed ones and a clockwise index 0..5 for clockwise ones.
    """
    reactants: Tuple[str, ...]
    products: Tuple[str, ...]
    direction: Optional[int] = None

    def __post_init__(self):
        if len(self.reactants) not in (1, 2) or len(self.reactants) != len(self.products):
            raise ModelError(
                f"reaction arity mismatch: {self.reactants} -> {self.products}")

    @property
    def is_uni(self) -> bool:
        return len(self.reactants) == 1

    def is_self_loop(self) -> bool:
        return self.reactants == self.products

    def normalized(self) -> "Reaction":
        """
        Directed S and W reactions rewritten as the equivalent N and E
        reactions with swapped operands.
        """
        if self.is_uni or self.direction not in (2, 3):
            return self
        (a, b), (c, d) = self.reactants, self.products
        return Reaction((b, a), (d, c), self.direction - 2)

    def text(self, flavor: "Flavor" = None) -> str:
        lhs = " + ".join(self.reactants)
        rhs = " + ".join(self.products)
        if self.direction is None:
            return f"{lhs} -> {rhs}"
        if flavor is Flavor.DIRECTED:
            return f"{lhs} -> {rhs} {COMPASS[self.direction]}"
        return f"{lhs} -> {rhs} {self.direction}"

    def __str__(self):
        return self.text()


RuleMatches = List[Tuple[int, Reaction]]


class ReactionTable:
    """
    Explicit rule book: reactions indexed by their reactants (and
    direction) for constant-time matching. The rule index of a
    reaction is its position in the list.
    """
    schema = False

    def __init__(self, reactions: Iterable[Reaction]):
        self.reactions: List[Reaction] = list(reactions)
        self._uni: Dict[str, RuleMatches] = defaultdict(list)
        self._bi: Dict[Tuple, RuleMatches] = defaultdict(list)
        for idx, rxn in enumerate(self.reactions):
            if rxn.is_uni:
                self._uni[rxn.reactants[0]].append((idx, rxn))
            else:
                self._bi[(*rxn.reactants, rxn.direction)].append((idx, rxn))

    def __repr__(self):
        return f"<ReactionTable: {len(self.reactions)} reactions>"

    def __len__(self):
        return len(self.reactions)

    def __iter__(self):
        return iter(self.reactions)

    def uni(self, a: str) -> RuleMatches:
        return self._uni.get(a, [])

    def bi(self, a: str, b: str, direction: Optional[int]) -> RuleMatches:
        return self._bi.get((a, b, direction), [])

    def blank_only(self, blank: str) -> bool:
        """True if some reaction has only blank reactants."""
        return any(all(r == blank for r in rxn.reactants) for rxn in self.reactions)

    def frame(self, state: str) -> int:
        return 0


class RuleSchema:
    """
    Lazy rule book for generated systems whose reaction set is too
    large to list. Subclasses implement `_uni` and `_bi`, returning
    (item, Reaction) pairs where `item` numbers the protocol item that
    generated the reaction; answers are memoized per query.
    """
    schema = True
    construction = "schema"
    items: Dict[int, str] = {}
    # system and region the rules were generated from
    source = None
    region = None

    def __init__(self):
        self._uni_cache: Dict = {}
        self._bi_cache: Dict = {}

    def __repr__(self):
        return f"<{type(self).__name__}: {self.construction}>"

    def uni(self, a: str) -> RuleMatches:
        hit = self._uni_cache.get(a)
        if hit is None:
            hit = self._uni_cache[a] = list(self._uni(a))
        return hit

    def bi(self, a: str, b: str, direction: Optional[int]) -> RuleMatches:
        key = (a, b, direction)
        hit = self._bi_cache.get(key)
        if hit is None:
            hit = self._bi_cache[key] = list(self._bi(a, b, direction))
        return hit

    def _uni(self, a):
        return []

    def _bi(self, a, b, direction):
        return []

    def blank_only(self, blank: str) -> bool:
        return bool(self.uni(blank)) or any(
            self.bi(blank, blank, d) for d in self.directions())

    def directions(self):
        return (None,)

    def frame(self, state: str) -> int:
        return 0


class ScrnSystem(ModelSystem):
    """
    A surface CRN (Q, S, R): species, reactions and an initial
    configuration. `reactions` is a list of Reaction or a rule book.
    """
    def __init__(
        self,
        species: Iterable[str],
        reactions: Union[Sequence[Reaction], ReactionTable, RuleSchema],
        initial: Configuration,
        flavor: Flavor = Flavor.PLAIN,
        blank: str = BLANK,
        unit_seeded: Optional[bool] = None,
        frames: Optional[Dict[str, int]] = None,
        ):

        self.flavor = flavor
        self.model = flavor.value
        self.kind = TRIANGULAR6 if flavor is Flavor.CLOCKWISE else SQUARE4
        self.blank = blank
        self.species = sorted(set(species) | {blank})
        self.frames = dict(frames or {})

        if isinstance(reactions, (ReactionTable, RuleSchema)):
            self.rules = reactions
        else:
            rxns = list(reactions)
            if flavor is Flavor.DIRECTED:
                rxns = [r.normalized() for r in rxns]
            self.rules = ReactionTable(rxns)

        if initial.kind is not self.kind or initial.blank != blank:
            initial = Configuration(initial.support, blank=blank, kind=self.kind)
        self._initial = initial

        if unit_seeded is None:
            unit_seeded = len(initial) == 1
        self.unit_seeded = unit_seeded
        self.validate()
        self._blank_only = self.rules.blank_only(blank)

    def __repr__(self):
        nrules = "lazy" if self.rules.schema else len(self.rules)
        return (
            f"<ScrnSystem: {self.flavor.value}, {len(self.species)} species, "
            f"{nrules} reactions>")

    @property
    def reactions(self) -> Optional[List[Reaction]]:
        """Explicit reaction list, None for schema-backed systems."""
        if self.rules.schema:
            return None
        return self.rules.reactions

    @property
    def seed(self) -> Optional[str]:
        if not self.unit_seeded:
            return None
        return next(iter(self._initial.support.values()))

    def initial(self) -> Configuration:
        return self._initial

    def frame(self, state: str) -> int:
        """Clockwise offset of a species' local direction 0."""
        if state in self.frames:
            return self.frames[state]
        return self.rules.frame(state)

    def validate(self):
        """Load-time invariants of the system."""
        if self.unit_seeded and len(self._initial) != 1:
            logger.error("a unit-seeded system needs exactly one non-blank cell")
            raise ModelError(
                f"unit-seeded initial configuration has {len(self._initial)} cells")
        if self.rules.schema:
            return
        known = set(self.species)
        for state in self._initial.support.values():
            if state not in known:
                raise ModelError(f"initial state {state!r} is not a declared species")
        for rxn in self.rules:
            for state in rxn.reactants + rxn.products:
                if state not in known:
                    raise ModelError(f"undeclared species {state!r} in '{rxn}'")
            self._validate_direction(rxn)
            if self.unit_seeded and all(r == self.blank for r in rxn.reactants):
                logger.error(f"illegal reaction in a unit-seeded system: {rxn}")
                raise ModelError(
                    f"'{rxn}' has only blank reactants, which is illegal "
                    "in a unit-seeded system")

    def _validate_direction(self, rxn: Reaction):
        if rxn.is_uni:
            if rxn.direction is not None:
                raise ModelError(f"unimolecular reaction with a direction: {rxn}")
            return
        if self.flavor is Flavor.PLAIN and rxn.direction is not None:
            raise ModelError(f"plain sCRN reaction with a direction: {rxn}")
        if self.flavor is Flavor.DIRECTED and rxn.direction not in (0, 1, 2, 3):
            raise ModelError(f"directed reaction needs N, E, S or W: {rxn}")
        if self.flavor is Flavor.CLOCKWISE and rxn.direction not in range(6):
            raise ModelError(f"clockwise reaction needs a direction in 0..5: {rxn}")

    # ---------------------------------------------------------------
    def _query(self, a: str, b: str, g: int) -> RuleMatches:
        """Bimolecular matches with b in global direction g from a."""
        if self.flavor is Flavor.PLAIN:
            return self.rules.bi(a, b, None)
        if self.flavor is Flavor.DIRECTED:
            if g > 1:
                return []
            return self.rules.bi(a, b, g)
        return self.rules.bi(a, b, (g - self.frame(a)) % 6)

    def _cells(self, cfg: Configuration, region: Region) -> List:
        if self._blank_only:
            return list(region)
        cells = set()
        for coord in cfg:
            if coord in region:
                cells.add(coord)
            for nbr in neighbors(coord, self.kind):
                if nbr in region:
                    cells.add(nbr)
        return sorted(cells, key=lambda c: (c.y, c.x))

    def explore(self, cfg: Configuration, region: Region):
        events = []
        blocked = False
        for u in self._cells(cfg, region):
            a = cfg[u]
            for idx, rxn in self.rules.uni(a):
                prod = rxn.products[0]
                if prod != a:
                    events.append(Event(
                        idx, (u,), None, ((u, a),), ((u, prod),), str(rxn)))
            for g in range(self.kind.degree):
                v = neighbor(u, g, self.kind)
                b = cfg[v]
                if v not in region:
                    # either orientation would need the outside cell
                    h = opposite(g, self.kind)
                    matches = [rxn for _, rxn in self._query(a, b, g) if rxn.products != (a, b)]
                    matches += [rxn for _, rxn in self._query(b, a, h) if rxn.products != (b, a)]
                    blocked = blocked or bool(matches)
                    continue
                for idx, rxn in self._query(a, b, g):
                    ev = self._bi_event(idx, rxn, u, v, g, a, b)
                    if ev is not None:
                        events.append(ev)
        return events, blocked

    def _bi_event(self, idx, rxn, u, v, g, a, b) -> Optional[Event]:
        """Builds the event for rxn at (u, v), None for self loops."""
        c, d = rxn.products
        if (c, d) == (a, b):
            return None
        reads = ((u, a), (v, b))
        writes = ((u, c), (v, d))
        return Event(idx, (u, v), g, reads, writes, str(rxn))


def enabled_events(sys: ScrnSystem, cfg: Configuration, rg: Region) -> List[Event]:
    """Every (rule, site) pair enabled inside the region."""
    return sys.events(cfg, rg)


def is_growing(rxn: Reaction, blank: str = BLANK) -> bool:
    """A bimolecular reaction consuming a blank next to non-blank species."""
    if rxn.is_uni:
        return False
    (a, b), (c, d) = rxn.reactants, rxn.products
    return b == blank and blank not in (a, c, d)


__all__ = [
    "Flavor", "Reaction", "ReactionTable", "RuleSchema", "ScrnSystem",
    "enabled_events", "apply_event", "run_trace", "reachable_set",
    "terminal_set", "is_growing",
]


if __name__ == "__main__":
    from surfsim.base.lattice import Coord
    sys = ScrnSystem(
        species=["s", "A"],
        reactions=[Reaction(("s", BLANK), ("s", "A"), 1)],
        initial=Configuration({Coord(0, 0): "s"}),
        flavor=Flavor.DIRECTED,
    )
    print(sys, run_trace(sys, Region(3), seed=42, max_steps=10))
