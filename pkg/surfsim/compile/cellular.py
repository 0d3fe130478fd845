#!/usr/bin/env python

"""
Asynchronous cellular automata and directed sCRNs simulating each other.

CA -> d-sCRN
    Every cell is a locked species lk[σ|records|locks|νb]. A cell
    locks its neighbors one by one, recording their states, applies the
    local function to the recorded neighborhood once everything is
    locked, and then releases its locks. A cell whose outcome is its own
    state pauses until one of its recorded neighbors changes.

d-sCRN -> CA
    Bimolecular reactions are split into two single-cell updates by an
    invite/accept handshake: a cell invites a neighbor it can react
    with, the neighbor accepts one invitation, the pair rewrites one
    cell after the other, and rejected invites roll back.
"""

from functools import lru_cache
from typing import Dict, Hashable, Iterable, List, NamedTuple, Optional, Set, Tuple

from loguru import logger

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import BLANK, EPSILON, UND
from surfsim.base.lattice import (
    ORIGIN, Coord, Region, SQUARE4, compass, neighbor, neighbors, opposite,
)
from surfsim.compile.base import (
    CompiledSimulation, RepresentationMap, RuleEmitter, register_decoder, schema_provenance,
)
from surfsim.models.ca import CaRule, CaSystem
from surfsim.models.scrn import Flavor, Reaction, RuleSchema, ScrnSystem
from surfsim.utils import CompileError, ModelError

LOCKING = "1"
LOCKED = "0"
WALL = "w"
RESERVED = set("[]|:{},")


class LockedState(NamedTuple):
    """
    (σ, recorded neighbor states, lock slots, release bit ν, pause bit b).
    Lock slots are '-' (unlocked), '1' (locking that neighbor),
    '0' (locked by it) or 'w' (wall toward a cell outside the region).
    """
    sigma: str
    records: Tuple[str, str, str, str]
    locks: Tuple[str, str, str, str]
    nu: int = 0
    b: int = 0

    def __str__(self):
        return (
            f"lk[{self.sigma}|{':'.join(self.records)}|"
            f"{''.join(self.locks)}|{self.nu}{self.b}]")

    @classmethod
    def fresh(cls, sigma: str, walls: Iterable[int] = (), quiescent: str = BLANK):
        """Unlocked, unpaused cell; wall slots record the quiescent state."""
        walls = set(walls)
        records = tuple(quiescent if d in walls else EPSILON for d in range(4))
        locks = tuple(WALL if d in walls else EPSILON for d in range(4))
        return cls(sigma, records, locks)

    def set(self, slot: int, lock: Optional[str] = None, record: Optional[str] = None, **kw):
        locks, records = list(self.locks), list(self.records)
        if lock is not None:
            locks[slot] = lock
        if record is not None:
            records[slot] = record
        return self._replace(locks=tuple(locks), records=tuple(records), **kw)

    @property
    def holds_all(self) -> bool:
        """Every non-wall slot is locked by this cell."""
        return all(k in (LOCKING, WALL) for k in self.locks)

    @property
    def unlocked(self) -> bool:
        return all(k in (EPSILON, WALL) for k in self.locks)


@lru_cache(maxsize=None)
def parse_locked(text: Hashable) -> Optional[LockedState]:
    """Inverse of str(LockedState); None for any other species."""
    if not isinstance(text, str) or not (text.startswith("lk[") and text.endswith("]")):
        return None
    parts = text[3:-1].split("|")
    if len(parts) != 4:
        return None
    sigma, records, locks, bits = parts
    records = tuple(records.split(":"))
    if len(records) != 4 or len(locks) != 4 or len(bits) != 2:
        return None
    return LockedState(sigma, records, tuple(locks), int(bits[0]), int(bits[1]))


@register_decoder("cellular-lock")
def decode_locked(state: Hashable) -> Hashable:
    """R: a locked species represents its first component."""
    lk = parse_locked(state)
    if lk is None:
        return UND
    return lk.sigma


class CellularLockSchema(RuleSchema):
    """
    Lazy reaction set of the lock protocol for a CA. Reactions are
    generated on demand from the two reacting species; directed
    reactions arrive normalized (the second species north or east of
    the first), so both cells are tried as the locking one.
    """
    construction = "cellular-lock"
    items = {
        1: "lock a neighbor and record its state",
        2: "unlock a neighbor",
        3: "apply the local function and enter release",
        4: "identity outcome enters the paused release",
        5: "release unlocks a neighbor",
        6: "leave release",
        7: "paused cell re-records a changed neighbor",
    }

    def __init__(self, ca: CaSystem):
        super().__init__()
        self.ca = self.source = ca

    def directions(self):
        return (0, 1)

    def _uni(self, a):
        x = parse_locked(a)
        if x is None:
            return
        if x.nu == 0 and x.b == 0 and x.holds_all:
            hood = (x.sigma, *x.records)
            outcomes = self.ca.outcomes(hood)
            for state in sorted(outcomes):
                if state == x.sigma:
                    yield 4, Reaction((a,), (str(x._replace(nu=1, b=1)),))
                else:
                    yield 3, Reaction((a,), (str(x._replace(sigma=state, nu=1, b=0)),))
        if x.nu == 1 and LOCKING not in x.locks and LOCKED not in x.locks:
            yield 6, Reaction((a,), (str(x._replace(nu=0)),))

    def _bi(self, a, b, direction):
        x, y = parse_locked(a), parse_locked(b)
        if x is None or y is None or direction not in (0, 1):
            return
        back = opposite(direction)
        for item, nx, ny in self._acting(x, y, direction):
            yield item, Reaction((a, b), (str(nx), str(ny)), direction)
        for item, ny, nx in self._acting(y, x, back):
            yield item, Reaction((a, b), (str(nx), str(ny)), direction)

    @staticmethod
    def _acting(x: LockedState, y: LockedState, g: int):
        """Reactions where x acts on its neighbor y in direction g."""
        h = opposite(g)
        if x.nu == 0 and x.b == 0 and LOCKED not in x.locks and x.locks[g] == EPSILON:
            if y.locks[h] == EPSILON and y.nu == 0:
                ny = y.set(h, LOCKED, x.sigma)
                if y.records[h] != x.sigma:
                    ny = ny._replace(b=0)
                yield 1, x.set(g, LOCKING, y.sigma), ny
        if x.locks[g] == LOCKING and y.locks[h] == LOCKED:
            yield (5 if x.nu else 2), x.set(g, EPSILON), y.set(h, EPSILON)
        if x.b == 1 and x.nu == 0 and x.locks[g] == EPSILON and x.records[g] != y.sigma:
            yield 7, x.set(g, record=y.sigma, b=0), y


def _default_region(cfg: Configuration) -> Region:
    cells = {ORIGIN}
    for coord in cfg:
        cells.add(coord)
        cells.update(neighbors(coord))
    return Region.from_cells(cells)


def locked_configuration(ca: CaSystem, region: Region) -> Configuration:
    """Every region cell as a fresh locked species, walls toward the outside."""
    start = ca.initial()
    cells = {}
    for coord in region:
        walls = [d for d in range(4) if neighbor(coord, d) not in region]
        cells[coord] = str(LockedState.fresh(start[coord], walls, ca.quiescent))
    return Configuration(cells, blank=BLANK, kind=SQUARE4)


def compile_ca_to_dscrn(source: CaSystem, region: Optional[Region] = None) -> CompiledSimulation:
    """
    Directed sCRN simulating a CA through the lock protocol. Cells
    outside `region` stay blank and are read by the CA as quiescent;
    without a region the initial support and its neighbors are used.
    """
    for state in source.states:
        if RESERVED & set(state) or state in (BLANK, EPSILON):
            logger.error(f"CA state {state!r} clashes with generated names")
            raise CompileError(
                f"CA states may not be {BLANK!r} or {EPSILON!r} or contain any of '[]|:{{}},'")
    if region is None:
        region = _default_region(source.initial())
    initial = locked_configuration(source, region)
    schema = CellularLockSchema(source)
    schema.region = region
    target = ScrnSystem(
        species=set(initial.support.values()),
        reactions=schema,
        initial=initial,
        flavor=Flavor.DIRECTED,
        unit_seeded=False,
    )
    rep = RepresentationMap(
        construction="cellular-lock", blank_in=BLANK, blank_out=source.quiescent, kind=SQUARE4)
    logger.info(f"cellular-lock: {len(region)} locked cells, lazy reactions")
    return CompiledSimulation(
        source, target, rep, schema_provenance(schema.items, "lock"), "cellular-lock",
        notes=[
            "a locked cell whose mirrored record changes leaves its pause",
            f"cells outside {region.to_text()} are walls",
        ],
    )


# ---------------------------------------------------------------------
# d-sCRN -> CA

def invite(state: str, partner: str, direction: int) -> str:
    return f"inv:{state}:{partner}:{compass(direction)}"


def accept(state: str, partner: str, direction: int) -> str:
    return f"acc:{state}:{partner}:{compass(direction)}"


def represent_invite_accept(state: str) -> str:
    """Invites represent their own species, accepts are transient."""
    if state.startswith("inv:"):
        return state.split(":")[1]
    if state.startswith("acc:"):
        return UND
    return state


class PairReaction(NamedTuple):
    """(ψ, ψ', ψx, ψy, d) with ψ' in direction d from ψ."""
    a: str
    b: str
    c: str
    d: str
    direction: int


def pair_reactions(source: ScrnSystem) -> List[PairReaction]:
    """Every bimolecular reaction seen from both of its reactants."""
    pairs = []
    for rxn in source.reactions:
        if rxn.is_uni:
            continue
        (a, b), (c, d) = rxn.reactants, rxn.products
        g = rxn.direction
        for pair in (PairReaction(a, b, c, d, g), PairReaction(b, a, d, c, opposite(g))):
            if pair not in pairs:
                pairs.append(pair)
    return pairs


def compile_dscrn_to_ca(source: ScrnSystem) -> CompiledSimulation:
    """Asynchronous CA simulating a directed sCRN by invite/accept pairs."""
    if source.flavor is not Flavor.DIRECTED or source.rules.schema:
        raise CompileError("invite/accept compilation needs a directed sCRN with explicit rules")
    for state in source.species:
        if RESERVED & set(state):
            logger.error(f"species {state!r} clashes with generated names")
            raise CompileError("species names may not contain any of '[]|:{},'")
    if source.rules.blank_only(source.blank):
        raise CompileError("reactions with only blank reactants cannot be simulated by a CA")

    plain = frozenset(source.species)
    pairs = pair_reactions(source)
    invites = sorted({invite(p.a, p.b, p.direction) for p in pairs})
    accepts = sorted({accept(p.b, p.a, opposite(p.direction)) for p in pairs})
    states = sorted(plain | set(invites) | set(accepts))
    plain_or_invite = plain | frozenset(invites)
    emitter = RuleEmitter("invite-accept")

    def rule(center, slots, outcomes):
        pattern = [frozenset([center]), plain, plain, plain, plain]
        for d, slot in slots.items():
            pattern[1 + d] = slot
        return CaRule(pattern, outcomes)

    for rxn in source.reactions:
        if rxn.is_uni:
            emitter.add(rule(rxn.reactants[0], {}, [rxn.products[0]]), "uni", "1.1", note=str(rxn))

    partners: Dict[Tuple[str, int], Set[str]] = {}
    for p in pairs:
        partners.setdefault((p.a, p.direction), set()).add(p.b)
    for (psi, g), nr in sorted(partners.items()):
        for other in sorted(nr):
            emitter.add(
                rule(psi, {g: frozenset([other])}, [invite(psi, other, g)]), "invite", "1.2")

    for p in pairs:
        g, h = p.direction, opposite(p.direction)
        inv = invite(p.a, p.b, g)
        acc = accept(p.b, p.a, h)
        others = {d: plain_or_invite for d in range(4)}
        others[h] = frozenset([inv])
        emitter.add(rule(p.b, others, [acc]), "accept", "2.1")

        free = {d: None for d in range(4)}
        emitter.add(
            rule(inv, {**free, g: frozenset([acc])}, [p.c]), "rewrite", "3.1", note=str(p))
        emitter.add(
            rule(acc, {**free, h: frozenset([p.c])}, [p.d]), "rewrite", "3.2", note=str(p))

        rejected = frozenset(states) - {p.b, acc}
        emitter.add(rule(inv, {**free, g: rejected}, [p.a]), "rollback", 4)

    # the quiescent state is the sCRN blank
    try:
        target = CaSystem(
            states=states,
            rules=emitter.rules,
            initial=source.initial(),
            quiescent=source.blank,
        )
    except ModelError as err:
        raise CompileError(f"generated CA is invalid: {err}") from err
    table = {s: represent_invite_accept(s) for s in states if s != source.blank}
    rep = RepresentationMap(table, blank_in=source.blank, blank_out=source.blank, kind=SQUARE4)
    logger.info(
        f"invite-accept: {len(emitter)} CA rules, {len(invites)} invite "
        f"and {len(accepts)} accept states")
    return CompiledSimulation(
        source, target, rep, emitter.provenance(), "invite-accept",
        notes=[
            "pair rewrites ignore the remaining neighbors",
            "an invite rolls back whenever its target is neither the partner nor its accept",
        ],
    )


__all__ = [
    "LockedState", "parse_locked", "decode_locked", "CellularLockSchema",
    "locked_configuration", "compile_ca_to_dscrn",
    "invite", "accept", "represent_invite_accept", "pair_reactions", "compile_dscrn_to_ca",
]
