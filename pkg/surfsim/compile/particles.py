#!/usr/bin/env python

"""
Amoebot particle systems and clockwise sCRNs simulating each other.

Amoebot -> c-sCRN
    Every node of the region holds a part species

        pt[<occupant or O>|<six records>|<six lock slots>|<ν><b>|<aux>]

    indexed by global direction. A particle part locks its neighbors in
    ascending slot order, recording the flag each shows toward it,
    evaluates δ on the recorded flags once everything is locked and
    releases its locks last-in-first-out. Expanded particles decide
    through a reaction between their two halves. Movements are single
    reactions, except the push handover, which ties the pusher to the
    pushed half (reversibly), contracts the pushed particle into its
    other half and finally expands the pusher.

    Lock slots: '-' unlocked, '1' locking, '0' locked, 'w' wall toward
    a node outside the region, 'p' the internal edge of an expanded
    particle. Records: '?' unobserved, '~' empty, else the facing flag
    with a trailing '^' when the neighbor is expanded.

c-sCRN -> amoebot
    Every node holds a contracted particle whose state is the species
    (or an invite/accept state) and whose six flags all show that state.
    The invite/accept handshake of the CA construction runs over the
    six directions with flags as the invitation channel.
"""

from functools import lru_cache
from typing import Dict, Hashable, List, NamedTuple, Optional, Set, Tuple

from loguru import logger

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import BLANK, EPSILON, UND
from surfsim.base.lattice import ORIGIN, Coord, Region, TRIANGULAR6, neighbor, neighbors
from surfsim.compile.base import (
    CompiledSimulation, RepresentationMap, RuleEmitter, register_decoder, schema_provenance,
)
from surfsim.models.amoebot import (
    CONTRACTED, HEAD, IDLE, TAIL, AmoebotSystem, Occupant, TransitionEntry, Turn,
    contracted_flags, facing_flag, keeps_head, label_edge, occupant_text,
    parse_occupant, partner_node, pushed_occupant,
)
from surfsim.models.scrn import Flavor, Reaction, RuleSchema, ScrnSystem
from surfsim.utils import CompileError, ModelError

LOCKING, LOCKED, WALL, PARTNER = "1", "0", "w", "p"
UNSEEN, EMPTY_SEEN, EXPANDED_MARK = "?", "~", "^"
PREPARE, WAITING, PUSHING = "e", "w", "D"
HELD = (LOCKING, WALL, PARTNER)


def _flip(g: int) -> int:
    return (g + 3) % 6


def _put(values: Tuple[str, ...], slot: int, value: str) -> Tuple[str, ...]:
    out = list(values)
    out[slot] = value
    return tuple(out)


class PartState(NamedTuple):
    """One node of the simulating sCRN: a particle part or an empty node."""
    occ: Optional[Occupant]
    records: Tuple[str, ...]
    locks: Tuple[str, ...]
    nu: int = 0
    b: int = 0
    aux: str = EPSILON

    def __str__(self):
        occ = BLANK if self.occ is None else occupant_text(self.occ)
        return (
            f"pt[{occ}|{'.'.join(self.records)}|{''.join(self.locks)}|"
            f"{self.nu}{self.b}|{self.aux}]")

    @property
    def empty(self) -> bool:
        return self.occ is None

    @property
    def stable(self) -> bool:
        return self.aux == EPSILON

    def lock(self, slot: int, value: str, record: Optional[str] = None) -> "PartState":
        new = self._replace(locks=_put(self.locks, slot, value))
        if record is not None:
            new = new._replace(records=_put(new.records, slot, record))
        return new

    def last_lock(self) -> Optional[int]:
        """Highest slot this part is locking."""
        held = [g for g, k in enumerate(self.locks) if k == LOCKING]
        return held[-1] if held else None

    def holds_all(self) -> bool:
        return all(k in HELD for k in self.locks)

    def ready(self) -> bool:
        """Unpaused, not releasing, not in a handover and holding every slot."""
        return (
            self.occ is not None and self.nu == 0 and self.b == 0
            and self.stable and self.holds_all())


def blank_records(locks: Tuple[str, ...]) -> Tuple[str, ...]:
    return tuple(EMPTY_SEEN if k == WALL else UNSEEN for k in locks)


def empty_part(locks: Tuple[str, ...], nu: int = 0) -> PartState:
    """Empty node; its records are never read."""
    locks = tuple(EPSILON if k == PARTNER else k for k in locks)
    return PartState(None, blank_records(locks), locks, nu, 0)


@lru_cache(maxsize=None)
def parse_part(text: Hashable) -> Optional[PartState]:
    """Inverse of str(PartState); None for any other species."""
    if not isinstance(text, str) or not (text.startswith("pt[") and text.endswith("]")):
        return None
    parts = text[3:-1].split("|")
    if len(parts) != 5:
        return None
    occ, records, locks, bits, aux = parts
    try:
        occ = None if occ == BLANK else parse_occupant(occ)
    except ModelError:
        return None
    records = tuple(records.split("."))
    if len(records) != 6 or len(locks) != 6 or len(bits) != 2:
        return None
    return PartState(occ, records, tuple(locks), int(bits[0]), int(bits[1]), aux)


@register_decoder("particles")
def decode_part(state: Hashable) -> Hashable:
    """R: stable parts represent their occupant, empty nodes are empty."""
    part = parse_part(state)
    if part is None or not part.stable:
        return UND
    if part.occ is None:
        return BLANK
    return part.occ


def observe(y: PartState, toward: int) -> str:
    """What a neighbor records about y, which lies opposite `toward`."""
    if y.occ is None:
        return EMPTY_SEEN
    flag = facing_flag(y.occ, toward)
    return flag + ("" if y.occ.contracted else EXPANDED_MARK)


def read_value(record: str) -> str:
    if record in (EMPTY_SEEN, UNSEEN):
        return EPSILON
    return record.rstrip(EXPANDED_MARK)


def partner_direction(occ: Occupant) -> int:
    """Global direction from an expanded part to its other half."""
    if occ.role == HEAD:
        return _flip(occ.heading)
    return occ.heading


class ParticleSchema(RuleSchema):
    """Lazy reaction set of the particle lock and handover protocol."""
    construction = "particles"
    items = {
        1: "lock the next neighbor and record its facing flag",
        2: "unlock the last locked neighbor",
        3: "apply a δ turn and enter release",
        4: "no valid or only unchanged turns: paused release",
        5: "release unlocks the last locked neighbor",
        6: "leave release",
        7: "paused part re-records a changed neighbor",
        8: "a waking half wakes its partner",
        9: "expand into a locked empty node",
        10: "contract into one half",
        11: "tie pusher and pushed half (reversible)",
        12: "pushed particle contracts into its other half",
        13: "pusher expands into the vacated node",
    }

    def __init__(self, amoebot: AmoebotSystem):
        super().__init__()
        self.amoebot = self.source = amoebot

    def directions(self):
        return range(6)

    def frame(self, state) -> int:
        part = parse_part(state)
        if part is None or part.occ is None:
            return 0
        return part.occ.o

    # -----------------------------------------------------------
    def _turns(self, x: PartState, partner: Optional[PartState] = None) -> List[Turn]:
        """δ on the recorded flags of a contracted part or an expanded pair."""
        occ = x.occ
        if occ.contracted:
            reads = tuple(
                read_value(x.records[(occ.o + label) % 6]) for label in range(6)
            ) + (EPSILON,) * 4
        else:
            halves = {x.occ.role: x, partner.occ.role: partner}
            reads = []
            for label in range(10):
                role, glob = label_edge(occ, label)
                reads.append(read_value(halves[role].records[glob]))
            reads = tuple(reads)
        return [turn for _, turn in self.amoebot.transitions(occ.phi, reads, occ.tail)]

    def _valid_contracted(self, x: PartState, turn: Turn) -> bool:
        move = turn.movement
        if move.kind == "idle":
            return True
        if move.kind == "contract" or move.index > 5:
            return False
        g = (x.occ.o + move.index) % 6
        if move.kind == "expand":
            return x.locks[g] == WALL or x.records[g] == EMPTY_SEEN
        return x.records[g].endswith(EXPANDED_MARK) and x.locks[g] == LOCKING

    def _uni(self, a):
        x = parse_part(a)
        if x is None:
            return
        seen = set()
        if x.nu == 1 and LOCKING not in x.locks:
            yield 6, Reaction((a,), (str(x._replace(nu=0)),))
        if not (x.ready() and x.occ.contracted):
            return
        turns = self._turns(x)
        valid = [t for t in turns if self._valid_contracted(x, t)]
        pause = str(x._replace(nu=1, b=1))
        if not valid:
            yield 4, Reaction((a,), (pause,))
        for turn in valid:
            if turn.movement.kind != "idle":
                continue
            new = x.occ._replace(phi=turn.phi, flags=contracted_flags(turn.flags))
            if new == x.occ:
                item, out = 4, pause
            else:
                item, out = 3, str(x._replace(occ=new, nu=1, b=0))
            if out not in seen:
                seen.add(out)
                yield item, Reaction((a,), (out,))

    def _bi(self, a, b, d):
        x = parse_part(a)
        if x is None:
            return
        g = (self.frame(a) + d) % 6
        y = parse_part(b)
        if y is None:
            if b == BLANK and x.locks[g] == WALL:
                yield from self._wall_expansions(a, x, g, d)
            return
        h = _flip(g)
        for item, nx, ny in self._pair(x, y, g, h):
            yield item, Reaction((a, b), (str(nx), str(ny)), d)

    def _wall_expansions(self, a, x, g, d):
        """Expansions across the region boundary; they can never fire."""
        if not (x.ready() and x.occ.contracted):
            return
        for turn in self._turns(x):
            move = turn.movement
            if move.kind == "expand" and (x.occ.o + move.index) % 6 == g:
                tail, head = self._expanded(x, turn, empty_part((EPSILON,) * 6), g)
                yield 9, Reaction((a, BLANK), (str(tail), str(head)), d)

    def _expanded(self, x: PartState, turn: Turn, y: PartState, g: int):
        """Tail (at x's node) and head (at y's node) after x expands toward g."""
        index = (g - x.occ.o) % 6
        occ = Occupant(turn.phi, x.occ.o, (index + 3) % 6, tuple(turn.flags), TAIL)
        tail = PartState(
            occ, _put(x.records, g, UNSEEN), _put(x.locks, g, PARTNER), 1, 0)
        h = _flip(g)
        locks = _put(y.locks, h, PARTNER)
        head = PartState(occ.with_role(HEAD), _put(y.records, h, UNSEEN), locks, 1, 0)
        return tail, head

    def _pair(self, x: PartState, y: PartState, g: int, h: int):
        """Every reaction with x as the acting species and y in direction g."""
        # locking and unlocking
        if (
            x.occ is not None and x.nu == 0 and x.b == 0 and x.stable
            and LOCKED not in x.locks and x.locks[g] == EPSILON
            and all(k in HELD for k in x.locks[:g])
            and y.locks[h] == EPSILON and y.nu == 0 and y.stable
        ):
            yield 1, x.lock(g, LOCKING, observe(y, h)), y.lock(h, LOCKED)
        if x.stable and x.locks[g] == LOCKING and x.last_lock() == g and y.locks[h] == LOCKED:
            yield (5 if x.nu else 2), x.lock(g, EPSILON), y.lock(h, EPSILON)

        if x.occ is None:
            return

        # pause exit
        if (
            x.b == 1 and x.nu == 0 and x.stable and x.locks[g] == EPSILON
            and y.stable and observe(y, h) != x.records[g]
        ):
            woken = x._replace(records=_put(x.records, g, observe(y, h)), b=0)
            yield 7, woken, y

        # expanded pair: head acts on its tail
        if x.locks[g] == PARTNER and x.occ.role == HEAD and y.occ is not None:
            yield from self._pair_decisions(x, y, g, h)

        if x.occ.contracted and x.ready():
            yield from self._movements(x, y, g, h)

        # handover phases
        if x.aux.startswith(PUSHING) and x.locks[g] == LOCKING:
            turn = self._pushing_turn(x)
            if turn is not None and (x.occ.o + turn.movement.index) % 6 == g:
                if y.aux == PREPARE and y.locks[h] == LOCKED:
                    yield 11, x._replace(aux=EPSILON), y._replace(aux=EPSILON)
                if y.aux == WAITING and y.locks[h] == LOCKED:
                    tail, head = self._expanded(x._replace(aux=EPSILON), turn, y, g)
                    back = partner_direction(y.occ)
                    head = head._replace(
                        records=_put(head.records, back, UNSEEN),
                        locks=_put(head.locks, back, EPSILON))
                    yield 13, tail, head
        if x.aux == PREPARE and x.locks[g] == PARTNER and y.stable and y.occ is not None:
            # x sits on the node the pusher takes, y is the half that stays
            pushed = pushed_occupant(x.occ, ORIGIN + _offset(g), ORIGIN, self.amoebot.rest)
            kept = PartState(
                pushed, _put(y.records, h, UNSEEN), _put(y.locks, h, EPSILON), 1, 0)
            yield 12, x._replace(aux=WAITING), kept

    def _pushing_turn(self, x: PartState) -> Optional[Turn]:
        turns = self._turns(x._replace(aux=EPSILON))
        k = int(x.aux[len(PUSHING):])
        if k >= len(turns):
            return None
        return turns[k]

    def _movements(self, x: PartState, y: PartState, g: int, h: int):
        """Expansion into, or a push of, the neighbor in direction g."""
        turns = self._turns(x)
        for k, turn in enumerate(turns):
            move = turn.movement
            if move.kind not in ("expand", "handover") or move.index > 5:
                continue
            if (x.occ.o + move.index) % 6 != g or not self._valid_contracted(x, turn):
                continue
            only_x = (
                y.locks[h] == LOCKED and y.locks.count(LOCKED) == 1
                and LOCKING not in y.locks and y.nu == 0 and y.stable)
            if not only_x:
                continue
            if move.kind == "expand" and y.occ is None:
                yield (9, *self._expanded(x, turn, y, g))
            elif move.kind == "handover" and y.occ is not None and not y.occ.contracted:
                yield 11, x._replace(aux=f"{PUSHING}{k}"), y._replace(aux=PREPARE)

    def _pair_decisions(self, x: PartState, y: PartState, g: int, h: int):
        if x.nu == 0 and y.nu == 0 and x.stable and y.stable and x.b != y.b:
            yield 8, x._replace(b=0), y._replace(b=0)
        if not (x.ready() and y.ready()):
            return
        occ = x.occ
        produced = set()

        def emit(item, nx, ny):
            key = (str(nx), str(ny))
            if key not in produced:
                produced.add(key)
                return [(item, nx, ny)]
            return []

        valid = [t for t in self._turns(x, y) if t.movement.kind in ("idle", "contract")]
        pause = (x._replace(nu=1, b=1), y._replace(nu=1, b=1))
        if not valid:
            yield from emit(4, *pause)
        for turn in valid:
            if turn.movement.kind == "idle":
                new = occ._replace(phi=turn.phi, flags=tuple(turn.flags))
                if new == occ:
                    yield from emit(4, *pause)
                else:
                    yield from emit(
                        3, x._replace(occ=new, nu=1, b=0),
                        y._replace(occ=new.with_role(TAIL), nu=1, b=0))
                continue
            flags = contracted_flags(turn.flags)
            small = Occupant(turn.phi, occ.o, EPSILON, flags, CONTRACTED)
            if keeps_head(turn.movement.index, occ.kind):
                kept = PartState(
                    small, _put(x.records, g, UNSEEN), _put(x.locks, g, EPSILON), 1, 0)
                yield from emit(10, kept, empty_part(y.locks, nu=1))
            else:
                kept = PartState(
                    small, _put(y.records, h, UNSEEN), _put(y.locks, h, EPSILON), 1, 0)
                yield from emit(10, empty_part(x.locks, nu=1), kept)


def _offset(g: int) -> Coord:
    return neighbor(ORIGIN, g, TRIANGULAR6)


def _default_region(cfg: Configuration) -> Region:
    cells = {ORIGIN}
    for node in cfg:
        cells.add(node)
        cells.update(neighbors(node, TRIANGULAR6))
    return Region.from_cells(cells, TRIANGULAR6)


def part_configuration(source: AmoebotSystem, region: Region) -> Configuration:
    """Every region node as a fresh part, walls toward the outside."""
    start = source.initial()
    outside = [node for node in start if node not in region]
    if outside:
        raise CompileError(f"particles at {outside[0]} lie outside the region")
    cells = {}
    for node in region:
        locks = [WALL if neighbor(node, g, TRIANGULAR6) not in region else EPSILON
                 for g in range(6)]
        occ = start[node]
        if isinstance(occ, Occupant):
            if not occ.contracted:
                locks[partner_direction(occ)] = PARTNER
            cells[node] = str(PartState(occ, blank_records(locks), tuple(locks)))
        else:
            cells[node] = str(empty_part(tuple(locks)))
    return Configuration(cells, blank=BLANK, kind=TRIANGULAR6)


def _check_amoebot(source: AmoebotSystem):
    for flag in source.flags:
        if flag in (UNSEEN, EMPTY_SEEN) or set(flag) & set("^|[]"):
            logger.error(f"flag symbol {flag!r} clashes with the record alphabet")
            raise CompileError("flag symbols may not be '?' or '~' or contain any of '^|[]'")
    for state in source.states:
        if set(state) & set("|[]"):
            raise CompileError(f"particle state {state!r} may not contain any of '|[]'")
    for entry in source.delta:
        for turn in entry.turns:
            if turn.movement.kind == "handover" and entry.tail != EPSILON:
                logger.error(f"entry for {entry.phi} may pull: {turn}")
                raise CompileError(
                    "pull handovers are not compiled; restrict handover entries to "
                    "contracted particles (tail ε)")


def compile_amoebot_to_cscrn(
    source: AmoebotSystem,
    region: Optional[Region] = None,
    ) -> CompiledSimulation:
    """
    Clockwise sCRN simulating a particle system. Nodes outside
    `region` stay blank; without a region the initial particles and
    their neighbors are used.
    """
    _check_amoebot(source)
    if region is None:
        region = _default_region(source.initial())
    initial = part_configuration(source, region)
    schema = ParticleSchema(source)
    schema.region = region
    target = ScrnSystem(
        species=set(initial.support.values()),
        reactions=schema,
        initial=initial,
        flavor=Flavor.CLOCKWISE,
        unit_seeded=False,
    )
    rep = RepresentationMap(
        construction="particles", blank_in=BLANK, blank_out=BLANK, kind=TRIANGULAR6)
    logger.info(f"particles: {len(region)} nodes, lazy reactions")
    return CompiledSimulation(
        source, target, rep,
        schema_provenance(schema.items, "particles", note="reconstructed"),
        "particles",
        notes=[
            "flag observation reuses the lock protocol with ordered locking",
            "halves of an expanded particle wake each other",
            f"nodes outside {region.to_text()} are walls",
        ],
    )


# ---------------------------------------------------------------------
# c-sCRN -> amoebot

def invite_state(state: str, partner: str, direction: int) -> str:
    return f"inv>{state}>{partner}>{direction}"


def accept_state(state: str, partner: str, direction: int) -> str:
    return f"acc<{state}<{partner}<{direction}"


def _represent(phi: str) -> str:
    if phi.startswith("inv>"):
        return phi.split(">")[1]
    if phi.startswith("acc<"):
        return UND
    return phi


def particle(phi: str) -> Occupant:
    """Contracted particle with o=0 showing its state on every edge."""
    return Occupant(phi, 0, EPSILON, contracted_flags((phi,) * 6), CONTRACTED)


def compile_cscrn_to_amoebot(
    source: ScrnSystem,
    region: Optional[Region] = None,
    ) -> CompiledSimulation:
    """Particle system simulating a clockwise sCRN by invite/accept turns."""
    if source.flavor is not Flavor.CLOCKWISE or source.rules.schema:
        raise CompileError("particle compilation needs a clockwise sCRN with explicit rules")
    for state in source.species:
        if set(state) & set("<>.:,|[]") or state in (EPSILON, UNSEEN, EMPTY_SEEN):
            logger.error(f"species {state!r} clashes with generated names")
            raise CompileError("species names may not contain any of '<>.:,|[]'")

    plain = set(source.species)
    pairs = []
    for rxn in source.reactions:
        if rxn.is_uni:
            continue
        (a, b), (c, d) = rxn.reactants, rxn.products
        g = (source.frame(a) + rxn.direction) % 6
        for pair in ((a, b, c, d, g), (b, a, d, c, _flip(g))):
            if pair not in pairs:
                pairs.append(pair)
    invites = {invite_state(p[0], p[1], p[4]) for p in pairs}
    accepts = {accept_state(p[1], p[0], _flip(p[4])) for p in pairs}
    states = sorted(plain | invites | accepts)
    readable = frozenset(plain | {EPSILON})
    anything = frozenset(set(states) | {EPSILON})
    emitter = RuleEmitter("invite-accept-particles")

    def entry(phi, slots: Dict[int, frozenset], new, default=readable):
        reads = [slots.get(g, default) for g in range(6)] + [None] * 4
        return TransitionEntry(phi, reads, EPSILON, [Turn(new, particle(new).flags, IDLE)])

    for rxn in source.reactions:
        if rxn.is_uni:
            (a,), (b,) = rxn.reactants, rxn.products
            emitter.add(entry(a, {}, b), "uni", "1.1", note=str(rxn))

    partners: Dict[Tuple[str, int], Set[str]] = {}
    for a, b, _, _, g in pairs:
        partners.setdefault((a, g), set()).add(b)
    for (a, g), nr in sorted(partners.items()):
        for b in sorted(nr):
            emitter.add(entry(a, {g: frozenset([b])}, invite_state(a, b, g)), "invite", "1.2")

    for a, b, c, d, g in pairs:
        h = _flip(g)
        inv, acc = invite_state(a, b, g), accept_state(b, a, h)
        emitter.add(
            entry(b, {h: frozenset([inv])}, acc, default=readable | invites), "accept", "2.1")
        emitter.add(entry(inv, {g: frozenset([acc])}, c, default=None), "rewrite", "3.1")
        emitter.add(entry(acc, {h: frozenset([c])}, d, default=None), "rewrite", "3.2")
        emitter.add(entry(inv, {g: anything - {b, acc}}, a, default=None), "rollback", 4)

    if region is None:
        region = _default_region(source.initial())
    start = source.initial()
    cells = {node: particle(start[node]) for node in region}
    initial = Configuration(cells, blank=BLANK, kind=TRIANGULAR6)
    try:
        target = AmoebotSystem(states=states, flags=states, delta=emitter.rules, initial=initial)
    except ModelError as err:
        raise CompileError(f"generated particle system is invalid: {err}") from err

    table = {occupant_text(particle(phi)): _represent(phi) for phi in states}
    rep = RepresentationMap(table, blank_in=BLANK, blank_out=source.blank, kind=TRIANGULAR6)
    logger.info(f"invite-accept-particles: {len(emitter)} δ entries over {len(states)} states")
    return CompiledSimulation(
        source, target, rep, emitter.provenance(), "invite-accept-particles",
        notes=["every region node holds a particle; blank cells are particles in state O"],
    )


__all__ = [
    "PartState", "parse_part", "decode_part", "ParticleSchema", "part_configuration",
    "compile_amoebot_to_cscrn", "invite_state", "accept_state", "particle",
    "compile_cscrn_to_amoebot",
]
