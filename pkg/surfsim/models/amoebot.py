#!/usr/bin/env python

"""
Amoebot particles on the triangular lattice.

A particle occupies one node (contracted) or two adjacent nodes
(expanded: a head and a tail). Each node of a configuration stores an
Occupant: the particle's state φ, its orientation o, the local
direction from head to tail (ε when contracted), its ten flags and
the role of the node (C, H or T). Both nodes of an expanded particle
store the same occupant apart from the role.

Edge labels
-----------
A contracted particle labels the edge in global direction (o+l) % 6
with l. An expanded particle lists its ten perimeter edges clockwise,

    [H g, H g+1, H g+2, T g+1, T g+2, T g+3, T g+4, T g+5, H g+4, H g+5]

where g is the global direction from tail to head, and label 0 is the
perimeter edge with global direction o whose far node touches only one
of the particle's nodes.
"""

from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx
from loguru import logger

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import BLANK, EPSILON
from surfsim.base.lattice import Coord, Region, TRIANGULAR6, neighbor, neighbors
from surfsim.base.system import Event, ModelSystem
from surfsim.models.ca import parse_slot
from surfsim.utils import InvalidTurnError, ModelError

CONTRACTED = "C"
HEAD = "H"
TAIL = "T"
ROLES = (CONTRACTED, HEAD, TAIL)

# perimeter of an expanded particle: (role, offset from g), clockwise
PERIMETER = (
    (HEAD, 0), (HEAD, 1), (HEAD, 2),
    (TAIL, 1), (TAIL, 2), (TAIL, 3), (TAIL, 4), (TAIL, 5),
    (HEAD, 4), (HEAD, 5),
)

MOVES = ("idle", "expand", "contract", "handover")


class Occupant(NamedTuple):
    """The part of a particle stored at one node."""
    phi: str
    o: int
    tail: Union[int, str]
    flags: Tuple[str, ...]
    role: str = CONTRACTED

    def __str__(self):
        return occupant_text(self)

    @property
    def contracted(self) -> bool:
        return self.tail == EPSILON

    @property
    def kind(self) -> Optional[int]:
        """Expansion type: local direction from tail to head."""
        if self.contracted:
            return None
        return (self.tail + 3) % 6

    @property
    def heading(self) -> Optional[int]:
        """Global direction from tail to head."""
        if self.contracted:
            return None
        return (self.o + self.tail + 3) % 6

    def with_role(self, role: str) -> "Occupant":
        return self._replace(role=role)


def occupant_text(occ: Occupant) -> str:
    """'phi:o:tail:f0.f1...f9:role'"""
    flags = ".".join(occ.flags)
    return f"{occ.phi}:{occ.o}:{occ.tail}:{flags}:{occ.role}"


def parse_occupant(text: str) -> Occupant:
    try:
        phi, o, tail, flags, role = text.split(":")
        tail = tail if tail == EPSILON else int(tail)
        occ = Occupant(phi, int(o), tail, tuple(flags.split(".")), role)
    except ValueError:
        raise ModelError(f"cannot read particle state {text!r}")
    if len(occ.flags) != 10 or occ.role not in ROLES:
        raise ModelError(f"malformed particle state {text!r}")
    return occ


class Movement(NamedTuple):
    kind: str
    index: Optional[int] = None

    def __str__(self):
        if self.kind == "idle":
            return "idle"
        return f"{self.kind}_{self.index}"

    @classmethod
    def parse(cls, text: str) -> "Movement":
        text = text.strip()
        if text == "idle":
            return cls("idle")
        kind, _, index = text.partition("_")
        if kind not in MOVES or not index.isdigit():
            logger.error(f"unknown movement {text!r}, options are idle, {MOVES[1:]}_i")
            raise ModelError(f"unknown movement {text!r}")
        index = int(index)
        limit = 6 if kind == "expand" else 10
        if index >= limit:
            raise ModelError(f"movement index out of range: {text!r}")
        return cls(kind, index)


IDLE = Movement("idle")


class Turn(NamedTuple):
    """New state, flags (labels of the post-movement shape) and movement."""
    phi: str
    flags: Tuple[str, ...]
    movement: Movement

    def __str__(self):
        return f"{self.phi} {'.'.join(self.flags)} {self.movement}"


class TransitionEntry:
    """
    One δ entry: a pattern over (φ, ten read flags, tailDir) and the
    set of turns it offers. A read slot is None (any flag) or a set
    of flags; tail is None (any) or ε or a local direction.
    """
    def __init__(self, phi: str, reads: Sequence, tail, turns: Iterable[Turn]):
        if len(reads) != 10:
            raise ModelError(f"a transition entry reads 10 flags, got {len(reads)}")
        self.phi = phi
        self.reads = tuple(
            r if r is None or isinstance(r, frozenset) else parse_slot(r)
            for r in reads)
        if isinstance(tail, str) and tail not in (EPSILON, "*"):
            tail = int(tail)
        self.tail = None if tail == "*" else tail
        self.turns: Tuple[Turn, ...] = tuple(turns)

    def __repr__(self):
        return f"<TransitionEntry: {self.phi} -> {len(self.turns)} turns>"

    def __eq__(self, other):
        return (
            isinstance(other, TransitionEntry)
            and (self.phi, self.reads, self.tail, self.turns)
            == (other.phi, other.reads, other.tail, other.turns)
        )

    def __hash__(self):
        return hash((self.phi, self.reads, self.tail, self.turns))

    def matches(self, phi: str, reads: Tuple[str, ...], tail) -> bool:
        if phi != self.phi:
            return False
        if self.tail is not None and tail != self.tail:
            return False
        return all(r is None or f in r for r, f in zip(self.reads, reads))


class TurnCheck(NamedTuple):
    rule: int
    turn: Turn
    valid: bool
    reason: str = ""


class ParticleView(NamedTuple):
    head: Coord
    tail: Optional[Coord]
    state: Occupant

    @property
    def nodes(self) -> Tuple[Coord, ...]:
        if self.tail is None:
            return (self.head,)
        return (self.head, self.tail)


# ---------------------------------------------------------------------
# geometry of labels

def label_zero(kind: int) -> int:
    """
    Perimeter index of label 0 for an expansion of the given type:
    the edge with global direction o whose far node touches only one
    of the two particle nodes.
    """
    # offsets g+1 at the tail and g+2 at the head share a node,
    # as do g+5 at the tail and g+4 at the head
    shared = {(TAIL, 1), (HEAD, 2), (TAIL, 5), (HEAD, 4)}
    offset = (-kind) % 6
    for idx, (role, off) in enumerate(PERIMETER):
        if off == offset and (role, off) not in shared:
            return idx
    raise AssertionError(f"no label 0 for expansion type {kind}")


_LABEL_ZERO = {k: label_zero(k) for k in range(6)}


def perimeter_index(label: int, kind: int) -> int:
    return (_LABEL_ZERO[kind] + label) % 10


def label_edge(occ: Occupant, label: int) -> Tuple[str, int]:
    """(role of the incident node, global direction) of a label."""
    if occ.contracted:
        if label > 5:
            raise ValueError(f"contracted particles have labels 0..5, got {label}")
        return CONTRACTED, (occ.o + label) % 6
    role, off = PERIMETER[perimeter_index(label, occ.kind)]
    return role, (occ.heading + off) % 6


def edge_label(occ: Occupant, direction: int) -> Optional[int]:
    """Label of the edge leaving occ's node in a global direction, None if internal."""
    if occ.contracted:
        return (direction - occ.o) % 6
    off = (direction - occ.heading) % 6
    try:
        idx = PERIMETER.index((occ.role, off))
    except ValueError:
        return None
    return (idx - _LABEL_ZERO[occ.kind]) % 10


def contraction_tables() -> Tuple[Dict[int, int], Dict[int, int]]:
    """
    C_T and C_H: for each expansion type, the label that points
    straight away from the tail (resp. head).
    """
    c_tail = {k: (5 - _LABEL_ZERO[k]) % 10 for k in range(6)}
    c_head = {k: (0 - _LABEL_ZERO[k]) % 10 for k in range(6)}
    return c_tail, c_head


def keeps_head(label: int, kind: int) -> bool:
    """True if contract_label keeps the head node."""
    return PERIMETER[perimeter_index(label, kind)][0] == HEAD


def partner_node(node: Coord, occ: Occupant) -> Optional[Coord]:
    """The other node of an expanded particle."""
    if occ.contracted:
        return None
    if occ.role == HEAD:
        return neighbor(node, (occ.heading + 3) % 6, TRIANGULAR6)
    return neighbor(node, occ.heading, TRIANGULAR6)


def facing_flag(occ: Occupant, direction: int) -> str:
    """Flag occ shows on its edge in a global direction."""
    label = edge_label(occ, direction)
    if label is None:
        return EPSILON
    return occ.flags[label]


def contracted_flags(flags: Sequence[str]) -> Tuple[str, ...]:
    return tuple(flags[:6]) + (EPSILON,) * 4


def pushed_occupant(occ: Occupant, kept: Coord, vacated: Coord, rest: str) -> Occupant:
    """
    State of an expanded particle contracting into `kept` because a
    neighbor pushed into `vacated`: φ and o are kept, flags carry over
    edge by edge and the edge toward the vacated node shows `rest`.
    """
    # occ is the part stored at the vacated node
    here = occ.with_role(TAIL if occ.role == HEAD else HEAD)
    flags = []
    for label in range(6):
        direction = (occ.o + label) % 6
        if neighbor(kept, direction, TRIANGULAR6) == vacated:
            flags.append(rest)
        else:
            flags.append(facing_flag(here, direction))
    return Occupant(occ.phi, occ.o, EPSILON, contracted_flags(flags), CONTRACTED)


def pulled_occupant(occ: Occupant, kept: Coord, gained: Coord, rest: str) -> Occupant:
    """
    State of a contracted particle at `kept` pulled into `gained`:
    it expands with its head at `gained`; tail flags carry over and
    the head's edges show `rest`.
    """
    direction = [n for n in range(6) if neighbor(kept, n, TRIANGULAR6) == gained][0]
    tail = (direction + 3 - occ.o) % 6
    new = Occupant(occ.phi, occ.o, tail, (rest,) * 10, TAIL)
    flags = list(new.flags)
    for label in range(10):
        role, glob = label_edge(new, label)
        if role == TAIL:
            flags[label] = occ.flags[(glob - occ.o) % 6]
    return new._replace(flags=tuple(flags))


# ---------------------------------------------------------------------

def particles(cfg: Configuration) -> List[ParticleView]:
    """One view per particle, keyed by its head (or only) node."""
    views = []
    for node, occ in cfg.items_sorted():
        if occ.role == TAIL:
            continue
        views.append(ParticleView(node, partner_node(node, occ), occ))
    return views


def particle_at(cfg: Configuration, node: Coord) -> ParticleView:
    occ = cfg[node]
    if not isinstance(occ, Occupant):
        raise InvalidTurnError(f"no particle at {node}")
    if occ.role == TAIL:
        head = partner_node(node, occ)
        return ParticleView(head, node, cfg[head])
    return ParticleView(node, partner_node(node, occ), occ)


def read_flags(cfg: Configuration, p: ParticleView) -> Tuple[str, ...]:
    """
    The ten flags p reads: for each label, the flag the neighbor
    shows on the shared edge, ε when the node is empty or the label
    does not exist.
    """
    occ = p.state
    reads = []
    for label in range(10):
        if occ.contracted and label > 5:
            reads.append(EPSILON)
            continue
        role, direction = label_edge(occ, label)
        node = p.tail if role == TAIL else p.head
        other = cfg[neighbor(node, direction, TRIANGULAR6)]
        if not isinstance(other, Occupant):
            reads.append(EPSILON)
        else:
            reads.append(facing_flag(other, (direction + 3) % 6))
    return tuple(reads)


def is_connected(cfg: Configuration) -> bool:
    """True if the occupied nodes form one connected component."""
    graph = nx.Graph()
    graph.add_nodes_from(cfg)
    for node in cfg:
        for nbr in neighbors(node, TRIANGULAR6):
            if nbr in cfg:
                graph.add_edge(node, nbr)
    if graph.number_of_nodes() == 0:
        return True
    return nx.is_connected(graph)


class AmoebotSystem(ModelSystem):
    """
    A particle system: states Φ, flag alphabet Σ, transition function
    δ and an initial configuration of particles. The first flag of Σ
    is the rest flag shown on edges a pushed or pulled particle did
    not have before.
    """
    model = "amoebot"
    kind = TRIANGULAR6
    blank = BLANK

    def __init__(
        self,
        states: Iterable[str],
        flags: Sequence[str],
        delta: Sequence[TransitionEntry],
        initial: Configuration,
        ):

        self.states = sorted(set(states))
        self.flags = list(flags)
        if not self.flags:
            raise ModelError("an amoebot system needs at least one flag symbol")
        self.rest = self.flags[0]
        self.delta: List[TransitionEntry] = list(delta)
        if initial.kind is not TRIANGULAR6 or initial.blank != BLANK:
            initial = Configuration(initial.support, blank=BLANK, kind=TRIANGULAR6)
        self._initial = initial
        self._by_phi: Dict[str, List[Tuple[int, TransitionEntry]]] = {}
        for idx, entry in enumerate(self.delta):
            self._by_phi.setdefault(entry.phi, []).append((idx, entry))
        self.validate()

    def __repr__(self):
        return (
            f"<AmoebotSystem: {len(particles(self._initial))} particles, "
            f"{len(self.delta)} entries>")

    def initial(self) -> Configuration:
        return self._initial

    def validate(self):
        known = set(self.states)
        symbols = set(self.flags) | {EPSILON}
        for flag in self.flags:
            if any(ch in flag for ch in ".:,"):
                raise ModelError(f"flag symbol {flag!r} may not contain '.', ':' or ','")
        for entry in self.delta:
            if entry.phi not in known:
                raise ModelError(f"undeclared state {entry.phi!r} in δ")
            for turn in entry.turns:
                if turn.phi not in known:
                    raise ModelError(f"undeclared state {turn.phi!r} in δ")
                if len(turn.flags) != 10 or not set(turn.flags) <= symbols:
                    raise ModelError(f"turn {turn} must set 10 declared flags")
        for node, occ in self._initial.items():
            if not isinstance(occ, Occupant):
                raise ModelError(f"initial node {node} holds {occ!r}, not a particle")
            if occ.phi not in known:
                raise ModelError(f"initial state {occ.phi!r} is not declared")
            if occ.contracted:
                continue
            other = partner_node(node, occ)
            mate = self._initial[other]
            want = occ.with_role(TAIL if occ.role == HEAD else HEAD)
            if mate != want:
                logger.error(f"node {other} holds {mate}, expected {want}")
                raise ModelError(f"expanded particle at {node} has no matching partner")
        if any(not occ.contracted for occ in self._initial.values()):
            logger.warning("initial configuration contains expanded particles")
        if not is_connected(self._initial):
            raise ModelError("initial particles do not form a connected shape")

    # ---------------------------------------------------------------
    def transitions(self, phi: str, reads: Tuple[str, ...], tail) -> List[Tuple[int, Turn]]:
        """δ(φ, reads, tail): the union of turns of every matching entry."""
        seen = []
        for idx, entry in self._by_phi.get(phi, []):
            if entry.matches(phi, reads, tail):
                for turn in entry.turns:
                    if turn not in (t for _, t in seen):
                        seen.append((idx, turn))
        return seen

    def check_turn(self, cfg: Configuration, p: ParticleView, turn: Turn) -> Tuple[bool, str]:
        """Movement precondition of a turn."""
        occ = p.state
        move = turn.movement
        if move.kind == "idle":
            return True, ""
        if move.kind == "expand":
            if not occ.contracted:
                return False, "an expanded particle cannot expand"
            target = neighbor(p.head, occ.o + move.index, TRIANGULAR6)
            if target in cfg:
                return False, f"node {target} is occupied"
            return True, ""
        if move.kind == "contract":
            if occ.contracted:
                return False, "a contracted particle cannot contract"
            return True, ""
        # handover
        if occ.contracted:
            if move.index > 5:
                return False, "a contracted particle has labels 0..5"
            target = neighbor(p.head, occ.o + move.index, TRIANGULAR6)
            other = cfg[target]
            if not isinstance(other, Occupant) or other.contracted:
                return False, f"no expanded particle at {target} to push"
            return True, ""
        role, direction = label_edge(occ, move.index)
        node = p.head if role == HEAD else p.tail
        target = neighbor(node, direction, TRIANGULAR6)
        other = cfg[target]
        if not isinstance(other, Occupant) or not other.contracted:
            return False, f"no contracted particle at {target} to pull"
        return True, ""

    def apply_turn(self, cfg: Configuration, p: ParticleView, turn: Turn) -> Configuration:
        valid, reason = self.check_turn(cfg, p, turn)
        if not valid:
            logger.error(f"turn {turn} of particle at {p.head}: {reason}")
            raise InvalidTurnError(reason)
        return cfg.replace(self._writes(cfg, p, turn))

    def _writes(self, cfg: Configuration, p: ParticleView, turn: Turn) -> List[Tuple]:
        occ = p.state
        move = turn.movement
        if move.kind == "idle":
            new = occ._replace(phi=turn.phi, flags=turn.flags)
            if occ.contracted:
                new = new._replace(flags=contracted_flags(turn.flags))
                return [(p.head, new)]
            return [(p.head, new.with_role(HEAD)), (p.tail, new.with_role(TAIL))]

        if move.kind == "expand":
            head = neighbor(p.head, occ.o + move.index, TRIANGULAR6)
            new = Occupant(turn.phi, occ.o, (move.index + 3) % 6, turn.flags, HEAD)
            return [(head, new), (p.head, new.with_role(TAIL))]

        if move.kind == "contract":
            kept, gone = (p.head, p.tail) if keeps_head(move.index, occ.kind) else (p.tail, p.head)
            new = Occupant(turn.phi, occ.o, EPSILON, contracted_flags(turn.flags))
            return [(kept, new), (gone, BLANK)]

        if occ.contracted:
            # push: p expands into the node its neighbor vacates
            head = neighbor(p.head, occ.o + move.index, TRIANGULAR6)
            other = cfg[head]
            kept = partner_node(head, other)
            pushed = pushed_occupant(other, kept, head, self.rest)
            new = Occupant(turn.phi, occ.o, (move.index + 3) % 6, turn.flags, HEAD)
            return [(head, new), (p.head, new.with_role(TAIL)), (kept, pushed)]

        # pull: p vacates the node incident to the label
        role, direction = label_edge(occ, move.index)
        vacated, kept = (p.head, p.tail) if role == HEAD else (p.tail, p.head)
        target = neighbor(vacated, direction, TRIANGULAR6)
        pulled = pulled_occupant(cfg[target], target, vacated, self.rest)
        new = Occupant(turn.phi, occ.o, EPSILON, contracted_flags(turn.flags))
        return [
            (kept, new), (target, pulled),
            (vacated, pulled.with_role(HEAD)),
        ]

    def enabled_turns(self, cfg: Configuration, p: ParticleView) -> List[TurnCheck]:
        reads = read_flags(cfg, p)
        checks = []
        for idx, turn in self.transitions(p.state.phi, reads, p.state.tail):
            valid, reason = self.check_turn(cfg, p, turn)
            checks.append(TurnCheck(idx, turn, valid, reason))
        return checks

    def explore(self, cfg: Configuration, region: Region):
        events = []
        blocked = False
        for p in particles(cfg):
            hood = set(p.nodes)
            for node in p.nodes:
                hood.update(neighbors(node, TRIANGULAR6))
            reads = tuple((c, cfg[c]) for c in sorted(hood, key=lambda c: (c.y, c.x)))
            for check in self.enabled_turns(cfg, p):
                if not check.valid:
                    continue
                writes = self._writes(cfg, p, check.turn)
                if all(cfg[c] == s for c, s in writes):
                    continue
                if any(c not in region for c, s in writes if s != BLANK):
                    blocked = True
                    continue
                events.append(Event(
                    check.rule, p.nodes, None, reads, tuple(writes),
                    f"{p.state.phi} {check.turn.movement}"))
        return events, blocked

    def state_name(self, state) -> str:
        return str(state)

    def parse_state(self, text: str):
        return BLANK if text == BLANK else parse_occupant(text)


def enabled_turns(sys: AmoebotSystem, cfg: Configuration, node: Coord) -> List[TurnCheck]:
    """Every δ turn of the particle at node, each marked valid or invalid."""
    return sys.enabled_turns(cfg, particle_at(cfg, Coord(*node)))


def apply_turn(sys: AmoebotSystem, cfg: Configuration, node: Coord, turn: Turn) -> Configuration:
    return sys.apply_turn(cfg, particle_at(cfg, Coord(*node)), turn)


__all__ = [
    "Occupant", "Movement", "Turn", "TransitionEntry", "TurnCheck", "ParticleView",
    "AmoebotSystem", "IDLE", "CONTRACTED", "HEAD", "TAIL",
    "occupant_text", "parse_occupant", "label_zero", "label_edge", "edge_label",
    "contraction_tables", "keeps_head", "partner_node", "facing_flag",
    "pushed_occupant", "pulled_occupant", "particles", "particle_at",
    "read_flags", "is_connected", "enabled_turns", "apply_turn",
]
