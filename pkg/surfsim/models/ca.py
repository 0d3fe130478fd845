#!/usr/bin/env python

"""
Nondeterministic fully-asynchronous cellular automata over the von
Neumann neighborhood (O, N, E, S, W).

The local function f is a table of wildcard rules. The outcome set
of a neighborhood is the union of the outcomes of every matching rule,
or the current state alone when no rule matches. Rule order never
matters.
"""

from typing import FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from loguru import logger

from surfsim.base.configuration import Configuration
from surfsim.base.lattice import Coord, Region, neighbors
from surfsim.base.system import Event, ModelSystem
from surfsim.utils import ModelError, StaleEventError

WILDCARD = "*"

# a position of a rule pattern: None for '*', else the allowed states
Slot = Optional[FrozenSet[str]]


def parse_slot(text: str) -> Slot:
    """Reads '*', 'A' or '{A,B}' into a pattern slot."""
    text = text.strip()
    if text == WILDCARD:
        return None
    if text.startswith("{") and text.endswith("}"):
        items = [i.strip() for i in text[1:-1].split(",") if i.strip()]
        if not items:
            raise ModelError(f"empty state set {text!r}")
        return frozenset(items)
    return frozenset([text])


def slot_text(slot: Slot) -> str:
    if slot is None:
        return WILDCARD
    if len(slot) == 1:
        return next(iter(slot))
    return "{" + ",".join(sorted(slot)) + "}"


class CaRule:
    """
    A pattern over (O, N, E, S, W) and a nonempty outcome set.
    """
    def __init__(self, pattern: Sequence, outcomes: Iterable[str]):
        if len(pattern) != 5:
            raise ModelError(f"a CA pattern has 5 positions, got {len(pattern)}")
        self.pattern: Tuple[Slot, ...] = tuple(
            p if p is None or isinstance(p, frozenset) else parse_slot(p)
            for p in pattern)
        self.outcomes: FrozenSet[str] = frozenset(outcomes)
        if not self.outcomes:
            raise ModelError(f"CA rule {self} has no outcome")

    def __repr__(self):
        return f"<CaRule: {self}>"

    def __str__(self):
        lhs = " ".join(slot_text(p) for p in self.pattern)
        return f"{lhs} -> {{{','.join(sorted(self.outcomes))}}}"

    def __eq__(self, other):
        return (
            isinstance(other, CaRule)
            and self.pattern == other.pattern
            and self.outcomes == other.outcomes
        )

    def __hash__(self):
        return hash((self.pattern, self.outcomes))

    def matches(self, hood: Tuple[str, ...]) -> bool:
        return all(p is None or s in p for p, s in zip(self.pattern, hood))


class CaSystem(ModelSystem):
    """
    Γ = (Q, N, f) with a designated quiescent state used as the sparse
    default. The all-quiescent neighborhood must map only to itself.
    """
    model = "ca"

    def __init__(
        self,
        states: Iterable[str],
        rules: Sequence[CaRule],
        initial: Configuration,
        quiescent: str,
        ):

        self.states = sorted(set(states) | {quiescent})
        self.rules: List[CaRule] = list(rules)
        self.quiescent = quiescent
        self.blank = quiescent
        if initial.blank != quiescent:
            initial = Configuration(initial.support, blank=quiescent)
        self._initial = initial

        # rules indexed by the concrete states of their center slot
        self._by_center = {}
        self._any_center = []
        for idx, rule in enumerate(self.rules):
            if rule.pattern[0] is None:
                self._any_center.append((idx, rule))
            else:
                for state in rule.pattern[0]:
                    self._by_center.setdefault(state, []).append((idx, rule))
        self.validate()

    def __repr__(self):
        return f"<CaSystem: {len(self.states)} states, {len(self.rules)} rules>"

    def initial(self) -> Configuration:
        return self._initial

    def validate(self):
        known = set(self.states)
        for rule in self.rules:
            for slot in rule.pattern:
                if slot is not None and not slot <= known:
                    raise ModelError(f"undeclared state in CA rule {rule}")
            if not rule.outcomes <= known:
                raise ModelError(f"undeclared outcome in CA rule {rule}")
        for state in self._initial.support.values():
            if state not in known:
                raise ModelError(f"initial state {state!r} is not declared")
        quiet = (self.quiescent,) * 5
        if self.outcomes(quiet) != {self.quiescent}:
            logger.error(f"f{quiet} = {sorted(self.outcomes(quiet))}")
            raise ModelError(
                "the all-quiescent neighborhood must map only to the quiescent state")

    def neighborhood(self, cfg: Configuration, cell: Coord) -> Tuple[str, ...]:
        """States at (O, N, E, S, W) of cell."""
        return (cfg[cell], *(cfg[n] for n in neighbors(cell)))

    def matching(self, hood: Tuple[str, ...]) -> List[Tuple[int, CaRule]]:
        candidates = self._by_center.get(hood[0], []) + self._any_center
        return sorted(
            ((idx, rule) for idx, rule in candidates if rule.matches(hood)),
            key=lambda item: item[0])

    def outcomes(self, hood: Tuple[str, ...]) -> Set[str]:
        matched = self.matching(hood)
        if not matched:
            return {hood[0]}
        result = set()
        for _, rule in matched:
            result |= rule.outcomes
        return result

    def _cells(self, cfg: Configuration):
        cells = set(cfg)
        for coord in cfg:
            cells.update(neighbors(coord))
        return sorted(cells, key=lambda c: (c.y, c.x))

    def explore(self, cfg: Configuration, region: Region):
        events = []
        blocked = False
        for cell in self._cells(cfg):
            hood = self.neighborhood(cfg, cell)
            current = hood[0]
            firsts = {}
            for idx, rule in self.matching(hood):
                for state in sorted(rule.outcomes):
                    if state != current and state not in firsts:
                        firsts[state] = idx
            if not firsts:
                continue
            if cell not in region:
                blocked = True
                continue
            reads = tuple(zip([cell, *neighbors(cell)], hood))
            for state, idx in sorted(firsts.items()):
                events.append(Event(
                    idx, (cell,), None, reads, ((cell, state),),
                    f"f -> {state}"))
        return events, blocked


def local_outcomes(sys: CaSystem, cfg: Configuration, cell: Coord) -> Set[str]:
    """f applied to the neighborhood of cell; identity when no rule matches."""
    return sys.outcomes(sys.neighborhood(cfg, Coord(*cell)))


def ca_step(sys: CaSystem, cfg: Configuration, cell: Coord, chosen: str) -> Configuration:
    """Rewrites one cell to a chosen outcome of its local function."""
    cell = Coord(*cell)
    if chosen not in local_outcomes(sys, cfg, cell):
        raise StaleEventError(f"{chosen!r} is not an outcome of f at {cell}")
    return cfg.replace([(cell, chosen)])


def ca_steps(sys: CaSystem, cfg: Configuration, rg: Region) -> List[Configuration]:
    """Distinct one-step successors inside the region."""
    seen = []
    for ev in sys.events(cfg, rg):
        succ = sys.apply(cfg, ev)
        if succ not in seen:
            seen.append(succ)
    return seen


def is_fixed_point(sys: CaSystem, cfg: Configuration, rg: Region) -> bool:
    """True iff every cell of the region can only keep its state."""
    for cell in sys._cells(cfg):
        if cell in rg and local_outcomes(sys, cfg, cell) != {cfg[cell]}:
            return False
    return True


__all__ = [
    "WILDCARD", "CaRule", "CaSystem", "parse_slot", "slot_text",
    "local_outcomes", "ca_step", "ca_steps", "is_fixed_point",
]
