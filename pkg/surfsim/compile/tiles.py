#!/usr/bin/env python

"""
Tile systems simulated by directed sCRNs, and sCRNs simulated by
tile automata.

A directed sCRN simulates tile attachment with observing species
obs[N:E:S:W]: a tile species turns a blank neighbor into an observer,
the observer records what faces it on each side (ε until observed,
null for blank or for another observer) and turns into a tile species
once the recorded sides bind that tile with strength at least τ.
"""

import itertools
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

from loguru import logger

from surfsim.base.defaults import BLANK, EPSILON, NULL
from surfsim.base.lattice import SQUARE4, opposite
from surfsim.compile.base import CompiledSimulation, RepresentationMap, RuleEmitter
from surfsim.models.assembly import (
    AtamSystem, TaRule, TaSystem, HORIZONTAL, VERTICAL, check_affinity_strengthening,
)
from surfsim.models.scrn import Flavor, Reaction, ScrnSystem
from surfsim.utils import CompileError

N, E, S, W = range(4)
BLANK_TILE = "blank"
RESERVED = set("[],:")


class ObservingState(NamedTuple):
    """Labels (or states) recorded on the N, E, S, W sides."""
    recorded: Tuple[str, str, str, str] = (EPSILON,) * 4

    def __str__(self):
        return "obs[" + ":".join(self.recorded) + "]"

    def record(self, side: int, value: str) -> "ObservingState":
        rec = list(self.recorded)
        rec[side] = value
        return ObservingState(tuple(rec))

    @property
    def complete(self) -> bool:
        return EPSILON not in self.recorded

    @classmethod
    def parse(cls, text: str) -> Optional["ObservingState"]:
        if not (text.startswith("obs[") and text.endswith("]")):
            return None
        parts = tuple(text[4:-1].split(":"))
        if len(parts) != 4:
            return None
        return cls(parts)


def observers(sides: Sequence[Sequence[str]]) -> List[ObservingState]:
    """Every observer whose side d records a value of sides[d]."""
    return [ObservingState(tuple(rec)) for rec in itertools.product(*sides)]


def _check_names(names: Iterable[str], what: str):
    for name in names:
        if RESERVED & set(name) or name.startswith("obs[") or name in (BLANK, EPSILON, NULL):
            logger.error(f"{what} {name!r} clashes with generated names")
            raise CompileError(f"{what} names may not be {BLANK!r} or contain any of '[]:,'")


def _emit_observation(
    emitter: RuleEmitter,
    protocol: str,
    species: Sequence[str],
    facing,
    sides: Sequence[Sequence[str]],
    ):
    """
    Items 1-4 shared by both tile constructions. `facing(ψ, d)` is
    what tile species ψ shows toward a neighbor in direction d^-1
    (the glue on side d of ψ, or ψ itself for tile automata).
    """
    fresh = str(ObservingState())
    everyone = observers(sides)
    for psi in species:
        for d in range(4):
            emitter.add(_rxn(psi, BLANK, psi, fresh, d), protocol, 1)
    for d in range(4):
        back = opposite(d)
        for obs in everyone:
            if obs.recorded[d] != EPSILON:
                continue
            emitter.add(_rxn(str(obs), BLANK, str(obs.record(d, NULL)), BLANK, d), protocol, 2)
            for other in everyone:
                if other.recorded[back] == EPSILON:
                    emitter.add(_rxn(
                        str(obs), str(other),
                        str(obs.record(d, NULL)), str(other.record(back, NULL)), d,
                    ), protocol, 3)
                else:
                    emitter.add(_rxn(
                        str(obs), str(other), str(obs.record(d, NULL)), str(other), d,
                    ), protocol, 3, note="ε side facing an observer that already recorded it")
        for obs in everyone:
            if obs.recorded[d] not in (EPSILON, NULL):
                continue
            for psi in species:
                value = facing(psi, back)
                if value not in sides[d]:
                    continue
                emitter.add(_rxn(str(obs), psi, str(obs.record(d, value)), psi, d), protocol, 4)


def _rxn(a, b, c, d, direction) -> Reaction:
    return Reaction((a, b), (c, d), direction).normalized()


def _uni(a, b) -> Reaction:
    return Reaction((a,), (b,))


def _represent_tiles(states: Iterable[str], tiles: Set[str]) -> Dict[str, str]:
    return {s: (s if s in tiles else NULL) for s in states if s != BLANK}


def _species(emitter: RuleEmitter) -> Set[str]:
    out = set()
    for rxn in emitter.rules:
        out.update(rxn.reactants)
        out.update(rxn.products)
    return out


def compile_atam_to_dscrn(source: AtamSystem) -> CompiledSimulation:
    """Directed sCRN whose tile species attach through observers."""
    names = [t.name for t in source.tiles]
    _check_names(names, "tile")
    _check_names([g for g in source.glues if g != NULL], "glue")
    emitter = RuleEmitter("tiles")

    # side d of an observer records the glue on side d^-1 of a neighbor
    sides = []
    for d in range(4):
        values = {EPSILON, NULL} | {t.glue(opposite(d)) for t in source.tiles}
        sides.append(sorted(values))

    def facing(name, side):
        return source.tile(name).glue(side)

    _emit_observation(emitter, "observe", names, facing, sides)
    attach = 0
    for obs in observers(sides):
        if not obs.complete:
            continue
        for tile in source.tiles:
            total = sum(source.strength(tile.glue(d), obs.recorded[d]) for d in range(4))
            if total >= source.tau:
                emitter.add(_uni(str(obs), tile.name), "attachment", 5)
                attach += 1

    states = _species(emitter) | set(names)
    target = ScrnSystem(
        species=states,
        reactions=emitter.rules,
        initial=source.initial().relabel(lambda s: s, blank=BLANK),
        flavor=Flavor.DIRECTED,
        unit_seeded=True,
    )
    logger.info(f"tiles: {len(emitter)} reactions, {attach} attachment rules")
    rep = RepresentationMap(
        _represent_tiles(states, set(names)), blank_in=BLANK, blank_out=NULL, kind=SQUARE4)
    return CompiledSimulation(
        source, target, rep, emitter.provenance(), "tiles",
        notes=["an ε side facing an observer that already recorded it is set to null"],
    )


def compile_asta_to_dscrn(source: TaSystem) -> CompiledSimulation:
    """
    Directed sCRN simulating an affinity-strengthening tile automaton.
    Observers record neighbor states and keep re-recording them.
    """
    check = check_affinity_strengthening(source)
    if not check:
        logger.error(f"rule {check.rule} lowers the affinity toward {check.state} ({check.orient})")
        raise CompileError("tile automaton is not affinity strengthening")
    if len(source.initial()) != 1:
        raise CompileError("tile automaton must be unit-seeded")
    _check_names(source.states, "state")
    emitter = RuleEmitter("automata")
    states = list(source.states)
    sides = [sorted({EPSILON, NULL} | set(states)) for _ in range(4)]

    def facing(name, side):
        return name

    _emit_observation(emitter, "observe", states, facing, sides)
    for d in range(4):
        for obs in observers(sides):
            if obs.recorded[d] in (EPSILON, NULL):
                continue
            for psi in states:
                if psi != obs.recorded[d]:
                    emitter.add(
                        _rxn(str(obs), psi, str(obs.record(d, psi)), psi, d), "update", 3)

    attach = 0
    for obs in observers(sides):
        if not obs.complete:
            continue
        n, e, s, w = obs.recorded
        for state in source.attachable_states:
            total = (
                source.affinity(n, state, VERTICAL) + source.affinity(state, s, VERTICAL)
                + source.affinity(state, e, HORIZONTAL) + source.affinity(w, state, HORIZONTAL)
            )
            if total >= source.tau:
                emitter.add(_uni(str(obs), state), "attachment", 4)
                attach += 1

    for rule in source.rules:
        emitter.add(
            _rxn(rule.a, rule.b, rule.c, rule.d, rule.direction), "transition", 5, note=str(rule))

    species = _species(emitter) | set(states)
    target = ScrnSystem(
        species=species,
        reactions=emitter.rules,
        initial=source.initial().relabel(lambda s: s, blank=BLANK),
        flavor=Flavor.DIRECTED,
        unit_seeded=True,
    )
    logger.info(f"automata: {len(emitter)} reactions, {attach} attachment rules")
    rep = RepresentationMap(
        _represent_tiles(species, set(states)), blank_in=BLANK, blank_out=NULL, kind=SQUARE4)
    return CompiledSimulation(
        source, target, rep, emitter.provenance(), "automata",
        notes=[
            "attachment uses north (η_N, σ, v), south (σ, η_S, v), "
            "east (σ, η_E, h) and west (η_W, σ, h) affinities",
        ],
    )


def compile_scrn_to_ta(source: ScrnSystem) -> CompiledSimulation:
    """
    Tile automaton simulating a plain or directed sCRN: a blank tile
    attaches anywhere, bimolecular reactions become pair transitions
    and unimolecular ones pair with any neighboring tile.
    """
    if source.flavor is Flavor.CLOCKWISE or source.rules.schema:
        raise CompileError("tile automata simulate plain or directed sCRNs with explicit rules")
    if BLANK_TILE in source.species:
        raise CompileError(f"species name {BLANK_TILE!r} is reserved for the blank tile")

    def tile(state):
        return BLANK_TILE if state == source.blank else state

    states = [tile(s) for s in source.species]
    emitter = RuleEmitter("tile-automata")
    for rxn in source.reactions:
        if rxn.is_uni:
            (a,), (b,) = rxn.reactants, rxn.products
            a, b = tile(a), tile(b)
            for x in states:
                for orient in (VERTICAL, HORIZONTAL):
                    emitter.add(TaRule(a, x, b, x, orient), "transition", 2, note=str(rxn))
                    emitter.add(TaRule(x, a, x, b, orient), "transition", 2, note=str(rxn))
            continue
        (a, b), (c, d) = (tuple(map(tile, rxn.reactants)), tuple(map(tile, rxn.products)))
        directions = range(4) if rxn.direction is None else [rxn.direction]
        for direction in directions:
            if direction == S:
                rule = TaRule(a, b, c, d, VERTICAL)
            elif direction == N:
                rule = TaRule(b, a, d, c, VERTICAL)
            elif direction == E:
                rule = TaRule(a, b, c, d, HORIZONTAL)
            else:
                rule = TaRule(b, a, d, c, HORIZONTAL)
            emitter.add(rule, "transition", 1, note=str(rxn))

    tau = 1
    affinities = {
        (x, y, orient): tau
        for x in states for y in states for orient in (VERTICAL, HORIZONTAL)
    }
    initial = source.initial().relabel(tile, blank=NULL, kind=SQUARE4)
    target = TaSystem(
        states=states,
        attachable=[BLANK_TILE],
        affinities=affinities,
        rules=emitter.rules,
        tau=tau,
        initial=initial,
    )
    table = {s: (source.blank if s == BLANK_TILE else s) for s in states}
    rep = RepresentationMap(table, blank_in=NULL, blank_out=source.blank, kind=SQUARE4)
    logger.info(f"tile-automata: {len(emitter)} rules over {len(states)} states")
    return CompiledSimulation(source, target, rep, emitter.provenance(), "tile-automata")


__all__ = [
    "ObservingState", "observers", "BLANK_TILE",
    "compile_atam_to_dscrn", "compile_asta_to_dscrn", "compile_scrn_to_ta",
]
