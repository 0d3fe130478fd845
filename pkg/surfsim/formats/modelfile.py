#!/usr/bin/env python

"""
Model files: UTF-8 text holding one model under a section header.

    # comment lines start with '#'
    [dscrn]
    species s A
    seed s
    rxn s + O -> s + A N

Section headers name the model: scrn, dscrn, cscrn, atam, ta, ca or
amoebot. Declarations per model:

    scrn/dscrn/cscrn  species, blank, seed, init x y S, unit-seeded yes|no,
                      frame S k, rxn A [+ B] -> C [+ D] [dir]
    atam              tau, glue label strength, tile name N E S W, seed
    ta                tau, state, attachable, affinity a b v|h value,
                      rule a b -> c d v|h, seed, init x y S
    ca                state, quiescent, rule O N E S W -> {outcomes}, init x y S
    amoebot           state, flag, entry phi r0..r9 tail -> turn [; turn],
                      init x y phi:o:tail:flags:role, particle x y phi [o]

A generated system whose rules are produced lazily is written as

    [dscrn]
    compiled cellular-lock
    region radius=2
    [ca]
    ...the source model...

and reading it back re-runs the compiler.
"""

from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple, Union

from loguru import logger

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import BLANK, EPSILON, NULL
from surfsim.base.lattice import COMPASS, Coord, Region, SQUARE4, TRIANGULAR6, compass_index
from surfsim.base.system import ModelSystem
from surfsim.compile import CONSTRUCTIONS, CompiledSimulation, compile_system
from surfsim.models.amoebot import (
    AmoebotSystem, CONTRACTED, Movement, Occupant, TransitionEntry, Turn,
    contracted_flags, occupant_text, parse_occupant,
)
from surfsim.models.assembly import (
    AtamSystem, TaRule, TaSystem, Tile, ORIENTS, check_affinity_strengthening,
)
from surfsim.models.ca import CaRule, CaSystem, parse_slot, slot_text
from surfsim.models.scrn import Flavor, Reaction, ScrnSystem
from surfsim.utils import ModelError, ParseError, SurfsimError

MODELS = ("scrn", "dscrn", "cscrn", "atam", "ta", "ca", "amoebot")


class Line(NamedTuple):
    lineno: int
    keyword: str
    args: List[str]
    text: str


class Section(NamedTuple):
    model: str
    lineno: int
    lines: List[Line]


def _sections(text: str, path) -> List[Section]:
    sections = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            model = stripped[1:-1].strip()
            if model not in MODELS:
                raise ParseError(
                    f"unknown model section [{model}], options are {MODELS}", path, lineno)
            sections.append(Section(model, lineno, []))
            continue
        if not sections:
            raise ParseError("declaration before the model section header", path, lineno)
        tokens = stripped.split()
        sections[-1].lines.append(Line(lineno, tokens[0], tokens[1:], stripped))
    if not sections:
        raise ParseError("no model section found", path, 1)
    return sections


class _Reader:
    """Builds one model from its section, reporting file positions."""
    def __init__(self, section: Section, path):
        self.section = section
        self.path = path

    def fail(self, message, line: Optional[Line] = None):
        lineno = self.section.lineno if line is None else line.lineno
        logger.error(f"{self.path or '<text>'}:{lineno}: {message}")
        raise ParseError(message, self.path, lineno)

    def nargs(self, line: Line, count: int):
        if len(line.args) != count:
            self.fail(f"'{line.keyword}' takes {count} values, got {len(line.args)}", line)

    def integer(self, text: str, line: Line) -> int:
        try:
            return int(text)
        except ValueError:
            self.fail(f"expected an integer, got {text!r}", line)

    def cell(self, line: Line) -> Tuple[Coord, str]:
        if len(line.args) < 3:
            self.fail(f"'{line.keyword}' needs x y and a state", line)
        x, y = (self.integer(v, line) for v in line.args[:2])
        return Coord(x, y), " ".join(line.args[2:])

    def arrow(self, line: Line) -> Tuple[List[str], List[str]]:
        lhs, sep, rhs = " ".join(line.args).partition("->")
        if not sep:
            self.fail(f"'{line.keyword}' needs '->'", line)
        return lhs.split(), rhs.split()

    def known(self, states, declared, line: Line, what="state"):
        for state in states:
            if state not in declared:
                self.fail(f"unknown {what} {state!r}", line)

    def unknown_keyword(self, line: Line, options):
        self.fail(f"unknown declaration {line.keyword!r}, options are {options}", line)

    def build(self, factory: Callable, *args, **kwargs):
        try:
            return factory(*args, **kwargs)
        except ModelError as err:
            self.fail(str(err))


# ---------------------------------------------------------------------
# readers per model

def _read_scrn(reader: _Reader) -> ScrnSystem:
    flavor = Flavor(reader.section.model)
    species, frames = set(), {}
    blank, unit = BLANK, None
    cells: Dict[Coord, str] = {}
    rxns: List[Tuple[Line, Reaction]] = []
    placed: List[Tuple[Line, str]] = []
    keywords = ("species", "blank", "seed", "init", "unit-seeded", "frame", "rxn")
    for line in reader.section.lines:
        if line.keyword == "species":
            species.update(line.args)
        elif line.keyword == "blank":
            reader.nargs(line, 1)
            blank = line.args[0]
        elif line.keyword == "seed":
            reader.nargs(line, 1)
            cells[Coord(0, 0)] = line.args[0]
            placed.append((line, line.args[0]))
        elif line.keyword == "init":
            coord, state = reader.cell(line)
            cells[coord] = state
            placed.append((line, state))
        elif line.keyword == "unit-seeded":
            reader.nargs(line, 1)
            if line.args[0] not in ("yes", "no"):
                reader.fail("unit-seeded takes yes or no", line)
            unit = line.args[0] == "yes"
        elif line.keyword == "frame":
            reader.nargs(line, 2)
            frames[line.args[0]] = reader.integer(line.args[1], line) % 6
        elif line.keyword == "rxn":
            rxns.append((line, _reaction(reader, line, flavor)))
        else:
            reader.unknown_keyword(line, keywords)

    declared = species | {blank}
    if unit is None:
        unit = len(cells) == 1
    for line, state in placed:
        reader.known((state,), declared, line, "species")
    for line, rxn in rxns:
        reader.known(rxn.reactants + rxn.products, declared, line, "species")
        if unit and all(r == blank for r in rxn.reactants):
            reader.fail(
                f"'{rxn}' has only blank reactants, which is illegal in a unit-seeded system",
                line)
    initial = Configuration(cells, blank=blank)
    return reader.build(
        ScrnSystem, species, [r for _, r in rxns], initial, flavor=flavor, blank=blank,
        unit_seeded=unit, frames=frames)


def _reaction(reader: _Reader, line: Line, flavor: Flavor) -> Reaction:
    lhs, rhs = reader.arrow(line)
    reactants = [t for t in lhs if t != "+"]
    products = [t for t in rhs if t != "+"]
    if len(reactants) not in (1, 2) or len(products) not in (len(reactants), len(reactants) + 1):
        reader.fail(f"arity mismatch in '{line.text}'", line)
    extra = products[len(reactants):]
    products = products[:len(reactants)]
    direction = None
    if extra:
        if len(reactants) == 1:
            reader.fail("a unimolecular reaction takes no direction", line)
        if flavor is Flavor.PLAIN:
            reader.fail("plain sCRN reactions take no direction", line)
        if flavor is Flavor.DIRECTED:
            if extra[0].upper() not in COMPASS:
                reader.fail(f"direction must be one of {COMPASS}, got {extra[0]!r}", line)
            direction = compass_index(extra[0])
        else:
            direction = reader.integer(extra[0], line)
            if direction not in range(6):
                reader.fail(f"clockwise direction must be 0..5, got {direction}", line)
    elif len(reactants) == 2 and flavor is not Flavor.PLAIN:
        reader.fail(f"{flavor.value} bimolecular reactions need a direction", line)
    rxn = Reaction(tuple(reactants), tuple(products), direction)
    return rxn.normalized() if flavor is Flavor.DIRECTED else rxn


def _read_atam(reader: _Reader) -> AtamSystem:
    tau, seed = 1, None
    glues: Dict[str, int] = {}
    tiles: List[Tile] = []
    keywords = ("tau", "glue", "tile", "seed")
    for line in reader.section.lines:
        if line.keyword == "tau":
            reader.nargs(line, 1)
            tau = reader.integer(line.args[0], line)
        elif line.keyword == "glue":
            reader.nargs(line, 2)
            glues[line.args[0]] = reader.integer(line.args[1], line)
        elif line.keyword == "tile":
            reader.nargs(line, 5)
            reader.known(line.args[1:], set(glues) | {NULL}, line, "glue")
            tiles.append(Tile(*line.args))
        elif line.keyword == "seed":
            reader.nargs(line, 1)
            seed = line.args[0]
        else:
            reader.unknown_keyword(line, keywords)
    if seed is None:
        reader.fail("an aTAM system needs a seed tile")
    return reader.build(AtamSystem, tiles, glues, seed, tau)


def _read_ta(reader: _Reader) -> TaSystem:
    tau, seed = 1, None
    states, attachable = [], []
    affinities: Dict[Tuple[str, str, str], int] = {}
    rules: List[Tuple[Line, TaRule]] = []
    cells: Dict[Coord, str] = {}
    keywords = ("tau", "state", "attachable", "affinity", "rule", "seed", "init")
    for line in reader.section.lines:
        if line.keyword == "tau":
            reader.nargs(line, 1)
            tau = reader.integer(line.args[0], line)
        elif line.keyword == "state":
            states += line.args
        elif line.keyword == "attachable":
            attachable += line.args
        elif line.keyword == "affinity":
            reader.nargs(line, 4)
            a, b, orient, value = line.args
            if orient not in ORIENTS:
                reader.fail(f"orientation must be one of {ORIENTS}", line)
            reader.known((a, b), states, line)
            affinities[(a, b, orient)] = reader.integer(value, line)
        elif line.keyword == "rule":
            lhs, rhs = reader.arrow(line)
            if len(lhs) != 2 or len(rhs) != 3 or rhs[2] not in ORIENTS:
                reader.fail("a rule reads 'a b -> c d v|h'", line)
            reader.known(lhs + rhs[:2], states, line)
            rules.append((line, TaRule(*lhs, *rhs)))
        elif line.keyword == "seed":
            reader.nargs(line, 1)
            seed = line.args[0]
        elif line.keyword == "init":
            coord, state = reader.cell(line)
            cells[coord] = state
        else:
            reader.unknown_keyword(line, keywords)

    initial = Configuration(cells, blank=NULL) if cells else None
    system = reader.build(
        TaSystem, states, attachable, affinities, [r for _, r in rules],
        seed=seed, tau=tau, initial=initial)
    check = check_affinity_strengthening(system)
    if not check:
        where = next((line for line, r in rules if r == check.rule), None)
        reader.fail(
            f"rule '{check.rule}' lowers the {check.orient} affinity toward {check.state}; "
            "the system is not affinity strengthening", where)
    return system


def _read_ca(reader: _Reader) -> CaSystem:
    states, quiescent = [], None
    rules: List[Tuple[Line, CaRule]] = []
    cells: Dict[Coord, str] = {}
    keywords = ("state", "quiescent", "rule", "init")
    for line in reader.section.lines:
        if line.keyword == "state":
            states += line.args
        elif line.keyword == "quiescent":
            reader.nargs(line, 1)
            quiescent = line.args[0]
        elif line.keyword == "rule":
            lhs, rhs = reader.arrow(line)
            if len(lhs) != 5 or len(rhs) != 1:
                reader.fail("a rule reads 'O N E S W -> {outcomes}'", line)
            try:
                pattern = [parse_slot(t) for t in lhs]
                outcomes = parse_slot(rhs[0])
            except ModelError as err:
                reader.fail(str(err), line)
            if outcomes is None:
                reader.fail("outcomes cannot be a wildcard", line)
            rules.append((line, CaRule(pattern, outcomes)))
        elif line.keyword == "init":
            coord, state = reader.cell(line)
            cells[coord] = state
        else:
            reader.unknown_keyword(line, keywords)
    if quiescent is None:
        reader.fail("a CA needs a quiescent state")
    declared = set(states) | {quiescent}
    for line, rule in rules:
        for slot in rule.pattern + (rule.outcomes,):
            if slot is not None:
                reader.known(sorted(slot), declared, line)
    initial = Configuration(cells, blank=quiescent)
    return reader.build(CaSystem, states, [r for _, r in rules], initial, quiescent)


def _read_amoebot(reader: _Reader) -> AmoebotSystem:
    states, flags = [], []
    entries: List[TransitionEntry] = []
    cells: Dict[Coord, Occupant] = {}
    shorthand: List[Tuple[Line, Coord, str, int]] = []
    keywords = ("state", "flag", "entry", "init", "particle")
    for line in reader.section.lines:
        if line.keyword == "state":
            states += line.args
        elif line.keyword == "flag":
            flags += line.args
        elif line.keyword == "entry":
            entries.append(_entry(reader, line))
        elif line.keyword == "init":
            coord, text = reader.cell(line)
            try:
                cells[coord] = parse_occupant(text)
            except ModelError as err:
                reader.fail(str(err), line)
        elif line.keyword == "particle":
            if len(line.args) not in (3, 4):
                reader.fail("a particle reads 'x y phi [o]'", line)
            coord, phi = reader.cell(Line(line.lineno, line.keyword, line.args[:3], line.text))
            o = reader.integer(line.args[3], line) % 6 if len(line.args) == 4 else 0
            shorthand.append((line, coord, phi, o))
        else:
            reader.unknown_keyword(line, keywords)
    if not flags:
        reader.fail("an amoebot system needs at least one flag symbol")
    for line, coord, phi, o in shorthand:
        cells[coord] = Occupant(phi, o, EPSILON, contracted_flags((flags[0],) * 6), CONTRACTED)
    initial = Configuration(cells, blank=BLANK, kind=TRIANGULAR6)
    return reader.build(AmoebotSystem, states, flags, entries, initial)


def _entry(reader: _Reader, line: Line) -> TransitionEntry:
    lhs, sep, rhs = " ".join(line.args).partition("->")
    left = lhs.split()
    if not sep or len(left) != 12:
        reader.fail("an entry reads 'phi r0 .. r9 tail -> phi flags movement [; ...]'", line)
    turns = []
    for chunk in rhs.split(";"):
        parts = chunk.split()
        if len(parts) != 3:
            reader.fail(f"a turn reads 'phi f0.f1...f9 movement', got {chunk.strip()!r}", line)
        try:
            turns.append(Turn(parts[0], tuple(parts[1].split(".")), Movement.parse(parts[2])))
        except ModelError as err:
            reader.fail(str(err), line)
    try:
        reads = [None if t == "*" else parse_slot(t) for t in left[1:11]]
        return TransitionEntry(left[0], reads, left[11], turns)
    except (ModelError, ValueError) as err:
        reader.fail(str(err), line)


READERS = {
    "scrn": _read_scrn,
    "dscrn": _read_scrn,
    "cscrn": _read_scrn,
    "atam": _read_atam,
    "ta": _read_ta,
    "ca": _read_ca,
    "amoebot": _read_amoebot,
}


def _read_compiled(sections: List[Section], path) -> ModelSystem:
    head = sections[0]
    reader = _Reader(head, path)
    name, region_text = None, None
    for line in head.lines:
        if line.keyword == "compiled":
            reader.nargs(line, 1)
            name = line.args[0]
        elif line.keyword == "region":
            reader.nargs(line, 1)
            region_text = line.args[0]
        else:
            reader.fail("a compiled section only declares 'compiled' and 'region'", line)
    if name not in CONSTRUCTIONS:
        reader.fail(f"unknown construction {name!r}, options are {sorted(CONSTRUCTIONS)}")
    src_model, dst_model = CONSTRUCTIONS[name]
    if dst_model != head.model:
        reader.fail(f"construction {name} produces [{dst_model}], not [{head.model}]")
    source = _read_sections(sections[1:], path)
    if source.model != src_model:
        reader.fail(f"construction {name} compiles [{src_model}], found [{source.model}]")
    region = None
    if region_text is not None:
        kind = TRIANGULAR6 if head.model in ("cscrn", "amoebot") else SQUARE4
        try:
            region = Region.from_text(region_text, kind)
        except ValueError as err:
            reader.fail(str(err))
    try:
        return compile_system(source, head.model, region).target
    except SurfsimError as err:
        reader.fail(f"recompiling {name}: {err}")


def _read_sections(sections: List[Section], path) -> ModelSystem:
    head = sections[0]
    if any(line.keyword == "compiled" for line in head.lines):
        return _read_compiled(sections, path)
    if len(sections) > 1:
        raise ParseError("one model per file", path, sections[1].lineno)
    return READERS[head.model](_Reader(head, path))


def parse_model_text(text: str, path=None) -> ModelSystem:
    """Loads a model from model-file text."""
    system = _read_sections(_sections(text, path), path)
    logger.debug(f"loaded {system}")
    return system


def parse_model(path: Union[str, Path]) -> ModelSystem:
    """Loads the model file at path."""
    path = Path(path)
    return parse_model_text(path.read_text(encoding="utf-8"), str(path))


# ---------------------------------------------------------------------
# printers per model

def _cells(cfg: Configuration) -> List[str]:
    return [f"init {c.x} {c.y} {s}" for c, s in cfg.items_sorted()]


def _print_scrn(system: ScrnSystem) -> List[str]:
    if system.rules.schema:
        return _print_schema(system)
    lines = []
    if system.blank != BLANK:
        lines.append(f"blank {system.blank}")
    species = [s for s in system.species if s != system.blank]
    if species:
        lines.append("species " + " ".join(species))
    initial = system.initial()
    origin_seed = (
        system.unit_seeded and len(initial) == 1 and Coord(0, 0) in initial)
    if origin_seed:
        lines.append(f"seed {initial[Coord(0, 0)]}")
    else:
        if system.unit_seeded != (len(initial) == 1):
            lines.append(f"unit-seeded {'yes' if system.unit_seeded else 'no'}")
        lines += _cells(initial)
    lines += [f"frame {s} {k}" for s, k in sorted(system.frames.items())]
    lines += [f"rxn {rxn.text(system.flavor)}" for rxn in system.reactions]
    return lines


def _print_schema(system: ScrnSystem) -> List[str]:
    schema = system.rules
    if schema.source is None:
        raise ModelError(f"{schema} does not record the system it was generated from")
    lines = [f"compiled {schema.construction}"]
    if schema.region is not None:
        lines.append(f"region {schema.region.to_text()}")
    return lines + print_model(schema.source).splitlines()


def _print_atam(system: AtamSystem) -> List[str]:
    lines = [f"tau {system.tau}"]
    lines += [f"glue {g} {s}" for g, s in system.glues.items() if g != NULL]
    lines += [f"tile {t.name} " + " ".join(t.glues) for t in system.tiles]
    lines.append(f"seed {system.seed}")
    return lines


def _print_ta(system: TaSystem) -> List[str]:
    lines = [f"tau {system.tau}", "state " + " ".join(system.states)]
    if system.attachable_states:
        lines.append("attachable " + " ".join(system.attachable_states))
    lines += [
        f"affinity {a} {b} {orient} {value}"
        for (a, b, orient), value in sorted(system.affinities.items())]
    lines += [f"rule {r.a} {r.b} -> {r.c} {r.d} {r.orient}" for r in system.rules]
    initial = system.initial()
    if system.seed is not None and initial == Configuration({Coord(0, 0): system.seed}, blank=NULL):
        lines.append(f"seed {system.seed}")
    else:
        lines += _cells(initial)
    return lines


def _print_ca(system: CaSystem) -> List[str]:
    states = [s for s in system.states if s != system.quiescent]
    lines = [f"quiescent {system.quiescent}"]
    if states:
        lines.insert(0, "state " + " ".join(states))
    lines += [f"rule {rule}" for rule in system.rules]
    return lines + _cells(system.initial())


def _slot(slot) -> str:
    return "*" if slot is None else slot_text(slot)


def _print_amoebot(system: AmoebotSystem) -> List[str]:
    lines = ["state " + " ".join(system.states), "flag " + " ".join(system.flags)]
    for entry in system.delta:
        tail = "*" if entry.tail is None else entry.tail
        reads = " ".join(_slot(r) for r in entry.reads)
        turns = " ; ".join(str(t) for t in entry.turns)
        lines.append(f"entry {entry.phi} {reads} {tail} -> {turns}")
    lines += [
        f"init {c.x} {c.y} {occupant_text(occ)}" for c, occ in system.initial().items_sorted()]
    return lines


PRINTERS = {
    "scrn": _print_scrn,
    "dscrn": _print_scrn,
    "cscrn": _print_scrn,
    "atam": _print_atam,
    "ta": _print_ta,
    "ca": _print_ca,
    "amoebot": _print_amoebot,
}


def print_model(system: Union[ModelSystem, CompiledSimulation]) -> str:
    """Canonical model-file text of a system (or of a compiled target)."""
    if isinstance(system, CompiledSimulation):
        system = system.target
    if system.model not in PRINTERS:
        raise ModelError(f"cannot print a {system.model} system")
    lines = [f"[{system.model}]"] + PRINTERS[system.model](system)
    return "\n".join(lines) + "\n"


def write_model(system: Union[ModelSystem, CompiledSimulation], path: Union[str, Path]):
    Path(path).write_text(print_model(system), encoding="utf-8")
    logger.debug(f"wrote {system} to {path}")


__all__ = ["parse_model", "parse_model_text", "print_model", "write_model", "MODELS"]
