#!/usr/bin/env python

"""
Directed sCRN -> plain sCRN by coloring 3x3 blocks on the fly.

The seed first colors its own block 1..9 (orientation bootstrap).
Every growing reaction (A, O, B, C, d) then colors the far wall of
the block of its target before the transition happens, so every
colored species always sits in a fully colored block and can read
the global orientation from its neighbors' colors.

With the identity permutation, color c sits at (x mod 3, y mod 3)
where c = 1 + (x mod 3) + 3 (y mod 3): color 2 is east of color 1 and
color 4 north of it. Other directions and start colors are obtained
by permuting colors.

State names
-----------
    A^3          colored species (also O^3 for colored blanks)
    chi^3        block of this cell is colored
    chi[1->2]    coloring trigger grown from color 1 into color 2
    chi[1->2]p   trigger waiting for its coloring species
    chi[2->3]01  coloring species with north/south observation bits
    chi[2,3]     redundant helper, becomes O^6, O^9 or O
    #0 .. #5     orientation bootstrap
"""

import itertools
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from loguru import logger

from surfsim.base.configuration import Configuration
from surfsim.base.defaults import BLANK
from surfsim.base.lattice import Coord, SQUARE4, block, symmetries, transform
from surfsim.compile.base import CompiledSimulation, RepresentationMap, RuleEmitter
from surfsim.models.scrn import Flavor, Reaction, ScrnSystem
from surfsim.utils import CompileError

COLORS = tuple(range(1, 10))
RESERVED = set("^[]#{},")
CHI = "chi"

# two-line tables, stored as the bottom line
IDENTITY = (1, 2, 3, 4, 5, 6, 7, 8, 9)
PI_R = (2, 3, 1, 5, 6, 4, 8, 9, 7)
PI_L = (3, 1, 2, 6, 4, 5, 9, 7, 8)
PI_U = (4, 5, 6, 7, 8, 9, 1, 2, 3)
PI_D = (7, 8, 9, 1, 2, 3, 4, 5, 6)
PI_1 = IDENTITY
PI_2 = (3, 6, 9, 2, 5, 8, 1, 4, 7)
PI_3 = (9, 8, 7, 6, 5, 4, 3, 2, 1)
PI_4 = (7, 4, 1, 8, 5, 2, 9, 6, 3)

# directed compass index (N=0, E=1, S=2, W=3) -> rotation k
ROTATION_OF = {1: 1, 0: 2, 3: 3, 2: 4}


class Permutation9(tuple):
    """A bijection of 1..9 stored as its bottom line."""
    def __new__(cls, images: Sequence[int], name: str = ""):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(COLORS):
            raise ValueError(f"not a permutation of 1..9: {images}")
        self = super().__new__(cls, images)
        self.name = name or "".join(str(i) for i in images)
        return self

    def __call__(self, i: int) -> int:
        return self[i - 1]

    def compose(self, inner: "Permutation9", name: str = "") -> "Permutation9":
        """(self ∘ inner)(i) = self(inner(i))."""
        return Permutation9([self(inner(i)) for i in COLORS], name)

    def as_matrix(self) -> np.ndarray:
        """9x9 permutation matrix mapping e_i to e_π(i)."""
        mat = np.zeros((9, 9), dtype=int)
        for i in COLORS:
            mat[self(i) - 1, i - 1] = 1
        return mat


def permutation_tables() -> Dict[str, object]:
    """
    The four translations, the four rotations, the nine translations
    of one block and the families Π_1..Π_4.
    """
    ident = Permutation9(IDENTITY, "id")
    r, l = Permutation9(PI_R, "r"), Permutation9(PI_L, "l")
    u, d = Permutation9(PI_U, "u"), Permutation9(PI_D, "d")
    rotations = {
        1: Permutation9(PI_1, "p1"), 2: Permutation9(PI_2, "p2"),
        3: Permutation9(PI_3, "p3"), 4: Permutation9(PI_4, "p4"),
    }
    translations = [
        ident, r, l, u, d,
        u.compose(r, "ur"), u.compose(l, "ul"),
        d.compose(r, "dr"), d.compose(l, "dl"),
    ]
    families = {
        k: [t.compose(rot, f"{t.name}.{rot.name}") for t in translations]
        for k, rot in rotations.items()
    }
    return {
        "r": r, "l": l, "u": u, "d": d,
        "rotations": rotations,
        "translations": translations,
        "families": families,
    }


TABLES = permutation_tables()


# ---------------------------------------------------------------------
# state names

def colored(state: str, j: int) -> str:
    return f"{state}^{j}"


def chi(j: int) -> str:
    return f"{CHI}^{j}"


def chi_sub(i: int, j: int) -> str:
    return f"{CHI}[{i}->{j}]"


def chi_p(i: int, j: int) -> str:
    return f"{CHI}[{i}->{j}]p"


def chi_bits(i: int, j: int, b0: int, b1: int) -> str:
    return f"{CHI}[{i}->{j}]{b0}{b1}"


def chi_pair(i: int, j: int) -> str:
    return f"{CHI}[{i}|{j}]"


BOOT = {name: f"#{name}" for name in ("0", "1", "X", "Y", "Z", "2", "3", "4", "5")}


def color_of(state: str) -> Optional[int]:
    """Color of a colored state, None for uncolored ones."""
    if state.startswith("#"):
        return None
    if state.startswith(f"{CHI}[") and "->" in state:
        return int(state.split("->")[1][0])
    base, sep, tail = state.rpartition("^")
    if sep and tail.isdigit() and base:
        return int(tail)
    return None


def is_colored_species(state: str) -> bool:
    """σ^j for a non-blank source species σ."""
    base, sep, tail = state.rpartition("^")
    return bool(sep) and tail.isdigit() and base not in (BLANK, CHI)


def represent(state: str, seed: str) -> str:
    """σ^i -> σ, #0 and the bare seed -> seed, everything else -> O."""
    if state in (BOOT["0"], seed):
        return seed
    if is_colored_species(state):
        return state.rpartition("^")[0]
    return BLANK


def identity_color(c: Coord) -> int:
    """Color of a cell when the seed block is centered at the origin."""
    return 1 + (c.x + 1) % 3 + 3 * ((c.y + 1) % 3)


# ---------------------------------------------------------------------
# emitters

def _rxn(a, b, c, d) -> Reaction:
    return Reaction((a, b), (c, d), None)


def emit_bootstrap(seed: str, emitter: Optional[RuleEmitter] = None) -> List[Reaction]:
    """The 17 reactions coloring the block of the seed."""
    b = BOOT
    o = {i: colored(BLANK, i) for i in COLORS}
    items = [
        (1, [(seed, BLANK, b["0"], b["1"])]),
        (2, [(b["0"], BLANK, b["0"], b["X"]),
             (b["1"], BLANK, b["1"], b["Y"]),
             (b["X"], b["Y"], b["2"], b["3"])]),
        (3, [(b["2"], BLANK, b["2"], b["Z"]),
             (b["Z"], b["X"], b["4"], b["5"]),
             (b["Z"], b["5"], o[1], o[2])]),
        (4, [(o[2], b["4"], o[2], o[3]),
             (o[3], b["2"], o[3], o[6]),
             (o[6], b["3"], o[6], o[9]),
             (o[9], b["1"], o[9], o[8]),
             (o[8], b["3"], o[8], o[7]),
             (o[7], b["2"], o[7], o[4]),
             (o[4], b["0"], o[4], colored(seed, 5))]),
        (5, [(o[8], b["Y"], o[8], BLANK),
             (o[6], b["Z"], o[6], BLANK),
             (o[4], b["Z"], o[4], BLANK)]),
    ]
    emitter = emitter if emitter is not None else RuleEmitter("orient")
    out = []
    for item, rows in items:
        for row in rows:
            rxn = _rxn(*row)
            emitter.add(rxn, "orientation", item)
            out.append(rxn)
    return out


def growing_direction(rxn: Reaction, blank: str = BLANK) -> Optional[Tuple[str, str, str, int]]:
    """
    (A, B, C, d) if the normalized directed reaction grows A into a
    blank neighbor in compass direction d, else None.
    """
    if rxn.is_uni:
        return None
    (x, y), (c, d) = rxn.reactants, rxn.products
    if blank in (c, d):
        return None
    if y == blank and x != blank:
        return x, c, d, rxn.direction
    if x == blank and y != blank:
        return y, d, c, (rxn.direction + 2) % 4
    return None


def _xi(xi: Dict[int, Set[str]], j: int) -> List[str]:
    return sorted(xi.get(j, ()))


def emit_growing(
    rule: Tuple[str, str, str, int],
    emitter: RuleEmitter,
    xi: Optional[Dict[int, Set[str]]] = None,
    note: str = "",
    ) -> List[Reaction]:
    """
    Items 1-11 for one growing reaction under every π of its family.
    Without `xi` only the unquantified items are emitted; with it the
    items quantified over colored states (2, 5, 8) are emitted too.
    """
    a, b, c, direction = rule
    k = ROTATION_OF[direction]
    out = []

    def add(item, x, y, z, w, pi, extra=""):
        rxn = _rxn(x, y, z, w)
        emitter.add(rxn, "growing", item, pi.name, "; ".join(s for s in (note, extra) if s))
        out.append(rxn)

    for pi in TABLES["families"][k]:
        p = {i: pi(i) for i in COLORS}
        trig = chi_sub(p[1], p[2])
        trigp = chi_p(p[1], p[2])
        pair = chi_pair(p[2], p[3])

        def cs(b0, b1):
            return chi_bits(p[2], p[3], b0, b1)

        if xi is None:
            add(1, colored(a, p[1]), colored(BLANK, p[2]), colored(a, p[1]), trig, pi)
            for blank in (BLANK, colored(BLANK, p[3])):
                add(3, trig, blank, trigp, cs(0, 0), pi)
            for other in (p[6], p[9]):
                add(3, trig, chi_sub(other, p[3]), trigp, cs(0, 0), pi)
            add(4, trig, chi_sub(p[1], p[3]), chi(p[2]), chi(p[3]), pi)
            for bit in (0, 1):
                add(5, cs(0, bit), BLANK, cs(0, bit), pair, pi)
                add(5, cs(bit, 0), BLANK, cs(bit, 0), pair, pi)
            for bit in (0, 1):
                for junk in (chi_pair(p[3], p[9]), chi_pair(p[4], p[5]), chi_pair(p[5], p[4])):
                    add(6, cs(0, bit), junk, cs(1, bit), colored(BLANK, p[6]), pi)
                for junk in (chi_pair(p[3], p[6]), chi_pair(p[7], p[8]), chi_pair(p[8], p[7])):
                    add(6, cs(bit, 0), junk, cs(bit, 1), colored(BLANK, p[9]), pi)
            indep = "observation bits of the two species range independently"
            for bit, other in itertools.product((0, 1), repeat=2):
                add(7, cs(0, bit), chi_bits(p[5], p[6], other, 0),
                    cs(1, bit), chi_bits(p[5], p[6], other, 1), pi, indep)
                add(7, cs(0, bit), chi_bits(p[4], p[6], 0, other),
                    cs(1, bit), chi_bits(p[4], p[6], 1, other), pi, indep)
                add(7, cs(bit, 0), chi_bits(p[8], p[9], 0, other),
                    cs(bit, 1), chi_bits(p[8], p[9], 1, other), pi, indep)
                add(7, cs(bit, 0), chi_bits(p[7], p[9], other, 0),
                    cs(bit, 1), chi_bits(p[7], p[9], other, 1), pi, indep)
            add(9, trigp, cs(1, 1), chi(p[2]), colored(BLANK, p[3]), pi)
            add(10, colored(BLANK, p[3]), pair, colored(BLANK, p[3]), BLANK, pi)
            add(11, colored(a, p[1]), chi(p[2]), colored(b, p[1]), colored(c, p[2]), pi)
            continue

        # items quantified over the closed colored state set
        for psi in _xi(xi, p[3]):
            if is_colored_species(psi) or psi == chi(p[3]):
                add(2, trig, psi, chi(p[2]), psi, pi)
        shift = "helper confirms its color from the permuted 5/8 neighbor"
        for psi in _xi(xi, p[5]):
            add(5, pair, psi, colored(BLANK, p[6]), psi, pi, shift)
        for psi in _xi(xi, p[8]):
            add(5, pair, psi, colored(BLANK, p[9]), psi, pi, shift)
        north_skip = {chi_bits(p[5], p[6], x, 0) for x in (0, 1)}
        north_skip |= {chi_bits(p[4], p[6], 0, x) for x in (0, 1)}
        south_skip = {chi_bits(p[8], p[9], 0, x) for x in (0, 1)}
        south_skip |= {chi_bits(p[7], p[9], x, 0) for x in (0, 1)}
        for bit in (0, 1):
            for psi in _xi(xi, p[6]):
                if psi not in north_skip:
                    add(8, cs(0, bit), psi, cs(1, bit), psi, pi)
            for psi in _xi(xi, p[9]):
                if psi not in south_skip:
                    add(8, cs(bit, 0), psi, cs(bit, 1), psi, pi)
    return out


def emit_state_transitions(
    source: ScrnSystem,
    emitter: Optional[RuleEmitter] = None,
    ) -> List[Reaction]:
    """
    Non-growing bimolecular reactions under every π of their family
    and unimolecular reactions at every color.
    """
    emitter = emitter if emitter is not None else RuleEmitter("orient")
    out = []
    for rxn in source.reactions or []:
        if rxn.is_uni:
            (a,), (b,) = rxn.reactants, rxn.products
            for i in COLORS:
                new = Reaction((colored(a, i),), (colored(b, i),))
                emitter.add(new, "transition", 1, str(i))
                out.append(new)
            continue
        if growing_direction(rxn, source.blank) is not None:
            continue
        (a, b), (c, d) = rxn.reactants, rxn.products
        for pi in TABLES["families"][ROTATION_OF[rxn.direction]]:
            new = _rxn(colored(a, pi(1)), colored(b, pi(2)), colored(c, pi(1)), colored(d, pi(2)))
            emitter.add(new, "transition", 1, pi.name)
            out.append(new)
    return out


def _states(rules: Iterable[Reaction]) -> Set[str]:
    states = set()
    for rxn in rules:
        states.update(rxn.reactants)
        states.update(rxn.products)
    return states


def _check_source(source: ScrnSystem):
    if source.flavor is not Flavor.DIRECTED:
        raise CompileError(f"orientation compiler needs a directed sCRN, got {source.flavor.value}")
    if not source.unit_seeded:
        raise CompileError("orientation compiler needs a unit-seeded source")
    if source.rules.schema:
        raise CompileError("orientation compiler needs an explicit reaction list")
    for name in source.species:
        if name == source.blank:
            continue
        if name == CHI or RESERVED & set(name):
            logger.error(f"species {name!r} clashes with generated names")
            raise CompileError(
                f"species names may not be {CHI!r} or contain any of {''.join(sorted(RESERVED))}")


def compile_dscrn_to_scrn(source: ScrnSystem) -> CompiledSimulation:
    """
    Plain unit-seeded sCRN simulating a unit-seeded directed sCRN up
    to rotation and reflection.
    """
    _check_source(source)
    seed = source.seed
    emitter = RuleEmitter("orient")
    emit_bootstrap(seed, emitter)
    emit_state_transitions(source, emitter)
    growing = []
    for rxn in source.reactions:
        rule = growing_direction(rxn, source.blank)
        if rule is not None:
            growing.append(rule)
            emit_growing(rule, emitter, note=str(rxn))

    # close the colored state set, then emit the quantified items
    plain = [s for s in source.species if s != source.blank]
    states = _states(emitter.rules)
    states |= {colored(s, j) for s in plain for j in COLORS}
    states |= {colored(BLANK, j) for j in COLORS} | {chi(j) for j in COLORS}
    xi: Dict[int, Set[str]] = {}
    for state in states:
        j = color_of(state)
        if j is not None:
            xi.setdefault(j, set()).add(state)
    for rule in growing:
        emit_growing(rule, emitter, xi=xi)

    states = _states(emitter.rules) | {seed, BLANK} | states
    table = {s: represent(s, seed) for s in states if s != BLANK}
    target = ScrnSystem(
        species=states,
        reactions=emitter.rules,
        initial=source.initial(),
        flavor=Flavor.PLAIN,
        unit_seeded=True,
    )
    logger.info(
        f"orient: {len(emitter)} reactions over {len(states)} states "
        f"({len(growing)} growing source reactions)")
    return CompiledSimulation(
        source=source,
        target=target,
        representation=RepresentationMap(table, kind=SQUARE4),
        provenance=emitter.provenance(),
        construction="orient",
        notes=[
            "item 5 confirms helper colors from the permuted 5 and 8 neighbors",
            "item 7 lets the bits of both coloring species range independently",
            "quantified items range over the closed generated state set",
        ],
    )


# ---------------------------------------------------------------------
# coloring checks

def post_bootstrap_configuration(source: ScrnSystem, center: Coord = Coord(0, 0)) -> Configuration:
    """The seed block fully colored with the identity layout, s^5 at center."""
    seed = source.seed
    cells = {}
    for cell in block(center):
        rel = Coord(cell.x - center.x, cell.y - center.y)
        color = identity_color(rel)
        cells[cell] = colored(seed, 5) if color == 5 else colored(BLANK, color)
    return Configuration(cells, blank=BLANK, kind=SQUARE4)


def orientation_of(cfg: Configuration, center: Coord = Coord(0, 0)) -> Optional[np.ndarray]:
    """
    The point symmetry g with color(c) = identity_color(g (c - center))
    for every colored cell, or None when the colors are inconsistent.
    """
    cells = [(c, color_of(s)) for c, s in cfg.items()]
    cells = [(c, j) for c, j in cells if j is not None]
    if not cells:
        return None
    for mat in symmetries(SQUARE4):
        if all(identity_color(transform(c - center, mat)) == j for c, j in cells):
            return mat
    return None


def check_complete_coloring(cfg: Configuration) -> bool:
    """Every colored species has its whole block colored."""
    for cell, state in cfg.items():
        if not is_colored_species(state):
            continue
        for other in block(cell):
            if color_of(cfg[other]) is None:
                return False
    return True


__all__ = [
    "Permutation9", "permutation_tables", "TABLES", "BOOT",
    "emit_bootstrap", "emit_growing", "emit_state_transitions", "growing_direction",
    "compile_dscrn_to_scrn", "post_bootstrap_configuration", "orientation_of",
    "check_complete_coloring", "color_of", "is_colored_species", "represent",
    "identity_color", "colored", "chi", "chi_sub", "chi_p", "chi_bits", "chi_pair",
]
