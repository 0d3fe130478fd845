#!/usr/bin/env python

"""
`surfsim` simulates surface chemical reaction networks and the models
they can simulate (aTAM, tile automata, asynchronous cellular automata
and amoebot particle systems), compiles systems of one model into
another and checks the result with bounded refinement searches.
"""

__version__ = "0.1.0"

from surfsim.base.lattice import Coord, Region, SQUARE4, TRIANGULAR6
from surfsim.base.configuration import Configuration, canonicalize
from surfsim.base.system import reachable_set, terminal_set, run_trace, simulate, replay
from surfsim.models import (
    Flavor, Reaction, ScrnSystem, AtamSystem, TaSystem, Tile, TaRule,
    CaRule, CaSystem, AmoebotSystem,
)
from surfsim.compile import compile_system, RepresentationMap
from surfsim.verify import check_follows, check_models, check_equiv_productions
from surfsim.formats import parse_model, print_model

from surfsim.utils import set_loglevel
set_loglevel("INFO")
