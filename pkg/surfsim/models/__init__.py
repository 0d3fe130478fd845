#!/usr/bin/env python

"""
The five model families: surface CRNs (plain, directed, clockwise),
aTAM and tile automata, asynchronous cellular automata and amoebot
particle systems.
"""

from surfsim.models.scrn import Flavor, Reaction, ScrnSystem
from surfsim.models.assembly import AtamSystem, TaSystem, Tile, TaRule
from surfsim.models.ca import CaRule, CaSystem
from surfsim.models.amoebot import AmoebotSystem, Occupant, TransitionEntry, Turn, Movement
