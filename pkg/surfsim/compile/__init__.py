#!/usr/bin/env python

"""
Compilers between the model families. Each returns a
CompiledSimulation: the target system, the representation map R and
a provenance table naming the protocol item behind every rule.
"""

from typing import Optional

from loguru import logger

from surfsim.base.lattice import Region
from surfsim.base.system import ModelSystem
from surfsim.compile.base import (
    CompiledSimulation, DECODERS, RepresentationMap, RuleEmitter, register_decoder,
)
from surfsim.compile.orient import compile_dscrn_to_scrn
from surfsim.compile.tiles import compile_atam_to_dscrn, compile_asta_to_dscrn, compile_scrn_to_ta
from surfsim.compile.cellular import compile_ca_to_dscrn, compile_dscrn_to_ca
from surfsim.compile.particles import compile_amoebot_to_cscrn, compile_cscrn_to_amoebot
from surfsim.utils import CompileError

# (source model, target model) -> (compiler, accepts a region)
ROUTES = {
    ("dscrn", "scrn"): (compile_dscrn_to_scrn, False),
    ("atam", "dscrn"): (compile_atam_to_dscrn, False),
    ("ta", "dscrn"): (compile_asta_to_dscrn, False),
    ("scrn", "ta"): (compile_scrn_to_ta, False),
    ("dscrn", "ta"): (compile_scrn_to_ta, False),
    ("ca", "dscrn"): (compile_ca_to_dscrn, True),
    ("dscrn", "ca"): (compile_dscrn_to_ca, False),
    ("amoebot", "cscrn"): (compile_amoebot_to_cscrn, True),
    ("cscrn", "amoebot"): (compile_cscrn_to_amoebot, True),
}

# constructions that can be rebuilt from their source model
CONSTRUCTIONS = {
    "orient": ("dscrn", "scrn"),
    "tiles": ("atam", "dscrn"),
    "automata": ("ta", "dscrn"),
    "tile-automata": ("scrn", "ta"),
    "cellular-lock": ("ca", "dscrn"),
    "invite-accept": ("dscrn", "ca"),
    "particles": ("amoebot", "cscrn"),
    "invite-accept-particles": ("cscrn", "amoebot"),
}


def compile_system(
    source: ModelSystem,
    to: str,
    region: Optional[Region] = None,
    ) -> CompiledSimulation:
    """Dispatches to the compiler from source's model to `to`."""
    key = (source.model, to)
    if key not in ROUTES:
        options = sorted(f"{a}->{b}" for a, b in ROUTES)
        logger.error(f"no compiler for {source.model}->{to}, options are {options}")
        raise CompileError(f"cannot compile {source.model} into {to}")
    func, takes_region = ROUTES[key]
    if takes_region:
        return func(source, region)
    if region is not None:
        logger.debug(f"{func.__name__} ignores the region")
    return func(source)


__all__ = [
    "CompiledSimulation", "RepresentationMap", "RuleEmitter", "DECODERS",
    "register_decoder", "compile_system", "ROUTES", "CONSTRUCTIONS",
    "compile_dscrn_to_scrn", "compile_atam_to_dscrn", "compile_asta_to_dscrn",
    "compile_scrn_to_ta", "compile_ca_to_dscrn", "compile_dscrn_to_ca",
    "compile_amoebot_to_cscrn", "compile_cscrn_to_amoebot",
]
