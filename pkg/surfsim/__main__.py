#!/usr/bin/env python

"""
Command line interface.

    surfsim simulate MODEL --seed 42 --steps 100 --radius 3 --trace-out run.trace
    surfsim compile MODEL --to dscrn --out target.model --provenance-out prov.tsv
    surfsim render MODEL --trace run.trace --frame 10 --out frame.svg
    surfsim verify SIMULATOR SIMULATED REPMAP --check follows --radius 3 --depth 12
    surfsim print MODEL

Every SurfsimError ends the program with a one-line message on stderr
and exit status 2. verify exits 0 on pass, 1 on fail and 2 when the
bounded search cannot decide.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from loguru import logger

from surfsim import __version__
from surfsim.base import defaults
from surfsim.base.configuration import Configuration
from surfsim.base.lattice import Region
from surfsim.base.system import ModelSystem, simulate
from surfsim.compile import ROUTES, RepresentationMap, compile_system
from surfsim.formats.modelfile import parse_model, print_model, write_model
from surfsim.formats.render import render_configuration, write_svg
from surfsim.formats.trace import read_trace, replay_trace, write_trace
from surfsim.utils import ParseError, SurfsimError, set_loglevel
from surfsim.verify import CHECKS, run_check

TARGETS = sorted({to for _, to in ROUTES})


def _region(system: ModelSystem, radius: Optional[int]) -> Region:
    return Region(defaults.DEFAULT_RADIUS if radius is None else radius, system.kind)


def read_configuration(path, system: ModelSystem) -> Configuration:
    """Reads 'x y state' lines written by Configuration.to_text."""
    cells = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split(maxsplit=2)
        if len(parts) != 3:
            raise ParseError("a configuration line reads 'x y state'", str(path), lineno)
        try:
            coord = (int(parts[0]), int(parts[1]))
        except ValueError:
            raise ParseError("cell coordinates must be integers", str(path), lineno)
        cells[coord] = system.parse_state(parts[2])
    return Configuration(cells, blank=system.blank, kind=system.kind)


def cmd_simulate(args) -> int:
    system = parse_model(args.model)
    region = _region(system, args.radius)
    events, final = simulate(system, region, seed=args.seed, max_steps=args.steps)
    logger.info(f"{len(events)} steps, {len(final)} non-blank cells")
    if args.trace_out:
        write_trace(args.trace_out, system, events, region, args.seed)
    text = final.to_text() + "\n"
    if args.final_out:
        Path(args.final_out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_compile(args) -> int:
    source = parse_model(args.model)
    if args.source_model and args.source_model != source.model:
        raise SurfsimError(f"--from {args.source_model} but the file holds [{source.model}]")
    region = None if args.radius is None else Region(args.radius, source.kind)
    compiled = compile_system(source, args.to, region)
    if args.out:
        write_model(compiled, args.out)
        rep_out = args.rep_out or str(Path(args.out).with_suffix(".rep"))
        compiled.representation.write(rep_out)
    else:
        sys.stdout.write(print_model(compiled))
    if args.provenance_out:
        compiled.write_provenance(args.provenance_out)
    logger.info(f"{compiled}, rules={compiled.rule_count or 'lazy'}")
    return 0


def cmd_render(args) -> int:
    system = parse_model(args.model)
    region = _region(system, args.radius) if args.radius is not None else None
    if args.trace:
        visited = replay_trace(system, read_trace(args.trace))
        if not 0 <= args.frame < len(visited):
            raise SurfsimError(f"frame {args.frame} outside 0..{len(visited) - 1}")
        cfg, title = visited[args.frame], f"step {args.frame}"
    elif args.config:
        cfg, title = read_configuration(args.config, system), Path(args.config).name
    else:
        cfg, title = system.initial(), "initial"
    canvas, _, _ = render_configuration(cfg, region, title=title)
    write_svg(canvas, args.out)
    return 0


def cmd_verify(args) -> int:
    simulator = parse_model(args.simulator)
    simulated = parse_model(args.simulated)
    representation = RepresentationMap.read(args.repmap, simulated.kind)
    region = _region(simulator, args.radius)
    report = run_check(
        args.check, simulator, simulated, representation, region,
        depth=args.depth, modulo_symmetry=args.symmetry, max_states=args.max_states,
        workers=args.workers,
    )
    sys.stdout.write(report.to_text())
    return report.exit_code()


def cmd_print(args) -> int:
    sys.stdout.write(print_model(parse_model(args.model)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surfsim", description="surface CRN simulation, compilation and checking")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level", default="WARNING",
        choices=["TRACE", "DEBUG", "INFO", "WARNING", "ERROR"], help="logging level")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run the seeded random scheduler")
    p_sim.add_argument("model", help="model file")
    p_sim.add_argument("--seed", type=int, default=defaults.DEFAULT_SEED)
    p_sim.add_argument("--steps", type=int, default=defaults.DEFAULT_STEPS)
    p_sim.add_argument("--radius", type=int, default=None)
    p_sim.add_argument("--trace-out", default=None, help="trace file path")
    p_sim.add_argument("--final-out", default=None, help="final configuration path")

    p_comp = sub.add_parser("compile", help="compile a model into another model")
    p_comp.add_argument("model", help="model file")
    p_comp.add_argument("--from", dest="source_model", default=None)
    p_comp.add_argument("--to", required=True, choices=TARGETS)
    p_comp.add_argument("--out", default=None, help="target model file")
    p_comp.add_argument("--rep-out", default=None, help="representation map file")
    p_comp.add_argument("--provenance-out", default=None, help="provenance table file")
    p_comp.add_argument(
        "--radius", type=int, default=None,
        help="region of the lock, particle and invite-accept-particles constructions")

    p_ren = sub.add_parser("render", help="draw a configuration or a trace frame as SVG")
    p_ren.add_argument("model", help="model file")
    p_ren.add_argument("--trace", default=None, help="trace file")
    p_ren.add_argument("--config", default=None, help="configuration file")
    p_ren.add_argument("--frame", type=int, default=0)
    p_ren.add_argument("--radius", type=int, default=None, help="draw the region grid")
    p_ren.add_argument("--out", required=True, help="SVG path")

    p_ver = sub.add_parser("verify", help="bounded simulation checks")
    p_ver.add_argument("simulator", help="simulator model file")
    p_ver.add_argument("simulated", help="simulated model file")
    p_ver.add_argument("repmap", help="representation map file")
    p_ver.add_argument("--check", required=True, choices=CHECKS)
    p_ver.add_argument("--radius", type=int, default=None)
    p_ver.add_argument("--depth", type=int, default=defaults.DEFAULT_DEPTH)
    p_ver.add_argument("--max-states", type=int, default=defaults.MAX_STATES)
    p_ver.add_argument("--workers", type=int, default=None)
    p_ver.add_argument(
        "--symmetry", action="store_true", help="compare images up to rotation and reflection")

    p_pr = sub.add_parser("print", help="print a model file in canonical form")
    p_pr.add_argument("model", help="model file")
    return parser


COMMANDS = {
    "simulate": cmd_simulate,
    "compile": cmd_compile,
    "render": cmd_render,
    "verify": cmd_verify,
    "print": cmd_print,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    set_loglevel(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except SurfsimError as err:
        sys.stderr.write(f"surfsim: error: {err}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
