#!/usr/bin/env python

"""
Readers and writers of model files, trace files and SVG drawings.
"""

from surfsim.formats.modelfile import parse_model, parse_model_text, print_model, write_model
from surfsim.formats.trace import (
    TraceFile, model_hash, read_trace, replay_trace, trace_text, write_trace,
)
from surfsim.formats.render import render_configuration, render_frame, write_svg, svg_text
