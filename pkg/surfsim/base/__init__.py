#!/usr/bin/env python

"""
Lattices, configurations and the model-independent system machinery.
"""
