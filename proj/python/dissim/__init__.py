"""Simulator for bipartite designed-loss quantum-optical devices."""

from ._dissim import *  # noqa: F401,F403
