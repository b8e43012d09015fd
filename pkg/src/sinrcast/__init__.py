"""Simulation of deterministic broadcast and leader election under SINR interference."""

from .geometry import BoxCoord, Point, adjacent, box_of, dilution_class, dist_m, granularity
from .runtime import RoundTrace, Simulator, default_tau, phase_wrap, read_trace, run_protocol, write_trace
from .selectors import build_ssf, elimination_k, verify_ssf
from .sinr import CLASSICAL, DISTURBANCE, OPPORTUNISTIC, Network, SinrParams, comm_graph, eccentricity, resolve_round, sinr

__version__ = "0.1.0"

__all__ = [
    "BoxCoord",
    "CLASSICAL",
    "DISTURBANCE",
    "Network",
    "OPPORTUNISTIC",
    "Point",
    "RoundTrace",
    "Simulator",
    "SinrParams",
    "adjacent",
    "box_of",
    "build_ssf",
    "comm_graph",
    "default_tau",
    "dilution_class",
    "dist_m",
    "eccentricity",
    "elimination_k",
    "granularity",
    "phase_wrap",
    "read_trace",
    "resolve_round",
    "run_protocol",
    "sinr",
    "verify_ssf",
    "write_trace",
]
