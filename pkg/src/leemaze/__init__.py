"""Maze solvers built from physical gradients, each checked against the Lee algorithm."""
from .errors import *  # noqa: F401,F403
from .maze import Braided, Coord, Maze, Perfect, generate_maze, is_connected, neighbors, parse_maze
from .oracle import DistanceField, ParentMap, enumerate_simple_paths, lee_label, lee_trace, spanning_tree
from .trace import AscendToMax, DescendToMin, TraceMode, follow_pointers, greedy_trace

__version__ = "0.1.0"

__all__ = [
    "Braided",
    "Coord",
    "Maze",
    "Perfect",
    "generate_maze",
    "is_connected",
    "neighbors",
    "parse_maze",
    "DistanceField",
    "ParentMap",
    "enumerate_simple_paths",
    "lee_label",
    "lee_trace",
    "spanning_tree",
    "AscendToMax",
    "DescendToMin",
    "TraceMode",
    "follow_pointers",
    "greedy_trace",
]
