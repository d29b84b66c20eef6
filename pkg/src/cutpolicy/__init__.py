"""Graph partitioning with a learned node-move policy."""

from .graph import Graph, Partitioning, load_edge_list
from .objectives import CutReport, ObjectiveKind, evaluate, evaluate_all

__all__ = ["Graph", "Partitioning", "load_edge_list", "CutReport", "ObjectiveKind",
           "evaluate", "evaluate_all"]
__version__ = "0.1.0"
