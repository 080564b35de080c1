"""Priority-driven 5G network slice management: scheduling heuristics and simulation."""
from .engine import ScenarioConfig, UeSpec, run
from .errors import (
    ConfigError,
    CyclicGraph,
    EmptySlice,
    Infeasible,
    TooLarge,
    Unstable,
    UnstableScenario,
    ZeroRate,
)
from .pool import UpfPool, init_pool
from .scenario import load_scenario
from .taskgraph import TaskGraph, compute_task_priorities, compute_ue_priority, topo_sort

__all__ = [
    "ConfigError", "CyclicGraph", "EmptySlice", "Infeasible", "ScenarioConfig", "TaskGraph",
    "TooLarge", "UeSpec", "Unstable", "UnstableScenario", "UpfPool", "ZeroRate",
    "compute_task_priorities", "compute_ue_priority", "init_pool", "load_scenario", "run",
    "topo_sort",
]
