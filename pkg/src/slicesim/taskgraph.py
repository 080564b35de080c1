"""Workflow DAG and the task / UE priorities derived from it."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import ConfigError, CyclicGraph

#: Clamp for the 1/arrival_time term, in seconds.
TICK = 1.0


@dataclass(frozen=True)
class TaskGraph:
    tasks: tuple[tuple[int, str], ...]
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        ids = [t for t, _ in self.tasks]
        if sorted(ids) != list(range(1, len(ids) + 1)):
            raise ConfigError(f"task ids must be unique and contiguous from 1, got {ids}")
        known = set(ids)
        for u, v in self.edges:
            if u not in known or v not in known:
                raise ConfigError(f"edge ({u}, {v}) references an unknown task")

    @classmethod
    def chain(cls, names):
        tasks = tuple((i + 1, name) for i, name in enumerate(names))
        edges = tuple((i, i + 1) for i in range(1, len(names)))
        return cls(tasks, edges)

    @property
    def task_ids(self) -> list[int]:
        return [t for t, _ in self.tasks]

    def name(self, task_id: int) -> str:
        return dict(self.tasks)[task_id]


@dataclass(frozen=True)
class TaskPriorityList:
    entries: tuple[tuple[int, int], ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def tp(self, task_id: int) -> int:
        for t, p in self.entries:
            if t == task_id:
                return p
        raise KeyError(task_id)

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)


def topo_sort(graph: TaskGraph) -> list[tuple[int, int]]:
    """Kahn's algorithm, returning ``(task_id, depth)`` sorted by depth then id.

    ``depth`` is the length of the longest dependency path ending at a task.
    """
    succ: dict[int, list[int]] = {t: [] for t in graph.task_ids}
    indeg = {t: 0 for t in graph.task_ids}
    for u, v in graph.edges:
        succ[u].append(v)
        indeg[v] += 1

    depth = {t: 0 for t in graph.task_ids}
    ready = deque(sorted(t for t, d in indeg.items() if d == 0))
    seen = 0
    while ready:
        u = ready.popleft()
        seen += 1
        for v in sorted(succ[u]):
            depth[v] = max(depth[v], depth[u] + 1)
            indeg[v] -= 1
            if indeg[v] == 0:
                ready.append(v)
    if seen != len(depth):
        raise CyclicGraph(t for t, d in indeg.items() if d > 0)
    return sorted(depth.items(), key=lambda item: (item[1], item[0]))


def compute_task_priorities(graph: TaskGraph) -> TaskPriorityList:
    """Earlier tasks rank higher: ``tp = max_depth + 1 - depth``."""
    order = topo_sort(graph)
    top = max(d for _, d in order)
    return TaskPriorityList(tuple((t, top + 1 - d) for t, d in order))


def compute_ue_priority(tp: int, arrival_time: float) -> float:
    return tp + 1.0 / max(arrival_time, TICK)


def workflow_order(graph: TaskGraph) -> list[int]:
    """The sequence in which a single UE walks through the workflow."""
    return [t for t, _ in topo_sort(graph)]
