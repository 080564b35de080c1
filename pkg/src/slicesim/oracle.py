"""Exhaustive minimiser of the slice objective on small static instances."""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, TooLarge
from .queueing import PER_TERM, AssignmentState, QueueParams, loads, objective

MAX_UES = 8
MAX_UPFS = 6


@dataclass
class StaticInstance:
    """A frozen snapshot: every UE must be placed inside its slice's range."""

    params: QueueParams
    ue_slice: tuple[int, ...]
    slice_ranges: tuple[tuple[int, int], ...]
    mode: str = PER_TERM

    def __post_init__(self):
        self.ue_slice = tuple(int(k) for k in self.ue_slice)
        self.slice_ranges = tuple(tuple(rg) for rg in self.slice_ranges)
        if len(self.ue_slice) != self.params.n:
            raise ValueError("one slice per UE required")
        if self.slice_ranges[-1][1] != self.params.r:
            raise ValueError("slice ranges must cover every UPF")

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def r(self) -> int:
        return self.params.r

    def options(self, i: int) -> range:
        lo, hi = self.slice_ranges[self.ue_slice[i] - 1]
        return range(lo, hi + 1)

    def state(self, choices) -> AssignmentState:
        return AssignmentState.from_choices(choices, self.slice_ranges)

    def evaluate(self, choices) -> float:
        return objective(self.state(choices), self.params, self.mode)

    def feasible(self, choices) -> bool:
        # same summation path as the objective, so the two never disagree at theta ~ mu
        return bool(np.all(loads(self.state(choices), self.params) < self.params.mu))


def _search(instance: StaticInstance, first: int | None):
    heads = [first] if first is not None else list(instance.options(0))
    rest = [instance.options(i) for i in range(1, instance.n)]
    best, best_f = None, None
    for head in heads:
        for tail in itertools.product(*rest):
            choices = (head,) + tail
            if not instance.feasible(choices):
                continue
            f = instance.evaluate(choices)
            # product order is UE-major/UPF-minor, so strict < keeps the smallest tuple
            if best is None or f < best_f:
                best, best_f = choices, f
    return best, best_f


def brute_force_min(instance: StaticInstance, max_ues=MAX_UES, max_upfs=MAX_UPFS, workers=1):
    """Global minimum of the objective over every feasible assignment.

    Returns ``(choices, value)`` where ``choices[i]`` is the 1-based UPF of UE
    ``i + 1``. Ties go to the lexicographically smallest choice tuple.
    Parallel runs split on the first UE's choice and merge deterministically.
    """
    if instance.n > max_ues or instance.r > max_upfs:
        raise TooLarge(f"instance n={instance.n}, r={instance.r} exceeds caps ({max_ues}, {max_upfs})")
    if workers > 1:
        heads = list(instance.options(0))
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_search, [instance] * len(heads), heads))
    else:
        parts = [_search(instance, None)]
    found = [p for p in parts if p[0] is not None]
    if not found:
        raise Infeasible("no assignment satisfies the capacity constraint")
    best_f = min(f for _, f in found)
    return min(c for c, f in found if f == best_f), best_f
