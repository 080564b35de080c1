"""Provisioned UPF pool split into per-slice ranges sized by task priority."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .taskgraph import TaskPriorityList


@dataclass
class Upf:
    id: int
    mu: float
    home_slice: int
    current_slice: int | None = None
    attached_ues: set[int] = field(default_factory=set)

    @property
    def active(self) -> bool:
        return self.current_slice is not None

    @property
    def elevated(self) -> bool:
        return self.current_slice is not None and self.current_slice != self.home_slice


@dataclass
class UpfPool:
    upfs: list[Upf]
    alpha: int
    tps: tuple[int, ...]
    ranges: tuple[tuple[int, int], ...]

    @property
    def r(self) -> int:
        return len(self.upfs)

    @property
    def num_slices(self) -> int:
        return len(self.ranges)

    def __getitem__(self, upf_id: int) -> Upf:
        return self.upfs[upf_id - 1]

    def in_range(self, k: int) -> list[Upf]:
        lo, hi = self.ranges[k - 1]
        return self.upfs[lo - 1:hi]

    def serving(self, k: int) -> list[Upf]:
        """Active UPFs currently assigned to slice ``k``, ascending id."""
        return [u for u in self.upfs if u.current_slice == k]

    def acquire(self, k: int) -> Upf | None:
        """Activate the lowest-id idle UPF from slice ``k``'s own range."""
        for upf in self.in_range(k):
            if not upf.active:
                upf.current_slice = k
                return upf
        return None

    def elevate(self, k: int) -> Upf | None:
        """Borrow the lowest-id idle UPF from the nearest lower-priority range."""
        for lower in range(k + 1, self.num_slices + 1):
            for upf in self.in_range(lower):
                if not upf.active:
                    upf.current_slice = k
                    return upf
        return None

    def release_idle(self, k: int) -> list[int]:
        released = []
        for upf in self.serving(k):
            if not upf.attached_ues:
                upf.current_slice = None
                released.append(upf.id)
        return released

    def release_all_idle(self) -> list[int]:
        out = []
        for k in range(1, self.num_slices + 1):
            out.extend(self.release_idle(k))
        return sorted(out)

    def attach(self, ue_id: int, upf_id: int) -> None:
        upf = self[upf_id]
        if not upf.active:
            raise ValueError(f"UPF {upf_id} is idle")
        upf.attached_ues.add(ue_id)

    def detach(self, ue_id: int, upf_id: int) -> None:
        self[upf_id].attached_ues.discard(ue_id)

    def counts(self, k: int) -> dict[str, int]:
        """Active/elevated counts for slice ``k`` and idle count of its home range."""
        serving = self.serving(k)
        return {
            "active": len(serving),
            "elevated": sum(u.elevated for u in serving),
            "idle": sum(not u.active for u in self.in_range(k)),
        }

    def slice_vector(self) -> np.ndarray:
        """Slice each UPF is serving, falling back to its home slice when idle."""
        return np.array([u.current_slice or u.home_slice for u in self.upfs], dtype=int)

    def active_vector(self) -> np.ndarray:
        return np.array([u.active for u in self.upfs], dtype=bool)


def slice_ranges(tps, alpha) -> tuple[tuple[int, int], ...]:
    out, hi = [], 0
    for tp in tps:
        lo, hi = hi + 1, hi + alpha * tp
        out.append((lo, hi))
    return tuple(out)


def init_pool(priorities: TaskPriorityList, alpha: int, mu: float) -> UpfPool:
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    tps = tuple(tp for _, tp in priorities)
    ranges = slice_ranges(tps, alpha)
    upfs = [Upf(j, mu, k) for k, (lo, hi) in enumerate(ranges, start=1) for j in range(lo, hi + 1)]
    return UpfPool(upfs, alpha, tps, ranges)
