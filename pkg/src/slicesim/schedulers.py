"""UE-to-UPF placement policies.

``dansm_step`` is the threshold-driven heuristic loop; ``ffd_assign``,
``bfd_assign`` and ``mga_assign`` are the comparison baselines. All four share
the pool mechanics (acquire from the slice's own range, else elevate from a
lower-priority range) and differ only in how they pick among active UPFs.

MGA is a reconstruction: the original is only known as "minimise mean load
plus migration cost", so the candidate set and cost here are our own choice.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .pool import UpfPool
from .queueing import PER_TERM, AssignmentState, QueueParams, slice_objective


class Waiting(NamedTuple):
    ue_id: int
    priority: float
    slice: int


@dataclass
class SchedulerState:
    pool: UpfPool
    n: int
    tau: float = 0.8
    mode: str = PER_TERM
    waitlist: list[Waiting] = field(default_factory=list)
    x: np.ndarray = None
    prev_upf: dict[int, int] = field(default_factory=dict)
    saturation: list[tuple[int, int]] = field(default_factory=list)
    evaluations: int = 0

    def __post_init__(self):
        if self.x is None:
            self.x = np.zeros((self.n, self.pool.r), dtype=np.int8)
        if not 0 < self.tau <= 1:
            raise ValueError("tau must be in (0, 1]")

    def enqueue(self, ue_id: int, priority: float, k: int) -> None:
        self.waitlist = [w for w in self.waitlist if w.ue_id != ue_id]
        self.waitlist.append(Waiting(ue_id, priority, k))
        self.waitlist.sort(key=lambda w: (-w.priority, w.ue_id))

    def snapshot(self) -> AssignmentState:
        """View of the current assignment; shares ``x`` with the scheduler."""
        return AssignmentState(self.x, self.pool.ranges, self.pool.slice_vector(),
                               self.pool.active_vector())

    def attached_to(self, ue_id: int) -> int | None:
        hits = np.flatnonzero(self.x[ue_id - 1])
        return int(hits[0]) + 1 if len(hits) else None

    def commit(self, ue_id: int, upf_id: int) -> None:
        self.x[ue_id - 1, :] = 0
        self.x[ue_id - 1, upf_id - 1] = 1
        self.pool.attach(ue_id, upf_id)
        self.prev_upf[ue_id] = upf_id

    def detach(self, ue_id: int) -> int | None:
        upf_id = self.attached_to(ue_id)
        if upf_id is not None:
            self.x[ue_id - 1, upf_id - 1] = 0
            self.pool.detach(ue_id, upf_id)
        return upf_id


def _load_with(state, params, i, j) -> float:
    """Load of UPF index ``j`` once UE index ``i`` joins, summed as ``check_constraints`` does."""
    col = state.x[:, j].copy()
    col[i] = 1
    return float(params.lam @ col)


def _fits(state, params, i, j) -> bool:
    return _load_with(state, params, i, j) < params.mu


def _pull(state: SchedulerState, k: int):
    return state.pool.acquire(k) or state.pool.elevate(k)


def _run(state: SchedulerState, params: QueueParams, choose) -> list[tuple[int, int]]:
    """Walk the waitlist in priority order, placing each UE via ``choose``."""
    done = []
    remaining = []
    for w in list(state.waitlist):
        upf_id, release = choose(state, params, w)
        if upf_id is None:
            state.saturation.append((w.ue_id, w.slice))
            remaining.append(w)
            continue
        state.commit(w.ue_id, upf_id)
        if release:
            state.pool.release_idle(w.slice)
        done.append((w.ue_id, upf_id))
    state.waitlist = remaining
    return done


def _dansm_choose(state, params, w):
    pool, k, i = state.pool, w.slice, w.ue_id - 1
    lam = params.lam[i]
    cap = state.tau * params.mu
    serving = pool.serving(k)
    theta = params.lam @ state.x
    if serving and theta[[u.id - 1 for u in serving]].mean() <= cap:
        snap = state.snapshot()
        best, best_f = None, None
        for upf in serving:
            j = upf.id - 1
            if not _fits(state, params, i, j):
                continue
            state.x[i, j] = 1
            f = slice_objective(snap, params, k, state.mode)
            state.x[i, j] = 0
            state.evaluations += 1
            if best is None or f < best_f:
                best, best_f = upf, f
        if best is not None:
            new_avg = (theta[[u.id - 1 for u in serving]].sum() + lam) / len(serving)
            if new_avg < cap:
                return best.id, True
    upf = _pull(state, k)
    return (upf.id if upf else None), False


def dansm_step(state: SchedulerState, params: QueueParams) -> list[tuple[int, int]]:
    """One pass of the heuristic over the waitlist.

    Per UE: if the slice's mean active load is within ``tau * mu``, try the
    UPF minimising the slice objective and keep it only if the new mean stays
    under the threshold; otherwise (or on failure) pull a fresh or elevated
    UPF. UEs that cannot be placed stay in the waitlist.
    """
    return _run(state, params, _dansm_choose)


def _first_fit(state, params, w):
    for upf in state.pool.serving(w.slice):
        if _fits(state, params, w.ue_id - 1, upf.id - 1):
            return upf.id, False
    upf = _pull(state, w.slice)
    return (upf.id if upf else None), False


def _best_fit(state, params, w):
    best, best_res = None, None
    for upf in state.pool.serving(w.slice):
        res = params.mu - _load_with(state, params, w.ue_id - 1, upf.id - 1)
        if res > 0 and (best is None or res < best_res):
            best, best_res = upf.id, res
    if best is not None:
        return best, False
    upf = _pull(state, w.slice)
    return (upf.id if upf else None), False


def mga_cost(mean_load: float, moved: bool, params: QueueParams) -> float:
    return params.w1 * mean_load + params.w2 * float(moved)


def mga_candidates(state, params, w) -> list[tuple[int, float]]:
    """``(upf_id, cost)`` for every feasible active UPF plus one fresh UPF from the range."""
    k, lam = w.slice, params.lam[w.ue_id - 1]
    prev = state.prev_upf.get(w.ue_id)
    theta = params.lam @ state.x
    serving = state.pool.serving(k)
    total = theta[[u.id - 1 for u in serving]].sum() if serving else 0.0
    out = []
    for upf in serving:
        if _fits(state, params, w.ue_id - 1, upf.id - 1):
            out.append((upf.id, mga_cost((total + lam) / len(serving), upf.id != prev, params)))
    fresh = next((u for u in state.pool.in_range(k) if not u.active), None)
    if fresh is not None:
        out.append((fresh.id, mga_cost((total + lam) / (len(serving) + 1), fresh.id != prev, params)))
    return out


def _mga_choose(state, params, w):
    cands = mga_candidates(state, params, w)
    if cands:
        upf_id, _ = min(cands, key=lambda c: (c[1], c[0]))
        if not state.pool[upf_id].active:
            state.pool.acquire(w.slice)
        return upf_id, False
    upf = state.pool.elevate(w.slice)
    return (upf.id if upf else None), False


def ffd_assign(state: SchedulerState, params: QueueParams) -> list[tuple[int, int]]:
    return _run(state, params, _first_fit)


def bfd_assign(state: SchedulerState, params: QueueParams) -> list[tuple[int, int]]:
    return _run(state, params, _best_fit)


def mga_assign(state: SchedulerState, params: QueueParams) -> list[tuple[int, int]]:
    return _run(state, params, _mga_choose)


SCHEDULERS = {
    "dansm": dansm_step,
    "mga": mga_assign,
    "ffd": ffd_assign,
    "bfd": bfd_assign,
}
