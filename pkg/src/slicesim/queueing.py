"""Multi-M/M/1 latency model: UPF loads, delays, the slice objective and its constraints.

Units throughout: rates in requests/s, packet lengths in bits, link rates in
bits/s, times in s. UPF ids, UE ids and slice indices are 1-based at the API
surface; arrays are indexed from 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySlice, Unstable, ZeroRate

PER_TERM = "per_term"
PRINTED = "printed"


@dataclass
class QueueParams:
    mu: float
    lam: np.ndarray
    bits: np.ndarray
    rate: np.ndarray
    w1: float = 1.0
    w2: float = 1.0

    def __post_init__(self):
        self.lam = np.asarray(self.lam, dtype=float)
        n = len(self.lam)
        self.bits = np.asarray(self.bits, dtype=float).reshape(n, -1)
        self.rate = np.asarray(self.rate, dtype=float).reshape(n, -1)
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if np.any(self.lam <= 0):
            raise ValueError("every request rate must be positive")
        if np.any(self.bits < 0) or np.any(self.rate <= 0):
            raise ValueError("packet lengths must be >= 0 and link rates > 0")
        if self.w1 < 0 or self.w2 < 0:
            raise ValueError("weights must be non-negative")

    @property
    def n(self) -> int:
        return len(self.lam)

    @property
    def r(self) -> int:
        return self.bits.shape[1]

    def trans_times(self) -> np.ndarray:
        return self.bits / self.rate


@dataclass
class AssignmentState:
    """Binary UE x UPF matrix plus which slice each UPF currently serves."""

    x: np.ndarray
    slice_ranges: tuple[tuple[int, int], ...]
    upf_slice: np.ndarray = field(default=None)
    active: np.ndarray = field(default=None)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.int8)
        r = self.x.shape[1]
        if self.upf_slice is None:
            self.upf_slice = home_slices(self.slice_ranges, r)
        if self.active is None:
            self.active = np.ones(r, dtype=bool)
        self.upf_slice = np.asarray(self.upf_slice, dtype=int)
        self.active = np.asarray(self.active, dtype=bool)

    @classmethod
    def empty(cls, n, slice_ranges):
        r = slice_ranges[-1][1]
        return cls(np.zeros((n, r), dtype=np.int8), tuple(slice_ranges))

    @classmethod
    def from_choices(cls, choices, slice_ranges):
        """Build from a per-UE list of 1-based UPF ids (``None`` = unassigned)."""
        state = cls.empty(len(choices), slice_ranges)
        for i, j in enumerate(choices):
            if j is not None:
                state.x[i, j - 1] = 1
        return state

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def r(self) -> int:
        return self.x.shape[1]

    @property
    def num_slices(self) -> int:
        return len(self.slice_ranges)

    def copy(self) -> "AssignmentState":
        return AssignmentState(self.x.copy(), self.slice_ranges,
                               self.upf_slice.copy(), self.active.copy())

    def members(self, k: int) -> np.ndarray:
        """0-based indices of active UPFs currently serving slice ``k``."""
        return np.flatnonzero(self.active & (self.upf_slice == k))

    def choices(self) -> list:
        out = []
        for row in self.x:
            hits = np.flatnonzero(row)
            out.append(int(hits[0]) + 1 if len(hits) else None)
        return out


def home_slices(slice_ranges, r) -> np.ndarray:
    out = np.zeros(r, dtype=int)
    for k, (lo, hi) in enumerate(slice_ranges, start=1):
        out[lo - 1:hi] = k
    return out


def loads(state: AssignmentState, params: QueueParams) -> np.ndarray:
    return params.lam @ state.x


def upf_load(state: AssignmentState, params: QueueParams, j: int) -> float:
    if not 1 <= j <= state.r:
        raise IndexError(f"UPF {j} outside [1, {state.r}]")
    return float(params.lam @ state.x[:, j - 1])


def slice_avg_load(state, params, k, provisioned=False) -> float:
    """Mean load of slice ``k``.

    By default the mean is over the UPFs in use by the slice. With
    ``provisioned=True`` the sum over the slice's pool range is divided by the
    range size instead.
    """
    theta = loads(state, params)
    if provisioned:
        lo, hi = state.slice_ranges[k - 1]
        return float(theta[lo - 1:hi].sum() / (hi - lo + 1))
    idx = state.members(k)
    if len(idx) == 0:
        raise EmptySlice(f"slice {k} has no active UPF")
    return float(theta[idx].mean())


def queuing_delay(theta: float, mu: float) -> float:
    if theta >= mu:
        raise Unstable(f"load {theta} >= service rate {mu}")
    return theta / (mu * (mu - theta))


def response_time(theta: float, mu: float) -> float:
    if theta >= mu:
        raise Unstable(f"load {theta} >= service rate {mu}")
    return 1.0 / (mu - theta)


def transmission_time(l: float, d: float) -> float:
    if d <= 0:
        raise ZeroRate(f"transmission rate must be positive, got {d}")
    return l / d


def pair_latencies(state, params, k) -> np.ndarray:
    """``1/(mu - theta_j) + l_ij/d_ij`` for every attached pair in slice ``k``."""
    theta = loads(state, params)
    in_slice = state.upf_slice == k
    ue_idx, upf_idx = np.nonzero(state.x[:, in_slice])
    upf_idx = np.flatnonzero(in_slice)[upf_idx]
    th = theta[upf_idx]
    if np.any(th >= params.mu):
        bad = int(upf_idx[np.argmax(th >= params.mu)]) + 1
        raise Unstable(f"UPF {bad} load reaches mu")
    return 1.0 / (params.mu - th) + params.bits[ue_idx, upf_idx] / params.rate[ue_idx, upf_idx]


def _mean_and_spread(terms, n, mode):
    g = terms.sum() / n
    if mode == PER_TERM:
        v = ((terms - g) ** 2).sum() / n
    elif mode == PRINTED:
        v = (terms - g).sum() ** 2 / n
    else:
        raise ValueError(f"unknown variance mode {mode!r}")
    return float(g), float(v)


def slice_latency_mean(state, params, k) -> float:
    return float(pair_latencies(state, params, k).sum() / state.n)


def slice_latency_variance(state, params, k, mode=PER_TERM) -> float:
    """Spread of per-pair latency in slice ``k`` around the slice mean.

    ``per_term`` squares each deviation before summing; ``printed`` squares
    the summed deviation. Both divide by the total UE count.
    """
    return _mean_and_spread(pair_latencies(state, params, k), state.n, mode)[1]


def slice_objective(state, params, k, mode=PER_TERM) -> float:
    terms = pair_latencies(state, params, k)
    if len(terms) == 0:
        return 0.0
    g, v = _mean_and_spread(terms, state.n, mode)
    return params.w1 * g + params.w2 * v


def objective(state, params, mode=PER_TERM) -> float:
    return sum(slice_objective(state, params, k, mode) for k in range(1, state.num_slices + 1))


@dataclass(frozen=True)
class Violation:
    constraint: str
    kind: str
    index: int
    detail: str = ""

    def __str__(self):
        return f"{self.kind}({self.constraint}, {self.index}){': ' + self.detail if self.detail else ''}"


def check_constraints(state, params, pool=None, in_service=None) -> list[Violation]:
    """Capacity, single attachment, binary entries and pool sizing.

    ``in_service`` is an optional boolean mask of UEs that must be attached;
    other UEs may have an all-zero row.
    """
    out = []
    x = state.x
    for i, j in zip(*np.nonzero((x != 0) & (x != 1))):
        out.append(Violation("binary", "BinaryViolation", int(i) + 1, f"x[{i + 1},{j + 1}]={x[i, j]}"))
    rows = x.sum(axis=1)
    for i, s in enumerate(rows):
        must = in_service is not None and in_service[i]
        if s > 1 or (must and s != 1):
            out.append(Violation("attachment", "AttachmentViolation", i + 1, f"row sum {s}"))
    theta = loads(state, params)
    for j in np.flatnonzero(theta >= params.mu):
        out.append(Violation("capacity", "CapacityViolation", int(j) + 1, f"load {theta[j]:.6g} >= mu {params.mu}"))
    if pool is not None and pool.alpha * sum(pool.tps) != len(pool.upfs):
        out.append(Violation("pool_size", "PoolSizingViolation", 0,
                             f"alpha*sum(tp)={pool.alpha * sum(pool.tps)} != r={len(pool.upfs)}"))
    return out
