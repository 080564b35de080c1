"""Deterministic discrete-event simulation of UEs sending Poisson traffic to UPF queues.

Each in-service UE emits requests with exponential gaps at its rate; a request
spends ``l/d`` seconds in transmission, then waits in the FIFO queue of the UPF
the UE was attached to when it was sent, and is served in exponential time at
rate ``mu``. A subtask finishes once ``work`` of its requests have been served.
A periodic poll frees finished UEs, advances them to their next workflow task
and hands the waitlist to the scheduler.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, UnstableScenario
from .pool import UpfPool, init_pool
from .queueing import PER_TERM, QueueParams, check_constraints, loads
from .report import MetricsSample, SimReport, TaskStats
from .schedulers import SCHEDULERS, SchedulerState
from .taskgraph import TaskGraph, compute_task_priorities, compute_ue_priority, workflow_order

GEN, ARRIVE, DEPART, POLL, SAMPLE = range(5)


@dataclass
class UeSpec:
    lam: float
    initial_task: int | None = None
    packet_bits: float = 0.0


@dataclass
class ScenarioConfig:
    graph: TaskGraph
    ues: list[UeSpec]
    mu: float
    alpha: int = 1
    tau: float = 0.8
    w1: float = 1.0
    w2: float = 1.0
    link_rate: float | list[float] = 1e8
    pairs: dict[tuple[int, int], tuple[float, float]] = field(default_factory=dict)
    subtask_work: int = 10
    task_work: dict[int, int] = field(default_factory=dict)
    duration: float = 1500.0
    warmup: float = 300.0
    sample_period: float = 10.0
    poll_period: float = 1.0
    seed: int = 0
    variance: str = PER_TERM
    name: str = "scenario"

    def __post_init__(self):
        self.priorities = compute_task_priorities(self.graph)
        self.workflow = workflow_order(self.graph)
        self.r = self.alpha * sum(tp for _, tp in self.priorities)
        if self.mu <= 0:
            raise ConfigError("must be positive", "mu")
        if not self.ues:
            raise ConfigError("at least one UE is required", "ues")
        for i, ue in enumerate(self.ues):
            if ue.lam <= 0:
                raise ConfigError("must be positive", f"ues[{i}].lambda")
            if ue.lam >= self.mu:
                raise ConfigError(f"rate {ue.lam} cannot fit on any UPF (mu={self.mu})", f"ues[{i}].lambda")
            if ue.initial_task is not None and ue.initial_task not in self.workflow:
                raise ConfigError(f"unknown task {ue.initial_task}", f"ues[{i}].initial_task")
        total = sum(ue.lam for ue in self.ues)
        if total >= self.r * self.mu:
            raise UnstableScenario(f"total request rate {total} >= r*mu = {self.r * self.mu}")
        if self.duration < 0 or self.warmup < 0:
            raise ConfigError("duration and warmup must be non-negative", "duration")
        if self.duration > 0 and not self.duration > self.warmup:
            raise ConfigError(f"duration {self.duration} must exceed warmup {self.warmup}", "duration")
        if self.sample_period <= 0 or self.poll_period <= 0:
            raise ConfigError("periods must be positive", "sample_period")
        if self.subtask_work < 1 or any(w < 1 for w in self.task_work.values()):
            raise ConfigError("subtask work must be >= 1 request", "subtask_work")
        rates = self.link_rate if isinstance(self.link_rate, list) else [self.link_rate] * self.r
        if len(rates) != self.r:
            raise ConfigError(f"expected {self.r} link rates, got {len(rates)}", "link_rate")
        self.link_rate = rates

    @property
    def n(self) -> int:
        return len(self.ues)

    def slice_of(self, task_id: int) -> int:
        """Slices are numbered in priority-list order, highest priority first."""
        return [t for t, _ in self.priorities].index(task_id) + 1

    def work(self, task_id: int) -> int:
        return self.task_work.get(task_id, self.subtask_work)

    def queue_params(self) -> QueueParams:
        bits = np.array([[ue.packet_bits] * self.r for ue in self.ues], dtype=float)
        rate = np.array([self.link_rate] * self.n, dtype=float)
        for (i, j), (l, d) in self.pairs.items():
            bits[i - 1, j - 1] = l
            rate[i - 1, j - 1] = d
        lam = [ue.lam for ue in self.ues]
        return QueueParams(self.mu, lam, bits, rate, self.w1, self.w2)


class _Ue:
    __slots__ = ("id", "lam", "state", "arrival_time", "current_task", "pos",
                 "generated", "serviced", "completed_subtasks", "rng")

    def __init__(self, uid, lam, pos, task, rng):
        self.id = uid
        self.lam = lam
        self.state = "Free"
        self.arrival_time = 0.0
        self.pos = pos
        self.current_task = task
        self.generated = 0
        self.serviced = 0
        self.completed_subtasks = 0
        self.rng = rng

    @property
    def buffer(self) -> int:
        return self.generated - self.serviced


class _Server:
    __slots__ = ("queue", "busy_since", "rng")

    def __init__(self, rng):
        self.queue = deque()
        self.busy_since = None
        self.rng = rng


class World:
    """Mutable simulation state; one instance per run."""

    def __init__(self, config: ScenarioConfig, algo: str, seed: int | None = None):
        if algo not in SCHEDULERS:
            raise ConfigError(f"unknown algorithm {algo!r}", "algo")
        self.config = config
        self.algo = algo
        self.seed = config.seed if seed is None else seed
        self.params = config.queue_params()
        self.trans = self.params.trans_times()
        self.pool: UpfPool = init_pool(config.priorities, config.alpha, config.mu)
        self.sched = SchedulerState(self.pool, config.n, tau=config.tau, mode=config.variance)
        self.step = SCHEDULERS[algo]
        self.tp = config.priorities.as_dict()

        # one independent stream per UE and per UPF, so traffic does not depend on the scheduler
        streams = np.random.SeedSequence(self.seed).spawn(config.n + config.r)
        self.ues = []
        for i, spec in enumerate(config.ues):
            pos = config.workflow.index(spec.initial_task) if spec.initial_task else 0
            rng = np.random.default_rng(streams[i])
            self.ues.append(_Ue(i + 1, spec.lam, pos, config.workflow[pos], rng))
        self.servers = [_Server(np.random.default_rng(s)) for s in streams[config.n:]]

        self.now = 0.0
        self._heap = []
        self._seq = 0
        self.generated = 0
        self.serviced = 0
        self.in_flight = 0
        self.completed = 0
        self.completions = []
        self.samples: list[MetricsSample] = []
        self.task_stats = {t: TaskStats() for t in config.workflow}
        self.violations = 0

    def _push(self, t, kind, a=None, b=None):
        heapq.heappush(self._heap, (t, self._seq, kind, a, b))
        self._seq += 1

    # -- traffic ---------------------------------------------------------

    def _start_subtask(self, ue: _Ue) -> None:
        ue.state = "Service"
        ue.generated = ue.serviced = 0
        self._push(self.now + ue.rng.exponential(1.0 / ue.lam), GEN, ue.id)

    def _on_gen(self, uid):
        ue = self.ues[uid - 1]
        upf_id = self.sched.attached_to(uid)
        ue.generated += 1
        self.generated += 1
        self.in_flight += 1
        delay = float(self.trans[uid - 1, upf_id - 1])
        self._push(self.now + delay, ARRIVE, upf_id, (uid, ue.current_task, self.now, self.now + delay))
        if ue.generated < self.config.work(ue.current_task):
            self._push(self.now + ue.rng.exponential(1.0 / ue.lam), GEN, uid)

    def _on_arrive(self, upf_id, req):
        self.in_flight -= 1
        srv = self.servers[upf_id - 1]
        srv.queue.append(req)
        if srv.busy_since is None:
            self._begin_service(upf_id)

    def _begin_service(self, upf_id):
        srv = self.servers[upf_id - 1]
        srv.busy_since = self.now
        self._push(self.now + srv.rng.exponential(1.0 / self.config.mu), DEPART, upf_id)

    def _on_depart(self, upf_id):
        srv = self.servers[upf_id - 1]
        uid, task, sent, arrived = srv.queue.popleft()
        self.serviced += 1
        if self.now > self.config.warmup or self.config.warmup == 0:
            self.task_stats[task].add(self.now - sent, srv.busy_since - arrived,
                                      self.now - srv.busy_since, arrived - sent)
        srv.busy_since = None
        if srv.queue:
            self._begin_service(upf_id)
        ue = self.ues[uid - 1]
        ue.serviced += 1
        if ue.serviced == self.config.work(task):
            ue.completed_subtasks += 1
            self.completed += 1
            self.completions.append((self.now, uid, task))

    # -- control loop ----------------------------------------------------

    def poll_ue_status(self) -> None:
        """Free every UE whose subtask has drained and queue it for its next task."""
        cfg = self.config
        for ue in self.ues:
            if ue.state == "Service" and ue.buffer == 0 and ue.generated == cfg.work(ue.current_task):
                self.sched.detach(ue.id)
                ue.state = "Free"
                ue.arrival_time = self.now
                ue.pos = (ue.pos + 1) % len(cfg.workflow)
                ue.current_task = cfg.workflow[ue.pos]
            elif ue.state != "Free" or any(w.ue_id == ue.id for w in self.sched.waitlist):
                continue
            prio = compute_ue_priority(self.tp[ue.current_task], ue.arrival_time)
            self.sched.enqueue(ue.id, prio, cfg.slice_of(ue.current_task))

    def _on_poll(self):
        self.poll_ue_status()
        if self.sched.waitlist:
            for uid, _ in self.step(self.sched, self.params):
                self._start_subtask(self.ues[uid - 1])
        self.pool.release_all_idle()
        self._push(self.now + self.config.poll_period, POLL)

    def in_service_mask(self) -> np.ndarray:
        return np.array([ue.state == "Service" for ue in self.ues])

    def sample_metrics(self, t: float) -> MetricsSample:
        theta = loads(self.sched.snapshot(), self.params)
        in_use = [u.id for u in self.pool.upfs if u.active]
        vals = np.array([theta[j - 1] for j in in_use])
        bad = check_constraints(self.sched.snapshot(), self.params, self.pool, self.in_service_mask())
        self.violations += len(bad)
        queued = sum(len(s.queue) for s in self.servers)
        return MetricsSample(
            t=t,
            loads={j: float(theta[j - 1]) for j in in_use},
            mean=float(vals.mean()) if len(vals) else None,
            std=float(vals.std()) if len(vals) else None,
            completed=self.completed,
            generated=self.generated,
            serviced=self.serviced,
            queued=queued,
            in_flight=self.in_flight,
            violations=[str(v) for v in bad],
            pool={k: self.pool.counts(k) for k in range(1, self.pool.num_slices + 1)},
        )

    def run(self) -> SimReport:
        cfg = self.config
        if cfg.duration > 0:
            self._push(0.0, POLL)
            self._push(cfg.sample_period, SAMPLE)
        while self._heap:
            t, _, kind, a, b = self._heap[0]
            if t > cfg.duration:
                break
            heapq.heappop(self._heap)
            self.now = t
            if kind == GEN:
                self._on_gen(a)
            elif kind == ARRIVE:
                self._on_arrive(a, b)
            elif kind == DEPART:
                self._on_depart(a)
            elif kind == POLL:
                self._on_poll()
            else:
                self.samples.append(self.sample_metrics(t))
                # sample times are m * period to avoid accumulated float drift
                nxt = (len(self.samples) + 1) * cfg.sample_period
                self._push(nxt, SAMPLE)
        return self._report()

    def _report(self) -> SimReport:
        cfg = self.config
        sat = {}
        for _, k in self.sched.saturation:
            sat[k] = sat.get(k, 0) + 1
        return SimReport(
            algo=self.algo,
            seed=self.seed,
            scenario=cfg.name,
            warmup=cfg.warmup,
            samples=self.samples,
            tasks={t: cfg.graph.name(t) for t in cfg.workflow},
            task_stats=self.task_stats,
            completions=[(round(t, 9), uid, task) for t, uid, task in self.completions],
            saturation=sat,
            per_ue_completed={ue.id: ue.completed_subtasks for ue in self.ues},
            evaluations=self.sched.evaluations,
        )


def run(config: ScenarioConfig, algo: str, seed: int | None = None) -> SimReport:
    return World(config, algo, seed).run()
