import numpy as np
import pytest

from slicesim.engine import ScenarioConfig, UeSpec
from slicesim.pool import init_pool
from slicesim.queueing import AssignmentState, QueueParams
from slicesim.schedulers import SchedulerState
from slicesim.taskgraph import TaskGraph, TaskPriorityList

_VERDICTS = []


def record(number, name, passed, detail=""):
    _VERDICTS.append((number, name, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(_VERDICTS):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {number}. {name}  {detail}")


@pytest.fixture
def record_criterion():
    return record


def make_params(lam, mu=2.0, r=None, bits=0.0, rate=1e6, w1=1.0, w2=1.0):
    lam = np.asarray(lam, dtype=float)
    r = r or 1
    b = np.broadcast_to(np.asarray(bits, dtype=float), (len(lam), r)).copy()
    d = np.broadcast_to(np.asarray(rate, dtype=float), (len(lam), r)).copy()
    return QueueParams(mu, lam, b, d, w1, w2)


def make_state(choices, ranges):
    return AssignmentState.from_choices(choices, tuple(ranges))


def sched_state(tps, n, mu=2.0, alpha=1, tau=0.8):
    prios = TaskPriorityList(tuple((i + 1, tp) for i, tp in enumerate(tps)))
    pool = init_pool(prios, alpha, mu)
    return SchedulerState(pool, n, tau=tau)


def tiny_config(**kw):
    base = dict(
        graph=TaskGraph.chain(["scan", "detect"]),
        ues=[UeSpec(0.3, 1, 1e3), UeSpec(0.4, 2, 1e3), UeSpec(0.2, 1, 1e3)],
        mu=1.0, subtask_work=3, duration=200.0, warmup=20.0, sample_period=5.0, seed=11,
    )
    base.update(kw)
    return ScenarioConfig(**base)
