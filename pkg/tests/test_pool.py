import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slicesim.pool import init_pool
from slicesim.taskgraph import TaskPriorityList


def prios(*tps):
    return TaskPriorityList(tuple((i + 1, tp) for i, tp in enumerate(tps)))


@pytest.mark.parametrize("tps,alpha,r,ranges", [
    ((4, 3, 2, 1), 1, 10, ((1, 4), (5, 7), (8, 9), (10, 10))),
    ((1,), 1, 1, ((1, 1),)),
    ((2, 1), 3, 9, ((1, 6), (7, 9))),
])
def test_init_pool(tps, alpha, r, ranges):
    pool = init_pool(prios(*tps), alpha, 2.0)
    assert pool.r == r
    assert pool.ranges == ranges
    assert all(not u.active for u in pool.upfs)
    assert [u.home_slice for u in pool.in_range(1)] == [1] * (ranges[0][1])


def test_acquire_lowest_id_and_exhaustion():
    pool = init_pool(prios(4, 3, 2, 1), 1, 2.0)
    assert pool.acquire(1).id == 1
    assert [pool.acquire(1).id for _ in range(3)] == [2, 3, 4]
    assert pool.acquire(1) is None
    pool.release_idle(1)
    assert all(not u.active for u in pool.in_range(1))
    for _ in range(4):
        pool.acquire(1)
    for j in (1, 2, 4):
        pool.attach(100 + j, j)
    assert pool.release_idle(1) == [3]
    assert pool.acquire(1).id == 3


def test_elevate_scan_order_and_revert():
    pool = init_pool(prios(4, 3, 2, 1), 1, 2.0)
    for _ in range(4):
        pool.acquire(1)
    upf = pool.elevate(1)
    assert upf.id == 5 and upf.elevated and upf.current_slice == 1 and upf.home_slice == 2
    pool.attach(7, 5)
    pool.detach(7, 5)
    assert 5 in pool.release_idle(1)
    assert not pool[5].active and not pool[5].elevated
    assert pool.acquire(2).id == 5


def test_elevate_saturation():
    pool = init_pool(prios(2, 1), 1, 2.0)
    for _ in range(3):
        assert pool.acquire(1) or pool.elevate(1)
    assert pool.elevate(1) is None
    assert pool.acquire(2) is None
    assert pool.elevate(2) is None


def test_lowest_slice_cannot_elevate():
    pool = init_pool(prios(2, 1), 1, 2.0)
    pool.acquire(2)
    assert pool.elevate(2) is None


def test_release_two_idle_ascending():
    pool = init_pool(prios(3), 1, 2.0)
    for _ in range(3):
        pool.acquire(1)
    pool.attach(1, 2)
    assert pool.release_idle(1) == [1, 3]
    assert pool.release_idle(1) == []


ops = st.lists(st.tuples(st.sampled_from(["acq", "elev", "attach", "detach", "rel"]),
                         st.integers(1, 4), st.integers(1, 10)), max_size=60)


@settings(max_examples=200)
@given(ops)
def test_pool_fuzz_invariants(sequence):
    pool = init_pool(prios(4, 3, 2, 1), 1, 2.0)
    for op, k, j in sequence:
        if op == "acq":
            pool.acquire(k)
        elif op == "elev":
            pool.elevate(k)
        elif op == "attach" and pool[j].active:
            pool.attach(j * 10 + k, j)
        elif op == "detach":
            pool.detach(j * 10 + k, j)
        elif op == "rel":
            pool.release_idle(k)
        idle = sum(not u.active for u in pool.upfs)
        home = sum(u.active and not u.elevated for u in pool.upfs)
        elevated = sum(u.elevated for u in pool.upfs)
        assert idle + home + elevated == pool.r
        for u in pool.upfs:
            assert u.elevated == (u.current_slice is not None and u.current_slice != u.home_slice)
            if u.elevated:
                assert u.current_slice < u.home_slice


@given(ops)
def test_pool_deterministic(sequence):
    def replay():
        pool = init_pool(prios(4, 3, 2, 1), 1, 2.0)
        out = []
        for op, k, _ in sequence:
            if op == "acq":
                out.append(getattr(pool.acquire(k), "id", None))
            elif op == "elev":
                out.append(getattr(pool.elevate(k), "id", None))
            elif op == "rel":
                out.append(tuple(pool.release_idle(k)))
        return out
    assert replay() == replay()
