"""Test concurrent execution helpers."""

import asyncio
import threading
import time

import pytest

from src.utils import gather_with_progress, rate_limited, run_in_threads


@pytest.mark.asyncio
async def test_gather_keeps_input_order():
    """Test that results come back in input order, not completion order."""

    async def _sleepy(value: int) -> int:
        await asyncio.sleep(0.01 * (3 - value))
        return value

    results = await gather_with_progress(
        [_sleepy(i) for i in range(4)], show_progress=False
    )
    assert list(results) == [0, 1, 2, 3]


@pytest.mark.asyncio
async def test_rate_limited_bounds_concurrency():
    """Test that the semaphore caps concurrent coroutines."""
    semaphore = asyncio.Semaphore(2)
    active, peak = 0, 0

    async def _job() -> None:
        nonlocal active, peak
        active += 1
        peak = max(peak, active)
        await asyncio.sleep(0.01)
        active -= 1

    await asyncio.gather(*(rate_limited(_job, semaphore) for _ in range(6)))
    assert peak == 2


def test_run_in_threads_order_and_workers():
    """Test blocking callables on threads with ordered results."""
    lock = threading.Lock()
    active, peak = [0], [0]

    def _job(value: int) -> int:
        with lock:
            active[0] += 1
            peak[0] = max(peak[0], active[0])
        time.sleep(0.02 * (5 - value))
        with lock:
            active[0] -= 1
        return value * value

    fns = [lambda value=value: _job(value) for value in range(5)]
    results = asyncio.run(run_in_threads(fns, max_workers=2, show_progress=False))
    assert list(results) == [0, 1, 4, 9, 16]
    assert peak[0] <= 2


def test_run_in_threads_propagates_errors():
    """Test that an exception in a worker reaches the caller."""

    def _boom() -> None:
        raise RuntimeError("worker failed")

    with pytest.raises(RuntimeError, match="worker failed"):
        asyncio.run(run_in_threads([_boom], show_progress=False))
