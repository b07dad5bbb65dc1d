from __future__ import annotations

from collections import deque
from concurrent.futures import Future
from functools import partial
from typing import Any, Callable, Deque, Iterable, Iterator, Optional, Tuple

import anyio
import anyio.to_process
from anyio.from_thread import start_blocking_portal

from .errors import TopoError

JobResult = Tuple[int, Any, Optional[Exception]]

# in-flight items per worker
WINDOW_PER_JOB = 2


def _sequential(func: Callable[[Any], Any], items: Iterable[Any]) -> Iterator[JobResult]:
    for i, item in enumerate(items):
        try:
            yield i, func(item), None
        except TopoError as exc:
            yield i, None, exc


def run_ordered(func: Callable[[Any], Any], items: Iterable[Any], jobs: int = 1) -> Iterator[JobResult]:
    """Run ``func`` over ``items`` and yield ``(index, result, error)`` in index order.

    With ``jobs <= 1`` items run sequentially in this process. Otherwise each
    item runs in a worker process, at most ``jobs`` at a time. ``items`` is
    consumed lazily and at most ``jobs * WINDOW_PER_JOB`` items are in flight;
    finished results wait in order until every earlier one has been yielded,
    so a single caller-side writer stays deterministic. ``func`` must be a
    picklable module-level function. Engine errors are returned per item;
    anything else propagates.
    """
    if jobs <= 1:
        yield from _sequential(func, items)
        return

    window = int(jobs) * WINDOW_PER_JOB
    source = enumerate(items)
    with start_blocking_portal() as portal:
        limiter = portal.call(anyio.CapacityLimiter, int(jobs))
        submit = partial(anyio.to_process.run_sync, limiter=limiter)
        pending: Deque[Tuple[int, Future]] = deque()

        def _fill() -> None:
            while len(pending) < window:
                nxt = next(source, None)
                if nxt is None:
                    return
                i, item = nxt
                pending.append((i, portal.start_task_soon(submit, func, item)))

        _fill()
        while pending:
            i, future = pending.popleft()
            try:
                result: JobResult = (i, future.result(), None)
            except TopoError as exc:
                result = (i, None, exc)
            _fill()
            yield result
