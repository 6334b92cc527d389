"""Grid/block/thread execution of an element-wise kernel on a worker pool.

A launch has ``blocks * threads_per_block`` logical lanes.  Lane ``i``
applies the kernel to ``input[i]`` when ``i < len(input)`` and does nothing
otherwise.  Lanes are multiplexed onto ``workers`` physical workers in
contiguous block ranges; results are written back by index, so output never
depends on scheduling.

Kernels must be top-level functions of ``(element, context)`` so they can be
shipped to worker processes.
"""

from __future__ import annotations

import atexit
import os
import time
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .errors import DomainError, KernelError

MAX_THREADS_PER_BLOCK = 1024
BACKENDS = ("process", "thread")

Kernel = Callable[[int, Any], int]


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


@dataclass(frozen=True)
class LaunchConfig:
    """Grid shape plus the number of physical workers.

    ``grid_stride`` lets lane ``i`` also cover ``i + lanes``, ``i + 2*lanes``
    and so on.  It is off by default, so an undersized grid is an error.
    """

    blocks: int
    threads_per_block: int
    workers: int = field(default_factory=default_workers)
    grid_stride: bool = False

    def __post_init__(self):
        if self.blocks < 1:
            raise DomainError(f"blocks must be >= 1, got {self.blocks}")
        if not 1 <= self.threads_per_block <= MAX_THREADS_PER_BLOCK:
            raise DomainError(
                f"threads_per_block must be in 1..{MAX_THREADS_PER_BLOCK}, got {self.threads_per_block}"
            )
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")

    @property
    def lanes(self) -> int:
        return self.blocks * self.threads_per_block


@dataclass(frozen=True)
class LaunchTiming:
    distribute: float
    compute: float
    gather: float
    total: float
    kernel_calls: int = 0


def global_index(thread_in_block: int, block: int, threads_per_block: int) -> int:
    if not 0 <= thread_in_block < threads_per_block:
        raise DomainError(
            f"thread index {thread_in_block} outside block of {threads_per_block} threads"
        )
    return thread_in_block + threads_per_block * block


@dataclass(frozen=True)
class LaneRange:
    """One worker's share of the grid: blocks ``[first_block, end_block)``.

    ``spans`` lists the contiguous index ranges the worker owns, one per
    stride pass (a single span unless the grid is strided).
    """

    first_block: int
    end_block: int
    spans: tuple[tuple[int, int], ...]


def partition(config: LaunchConfig, length: int) -> list[LaneRange]:
    """Split the grid into per-worker block ranges and the indices they own."""
    if config.lanes < length and not config.grid_stride:
        raise DomainError(
            f"grid too small: {config.blocks} x {config.threads_per_block} = "
            f"{config.lanes} lanes < {length} elements"
        )
    tpb, stride = config.threads_per_block, config.lanes
    nworkers = min(config.workers, config.blocks)
    per, extra = divmod(config.blocks, nworkers)
    ranges = []
    b0 = 0
    for w in range(nworkers):
        b1 = b0 + per + (w < extra)
        lo, hi = b0 * tpb, b1 * tpb
        spans = []
        offset = 0
        while lo + offset < length:
            spans.append((lo + offset, min(hi + offset, length)))
            if not config.grid_stride:
                break
            offset += stride
        ranges.append(LaneRange(b0, b1, tuple(spans)))
        b0 = b1
    return ranges


def _run_lanes(kernel, context, share: LaneRange, tpb: int, length: int, stride: int,
               segments: list[list[int]]):
    """Worker body: walk every lane in the share, guarded by ``i < length``."""
    lo = share.first_block * tpb
    results = [[0] * len(seg) for seg in segments]
    calls = 0
    error = None
    for block in range(share.first_block, share.end_block):
        for thread in range(tpb):
            i = global_index(thread, block, tpb)
            k = 0
            while i < length:
                j = i - lo - k * stride
                try:
                    results[k][j] = kernel(segments[k][j], context)
                except Exception as exc:  # noqa: BLE001 - reported by index
                    if error is None or i < error[0]:
                        error = (i, exc)
                calls += 1
                if len(segments) == 1:
                    break
                i += stride
                k += 1
    return results, calls, error


_pools: dict[tuple[str, int], Executor] = {}


def _pool(backend: str, workers: int) -> Executor:
    key = (backend, workers)
    if key not in _pools:
        if backend == "process":
            _pools[key] = ProcessPoolExecutor(max_workers=workers)
        else:
            _pools[key] = ThreadPoolExecutor(max_workers=workers)
    return _pools[key]


@atexit.register
def shutdown_pools() -> None:
    while _pools:
        _, pool = _pools.popitem()
        pool.shutdown(wait=True, cancel_futures=True)


def launch_map(
    config: LaunchConfig,
    inputs: Sequence[int],
    kernel: Kernel,
    context: Any = None,
    backend: str = "process",
) -> tuple[list[int], LaunchTiming]:
    """Apply ``kernel(x, context)`` to every element on the configured grid.

    ``backend`` is ``"process"`` (real parallelism) or ``"thread"`` (shares
    the interpreter, useful for instrumented kernels).  With one worker the
    lanes run in the calling thread.  If any element fails, the error with
    the lowest index is raised as :class:`KernelError`.
    """
    if backend not in BACKENDS:
        raise DomainError(f"unknown backend {backend!r}, expected one of {BACKENDS}")
    t0 = time.perf_counter()
    length = len(inputs)
    shares = partition(config, length)
    tpb, stride = config.threads_per_block, config.lanes
    jobs = [
        (share, [list(inputs[a:b]) for a, b in share.spans])
        for share in shares
        if share.spans
    ]
    t1 = time.perf_counter()

    if len(jobs) <= 1 or config.workers == 1:
        outcomes = [_run_lanes(kernel, context, s, tpb, length, stride, segs) for s, segs in jobs]
    else:
        pool = _pool(backend, config.workers)
        futures = [pool.submit(_run_lanes, kernel, context, s, tpb, length, stride, segs)
                   for s, segs in jobs]
        outcomes = [f.result() for f in futures]
    t2 = time.perf_counter()

    output = [0] * length
    calls = 0
    first_error = None
    for (share, _), (results, ncalls, error) in zip(jobs, outcomes):
        calls += ncalls
        if error is not None and (first_error is None or error[0] < first_error[0]):
            first_error = error
        for (a, _b), seg in zip(share.spans, results):
            output[a:a + len(seg)] = seg
    if first_error is not None:
        index, cause = first_error
        raise KernelError(index, cause) from cause
    t3 = time.perf_counter()
    return output, LaunchTiming(t1 - t0, t2 - t1, t3 - t2, t3 - t0, calls)


def sequential_map(
    inputs: Sequence[int], kernel: Kernel, context: Any = None
) -> tuple[list[int], LaunchTiming]:
    """Single-lane baseline with the same output contract as :func:`launch_map`."""
    t0 = time.perf_counter()
    output = []
    for i, x in enumerate(inputs):
        try:
            output.append(kernel(x, context))
        except Exception as exc:
            raise KernelError(i, exc) from exc
    elapsed = time.perf_counter() - t0
    return output, LaunchTiming(0.0, elapsed, 0.0, elapsed, len(output))
