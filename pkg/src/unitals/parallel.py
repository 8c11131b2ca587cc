"""Run independent shards of a computation, optionally in worker processes.

Results come back in shard order regardless of the worker count, so
callers that sort or concatenate them get identical output.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

_STATE = {}


def default_workers() -> int:
    return os.cpu_count() or 1


def _init(fn, shared):
    _STATE["fn"] = fn
    _STATE["shared"] = shared


def _call(shard):
    return _STATE["fn"](_STATE["shared"], shard)


def run_shards(fn, shared, shards, workers: int = 1) -> list:
    """``[fn(shared, s) for s in shards]``, spread over ``workers`` processes."""
    shards = list(shards)
    if workers <= 1 or len(shards) <= 1:
        return [fn(shared, s) for s in shards]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init,
                             initargs=(fn, shared)) as pool:
        return list(pool.map(_call, shards))
