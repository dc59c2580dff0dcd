"""Run deeply recursive work on a thread with a large C stack."""

from __future__ import annotations

import functools
import sys
import threading

_STACK_BYTES = 512 * 1024 * 1024
_RECURSION = 400_000
_local = threading.local()


def deep(fn):
    """Decorator: execute ``fn`` on a big-stack thread unless already on one."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        if getattr(_local, "deep", False):
            return fn(*args, **kwargs)
        box: dict = {}

        def target():
            _local.deep = True
            try:
                box["value"] = fn(*args, **kwargs)
            except BaseException as exc:  # re-raised on the caller's thread
                box["error"] = exc

        old = threading.stack_size()
        limit = sys.getrecursionlimit()
        threading.stack_size(_STACK_BYTES)
        # The limit is process-wide; the caller only waits in join meanwhile,
        # so raising it cannot let a small-stack thread overflow.
        sys.setrecursionlimit(max(limit, _RECURSION))
        try:
            t = threading.Thread(target=target, name="fha-deep")
            t.start()
        finally:
            threading.stack_size(old)
        try:
            t.join()
        finally:
            sys.setrecursionlimit(limit)
        if "error" in box:
            raise box["error"]
        return box["value"]

    return wrapper
