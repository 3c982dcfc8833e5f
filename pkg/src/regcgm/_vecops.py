"""Vector kernels used by the direction formulas.

Every kernel reports its arithmetic cost to the active :class:`FlopCounter`
(if any), which is how the O(n)-per-iteration contract is measured.
"""
from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass

import numpy as np

_active: contextvars.ContextVar["FlopCounter | None"] = contextvars.ContextVar(
    "regcgm_flops", default=None
)


@dataclass
class FlopCounter:
    flops: int = 0
    largest_alloc: int = 0

    def add(self, flops: int, alloc: int = 0) -> None:
        self.flops += flops
        if alloc > self.largest_alloc:
            self.largest_alloc = alloc


@contextlib.contextmanager
def count_flops():
    """Count the floating point operations done by the kernels in this block.

    ``largest_alloc`` records the biggest array (in elements) any kernel
    created, so callers can check that nothing of size n*n was built.
    """
    counter = FlopCounter()
    token = _active.set(counter)
    try:
        yield counter
    finally:
        _active.reset(token)


def dot(a: np.ndarray, b: np.ndarray) -> float:
    counter = _active.get()
    if counter is not None:
        counter.add(2 * a.size)
    return float(a @ b)


def lincomb(*terms) -> np.ndarray:
    """Return sum(coef * vec) for ``terms = (c1, v1, c2, v2, ...)``."""
    coefs = terms[0::2]
    vecs = terms[1::2]
    out = coefs[0] * vecs[0]
    for c, v in zip(coefs[1:], vecs[1:]):
        out += c * v
    counter = _active.get()
    if counter is not None:
        n = vecs[0].size
        counter.add(n * (2 * len(vecs) - 1), alloc=n)
    return out
