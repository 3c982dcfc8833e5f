from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class Problem:
    """A smooth objective with its gradient and a standard starting point.

    ``value_grad`` may be supplied when f and its gradient share work (the
    data-fitting problems compute ``A @ x`` once); otherwise it is built from
    ``eval_f`` and ``eval_grad``.
    """

    name: str
    dim: int
    eval_f: Callable[[np.ndarray], float]
    eval_grad: Callable[[np.ndarray], np.ndarray]
    x0: np.ndarray
    known_f_star: Optional[float] = None
    value_grad: Optional[Callable[[np.ndarray], tuple]] = field(default=None, repr=False)

    def fg(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        if self.value_grad is not None:
            f, g = self.value_grad(x)
        else:
            f, g = self.eval_f(x), self.eval_grad(x)
        return float(f), np.asarray(g, dtype=float)


def quadratic(Q: np.ndarray, b: np.ndarray, x0=None, name: str = "quadratic") -> Problem:
    """f(x) = x'Qx/2 - b'x for symmetric positive definite ``Q``."""
    Q = np.asarray(Q, dtype=float)
    b = np.asarray(b, dtype=float)
    n = b.size
    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float)
    xstar = np.linalg.solve(Q, b)

    def vg(x):
        Qx = Q @ x
        return 0.5 * x @ Qx - b @ x, Qx - b

    return Problem(
        name=name,
        dim=n,
        eval_f=lambda x: vg(x)[0],
        eval_grad=lambda x: vg(x)[1],
        x0=x0,
        known_f_star=float(-0.5 * b @ xstar),
        value_grad=vg,
    )
