"""Memoryless-BFGS conjugate gradient (Shanno's CONMIN-CG scheme).

All direction routines are matrix free: they use dot products and linear
combinations of at most four n-vectors, so the cost of one direction is a
fixed multiple of n.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._vecops import dot, lincomb
from .exceptions import CurvatureViolation, DegenerateDenominator, ZeroGradient
from .linesearch import LineSearchParams


@dataclass(frozen=True)
class RestartMemory:
    """The step pair (p_t, y_t) of the last restart and its inner products."""

    p_t: np.ndarray
    y_t: np.ndarray
    pty: float
    yty: float
    ptp: float

    @classmethod
    def from_pair(cls, p: np.ndarray, y: np.ndarray) -> "RestartMemory":
        pty = dot(p, y)
        if not pty > 0.0:
            raise CurvatureViolation(f"p'y = {pty:.3e} <= 0")
        return cls(p.copy(), y.copy(), pty, dot(y, y), dot(p, p))


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    ITERATION_LIMIT = "IterationLimit"
    LINE_SEARCH_FAILURE = "LineSearchFailure"
    EVAL_ERROR = "EvalError"


@dataclass(frozen=True)
class SolveOptions:
    """Stopping rule and line search settings shared by all variants.

    ``eps=None`` means the scale-free default ``eps_rel * max(1, ||g0||)``.
    """

    eps: Optional[float] = None
    eps_rel: float = 1e-5
    max_iters: int = 10000
    ls: LineSearchParams = field(default_factory=LineSearchParams)
    powell_threshold: float = 0.2
    record_trace: bool = False
    time_limit: Optional[float] = None

    def __post_init__(self):
        if self.eps is not None and not self.eps > 0:
            raise ValueError("eps must be positive")
        if not self.eps_rel > 0:
            raise ValueError("eps_rel must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.powell_threshold > 0:
            raise ValueError("powell_threshold must be positive")

    def tolerance(self, g0_norm: float) -> float:
        if self.eps is not None:
            return self.eps
        return self.eps_rel * max(1.0, g0_norm)


@dataclass
class SolverState:
    """Snapshot of the iteration at x_k, before the step from x_k is taken.

    ``mem`` is the restart memory the direction at x_k is built from and
    ``restart`` tells whether that direction is a restart direction.
    """

    x: np.ndarray
    g: np.ndarray
    f: float
    p_prev: np.ndarray
    y_prev: np.ndarray
    mem: RestartMemory
    k: int
    t: int
    restart: bool = False
    n_beale: int = 0
    n_powell: int = 0
    trace: list = field(default_factory=list)


@dataclass
class SolveReport:
    status: Status
    x: np.ndarray
    iters: int
    f_star: float
    gnorm: float
    n_beale: int = 0
    n_powell: int = 0
    n_cubic_invocations: int = 0
    n_lambda_doublings: int = 0
    n_cubic_restarts: int = 0
    max_lambda_trials: int = 0
    n_evals: int = 0
    wall_time: float = 0.0
    eps: float = 0.0
    message: str = ""
    trace: Optional[list] = None

    @property
    def phi(self) -> float:
        """Fraction of iterations that were Powell restart iterations."""
        return self.n_powell / self.iters if self.iters else 0.0

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def beta_pr(g_next, y_k, *, dx=None, g_k=None) -> float:
    """Conjugate gradient beta.

    With ``dx`` this is g_next'y / y'dx (valid for any line search); with
    ``g_k`` it is the Polak-Ribiere form g_next'y / g_k'g_k, which assumes
    exact line searches. Exactly one of the two must be given.
    """
    if (dx is None) == (g_k is None):
        raise TypeError("pass exactly one of dx= or g_k=")
    num = dot(g_next, y_k)
    if dx is not None:
        denom = dot(y_k, dx)
        scale = np.linalg.norm(y_k) * np.linalg.norm(dx)
    else:
        denom = dot(g_k, g_k)
        scale = denom
    if abs(denom) < 1e-30 * scale or denom == 0.0:
        if num == 0.0:
            return 0.0
        raise DegenerateDenominator(f"beta denominator {denom:.3e}")
    return num / denom


def _curvature(p, y) -> float:
    py = dot(p, y)
    if not py > 0.0:
        raise CurvatureViolation(f"p'y = {py:.3e} <= 0")
    return py


def dir_memoryless(g_next, p_k, y_k) -> np.ndarray:
    """-H g_next with H the memoryless BFGS update of the identity."""
    py = _curvature(p_k, y_k)
    yg, pg, yy = dot(y_k, g_next), dot(p_k, g_next), dot(y_k, y_k)
    return lincomb(-1.0, g_next, yg / py - (1.0 + yy / py) * pg / py, p_k, pg / py, y_k)


def apply_Ht(v, mem: RestartMemory) -> np.ndarray:
    """H_t v for the self-scaled restart matrix built from ``mem``."""
    if not mem.pty > 0.0:
        raise CurvatureViolation(f"p_t'y_t = {mem.pty:.3e} <= 0")
    pv, yv = dot(mem.p_t, v), dot(mem.y_t, v)
    s = mem.pty / mem.yty
    cp = (-s * yv + pv + pv) / mem.pty
    return lincomb(s, v, cp, mem.p_t, -s * pv / mem.pty, mem.y_t)


def dir_restart(g, mem: RestartMemory) -> np.ndarray:
    return -apply_Ht(g, mem)


def dir_scaled(g_next, p_k, y_k, mem: RestartMemory) -> np.ndarray:
    """-H g_next with H the BFGS update of H_t by the pair (p_k, y_k)."""
    py = _curvature(p_k, y_k)
    Hg = apply_Ht(g_next, mem)
    Hy = apply_Ht(y_k, mem)
    pg, yHg, yHy = dot(p_k, g_next), dot(y_k, Hg), dot(y_k, Hy)
    cp = (1.0 + yHy / py) * pg / py - yHg / py
    return lincomb(-1.0, Hg, pg / py, Hy, -cp, p_k)


def powell_fraction(g_next, g_k) -> float:
    """|g_next'g_k| / ||g_next||^2; values >= 0.2 signal lost conjugacy."""
    gg = dot(g_next, g_next)
    if gg == 0.0:
        raise ZeroGradient("powell fraction at a zero gradient")
    return abs(dot(g_next, g_k)) / gg


def powell_triggered(fraction: float, threshold: float = 0.2) -> bool:
    return fraction >= threshold


def solve_cgm(problem, x0=None, opts: SolveOptions = SolveOptions(), powell_enabled: bool = True):
    """Minimise ``problem`` with memoryless-BFGS CG and Beale/Powell restarts.

    Parameters
    ----------
    problem : Problem
    x0 : ndarray, optional
        Starting point; defaults to ``problem.x0``.
    opts : SolveOptions
    powell_enabled : bool
        When False only the every-n-iterations Beale restarts are performed.

    Returns
    -------
    SolveReport
        Never raises for solver failures; inspect ``status``.
    """
    from ._engine import run_solver

    return run_solver(problem, x0, opts, variant="powell" if powell_enabled else "nopowell")
