"""Hybrid cubic regularisation of memoryless-BFGS CG.

A cubic-regularised quasi-Newton step solves (B + lambda I) dx = -g, which is
the Levenberg-Marquardt step with M = 2 lambda / ||dx||. For the two-pair
memoryless Hessian approximation the inverse of B + lambda I has a closed
form, so a regularised direction costs O(n) like an ordinary one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._vecops import dot, lincomb
from .cgm import RestartMemory, SolveOptions, SolverState, _curvature, dir_restart
from .exceptions import CurvatureViolation, DegenerateD, DegenerateScalars, LineSearchFailure, NotDescent, ZeroGradient
from .linesearch import line_search


@dataclass(frozen=True)
class RegScalars:
    a: float
    b: float
    c: float
    lam: float

    @classmethod
    def of(cls, mem: RestartMemory, lam: float) -> "RegScalars":
        if lam < 0:
            raise ValueError("lambda must be >= 0")
        if not mem.pty > 0.0:
            raise CurvatureViolation(f"p_t'y_t = {mem.pty:.3e} <= 0")
        a = mem.yty / mem.ptp
        b = 2.0 * mem.yty / mem.pty + lam
        c = mem.yty + lam * mem.pty
        if not (c > 0.0 and lam * b + a > 0.0):
            raise DegenerateScalars(f"c={c:.3e}, lambda*b+a={lam * b + a:.3e}")
        return cls(a, b, c, lam)

    @property
    def den(self) -> float:
        return self.c * (self.lam * self.b + self.a)


@dataclass(frozen=True)
class CubicOptions:
    """Schedule for the regularisation weight.

    Parameters
    ----------
    U : int
        Maximum number of lambda values tried per invocation.
    lambda_multiplier : float
        Initial lambda is this multiple of the Powell fraction.
    growth : float
        Factor applied to lambda after each rejected trial.
    """

    U: int = 30
    lambda_multiplier: float = 5.0
    growth: float = 2.0

    def __post_init__(self):
        if self.U < 1:
            raise ValueError("U must be >= 1")
        if not self.growth > 1.0:
            raise ValueError("growth must be > 1")
        if not self.lambda_multiplier > 0.0:
            raise ValueError("lambda_multiplier must be positive")


def apply_Ht_lambda(v, mem: RestartMemory, lam: float) -> np.ndarray:
    """(B_t + lambda I)^{-1} v in closed form."""
    s = RegScalars.of(mem, lam)
    pv, yv = dot(mem.p_t, v), dot(mem.y_t, v)
    den = s.den
    return lincomb(
        mem.pty / s.c, v,
        (s.a * s.b * pv - s.a * yv) / den, mem.p_t,
        (-lam * yv - s.a * pv) / den, mem.y_t,
    )


def _Bt_times(v, mem: RestartMemory) -> np.ndarray:
    scale = mem.yty / mem.pty
    return lincomb(
        scale, v,
        -scale * dot(mem.p_t, v) / mem.ptp, mem.p_t,
        dot(mem.y_t, v) / mem.pty, mem.y_t,
    )


def p_tilde(p_k, mem: RestartMemory, lam: float) -> np.ndarray:
    """(B_t + lambda I)^{-1} B_t p_k; equals p_k when lambda = 0."""
    s = RegScalars.of(mem, lam)
    pp, yp = dot(mem.p_t, p_k), dot(mem.y_t, p_k)
    den = s.den
    return lincomb(
        mem.yty / s.c, p_k,
        lam * s.a * (yp - s.b * pp) / den, mem.p_t,
        lam * (lam * yp + s.a * pp) / den, mem.y_t,
    )


def dir_regularized(g_next, p_k, y_k, mem: RestartMemory, lam: float) -> np.ndarray:
    """-(B_{k+1} + lambda I)^{-1} g_next, with B_{k+1} the BFGS update of B_t by (p_k, y_k).

    Raises
    ------
    DegenerateD
        If the rank-2 correction's denominator cancels to roundoff.
    """
    py = _curvature(p_k, y_k)
    Hg = apply_Ht_lambda(g_next, mem, lam)
    Hy = apply_Ht_lambda(y_k, mem, lam)
    # p_tilde = p - lam * Hp keeps pBp - pB p_tilde = lam * (Bp)'Hp free of cancellation
    Hp = apply_Ht_lambda(p_k, mem, lam)
    pt = lincomb(1.0, p_k, -lam, Hp)
    Bp = _Bt_times(p_k, mem)
    gap = lam * dot(Bp, Hp)
    yHy = dot(y_k, Hy)
    ypt = dot(y_k, pt)
    t1 = (py + yHy) * gap
    t2 = ypt * ypt
    d = t1 + t2
    if not abs(d) > 1e-30 * (abs(t1) + t2) or d == 0.0:
        raise DegenerateD(f"d = {d:.3e}")
    ptg, yHg, Hyg = dot(pt, g_next), dot(y_k, Hg), dot(Hy, g_next)
    c_pt = (ypt * yHg - (py + yHy) * ptg) / d
    c_hy = (ypt * ptg + gap * Hyg) / d
    return lincomb(-1.0, Hg, c_pt, pt, c_hy, Hy)


def lambda_init(g_next, g_k, multiplier: float = 5.0) -> float:
    """Initial regularisation weight: ``multiplier`` times the Powell fraction."""
    gg = dot(g_next, g_next)
    if gg == 0.0:
        raise ZeroGradient("lambda_init at a zero gradient")
    return multiplier * abs(dot(g_next, g_k)) / gg


def cubic_weight(lam: float, dx) -> float:
    """Cubic-model weight M = 2 lambda / ||dx|| equivalent to damping ``lam`` for step ``dx``."""
    norm = float(np.linalg.norm(dx))
    if norm == 0.0:
        raise ZeroDivisionError("cubic weight of a zero step")
    return 2.0 * lam / norm


def regularized_direction(state: SolverState, lam: float) -> np.ndarray:
    """The regularised counterpart of the direction the state would take."""
    if state.restart:
        return -apply_Ht_lambda(state.g, state.mem, lam)
    return dir_regularized(state.g, state.p_prev, state.y_prev, state.mem, lam)


def repair_state(state: SolverState, trial, dx) -> SolverState:
    """State for regularising a rejected step taken from ``state`` along ``dx``.

    The rejected step's pair replaces ``(p_prev, y_prev)`` so the regularised
    direction uses the newest curvature information. If that pair has no
    positive curvature the original pair is kept.
    """
    p = trial.alpha * dx
    y = trial.g_new - state.g
    if not float(p @ y) > 0.0:
        return replace(state, restart=False)
    return replace(state, p_prev=p, y_prev=y, restart=False)


def unregularized_direction(state: SolverState) -> np.ndarray:
    if state.restart:
        return dir_restart(state.g, state.mem)
    from .cgm import dir_scaled

    return dir_scaled(state.g, state.p_prev, state.y_prev, state.mem)


def solve_hybrid(problem, x0=None, opts: SolveOptions = SolveOptions(), copts: CubicOptions = CubicOptions()):
    """Minimise ``problem`` with CG whose Powell restarts are replaced by regularised steps.

    Whenever a step would trigger a Powell restart, it is discarded and
    retried along -(B + lambda I)^{-1} g with lambda initialised from the
    Powell fraction and multiplied by ``copts.growth`` until the criterion
    clears. After ``copts.U`` unsuccessful values the step falls back to a
    full restart.

    Returns
    -------
    SolveReport
    """
    from ._engine import run_solver

    return run_solver(problem, x0, opts, variant="hybrid", copts=copts)


def powell_fraction_curve(problem, state: SolverState, lambdas, opts: SolveOptions = SolveOptions()):
    """Powell fraction reached from ``state`` by the regularised step for each lambda.

    ``state`` is the iterate whose unregularised step triggers the Powell
    criterion. The lambda = 0 point is that unregularised step; positive
    lambdas regularise the direction built from the rejected step's pair, as
    the hybrid solver does. Each lambda gets its own line search. Points
    whose direction or line search fails are left out.

    Returns
    -------
    list of (lambda, fraction)
    """
    from .cgm import powell_fraction

    ls = opts.ls.with_alpha(1.0)
    dx0 = unregularized_direction(state)
    try:
        trial = line_search(problem, state.x, dx0, state.f, state.g, ls)
    except (LineSearchFailure, NotDescent):
        trial = None
    rstate = None if trial is None else repair_state(state, trial, dx0)
    out = []
    for lam in lambdas:
        lam = float(lam)
        try:
            if lam > 0:
                if rstate is None:
                    continue
                dx = regularized_direction(rstate, lam)
                res = line_search(problem, state.x, dx, state.f, state.g, ls)
            elif trial is None:
                continue
            else:
                res = trial
            frac = powell_fraction(res.g_new, state.g)
        except (DegenerateD, LineSearchFailure, NotDescent, ZeroGradient):
            continue
        if math.isfinite(frac):
            out.append((lam, frac))
    return out
