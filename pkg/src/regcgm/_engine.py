"""Iteration loop shared by the three solver variants."""
from __future__ import annotations

import math
import time

import numpy as np

from .cgm import (
    RestartMemory,
    dir_restart,
    SolveOptions,
    SolveReport,
    SolverState,
    Status,
    powell_fraction,
    powell_triggered,
)
from .cubic import (
    CubicOptions,
    lambda_init,
    regularized_direction,
    repair_state,
    unregularized_direction,
)
from .exceptions import CGMError, CurvatureViolation, DegenerateD, LineSearchFailure, NotDescent
from .linesearch import line_search

VARIANTS = ("powell", "nopowell", "hybrid")

# errors raised by user objectives that end a solve with status EvalError
_EVAL_ERRORS = (ArithmeticError, ValueError, FloatingPointError, OverflowError)


class _EvalFailure(Exception):
    pass


class _Counted:
    """Wraps a problem to count (f, g) evaluations and reject bad arguments."""

    def __init__(self, problem):
        self.problem = problem
        self.evals = 0

    def fg(self, x):
        self.evals += 1
        try:
            return self.problem.fg(x)
        except CGMError:
            raise
        except _EVAL_ERRORS as exc:
            raise _EvalFailure(str(exc)) from exc


class _StopAtTrigger(Exception):
    def __init__(self, state, fraction):
        self.state = state
        self.fraction = fraction


def run_solver(problem, x0, opts: SolveOptions, variant: str, copts: CubicOptions | None = None,
               stop_at_trigger: bool = False):
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    copts = copts or CubicOptions()
    x = np.array(problem.x0 if x0 is None else x0, dtype=float)
    n = x.size
    counted = _Counted(problem)
    start = time.monotonic()
    trace = [] if opts.record_trace else None
    stats = dict(n_beale=0, n_powell=0, n_cubic_invocations=0, n_lambda_doublings=0,
                 n_cubic_restarts=0, max_lambda_trials=0)
    k = 0
    f = math.nan
    g = np.full(n, math.nan)
    eps = opts.eps or 0.0

    def report(status, message=""):
        gnorm = float(np.linalg.norm(g))
        return SolveReport(status=status, x=x, iters=k, f_star=float(f), gnorm=gnorm,
                           n_evals=counted.evals, wall_time=time.monotonic() - start,
                           eps=eps, message=message, trace=trace, **stats)

    def record(kind, alpha, slope, lam=None, trials=0, fraction=None):
        if trace is not None:
            trace.append(dict(k=k, f=float(f), gnorm=float(np.linalg.norm(g)), kind=kind,
                              alpha=float(alpha), slope=float(slope), lam=lam,
                              trials=trials, fraction=fraction))

    try:
        f, g = counted.fg(x)
        if not math.isfinite(f) or not np.all(np.isfinite(g)):
            return report(Status.EVAL_ERROR, "objective not finite at x0")
        gnorm = float(np.linalg.norm(g))
        eps = opts.tolerance(gnorm)
        if gnorm <= eps:
            return report(Status.CONVERGED)

        # first step: steepest descent with a unit-length trial step
        dx = -g
        res = line_search(counted, x, dx, f, g, opts.ls.with_alpha(1.0 / gnorm))
        p = res.alpha * dx
        y = res.g_new - g
        g_prev = g
        x, f, g = x + p, res.f_new, res.g_new
        k = 1
        t = 1
        record("steepest", res.alpha, float(g_prev @ dx))
        mem = None
        force_restart = False
        ls_unit = opts.ls.with_alpha(1.0)

        while float(np.linalg.norm(g)) > eps:
            if k >= opts.max_iters:
                return report(Status.ITERATION_LIMIT)
            if opts.time_limit is not None and time.monotonic() - start > opts.time_limit:
                return report(Status.ITERATION_LIMIT, "time limit")

            kind = "scaled"
            fraction = None
            if force_restart:
                kind = "beale"
            elif (k - t) % n == 0:
                kind = "beale"
            elif variant == "powell":
                fraction = powell_fraction(g, g_prev)
                if powell_triggered(fraction, opts.powell_threshold):
                    kind = "powell"
            restart = kind != "scaled"
            if restart:
                t = k
                stats["n_beale" if kind == "beale" else "n_powell"] += 1
                if force_restart:
                    mem_dir = None
                else:
                    mem_dir = RestartMemory.from_pair(p, y)
            else:
                mem_dir = mem
            force_restart = False

            state = SolverState(x=x, g=g, f=f, p_prev=p, y_prev=y, mem=mem_dir, k=k, t=t,
                                restart=restart)
            if mem_dir is None:
                dx = -g
                step_ls = opts.ls.with_alpha(1.0 / float(np.linalg.norm(g)))
            else:
                dx = unregularized_direction(state)
                step_ls = ls_unit
            slope = float(g @ dx)
            if not slope < 0.0:
                # cannot happen with p'y > 0; fall back to steepest descent
                dx = -g
                slope = float(g @ dx)
                step_ls = opts.ls.with_alpha(1.0 / float(np.linalg.norm(g)))
            res = line_search(counted, x, dx, f, g, step_ls)
            lam_used, trials = None, 0

            if (variant == "hybrid" and not restart
                    and float(np.linalg.norm(res.g_new)) > eps):
                frac = powell_fraction(res.g_new, g)
                if powell_triggered(frac, opts.powell_threshold):
                    if stop_at_trigger:
                        raise _StopAtTrigger(state, frac)
                    stats["n_cubic_invocations"] += 1
                    out = _repair(counted, state, repair_state(state, res, dx), res, frac,
                                  opts, copts, eps, stats)
                    res, dx, lam_used, trials, kind, restart_mem = out
                    fraction = frac
                    slope = float(g @ dx)
                    if kind == "cubic_restart":
                        t = k
                        stats["n_powell"] += 1
                        stats["n_cubic_restarts"] += 1
                        restart = True
                        mem_dir = restart_mem

            if restart:
                mem = mem_dir
            p_new = res.alpha * dx
            y_new = res.g_new - g
            g_prev = g
            x, f, g = x + p_new, res.f_new, res.g_new
            p, y = p_new, y_new
            if not float(p @ y) > 0.0:
                force_restart = True
            k += 1
            record(kind, res.alpha, slope, lam_used, trials, fraction)
        return report(Status.CONVERGED)
    except _StopAtTrigger:
        raise
    except LineSearchFailure as exc:
        return report(Status.LINE_SEARCH_FAILURE, str(exc))
    except _EvalFailure as exc:
        return report(Status.EVAL_ERROR, str(exc))
    except (CurvatureViolation, NotDescent) as exc:
        return report(Status.LINE_SEARCH_FAILURE, f"{type(exc).__name__}: {exc}")


def _repair(counted, state, rstate, rejected, frac, opts, copts, eps, stats):
    """Retry the step from ``state`` with growing regularisation.

    ``rstate`` carries the rejected step's pair, which the regularised
    direction is built from.
    """
    lam = lambda_init(rejected.g_new, state.g, copts.lambda_multiplier)
    ls = opts.ls.with_alpha(1.0)
    u = 1
    while True:
        try:
            dx = regularized_direction(rstate, lam)
            res = line_search(counted, state.x, dx, state.f, state.g, ls)
            gn = float(np.linalg.norm(res.g_new))
            ok = gn <= eps or not powell_triggered(powell_fraction(res.g_new, state.g),
                                                   opts.powell_threshold)
        except (DegenerateD, LineSearchFailure, NotDescent):
            ok = False
        stats["max_lambda_trials"] = max(stats["max_lambda_trials"], u)
        if ok:
            return res, dx, lam, u, "cubic", None
        if u >= copts.U:
            break
        lam *= copts.growth
        u += 1
        stats["n_lambda_doublings"] += 1
    # U values exhausted: full restart from the rejected step's pair
    mem = RestartMemory.from_pair(rstate.p_prev, rstate.y_prev)
    dx = dir_restart(state.g, mem)
    res = line_search(counted, state.x, dx, state.f, state.g, ls)
    return res, dx, lam, u, "cubic_restart", mem


def find_powell_trigger(problem, x0=None, opts: SolveOptions = SolveOptions()):
    """Run until a step first meets the Powell criterion.

    Returns ``(state, fraction)`` where ``state`` is the iteration whose step
    triggered, or ``None`` if the solve finishes without a trigger.
    """
    try:
        run_solver(problem, x0, opts, variant="hybrid", stop_at_trigger=True)
    except _StopAtTrigger as stop:
        return stop.state, stop.fraction
    return None
