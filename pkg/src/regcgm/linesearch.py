"""Strong Wolfe line search by bracketing and safeguarded cubic interpolation."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import LineSearchFailure, NotDescent


@dataclass(frozen=True)
class LineSearchParams:
    """Constants of the Strong Wolfe test and the evaluation budget.

    Parameters
    ----------
    c1 : float
        Sufficient decrease constant.
    c2 : float
        Curvature constant, ``c1 < c2 < 1``. Small values approach an exact
        one-dimensional minimisation.
    alpha_init : float
        First trial step.
    max_trials : int
        Maximum number of (f, grad) evaluations.
    alpha_max : float
        Upper bound on the step.
    derivative_zoom : bool
        Drive the zoom phase by the sign of phi' and a secant on phi' once
        function values stop resolving the bracket. Needed when ``c2`` asks
        for more accuracy than differences of f can deliver.
    """

    c1: float = 1e-4
    c2: float = 0.9
    alpha_init: float = 1.0
    max_trials: int = 40
    alpha_max: float = 1e10
    derivative_zoom: bool = False

    def __post_init__(self):
        if not 0.0 < self.c1 < self.c2 < 1.0:
            raise ValueError(f"need 0 < c1 < c2 < 1, got c1={self.c1}, c2={self.c2}")
        if self.max_trials < 1:
            raise ValueError("max_trials must be >= 1")
        if not self.alpha_max > 0.0 or not self.alpha_init > 0.0:
            raise ValueError("alpha_init and alpha_max must be positive")

    @classmethod
    def near_exact(cls, **kw) -> "LineSearchParams":
        return cls(**{"c2": 0.1, **kw})

    @classmethod
    def exact(cls, **kw) -> "LineSearchParams":
        """Drive |phi'(alpha)| below 1e-10 |phi'(0)|."""
        return cls(**{"c1": 1e-12, "c2": 1e-10, "max_trials": 100, "derivative_zoom": True, **kw})

    def with_alpha(self, alpha_init: float) -> "LineSearchParams":
        return replace(self, alpha_init=min(alpha_init, self.alpha_max))


@dataclass
class LineSearchResult:
    alpha: float
    f_new: float
    g_new: np.ndarray
    evals: int
    grad_evals: int


def _cubic_min(a0, f0, d0, a1, f1, d1):
    """Minimiser of the cubic matching (f, f') at a0 and a1, or None."""
    if a0 == a1:
        return None
    t1 = d0 + d1 - 3.0 * (f0 - f1) / (a0 - a1)
    disc = t1 * t1 - d0 * d1
    if disc < 0.0:
        return None
    t2 = math.copysign(math.sqrt(disc), a1 - a0)
    denom = d1 - d0 + 2.0 * t2
    if denom == 0.0:
        return None
    a = a1 - (a1 - a0) * (d1 + t2 - t1) / denom
    return a if math.isfinite(a) else None


def _secant(a0, d0, a1, d1):
    if d0 == d1:
        return None
    a = a0 - d0 * (a1 - a0) / (d1 - d0)
    return a if math.isfinite(a) else None


def line_search(problem, x, dx, f0, g0, params: LineSearchParams = LineSearchParams()):
    """Find a step along ``dx`` satisfying the Strong Wolfe conditions.

    Parameters
    ----------
    problem : Problem
        Objective; ``problem.fg`` is called once per trial.
    x, dx : ndarray
        Base point and search direction.
    f0, g0 : float, ndarray
        Objective value and gradient at ``x``.
    params : LineSearchParams

    Returns
    -------
    LineSearchResult

    Raises
    ------
    NotDescent
        If ``g0 @ dx >= 0``.
    LineSearchFailure
        If the budget runs out or the bracket collapses without a Wolfe point.
        ``evals`` on the exception records the spent evaluations.
    """
    dphi0 = float(g0 @ dx)
    if not dphi0 < 0.0:
        raise NotDescent(f"directional derivative {dphi0:.3e} is not negative")
    c1, c2, amax = params.c1, params.c2, params.alpha_max
    evals = 0

    def phi(a):
        nonlocal evals
        if evals >= params.max_trials:
            err = LineSearchFailure(f"no Wolfe point in {params.max_trials} trials")
            err.evals = evals
            raise err
        evals += 1
        f, g = problem.fg(x + a * dx)
        return f, g, float(g @ dx)

    def armijo(a, f):
        return f <= f0 + c1 * a * dphi0

    def curvature(d):
        return abs(d) <= -c2 * dphi0

    def done(a, f, g):
        return LineSearchResult(a, f, g, evals, evals)

    # f differences below this are rounding noise
    fnoise = 64.0 * np.finfo(float).eps * max(abs(f0), 1e-300)

    def zoom(lo, flo, dlo, hi, fhi, dhi):
        if params.derivative_zoom:
            return dzoom(lo, flo, dlo, hi, fhi, dhi)
        while True:
            width = hi - lo
            if abs(width) <= 1e-16 * max(abs(lo), abs(hi)):
                err = LineSearchFailure("bracket collapsed")
                err.evals = evals
                raise err
            a = _cubic_min(lo, flo, dlo, hi, fhi, dhi)
            left, right = sorted((lo + 0.1 * width, hi - 0.1 * width))
            if a is None or not left <= a <= right:
                a = lo + 0.5 * width
            f, g, d = phi(a)
            if not math.isfinite(f) or not armijo(a, f) or f >= flo:
                hi, fhi, dhi = a, f, d
                if not math.isfinite(f):
                    fhi, dhi = flo + abs(dlo * width), abs(dlo)
            else:
                if curvature(d):
                    return done(a, f, g)
                if d * width >= 0.0:
                    hi, fhi, dhi = lo, flo, dlo
                lo, flo, dlo = a, f, d

    def dzoom(lo, flo, dlo, hi, fhi, dhi):
        # invariant: phi decreases from lo towards hi, f(lo) <= f(hi) + noise
        best = None
        widths = [math.inf, math.inf]
        while True:
            width = hi - lo
            if abs(width) <= 4.0 * np.finfo(float).eps * max(abs(lo), abs(hi)):
                # alpha is resolved to machine precision; phi' is rounding noise
                if best is not None:
                    return done(*best[1:])
                err = LineSearchFailure("bracket collapsed")
                err.evals = evals
                raise err
            a = _secant(lo, dlo, hi, dhi) if dlo * dhi < 0.0 else None
            if a is None:
                a = _cubic_min(lo, flo, dlo, hi, fhi, dhi)
            left, right = sorted((lo + 1e-3 * width, hi - 1e-3 * width))
            if a is None or not left <= a <= right or abs(width) > 0.5 * widths[-2]:
                a = lo + 0.5 * width
            widths.append(abs(width))
            f, g, d = phi(a)
            if not math.isfinite(f) or f > flo + fnoise:
                hi, fhi, dhi = a, f, d if math.isfinite(f) else abs(dlo)
                if not math.isfinite(f):
                    fhi = flo + abs(dlo * width)
                continue
            if f <= f0 + fnoise or armijo(a, f):
                if curvature(d):
                    return done(a, f, g)
                if best is None or abs(d) < best[0]:
                    best = (abs(d), a, f, g)
            if d * width < 0.0:
                lo, flo, dlo = a, f, d
            else:
                hi, fhi, dhi = a, f, d

    a_prev, f_prev, d_prev = 0.0, f0, dphi0
    a = min(params.alpha_init, amax)
    first = True
    while True:
        f, g, d = phi(a)
        if not math.isfinite(f) or not np.all(np.isfinite(g)):
            # overflow: treat as an overshoot with a steep uphill slope
            return zoom(a_prev, f_prev, d_prev, a, f_prev + abs(d_prev * a), abs(d_prev))
        if not armijo(a, f) or (not first and f >= f_prev):
            return zoom(a_prev, f_prev, d_prev, a, f, d)
        if curvature(d):
            return done(a, f, g)
        if d >= 0.0:
            return zoom(a, f, d, a_prev, f_prev, d_prev)
        if a >= amax:
            err = LineSearchFailure("reached alpha_max without a Wolfe point")
            err.evals = evals
            raise err
        a_next = _cubic_min(a_prev, f_prev, d_prev, a, f, d)
        if a_next is None or not a_next > 1.1 * a:
            a_next = 4.0 * a
        a_prev, f_prev, d_prev = a, f, d
        a = min(a_next, 10.0 * a, amax)
        first = False
