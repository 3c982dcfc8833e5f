"""Powell-restart prevalence, Dolan-More performance profiles and lambda curves."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from ..cgm import SolveOptions
from ..cubic import powell_fraction_curve
from ..exceptions import ConfigError, NoTrace

RESTART_KINDS = frozenset({"powell", "cubic_restart"})
TIME_TIE = 0.1


def compute_phi(trace) -> float:
    """Fraction of the iterations in ``trace`` that were Powell restarts.

    Raises
    ------
    NoTrace
        If the solve was run without ``record_trace``.
    """
    if trace is None:
        raise NoTrace("solve was run without record_trace=True")
    if not trace:
        return 0.0
    return sum(1 for t in trace if t["kind"] in RESTART_KINDS) / len(trace)


@dataclass(frozen=True)
class ProfileData:
    """Per-problem metrics and the resulting profile curves.

    ``metrics[p][s]`` is solver ``s``'s metric on problem ``p`` (inf when
    unsolved); ``curves[s]`` lists ``(tau, rho_s(tau))`` at every ratio
    where some curve steps.
    """

    solvers: tuple
    problems: tuple
    metrics: dict
    taus: tuple
    curves: dict

    def rho(self, solver: str, tau: float) -> float:
        ratios = self._ratios(solver)
        return sum(math.isfinite(r) and r <= tau for r in ratios) / len(ratios) if ratios else 0.0

    def _ratios(self, solver):
        out = []
        for p in self.problems:
            row = self.metrics[p]
            out.append(_ratio(row[solver], min(row.values())))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", *self.solvers])
        for i, tau in enumerate(self.taus):
            w.writerow([repr(tau), *(repr(self.curves[s][i][1]) for s in self.solvers)])
        return buf.getvalue()


def _ratio(t, best):
    if not math.isfinite(t):
        return math.inf
    if best == 0:
        return 1.0 if t == 0 else math.inf
    return t / best


def _metric(row, metric):
    if row["status"] != "Converged":
        return math.inf
    v = row[metric]
    return float(v)


def compute_profiles(results, metric: str = "iters") -> ProfileData:
    """Dolan-More profiles from benchmark rows.

    Problems are identified by (problem, seed); a non-converged solve
    counts as an infinite metric.
    """
    if metric not in ("iters", "time"):
        raise ConfigError(f"metric must be iters or time, got {metric!r}")
    metrics: dict = {}
    solvers: list = []
    for row in results:
        key = (row["problem"], str(row.get("seed", "")))
        s = row["variant"]
        if s not in solvers:
            solvers.append(s)
        metrics.setdefault(key, {})[s] = _metric(row, metric)
    for row in metrics.values():
        for s in solvers:
            row.setdefault(s, math.inf)
    problems = tuple(sorted(metrics))
    finite = {1.0}
    for p in problems:
        best = min(metrics[p].values())
        for s in solvers:
            r = _ratio(metrics[p][s], best)
            if math.isfinite(r):
                finite.add(r)
    taus = tuple(sorted(finite))
    data = ProfileData(tuple(solvers), problems, metrics, taus, {})
    for s in solvers:
        ratios = sorted(data._ratios(s))
        n = len(ratios)
        curve, j = [], 0
        for tau in taus:
            while j < n and ratios[j] <= tau:
                j += 1
            curve.append((tau, j / n if n else 0.0))
        data.curves[s] = curve
    return data


def compare_pair(results, a: str, b: str, metric: str = "iters") -> dict:
    """Win / loss / tie counts of solver ``a`` against ``b`` on jointly solved problems.

    Runtimes within 0.1 s count as a tie.
    """
    tie = TIME_TIE if metric == "time" else 0.0
    by_key: dict = {}
    for row in results:
        by_key.setdefault((row["problem"], str(row.get("seed", ""))), {})[row["variant"]] = row
    out = {"a_better": 0, "b_better": 0, "tie": 0}
    for rows in by_key.values():
        if a not in rows or b not in rows:
            continue
        ta, tb = _metric(rows[a], metric), _metric(rows[b], metric)
        if not (math.isfinite(ta) and math.isfinite(tb)):
            continue
        if abs(ta - tb) <= tie:
            out["tie"] += 1
        elif ta < tb:
            out["a_better"] += 1
        else:
            out["b_better"] += 1
    return out


def parse_grid(spec: str) -> list:
    """``"start:stop:step"`` (inclusive) or a comma separated list of lambdas."""
    try:
        if ":" in spec:
            start, stop, step = (float(v) for v in spec.split(":"))
            if not step > 0 or stop < start:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9))
            return [start + i * step for i in range(n + 1)]
        vals = [float(v) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad lambda grid {spec!r}") from None
    if not vals or any(v < 0 for v in vals):
        raise ConfigError(f"bad lambda grid {spec!r}")
    return vals


def lambda_curve(problem, lambdas, opts: SolveOptions = SolveOptions()):
    """(lambda, Powell fraction) at the first step the Powell criterion rejects.

    Returns an empty list when the solve never meets the criterion.
    """
    from .._engine import find_powell_trigger

    found = find_powell_trigger(problem, opts=opts)
    if found is None:
        return []
    state, _ = found
    return powell_fraction_curve(problem, state, lambdas, opts)


def curve_to_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda", "fraction"])
    for lam, frac in points:
        w.writerow([repr(float(lam)), repr(float(frac))])
    return buf.getvalue()
