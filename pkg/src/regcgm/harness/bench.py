"""Benchmark sweeps: solver variants x problems x seeds.

A sweep is described by a TOML file::

    variants = ["powell", "nopowell", "hybrid"]
    problems = ["rosenbr", "s206", "dixmaana:n=300", "huber:m=500,n=100"]
    seeds = [0, 1, 2]          # used by the generated (huber / glasso) problems
    iteration_cap = 10000
    time_cap = 60.0            # seconds per solve, optional
    line_search = "default"    # or "near_exact", "exact"
    eps = 1e-6                 # optional absolute gradient tolerance
    workers = 1

    [output]
    path = "results.csv"
    format = "csv"             # or "json"

Problem selectors are registry names (some accept ``name:key=value``
overrides), the groups ``nlp``, ``qp`` and ``analytic``, or generated
families ``huber:m=..,n=..`` and ``glasso:m=..,N=..,K=..``.
"""
from __future__ import annotations

import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..cgm import SolveOptions, solve_cgm
from ..cubic import solve_hybrid
from ..exceptions import ConfigError
from ..linesearch import LineSearchParams
from ..problems.analytic import PROBLEMS, QUADRATIC, get_problem
from ..problems.ml import gen_glasso, gen_huber, glasso_problem, huber_problem

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

VARIANT_ALIASES = {
    "powell": "powell",
    "powellrestarts": "powell",
    "nopowell": "nopowell",
    "hybrid": "hybrid",
    "hybridcubic": "hybrid",
}
VARIANT_LABELS = {"powell": "PowellRestarts", "nopowell": "NoPowell", "hybrid": "HybridCubic"}
LINE_SEARCHES = {
    "default": LineSearchParams,
    "near_exact": LineSearchParams.near_exact,
    "exact": LineSearchParams.exact,
}
GENERATED = {"huber": ("m", "n"), "glasso": ("m", "N", "K")}

COLUMNS = [
    "problem", "variant", "seed", "status", "iters", "time", "f_star", "gnorm",
    "n_beale", "n_powell", "n_cubic", "n_doublings", "n_cubic_restarts", "n_evals", "phi",
]
TIMING_COLUMNS = frozenset({"time"})


def canonical_variant(name: str) -> str:
    try:
        return VARIANT_ALIASES[name.lower().replace("-", "").replace("_", "")]
    except KeyError:
        raise ConfigError(f"unknown variant {name!r}; choose from powell, nopowell, hybrid") from None


def line_search_params(name: str) -> LineSearchParams:
    try:
        return LINE_SEARCHES[name.lower().replace("-", "_")]()
    except KeyError:
        raise ConfigError(f"unknown line search {name!r}; choose from {sorted(LINE_SEARCHES)}") from None


def _parse_selector(sel: str):
    name, _, rest = sel.partition(":")
    kw = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ConfigError(f"bad problem selector {sel!r}")
        try:
            kw[key.strip()] = int(val)
        except ValueError:
            raise ConfigError(f"selector {sel!r}: {key} must be an integer") from None
    return name.strip().lower(), kw


def expand_problems(selectors) -> list:
    """Turn selectors into ``(label, name, kwargs)`` specs, in order and without repeats."""
    out, seen = [], set()

    def add(label, name, kw):
        if label not in seen:
            seen.add(label)
            out.append((label, name, kw))

    for sel in selectors:
        name, kw = _parse_selector(str(sel))
        if name in ("nlp", "qp", "analytic") and not kw:
            for pname in PROBLEMS:
                quad = pname in QUADRATIC
                if name == "analytic" or (name == "qp") == quad:
                    add(pname, pname, {})
        elif name in GENERATED:
            missing = [k for k in GENERATED[name] if k not in kw]
            if missing or set(kw) - set(GENERATED[name]):
                raise ConfigError(f"{name} selector needs exactly {', '.join(GENERATED[name])}")
            label = name + ":" + ",".join(f"{k}={kw[k]}" for k in GENERATED[name])
            add(label, name, kw)
        elif name in PROBLEMS:
            label = name + ("" if not kw else ":" + ",".join(f"{k}={v}" for k, v in sorted(kw.items())))
            add(label, name, kw)
        else:
            raise ConfigError(f"unknown problem selector {sel!r}")
    return out


def make_problem(name: str, kw: dict, seed=None):
    """Build the problem for one spec; ``seed`` only matters for generated families."""
    if name == "huber":
        return huber_problem(gen_huber(kw["m"], kw["n"], seed))
    if name == "glasso":
        return glasso_problem(gen_glasso(kw["m"], kw["N"], kw["K"], seed))
    try:
        return get_problem(name, **kw)
    except TypeError as exc:
        raise ConfigError(f"{name}: {exc}") from None


@dataclass(frozen=True)
class BenchConfig:
    variants: tuple
    problems: tuple
    seeds: tuple = (0,)
    iteration_cap: int = 10000
    time_cap: float | None = None
    line_search: str = "default"
    eps: float | None = None
    workers: int = 1
    output_path: str | None = None
    output_format: str = "csv"
    _specs: list = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.variants:
            raise ConfigError("variants must be nonempty")
        if not self.problems:
            raise ConfigError("problems must be nonempty")
        object.__setattr__(self, "variants", tuple(canonical_variant(v) for v in self.variants))
        object.__setattr__(self, "problems", tuple(str(p) for p in self.problems))
        try:
            seeds = tuple(int(s) for s in self.seeds)
        except (TypeError, ValueError):
            raise ConfigError("seeds must be a list of integers") from None
        object.__setattr__(self, "seeds", seeds)
        if not isinstance(self.iteration_cap, int) or self.iteration_cap < 1:
            raise ConfigError("iteration_cap must be a positive integer")
        if self.time_cap is not None and not self.time_cap > 0:
            raise ConfigError("time_cap must be positive")
        if self.eps is not None and not self.eps > 0:
            raise ConfigError("eps must be positive")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers must be a positive integer")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("output format must be csv or json")
        line_search_params(self.line_search)
        object.__setattr__(self, "_specs", expand_problems(self.problems))

    @classmethod
    def from_dict(cls, d: dict) -> "BenchConfig":
        d = dict(d)
        out = d.pop("output", {}) or {}
        known = {"variants", "problems", "seeds", "iteration_cap", "time_cap", "line_search", "eps", "workers"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            return cls(output_path=out.get("path"), output_format=out.get("format", "csv"), **d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_toml(cls, text: str) -> "BenchConfig":
        try:
            return cls.from_dict(tomllib.loads(text))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML: {exc}") from None

    @classmethod
    def load(cls, path) -> "BenchConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_toml(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None

    def options(self) -> SolveOptions:
        return SolveOptions(eps=self.eps, max_iters=self.iteration_cap, ls=line_search_params(self.line_search),
                            time_limit=self.time_cap, record_trace=False)

    def jobs(self) -> list:
        """(problem label, variant, seed) keys in output order."""
        keys = []
        for label, name, _ in self._specs:
            seeds = self.seeds if name in GENERATED else (None,)
            for variant in self.variants:
                for seed in seeds:
                    keys.append((label, variant, seed))
        return keys


def solve_variant(problem, variant: str, opts: SolveOptions):
    variant = canonical_variant(variant)
    if variant == "hybrid":
        return solve_hybrid(problem, opts=opts)
    return solve_cgm(problem, opts=opts, powell_enabled=variant == "powell")


def _row(label, variant, seed, rep) -> dict:
    return {
        "problem": label,
        "variant": VARIANT_LABELS[variant],
        "seed": "" if seed is None else seed,
        "status": rep.status.value,
        "iters": rep.iters,
        "time": rep.wall_time,
        "f_star": rep.f_star,
        "gnorm": rep.gnorm,
        "n_beale": rep.n_beale,
        "n_powell": rep.n_powell,
        "n_cubic": rep.n_cubic_invocations,
        "n_doublings": rep.n_lambda_doublings,
        "n_cubic_restarts": rep.n_cubic_restarts,
        "n_evals": rep.n_evals,
        "phi": rep.phi,
    }


def run_bench(cfg: BenchConfig) -> list:
    """Run every (problem, variant, seed) job and return rows in key order.

    A failing solve is recorded through its status column; problems that
    cannot even be constructed get the status ``ConfigError``.
    """
    specs = {label: (name, kw) for label, name, kw in cfg._specs}
    opts = cfg.options()

    def job(key):
        label, variant, seed = key
        name, kw = specs[label]
        try:
            problem = make_problem(name, kw, seed)
        except (ConfigError, ValueError) as exc:
            return {c: "" for c in COLUMNS} | {
                "problem": label, "variant": VARIANT_LABELS[variant],
                "seed": "" if seed is None else seed, "status": f"ConfigError: {exc}",
            }
        return _row(label, variant, seed, solve_variant(problem, variant, opts))

    keys = cfg.jobs()
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            rows = list(pool.map(job, keys))
    else:
        rows = [job(k) for k in keys]
    return rows


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows, include_timing: bool = True) -> str:
    cols = [c for c in COLUMNS if include_timing or c not in TIMING_COLUMNS]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in cols])
    return buf.getvalue()


def rows_to_json(rows, include_timing: bool = True) -> str:
    cols = [c for c in COLUMNS if include_timing or c not in TIMING_COLUMNS]
    return json.dumps([{c: r[c] for c in cols} for r in rows], indent=1, allow_nan=True) + "\n"


def write_rows(rows, path, fmt: str = "csv") -> None:
    text = rows_to_json(rows) if fmt == "json" else rows_to_csv(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_rows(path) -> list:
    """Rows of a results CSV with numeric columns converted back."""
    ints = {"iters", "n_beale", "n_powell", "n_cubic", "n_doublings", "n_cubic_restarts", "n_evals"}
    floats = {"time", "f_star", "gnorm", "phi"}
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read results: {exc}") from None
    out = []
    for r in rows:
        if not {"problem", "variant", "status", "iters"} <= set(r):
            raise ConfigError("results file lacks problem/variant/status/iters columns")
        conv = dict(r)
        for k, v in r.items():
            if v in ("", None):
                continue
            if k in ints:
                conv[k] = int(v)
            elif k in floats:
                conv[k] = float(v)
        out.append(conv)
    return out
