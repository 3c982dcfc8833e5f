"""Command line entry point: ``regcgm {solve,bench,profile,lambda-curve,gen}``.

Exit codes: 0 success, 2 solver failure, 3 configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from ..cgm import SolveOptions
from ..exceptions import ConfigError
from ..problems.analytic import PROBLEMS
from ..problems.io import InstanceFormatError, load_instance, save_instance
from ..problems.ml import GroupLassoInstance, gen_glasso, gen_huber, glasso_problem, huber_problem
from .bench import (
    BenchConfig,
    canonical_variant,
    expand_problems,
    line_search_params,
    make_problem,
    read_rows,
    run_bench,
    solve_variant,
    write_rows,
)
from .profiles import compute_profiles, curve_to_csv, lambda_curve, parse_grid

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_solver_args(p):
    p.add_argument("--eps", type=float, default=None, help="absolute gradient-norm tolerance")
    p.add_argument("--max-iters", type=int, default=10000)
    p.add_argument("--line-search", default="default", help="default, near-exact or exact")


def _options(args, trace=False):
    try:
        return SolveOptions(eps=args.eps, max_iters=args.max_iters, ls=line_search_params(args.line_search),
                            record_trace=trace)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _load_problem(spec: str, instance=None, seed: int = 0):
    if instance is not None:
        try:
            inst = load_instance(instance)
        except (OSError, InstanceFormatError) as exc:
            raise ConfigError(f"cannot load instance: {exc}") from None
        return glasso_problem(inst) if isinstance(inst, GroupLassoInstance) else huber_problem(inst)
    specs = expand_problems([spec])
    if len(specs) != 1:
        raise ConfigError(f"{spec!r} names {len(specs)} problems; pick one")
    _, name, kw = specs[0]
    return make_problem(name, kw, seed)


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, np.generic):
        return v.item()
    return v


def cmd_solve(args) -> int:
    opts = _options(args, trace=args.trace is not None)
    problem = _load_problem(args.problem, args.instance, args.seed)
    rep = solve_variant(problem, canonical_variant(args.variant), opts)
    print(f"{problem.name}: {rep.status.value} iters={rep.iters} f={rep.f_star:.10g} "
          f"|g|={rep.gnorm:.3e} powell={rep.n_powell} cubic={rep.n_cubic_invocations} evals={rep.n_evals}")
    if args.trace is not None:
        doc = {
            "problem": problem.name,
            "variant": canonical_variant(args.variant),
            "status": rep.status.value,
            "iters": rep.iters,
            "f_star": rep.f_star,
            "gnorm": rep.gnorm,
            "phi": rep.phi,
            "x": rep.x.tolist(),
            "trace": [{k: _jsonable(v) for k, v in t.items()} for t in rep.trace],
        }
        with open(args.trace, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
    return EXIT_OK if rep.converged else EXIT_SOLVER


def cmd_bench(args) -> int:
    cfg = BenchConfig.load(args.config)
    if args.limit is not None:
        from dataclasses import replace

        cfg = replace(cfg, iteration_cap=args.limit)
    out = args.out or cfg.output_path
    if out is None:
        raise ConfigError("no output path: pass --out or set [output] path")
    fmt = args.format or ("json" if out.endswith(".json") else cfg.output_format)
    rows = run_bench(cfg)
    write_rows(rows, out, fmt)
    solved = sum(r["status"] == "Converged" for r in rows)
    print(f"{len(rows)} runs, {solved} converged -> {out}")
    return EXIT_OK


def cmd_profile(args) -> int:
    rows = read_rows(args.input)
    data = compute_profiles(rows, args.metric)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(data.to_csv())
    print(f"{len(data.problems)} problems, solvers {', '.join(data.solvers)} -> {args.out}")
    return EXIT_OK


def cmd_lambda_curve(args) -> int:
    grid = parse_grid(args.grid)
    opts = _options(args)
    problem = _load_problem(args.problem)
    points = lambda_curve(problem, grid, opts)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(curve_to_csv(points))
    if not points:
        print(f"{problem.name}: the Powell criterion never triggered", file=sys.stderr)
        return EXIT_SOLVER
    print(f"{len(points)} points -> {args.out}")
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        if args.family == "huber":
            if args.n is None:
                raise ConfigError("huber needs --n")
            inst = gen_huber(args.m, args.n, args.seed)
        else:
            if args.N is None or args.K is None:
                raise ConfigError("glasso needs --N and --K")
            inst = gen_glasso(args.m, args.N, args.K, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    save_instance(inst, args.out)
    print(f"{args.family} m={inst.m} n={inst.n} seed={args.seed} -> {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="regcgm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one problem")
    p.add_argument("problem", help=f"registry name ({', '.join(sorted(PROBLEMS))}) or huber:m=..,n=..")
    p.add_argument("--variant", default="powell", help="powell, nopowell or hybrid")
    p.add_argument("--trace", default=None, help="write the iteration trace as JSON")
    p.add_argument("--instance", default=None, help="solve a saved huber/glasso instance")
    p.add_argument("--seed", type=int, default=0, help="seed for generated problems")
    _add_solver_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a benchmark sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--limit", type=int, default=None, help="override the iteration cap")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("profile", help="performance profile from bench results")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--metric", choices=("iters", "time"), default="iters")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("lambda-curve", help="Powell fraction against lambda at the first trigger")
    p.add_argument("--problem", default="s206")
    p.add_argument("--grid", default="0:600:50", help="start:stop:step or a comma separated list")
    p.add_argument("--out", required=True)
    _add_solver_args(p)
    p.set_defaults(func=cmd_lambda_curve)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("family", choices=("huber", "glasso"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, KeyError) as exc:
        print(f"regcgm: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"regcgm: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
