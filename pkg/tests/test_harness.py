import json
import math
import shutil
import subprocess
import sys

import numpy as np
import pytest

from regcgm.cgm import SolveOptions, solve_cgm
from regcgm.cubic import solve_hybrid
from regcgm.exceptions import ConfigError, NoTrace
from regcgm.harness import cli
from regcgm.harness.bench import (
    COLUMNS,
    BenchConfig,
    canonical_variant,
    expand_problems,
    read_rows,
    rows_to_csv,
    rows_to_json,
    run_bench,
    write_rows,
)
from regcgm.harness.profiles import (
    compare_pair,
    compute_phi,
    compute_profiles,
    curve_to_csv,
    lambda_curve,
    parse_grid,
)
from regcgm.linesearch import LineSearchParams
from regcgm.problems import get_problem
from regcgm.problems.io import load_instance


def row(problem, variant, iters, status="Converged", seed="", time=0.0):
    return {"problem": problem, "variant": variant, "seed": seed, "status": status,
            "iters": iters, "time": time}


class TestConfig:
    def test_from_toml(self):
        cfg = BenchConfig.from_toml(
            'variants = ["PowellRestarts", "hybrid"]\nproblems = ["rosenbr", "huber:m=20,n=5"]\n'
            'seeds = [3, 4]\niteration_cap = 500\n[output]\npath = "out.json"\nformat = "json"\n')
        assert cfg.variants == ("powell", "hybrid")
        assert cfg.iteration_cap == 500
        assert (cfg.output_path, cfg.output_format) == ("out.json", "json")
        assert cfg.jobs() == [
            ("rosenbr", "powell", None), ("rosenbr", "hybrid", None),
            ("huber:m=20,n=5", "powell", 3), ("huber:m=20,n=5", "powell", 4),
            ("huber:m=20,n=5", "hybrid", 3), ("huber:m=20,n=5", "hybrid", 4),
        ]

    def test_defaults(self):
        cfg = BenchConfig.from_dict({"variants": ["nopowell"], "problems": ["s206"]})
        assert cfg.iteration_cap == 10000
        assert cfg.options().max_iters == 10000

    @pytest.mark.parametrize("d", [
        {"variants": [], "problems": ["s206"]},
        {"variants": ["powell"], "problems": []},
        {"variants": ["bfgs"], "problems": ["s206"]},
        {"variants": ["powell"], "problems": ["nope"]},
        {"variants": ["powell"], "problems": ["huber:m=3"]},
        {"variants": ["powell"], "problems": ["s206"], "iteration_cap": 0},
        {"variants": ["powell"], "problems": ["s206"], "line_search": "fuzzy"},
        {"variants": ["powell"], "problems": ["s206"], "colour": "red"},
        {"variants": ["powell"], "problems": ["s206"], "output": {"format": "xml"}},
        {"variants": ["powell"], "problems": ["s206"], "seeds": ["a"]},
        {"variants": ["powell"], "problems": ["s206"], "time_cap": -1.0},
    ])
    def test_invalid(self, d):
        with pytest.raises(ConfigError):
            BenchConfig.from_dict(d)

    def test_bad_toml(self):
        with pytest.raises(ConfigError):
            BenchConfig.from_toml("variants = [")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            BenchConfig.load(tmp_path / "none.toml")

    def test_variant_aliases(self):
        assert canonical_variant("HybridCubic") == "hybrid"
        assert canonical_variant("no-powell") == "nopowell"

    def test_groups(self):
        labels = [s[0] for s in expand_problems(["qp"])]
        assert set(labels) == {"s201", "dqdrtic", "hilberta", "tridia"}
        nlp = [s[0] for s in expand_problems(["nlp"])]
        assert "rosenbr" in nlp and "tridia" not in nlp
        assert expand_problems(["rosenbr", "rosenbr"]) == [("rosenbr", "rosenbr", {})]
        assert expand_problems(["dixmaana:n=30"]) == [("dixmaana:n=30", "dixmaana", {"n": 30})]


class TestBench:
    def test_four_rows(self):
        cfg = BenchConfig.from_dict({"variants": ["PowellRestarts", "HybridCubic"], "problems": ["rosenbr", "s206"]})
        rows = run_bench(cfg)
        assert [(r["problem"], r["variant"]) for r in rows] == [
            ("rosenbr", "PowellRestarts"), ("rosenbr", "HybridCubic"),
            ("s206", "PowellRestarts"), ("s206", "HybridCubic"),
        ]
        assert all(r["status"] == "Converged" for r in rows)
        assert all(set(r) == set(COLUMNS) for r in rows)

    def test_nopowell_rosenbr(self):
        (r,) = run_bench(BenchConfig.from_dict({"variants": ["nopowell"], "problems": ["rosenbr"]}))
        assert r["status"] == "Converged"
        assert 10 <= r["iters"] <= 60
        assert r["n_powell"] == 0

    def test_failures_are_rows(self):
        cfg = BenchConfig.from_dict({"variants": ["powell"], "problems": ["rosenbr", "huber:m=0,n=3"],
                                     "iteration_cap": 2})
        rows = run_bench(cfg)
        assert rows[0]["status"] == "IterationLimit"
        assert rows[1]["status"].startswith("ConfigError")

    def test_parallel_matches_serial(self):
        base = {"variants": ["powell", "hybrid"], "problems": ["rosenbr", "beale", "huber:m=30,n=6"],
                "seeds": [0, 1]}
        serial = run_bench(BenchConfig.from_dict(base))
        par = run_bench(BenchConfig.from_dict({**base, "workers": 4}))
        assert rows_to_csv(serial, include_timing=False) == rows_to_csv(par, include_timing=False)

    def test_deterministic(self):
        cfg = BenchConfig.from_dict({"variants": ["powell", "nopowell", "hybrid"],
                                     "problems": ["s206", "glasso:m=40,N=3,K=4"], "seeds": [5, 6]})
        a, b = run_bench(cfg), run_bench(cfg)
        assert rows_to_csv(a, include_timing=False) == rows_to_csv(b, include_timing=False)
        assert rows_to_json(a, include_timing=False) == rows_to_json(b, include_timing=False)

    def test_csv_roundtrip(self, tmp_path):
        rows = run_bench(BenchConfig.from_dict({"variants": ["powell"], "problems": ["s206", "beale"]}))
        path = tmp_path / "r.csv"
        write_rows(rows, path)
        back = read_rows(path)
        for a, b in zip(rows, back):
            for c in ("iters", "n_powell", "f_star", "gnorm", "phi"):
                assert a[c] == b[c]
        assert "time" not in rows_to_csv(rows, include_timing=False).splitlines()[0]

    def test_json(self, tmp_path):
        rows = run_bench(BenchConfig.from_dict({"variants": ["powell"], "problems": ["s206"]}))
        path = tmp_path / "r.json"
        write_rows(rows, path, "json")
        assert json.loads(path.read_text())[0]["iters"] == rows[0]["iters"]

    def test_read_rows_validation(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b\n1,2\n")
        with pytest.raises(ConfigError):
            read_rows(p)
        with pytest.raises(ConfigError):
            read_rows(tmp_path / "missing.csv")


class TestPhi:
    def test_counts(self):
        trace = [{"kind": k} for k in ["steepest", "powell", "scaled", "powell", "beale",
                                       "powell", "scaled", "cubic_restart", "scaled", "cubic"]]
        assert compute_phi(trace) == pytest.approx(0.4)

    def test_no_trace(self):
        with pytest.raises(NoTrace):
            compute_phi(None)
        rep = solve_cgm(get_problem("s206"))
        with pytest.raises(NoTrace):
            compute_phi(rep.trace)

    @pytest.mark.parametrize("name", ["rosenbr", "cube", "beale", "powellsg", "sineval"])
    def test_matches_report(self, name):
        opts = SolveOptions(record_trace=True)
        for rep in (solve_cgm(get_problem(name), opts=opts), solve_hybrid(get_problem(name), opts=opts)):
            assert compute_phi(rep.trace) == pytest.approx(rep.phi, abs=1e-15)


class TestProfiles:
    def test_single_solver(self):
        rows = [row("a", "S", 3), row("b", "S", 5), row("c", "S", 7, status="IterationLimit")]
        data = compute_profiles(rows)
        assert data.rho("S", 1.0) == pytest.approx(2 / 3)
        assert data.rho("S", math.inf) == pytest.approx(2 / 3)

    def test_two_solvers(self):
        rows = [row("a", "A", 10), row("a", "B", 20), row("b", "A", 30), row("b", "B", 15),
                row("c", "A", 5), row("c", "B", 5, status="LineSearchFailure")]
        data = compute_profiles(rows)
        assert data.rho("A", 1.0) == pytest.approx(2 / 3)
        assert data.rho("B", 1.0) == pytest.approx(1 / 3)
        assert data.rho("A", 2.0) == pytest.approx(1.0)
        assert data.rho("B", 2.0) == pytest.approx(2 / 3)
        for s in ("A", "B"):
            vals = [v for _, v in data.curves[s]]
            assert vals == sorted(vals)
        lines = data.to_csv().splitlines()
        assert lines[0] == "tau,A,B"
        assert len(lines) == len(data.taus) + 1

    def test_zero_metric(self):
        rows = [row("a", "A", 0), row("a", "B", 0), row("b", "A", 0), row("b", "B", 2)]
        data = compute_profiles(rows)
        assert data.rho("A", 1.0) == 1.0
        assert data.rho("B", 1e9) == 0.5

    def test_seeds_are_separate_problems(self):
        rows = [row("h", "A", 3, seed=0), row("h", "A", 4, seed=1)]
        assert len(compute_profiles(rows).problems) == 2

    def test_bad_metric(self):
        with pytest.raises(ConfigError):
            compute_profiles([row("a", "A", 1)], "flops")

    def test_compare_pair_tie_band(self):
        rows = [row("a", "A", 1, time=1.00), row("a", "B", 1, time=1.05),
                row("b", "A", 1, time=1.0), row("b", "B", 1, time=2.0),
                row("c", "A", 3), row("c", "B", 2)]
        assert compare_pair(rows, "A", "B", "time") == {"a_better": 1, "b_better": 0, "tie": 2}
        assert compare_pair(rows, "A", "B", "iters") == {"a_better": 0, "b_better": 1, "tie": 2}


class TestLambdaCurve:
    def test_grid(self):
        assert parse_grid("0:600:50") == [50.0 * i for i in range(13)]
        assert parse_grid("1, 2.5,4") == [1.0, 2.5, 4.0]
        for bad in ("", "a", "0:10:0", "10:0:1", "-1,2"):
            with pytest.raises(ConfigError):
                parse_grid(bad)

    def test_s206_curve(self):
        opts = SolveOptions(eps=1e-6, ls=LineSearchParams.near_exact())
        pts = lambda_curve(get_problem("s206"), parse_grid("0:600:50"), opts)
        assert pts[0][0] == 0.0
        assert pts[0][1] == pytest.approx(23.18, rel=0.3)
        assert len(pts) == 13
        text = curve_to_csv(pts)
        assert text.splitlines()[0] == "lambda,fraction"
        assert len(text.splitlines()) == 14

    def test_no_trigger(self):
        assert lambda_curve(get_problem("dqdrtic", n=5), [0.0, 1.0],
                            SolveOptions(ls=LineSearchParams.exact())) == []


class TestCLI:
    def test_solve(self, tmp_path, capsys):
        trace = tmp_path / "t.json"
        code = cli.main(["solve", "s206", "--variant", "hybrid", "--line-search", "near-exact",
                         "--trace", str(trace)])
        assert code == cli.EXIT_OK
        doc = json.loads(trace.read_text())
        assert doc["status"] == "Converged"
        assert len(doc["trace"]) == doc["iters"]
        assert "Converged" in capsys.readouterr().out

    def test_solver_failure(self):
        assert cli.main(["solve", "rosenbr", "--max-iters", "2"]) == cli.EXIT_SOLVER

    @pytest.mark.parametrize("argv", [
        ["solve", "nope"],
        ["solve", "rosenbr", "--variant", "bfgs"],
        ["solve", "nlp"],
        ["solve", "rosenbr", "--line-search", "fuzzy"],
        ["solve", "rosenbr", "--eps", "-1"],
        ["bench", "--config", "/nonexistent.toml"],
        ["frobnicate"],
        ["gen", "huber", "--m", "5", "--out", "x.bin"],
    ])
    def test_config_errors(self, argv, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        try:
            code = cli.main(argv)
        except SystemExit as exc:
            code = exc.code
        assert code == cli.EXIT_CONFIG

    def test_bench_and_profile(self, tmp_path):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text('variants = ["powell", "hybrid"]\nproblems = ["rosenbr", "s206", "beale"]\n')
        out = tmp_path / "res.csv"
        assert cli.main(["bench", "--config", str(cfg), "--out", str(out)]) == 0
        assert len(read_rows(out)) == 6
        prof = tmp_path / "prof.csv"
        assert cli.main(["profile", "--in", str(out), "--metric", "iters", "--out", str(prof)]) == 0
        assert prof.read_text().splitlines()[0] == "tau,PowellRestarts,HybridCubic"
        assert cli.main(["bench", "--config", str(cfg), "--out", str(out), "--limit", "1"]) == 0
        assert all(r["status"] == "IterationLimit" for r in read_rows(out))

    def test_bench_needs_output(self, tmp_path):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text('variants = ["powell"]\nproblems = ["s206"]\n')
        assert cli.main(["bench", "--config", str(cfg)]) == cli.EXIT_CONFIG

    def test_lambda_curve(self, tmp_path):
        out = tmp_path / "curve.csv"
        assert cli.main(["lambda-curve", "--problem", "s206", "--grid", "0:600:50", "--line-search",
                         "near-exact", "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 14
        assert cli.main(["lambda-curve", "--problem", "dqdrtic:n=5", "--line-search", "exact",
                         "--out", str(out)]) == cli.EXIT_SOLVER

    @pytest.mark.parametrize("suffix", [".bin", ".csv"])
    def test_gen_and_solve_instance(self, tmp_path, suffix):
        path = tmp_path / f"inst{suffix}"
        assert cli.main(["gen", "glasso", "--m", "40", "--N", "3", "--K", "4", "--seed", "2",
                         "--out", str(path)]) == 0
        inst = load_instance(path)
        assert inst.n == sum(inst.group_sizes)
        assert cli.main(["solve", "glasso", "--instance", str(path)]) == 0
        assert cli.main(["gen", "huber", "--m", "30", "--n", "5", "--out", str(path)]) == 0
        np.testing.assert_allclose(np.linalg.norm(load_instance(path).A, axis=0), 1.0, atol=1e-12)

    def test_bad_instance(self, tmp_path):
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"junk")
        assert cli.main(["solve", "huber", "--instance", str(bad)]) == cli.EXIT_CONFIG

    @pytest.mark.skipif(shutil.which("regcgm") is None, reason="console script not installed")
    def test_console_script(self):
        proc = subprocess.run(["regcgm", "solve", "nope"], capture_output=True, text=True)
        assert proc.returncode == 3
        proc = subprocess.run([sys.executable, "-m", "regcgm.harness.cli", "solve", "s206"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
