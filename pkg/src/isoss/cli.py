"""Batch driver: ``isoss simulate | test | report``.

Each scenario writes into ``<out>/<scenario name>/``:

* ``scenario.json``: the scenario with all defaults filled in
* ``paths.csv``: the first ``write_paths`` simulated paths
* ``jumps.csv``: every jump record of every simulated path, classified
* ``tests.csv``: one row per test functional (``test`` only)
* ``report.txt``: pass/fail per test at the 1% level and the joint-jump fraction

Seeds: paths use ``SeedSequence(master_seed, spawn_key=(0,))``; test k uses
the 64-bit integer ``SeedSequence(master_seed, spawn_key=(1, k)).generate_state(1, uint64)[0]``,
which is stored in the ``seed`` column of tests.csv.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import config as cfg, factory, io, stats
from .paths import JOINT, classify_jumps

THREADS_ENV = "ISOSS_THREADS"
EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


def path_seed(master_seed: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(0,))


def test_seed(master_seed: int, k: int) -> int:
    return int(np.random.SeedSequence(master_seed, spawn_key=(1, k)).generate_state(1, np.uint64)[0])


# ------------------------------------------------------------ simulation

def simulate_paths(s: cfg.Scenario, threads: int = 1):
    seed = path_seed(s.master_seed)
    if s.kind == "skew_product":
        return factory.build_self_similar_batch(s.spec, s.x0, s.t_end, s.h, s.num_paths, seed, threads)
    if s.kind == "invariant":
        return factory.simulate_invariant_batch(s.spec, s.x0, s.t_end, s.h, s.num_paths, seed, threads)
    return factory.simulate_isotropic_stable_batch(s.spec, s.t_end, s.h, s.num_paths, seed, threads)


def samplers(s: cfg.Scenario, threads: int = 1) -> dict:
    """Sampler used by each test type.

    Fixed-time laws use the scenario's own process; multiplicative invariance
    and independence look at the time-changed process xbar.
    """
    if s.kind == "invariant":
        f = factory.invariant_sampler(s.spec, s.h, threads)
        return dict.fromkeys(cfg.TEST_TYPES, f)
    if s.kind == "skew_product":
        direct = factory.self_similar_sampler(s.spec, s.h, threads)
        changed = factory.time_changed_self_similar_sampler(s.spec, s.h, threads)
    else:
        direct = factory.stable_sampler(s.spec, s.h, threads)
        changed = factory.time_changed_stable_sampler(s.spec, s.h, threads)
    return {"self_similarity": direct, "isotropy": direct,
            "multiplicative_invariance": changed, "independence": changed}


def run_test(s: cfg.Scenario, k: int, t: cfg.TestSpec, sampler) -> list[stats.TestReport]:
    seed = test_seed(s.master_seed, k)
    x0 = np.asarray(s.x0, dtype=float)
    if t.type == "self_similarity":
        reps = stats.self_similarity_check(sampler, x0, t.lam, t.t_star, s.num_paths, seed, s.alpha)
    elif t.type == "multiplicative_invariance":
        reps = stats.multiplicative_invariance_check(sampler, x0, t.lam, t.t_star, s.num_paths, seed)
    elif t.type == "isotropy":
        reps = [stats.isotropy_check(sampler, x0, t.rotation_matrix(s.dim), t.t_star, s.num_paths, seed)]
        reps = [dataclasses.replace(r, params={**r.params, "rotation": [list(g) for g in t.rotation]}) for r in reps]
    else:
        pairs = stats.polar_functionals(sampler(x0, t.t_star, s.num_paths, seed), x0)
        reps = [stats.independence_check(pairs, t.num_perm, seed, "independence[log_r,angle]")]
        reps = [dataclasses.replace(r, params={**r.params, "t_star": t.t_star}) for r in reps]
    return [dataclasses.replace(r, params={**r.params, "test_index": k, "seed": seed}) for r in reps]


# --------------------------------------------------------------- reports

def jump_counts(rows) -> tuple[stats.JumpFraction, Counter]:
    classes = Counter(r["class"] for r in rows)
    return stats.JumpFraction(classes.get(JOINT, 0), sum(classes.values())), classes


def render_report(s: cfg.Scenario, tests, frac: stats.JumpFraction, classes: Counter) -> str:
    lines = [f"scenario {s.name} ({s.kind}), N = {s.num_paths}, t_end = {s.t_end}, h = {s.h}, "
             f"master_seed = {s.master_seed}", ""]
    flag = "  (no jumps recorded)" if frac.empty else ""
    lines.append(f"simultaneous_jump_fraction = {frac.fraction:.6g}  "
                 f"(joint {frac.joint} / total {frac.total}){flag}")
    if classes:
        lines.append("jump classes: " + ", ".join(f"{c} {n}" for c, n in sorted(classes.items())))
    if tests:
        lines += ["", f"tests at level {stats.LEVEL} (p > level accepts the null):"]
        for rep, _seed in tests:
            verdict = "PASS" if rep.accepted() else "FAIL"
            lines.append(f"  {verdict}  {rep.name:<34} stat = {rep.statistic:.5f}  p = {rep.p_value:.4g}  "
                         f"n = {rep.n1}/{rep.n2}  {rep.params_json()}")
        groups: dict[int, list] = {}
        for rep, _seed in tests:
            groups.setdefault(rep.params.get("test_index", -1), []).append(rep)
        ok = sum(stats.passes(g) for g in groups.values())
        lines.append(f"  {ok}/{len(groups)} tests pass with Bonferroni across their functionals")
    return "\n".join(lines) + "\n"


def run_scenario(s: cfg.Scenario, out_dir, threads: int = 1, with_tests: bool = True) -> list[Path]:
    """Simulate a scenario, optionally run its tests, and write the artifacts."""
    d = io.ensure_dir(Path(out_dir) / s.name)
    written = []
    (d / "scenario.json").write_text(json.dumps(cfg.scenario_to_dict(s), indent=2, sort_keys=True) + "\n")
    written.append(d / "scenario.json")
    paths = simulate_paths(s, threads)
    io.write_paths_csv(d / "paths.csv", paths[: s.write_paths])
    io.write_jumps_csv(d / "jumps.csv", paths)
    written += [d / "paths.csv", d / "jumps.csv"]
    classes = Counter()
    for p in paths:
        if p.num_jumps:
            classes.update(classify_jumps(p.jump_left, p.jump_right).tolist())
    frac = stats.JumpFraction(classes.get(JOINT, 0), sum(classes.values()))
    del paths
    tests = []
    if with_tests:
        table = samplers(s, threads)
        for k, t in enumerate(s.tests):
            seed = test_seed(s.master_seed, k)
            tests += [(r, seed) for r in run_test(s, k, t, table[t.type])]
        io.write_tests_csv(d / "tests.csv", tests)
        written.append(d / "tests.csv")
    else:
        (d / "tests.csv").unlink(missing_ok=True)
    (d / "report.txt").write_text(render_report(s, tests, frac, classes))
    written.append(d / "report.txt")
    return written


def report_dir(path) -> str:
    """Rebuild the report text of every scenario directory under ``path``."""
    root = Path(path)
    dirs = [root] if (root / "scenario.json").exists() else sorted(p.parent for p in root.glob("*/scenario.json"))
    if not dirs:
        raise FileNotFoundError(f"no scenario output found in {root}")
    parts = []
    for d in dirs:
        s = cfg.parse_config(json.dumps({"scenarios": [json.loads((d / "scenario.json").read_text())]}))[0]
        frac, classes = jump_counts(io.read_jumps_csv(d / "jumps.csv"))
        tests = io.read_tests_csv(d / "tests.csv") if (d / "tests.csv").exists() else []
        parts.append(render_report(s, tests, frac, classes))
    return "\n".join(parts)


# -------------------------------------------------------------------- main

def _threads(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get(THREADS_ENV)
    try:
        return int(env) if env else 1
    except ValueError:
        raise cfg.ConfigError(f"{THREADS_ENV}: not an integer: {env!r}") from None


def _load(args) -> list[cfg.Scenario]:
    scenarios = cfg.parse_config(Path(args.config).read_text())
    if getattr(args, "seed", None) is not None:
        scenarios = [dataclasses.replace(s, master_seed=args.seed) for s in scenarios]
    return scenarios


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isoss", description="Simulate and test isotropic self-similar processes.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, text in (("simulate", "simulate paths and write paths/jumps CSVs"),
                       ("test", "simulate and run every test in the scenarios")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--seed", type=int, help="override master_seed of every scenario")
        p.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
    p = sub.add_parser("report", help="print the reports stored in an output directory")
    p.add_argument("--in", dest="inp", required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            sys.stdout.write(report_dir(args.inp))
            return EXIT_OK
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise cfg.ConfigError("--seed: must be an unsigned 64-bit integer")
        threads = _threads(args.threads)
        if threads < 1:
            raise cfg.ConfigError("thread count must be positive")
        for s in _load(args):
            run_scenario(s, args.out, threads, with_tests=args.command == "test")
            sys.stdout.write((Path(args.out) / s.name / "report.txt").read_text())
    except cfg.ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
