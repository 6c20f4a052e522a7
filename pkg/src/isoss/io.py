"""CSV artifacts: paths.csv, jumps.csv and tests.csv."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .paths import CadlagPath, classify_jumps
from .stats import TestReport

TEST_COLUMNS = ["name", "statistic", "p_value", "n1", "n2", "params_json", "seed"]


def _f(x) -> str:
    return repr(float(x))


def write_paths_csv(file, paths: Sequence[CadlagPath], ids: Iterable[int] | None = None) -> None:
    paths = list(paths)
    ids = range(len(paths)) if ids is None else list(ids)
    d = paths[0].dim if paths else 0
    with open(file, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["path_id", "t"] + [f"x_{k + 1}" for k in range(d)] + ["r", "is_jump"])
        for pid, p in zip(ids, paths):
            r = np.linalg.norm(p.states, axis=1)
            is_jump = np.isin(p.times, p.jump_times)
            for t, x, rr, j in zip(p.times, p.states, r, is_jump):
                w.writerow([pid, _f(t), *map(_f, x), _f(rr), int(j)])


def write_jumps_csv(file, paths: Sequence[CadlagPath], ids: Iterable[int] | None = None,
                    tol_r: float = 1e-9, tol_theta: float = 1e-9) -> None:
    paths = list(paths)
    ids = range(len(paths)) if ids is None else list(ids)
    d = paths[0].dim if paths else 0
    with open(file, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["path_id", "t"] + [f"left_{k + 1}" for k in range(d)] + [f"right_{k + 1}" for k in range(d)]
                   + ["class"])
        for pid, p in zip(ids, paths):
            if not p.num_jumps:
                continue
            cls = classify_jumps(p.jump_left, p.jump_right, tol_r, tol_theta)
            for t, l, r, c in zip(p.jump_times, p.jump_left, p.jump_right, cls):
                w.writerow([pid, _f(t), *map(_f, l), *map(_f, r), c])


def read_jumps_csv(file) -> list[dict]:
    with open(file, newline="") as fh:
        return list(csv.DictReader(fh))


def write_tests_csv(file, rows: Sequence[tuple[TestReport, int]]) -> None:
    with open(file, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TEST_COLUMNS)
        for rep, seed in rows:
            w.writerow([rep.name, _f(rep.statistic), _f(rep.p_value), rep.n1, rep.n2, rep.params_json(), seed])


def read_tests_csv(file) -> list[tuple[TestReport, int]]:
    out = []
    with open(file, newline="") as fh:
        for row in csv.DictReader(fh):
            rep = TestReport(row["name"], float(row["statistic"]), float(row["p_value"]), int(row["n1"]),
                             int(row["n2"]), json.loads(row["params_json"]))
            out.append((rep, int(row["seed"])))
    return out


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
