"""Simulate and test the scenarios in example_config.json.

    python scripts/run_example.py [--out runs/example]
"""
import argparse
from pathlib import Path

from isoss import cli

HERE = Path(__file__).resolve().parent

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/example")
    ap.add_argument("--config", default=str(HERE / "example_config.json"))
    args = ap.parse_args()
    raise SystemExit(cli.main(["test", "--config", args.config, "--out", args.out]))
