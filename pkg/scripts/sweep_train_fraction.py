#!/usr/bin/env python3
"""Train-fraction sweep: cross-validate at growing shares of the training
windows and write a curve CSV {train_fraction, mean_f1, sd_f1}.

Usage: python scripts/sweep_train_fraction.py --events <events.jsonl> --out curve.csv
"""

import argparse
import csv
import json
import sys
from pathlib import Path

from actlex.cli import main as actlex

FRACTIONS = (0.01, 0.05, 0.15, 0.25, 0.5, 0.75, 1.0)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--events", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--workdir", default=None)
    ap.add_argument("--window", type=int, default=150)
    ap.add_argument("--k", type=int, default=300)
    ap.add_argument("--epochs", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    workdir = Path(args.workdir or Path(args.out).parent / "sweep")
    workdir.mkdir(parents=True, exist_ok=True)

    rows = []
    for frac in FRACTIONS:
        echo = workdir / f"cv_frac{frac}.config.json"
        status = actlex([
            "cross-validate", "--in", args.events,
            "--out", str(workdir / f"cv_frac{frac}.csv"),
            "--echo-out", str(echo),
            "--modality", "joint", "--window", str(args.window),
            "--method", "bpe", "--k", str(args.k),
            "--epochs", str(args.epochs), "--train-fraction", str(frac),
            "--seed", str(args.seed),
        ])
        if status != 0:
            sys.exit(f"cross-validate failed at fraction {frac}")
        doc = json.loads(echo.read_text())
        rows.append({
            "train_fraction": frac,
            "mean_f1": doc["mean_f1"],
            "sd_f1": doc["sd_f1"],
        })
        print(f"fraction {frac}: F1 = {doc['mean_f1']:.3f} +- {doc['sd_f1']:.3f}")

    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["train_fraction", "mean_f1", "sd_f1"],
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    print(f"curve written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
