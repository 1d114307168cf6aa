#!/usr/bin/env python3
"""Desk-scale benchmark: synthesize a session, run the three encoding
methods under participant-independent CV, and emit every artifact the
figures tooling consumes (reports, vocabulary stats, distance tables).

Usage: python scripts/run_synthetic_benchmark.py --outdir runs/bench [--fast]
"""

import argparse
import csv
import sys
from pathlib import Path

from actlex.cli import main as actlex


def run(*argv):
    status = actlex([str(a) for a in argv])
    if status != 0:
        sys.exit(f"step failed with status {status}: {argv[0]}")


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="runs/bench")
    ap.add_argument("--seed", type=int, default=20)
    ap.add_argument("--participants", type=int, default=12)
    ap.add_argument("--events", type=int, default=1100)
    ap.add_argument("--window", type=int, default=150)
    ap.add_argument("--k", type=int, default=300)
    ap.add_argument("--epochs", type=int, default=30)
    ap.add_argument("--fast", action="store_true",
                    help="tiny settings for a smoke run")
    args = ap.parse_args()
    if args.fast:
        args.participants, args.events, args.window = 5, 400, 15
        args.k, args.epochs = 40, 3

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    events = out / "events.jsonl"
    run("synth", "--out", events, "--participants", args.participants,
        "--trials", 1, "--events", args.events, "--seed", args.seed)

    # vocabulary artifacts for the violin figure
    tokens = out / "tokens_joint.jsonl"
    run("tokenize", "--in", events, "--modality", "joint",
        "--window", args.window, "--out", tokens)
    for k in (args.k, 2 * args.k, 3 * args.k):
        vocab = out / f"vocab_k{k}.json"
        run("learn-vocab", "--in", tokens, "--k", k, "--out", vocab)
        run("vocab-stats", "--vocab", vocab, "--out", out / f"stats_k{k}.csv",
            "--hist-out", out / f"hist_k{k}.json")
        run("top-activities", "--in", tokens, "--vocab", vocab,
            "--n", 10, "--merged-only", "--out", out / f"top_k{k}.json")

    # recognition comparison for the grouped-bar figure
    all_rows = []
    for method in ("noenc", "ae", "bpe"):
        report = out / f"cv_{method}.csv"
        run("cross-validate", "--in", events, "--out", report,
            "--modality", "joint", "--window", args.window,
            "--method", method, "--k", args.k, "--ae-depth", 1,
            "--epochs", args.epochs, "--seed", args.seed)
        with open(report, newline="") as fh:
            all_rows += list(csv.DictReader(fh))
    combined = out / "cv_all.csv"
    with open(combined, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(all_rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(all_rows)

    # trajectory distances for the distribution figure
    run("task-distance", "--in", events, "--out", out / "task_distance.csv",
        "--pairs-out", out / "task_distance_pairs.csv")
    run("proficiency", "--in", events, "--out", out / "proficiency.csv")

    print(f"benchmark artifacts in {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
