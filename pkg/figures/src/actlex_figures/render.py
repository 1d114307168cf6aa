"""The four figure kinds: violin (activity lengths per iteration budget),
grouped bars with SD whiskers (recognition F1 per method and window),
distribution (trajectory distances per task pair), and curve
(train-fraction sweep).

Layout is deterministic for identical inputs, and PNG output carries no
volatile metadata, so re-rendering is byte-identical.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

K_COLORS = ("tab:red", "tab:blue", "tab:green")
SAVE_KW = {"dpi": 150, "metadata": {"Software": None}}


class SchemaError(ValueError):
    pass


def _read_csv(path: str | Path, required: list[str]) -> list[dict]:
    p = Path(path)
    if not p.exists():
        raise SchemaError(f"input file {path} does not exist")
    with open(p, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise SchemaError(f"{path}: missing column {col!r}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _save(fig, out: str | Path):
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, **SAVE_KW)
    plt.close(fig)


def render_violin(inputs: list[str], out: str | Path, title: str = ""):
    """One violin per iteration budget, panelled by modality.

    Inputs are vocab-stats histogram JSONs: {modality, dataset_profile, k,
    histogram: {length: count}}.
    """
    if not inputs:
        raise SchemaError("violin needs at least one histogram file")
    entries = []
    for path in inputs:
        p = Path(path)
        if not p.exists():
            raise SchemaError(f"input file {path} does not exist")
        doc = json.loads(p.read_text(encoding="utf-8"))
        for field in ("modality", "k", "histogram"):
            if field not in doc:
                raise SchemaError(f"{path}: missing column {field!r}")
        if not doc["histogram"]:
            raise SchemaError(f"{path}: empty histogram")
        lengths = np.repeat(
            [int(length) for length in doc["histogram"]],
            [int(c) for c in doc["histogram"].values()],
        )
        entries.append((str(doc["modality"]), int(doc["k"]), lengths))

    modalities = sorted({m for m, _, _ in entries})
    ks = sorted({k for _, k, _ in entries})
    fig, axes = plt.subplots(1, len(modalities),
                             figsize=(4 * len(modalities), 3.2), squeeze=False)
    for ax, modality in zip(axes[0], modalities):
        group = sorted(
            [(k, lengths) for m, k, lengths in entries if m == modality]
        )
        parts = ax.violinplot([lengths for _, lengths in group],
                              showmedians=True, widths=0.8)
        for body, (k, _) in zip(parts["bodies"], group):
            body.set_facecolor(K_COLORS[ks.index(k) % len(K_COLORS)])
            body.set_alpha(0.6)
        ax.set_xticks(range(1, len(group) + 1))
        ax.set_xticklabels([str(k) for k, _ in group])
        ax.set_xlabel("merge iterations")
        ax.set_ylabel("activity length")
        ax.set_title(modality)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    _save(fig, out)


def render_grouped_bars(inputs: list[str], out: str | Path, title: str = ""):
    """Mean macro F1 per method, grouped by window length, SD whiskers."""
    rows = []
    for path in inputs:
        rows += _read_csv(path, ["modality", "L_win", "method", "fold", "macro_f1"])
    windows = sorted({int(r["L_win"]) for r in rows})
    methods = sorted({r["method"] for r in rows})
    means = np.zeros((len(methods), len(windows)))
    sds = np.zeros_like(means)
    for m_i, method in enumerate(methods):
        for w_i, window in enumerate(windows):
            scores = [float(r["macro_f1"]) for r in rows
                      if r["method"] == method and int(r["L_win"]) == window]
            if scores:
                means[m_i, w_i] = np.mean(scores)
                sds[m_i, w_i] = np.std(scores)
    fig, ax = plt.subplots(figsize=(1.8 + 1.6 * len(windows) * len(methods) / 3, 3.4))
    width = 0.8 / len(methods)
    x = np.arange(len(windows))
    for m_i, method in enumerate(methods):
        ax.bar(x + (m_i - (len(methods) - 1) / 2) * width, means[m_i],
               width=width, yerr=sds[m_i], capsize=3, label=method)
    ax.set_xticks(x)
    ax.set_xticklabels([str(w) for w in windows])
    ax.set_xlabel("window length")
    ax.set_ylabel("macro F1")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, out)


def render_distribution(inputs: list[str], out: str | Path, title: str = ""):
    """Histogram of trajectory distances, one series per task pair."""
    rows = []
    for path in inputs:
        rows += _read_csv(path, ["task_a", "task_b", "distance"])
    pairs = sorted({(r["task_a"], r["task_b"]) for r in rows})
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    values = [
        [float(r["distance"]) for r in rows if (r["task_a"], r["task_b"]) == pair]
        for pair in pairs
    ]
    ax.hist(values, bins=20, density=True, histtype="stepfilled", alpha=0.55,
            label=[f"{a} vs {b}" for a, b in pairs])
    ax.set_xlabel("mean trajectory distance")
    ax.set_ylabel("density")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, out)


def render_curve(inputs: list[str], out: str | Path, title: str = ""):
    """F1 against training fraction, with SD error bars when present."""
    rows = []
    for path in inputs:
        rows += _read_csv(path, ["train_fraction", "mean_f1"])
    rows.sort(key=lambda r: float(r["train_fraction"]))
    x = [float(r["train_fraction"]) for r in rows]
    y = [float(r["mean_f1"]) for r in rows]
    err = [float(r.get("sd_f1", 0) or 0) for r in rows]
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    ax.errorbar(x, y, yerr=err, marker="o", capsize=3)
    ax.set_xlabel("fraction of training windows")
    ax.set_ylabel("macro F1")
    ax.set_ylim(0, 1.05)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, out)


RENDERERS = {
    "violin": render_violin,
    "grouped-bars": render_grouped_bars,
    "distribution": render_distribution,
    "curve": render_curve,
}
