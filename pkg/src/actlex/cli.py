"""Command-line front door for the full pipeline.

Commands compose through files only (events/tokens JSONL, vocab JSON, CSV
reports); every artifact-producing command writes a RunManifest next to its
primary output and `actlex rerun` re-executes a manifest and verifies the
outputs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, bpe
from .analysis import top_frequent, vocab_stats
from .behavior import (
    FittsTrial,
    fitts_fit,
    keyboard_proficiency,
    task_pair_distances,
    trajectory_of,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .config import AutoencoderConfig, ClassifierConfig, ExperimentConfig
from .crossval import cross_validate, fit_fold_vocab, report_rows, session_windows
from .events import (
    DatasetProfile,
    Session,
    normalize_coords,
    parse_events,
    serialize_events,
)
from .manifest import RunManifest, load_manifest, sha256_file
from .synth import SynthConfig, TaskProfile, default_profiles, generate
from .tokenizer import IdtConfig, Modality, observed_keys, segment_windows, tokenize_trial
from .train import build_dataset, macro_f1, predict, train_classifier


class DataError(ValueError):
    pass


def _read_session(path: str, profile: str | None = None) -> Session:
    p = Path(path)
    if not p.exists():
        raise DataError(f"input file {path} does not exist")
    with open(p, "r", encoding="utf-8") as fh:
        return parse_events(fh, DatasetProfile(profile) if profile else None)


def _csv_text(header: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _json_text(doc) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=1, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# tokens file format: first record is {"record": "meta", ...}, then one
# record per trial stream or per window, tokens space-separated.

def _write_tokens(meta: dict, records: list[dict]) -> str:
    lines = [json.dumps({"record": "meta", **meta}, ensure_ascii=False)]
    lines += [json.dumps(r, ensure_ascii=False) for r in records]
    return "\n".join(lines) + "\n"


def _read_tokens(path: str) -> tuple[dict, list[dict]]:
    p = Path(path)
    if not p.exists():
        raise DataError(f"tokens file {path} does not exist")
    meta: dict | None = None
    records = []
    with open(p, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{line_no}: invalid JSON ({exc.msg})") from exc
            if rec.get("record") == "meta":
                meta = rec
            else:
                records.append(rec)
    if meta is None:
        raise DataError(f"{path}: missing meta record")
    return meta, records


def _token_streams(records: list[dict]) -> list[list[str]]:
    return [r["tokens"].split() for r in records]


def _freeze_seconds(rows: list[dict]) -> list[dict]:
    """CSV artifacts must be byte-stable under `rerun`, so the volatile
    wall-clock column is zeroed; real timings go into the manifest."""
    return [{**row, "seconds": "0.000"} for row in rows]


# ---------------------------------------------------------------------------
# commands

def cmd_synth(args) -> int:
    if args.profiles:
        profiles = _profiles_from_json(args.profiles)
    else:
        profiles = default_profiles()
    cfg = SynthConfig(
        participants=args.participants,
        trials_per_task=args.trials,
        events_per_trial=args.events,
        profiles=tuple(profiles),
        dataset_profile=DatasetProfile(args.profile),
        seed=args.seed,
        window_len=args.window_len,
    )
    session, truths = generate(cfg)
    man = RunManifest("synth", _argv(args), args.seed, config={
        "participants": cfg.participants, "trials_per_task": cfg.trials_per_task,
        "events_per_trial": cfg.events_per_trial, "dataset_profile": cfg.dataset_profile.value,
        "window_len": cfg.window_len, "tasks": [p.task_id for p in cfg.profiles],
    })
    if args.profiles:
        man.add_input(args.profiles)
    man.write_output(args.out, "\n".join(serialize_events(session)) + "\n")
    truth_doc = [
        {"participant": t.participant_id, "task": t.task_id, "trial": t.trial_index,
         "motifs": t.motif_counts}
        for t in truths
    ]
    man.write_output(args.truth or args.out + ".truth.json", _json_text(truth_doc))
    man.save(RunManifest.path_for(args.out))
    return 0


def _profiles_from_json(path: str) -> list[TaskProfile]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    profiles = []
    for entry in doc["profiles"]:
        profiles.append(TaskProfile(
            task_id=entry["task_id"],
            key_distribution=dict(entry.get("key_distribution", {})),
            mouse_area_bias=tuple(entry["mouse_area_bias"]),
            pinpoint_ratio=float(entry["pinpoint_ratio"]),
            planted_motifs=tuple(
                (tuple(tokens), float(rate))
                for tokens, rate in entry.get("planted_motifs", [])
            ),
            mouse_fraction=float(entry.get("mouse_fraction", 0.5)),
        ))
    return profiles


def cmd_ingest(args) -> int:
    session = _read_session(args.input, args.profile)
    man = RunManifest("ingest", _argv(args), None)
    man.add_input(args.input)
    man.write_output(args.out, "\n".join(serialize_events(session)) + "\n")
    man.save(RunManifest.path_for(args.out))
    return 0


def cmd_tokenize(args) -> int:
    session = _read_session(args.input)
    modality = Modality(args.modality)
    idt = IdtConfig(args.idt_duration_ms, args.idt_dispersion)
    records = []
    meta = {
        "modality": modality.value,
        "dataset_profile": session.dataset_profile.value,
        "window_len": args.window,
    }
    for trial in session.trials:
        tokens = tokenize_trial(
            normalize_coords(trial), modality, session.dataset_profile, idt
        )
        if args.window is None:
            records.append({
                "record": "trial",
                "participant_id": trial.participant_id,
                "task_id": trial.task_id,
                "trial_index": trial.trial_index,
                "tokens": " ".join(tokens),
            })
        else:
            for w_i, window in enumerate(segment_windows(
                    tokens, args.window, trial.participant_id, trial.task_id, modality)):
                records.append({
                    "record": "window",
                    "participant_id": window.participant_id,
                    "task_id": window.task_id,
                    "trial_index": trial.trial_index,
                    "window_index": w_i,
                    "tokens": " ".join(window.tokens),
                })
    man = RunManifest("tokenize", _argv(args), None, config=meta)
    man.add_input(args.input)
    man.write_output(args.out, _write_tokens(meta, records))
    man.save(RunManifest.path_for(args.out))
    return 0


def _atoms_from_meta(meta: dict, streams: list[list[str]]) -> list[str]:
    from .tokenizer import atoms_for

    return atoms_for(
        Modality(meta["modality"]),
        DatasetProfile(meta["dataset_profile"]),
        keys=observed_keys(streams),
    )


def cmd_learn_vocab(args) -> int:
    meta, records = _read_tokens(args.input)
    streams = _token_streams(records)
    if not streams:
        raise DataError("tokens file has no sequences")
    atoms = _atoms_from_meta(meta, streams)
    base = bpe.Vocabulary(tuple(atoms), (), 0)
    corpus = [base.ids_for(s) for s in streams]
    vocab = bpe.learn(corpus, args.k, atoms)
    doc = json.loads(bpe.save_vocab(vocab).decode("utf-8"))
    doc["meta"] = {
        "modality": meta["modality"],
        "dataset_profile": meta["dataset_profile"],
        "window_len": meta.get("window_len"),
        "sequences": len(streams),
    }
    man = RunManifest("learn-vocab", _argv(args), None,
                      config={"k": args.k, **doc["meta"]})
    man.add_input(args.input)
    man.write_output(args.out, _json_text(doc))
    man.save(RunManifest.path_for(args.out))
    return 0


def _load_vocab_file(path: str) -> tuple[bpe.Vocabulary, dict]:
    p = Path(path)
    if not p.exists():
        raise DataError(f"vocabulary file {path} does not exist")
    data = p.read_bytes()
    vocab = bpe.load_vocab(data)
    meta = json.loads(data.decode("utf-8")).get("meta", {})
    return vocab, meta


def cmd_encode(args) -> int:
    meta, records = _read_tokens(args.input)
    vocab, _ = _load_vocab_file(args.vocab)
    out_records = []
    for rec in records:
        ids = bpe.encode(vocab.ids_for(rec["tokens"].split()), vocab)
        out = dict(rec)
        out["ids"] = ids
        del out["tokens"]
        out_records.append(out)
    man = RunManifest("encode", _argv(args), None)
    man.add_input(args.input)
    man.add_input(args.vocab)
    man.write_output(args.out, _write_tokens(meta, out_records))
    man.save(RunManifest.path_for(args.out))
    return 0


def cmd_vocab_stats(args) -> int:
    vocab, meta = _load_vocab_file(args.vocab)
    stats = vocab_stats(vocab)
    row = {
        "modality": meta.get("modality", ""),
        "dataset_profile": meta.get("dataset_profile", ""),
        "k": vocab.k_requested,
        "size": stats.vocab_size,
        "min": stats.length_min,
        "median": stats.length_median,
        "max": stats.length_max,
    }
    man = RunManifest("vocab-stats", _argv(args), None)
    man.add_input(args.vocab)
    man.write_output(args.out, _csv_text(list(row), [row]))
    if args.hist_out:
        hist_doc = {
            "modality": meta.get("modality", ""),
            "dataset_profile": meta.get("dataset_profile", ""),
            "k": vocab.k_requested,
            "histogram": {str(k): v for k, v in sorted(stats.length_histogram.items())},
        }
        man.write_output(args.hist_out, _json_text(hist_doc))
    man.save(RunManifest.path_for(args.out))
    return 0


def cmd_top_activities(args) -> int:
    meta, records = _read_tokens(args.input)
    vocab, _ = _load_vocab_file(args.vocab)
    corpus = [vocab.ids_for(s) for s in _token_streams(records)]
    top = top_frequent(corpus, vocab, args.n, merged_only=args.merged_only)
    doc = [
        {"activity_id": fa.activity_id, "rendered": fa.rendered, "count": fa.count}
        for fa in top
    ]
    man = RunManifest("top-activities", _argv(args), None,
                      config={"n": args.n, "merged_only": args.merged_only})
    man.add_input(args.input)
    man.add_input(args.vocab)
    man.write_output(args.out, _json_text(doc))
    man.save(RunManifest.path_for(args.out))
    return 0


def _experiment_from_args(args) -> ExperimentConfig:
    return ExperimentConfig(
        modality=Modality(args.modality),
        window_len=args.window,
        method=args.method,
        bpe_k=args.k,
        ae_depth=args.ae_depth,
        n_folds=getattr(args, "folds", 5),
        train_fraction=args.train_fraction,
        seed=args.seed,
        idt=IdtConfig(args.idt_duration_ms, args.idt_dispersion),
        classifier=ClassifierConfig(
            num_layers=args.layers,
            d_model=args.dmodel,
            learning_rate=args.lr,
            epochs=args.epochs,
            batch_size=args.batch_size,
            seed=args.seed,
        ),
        autoencoder=AutoencoderConfig(seed=args.seed),
    )


def cmd_train(args) -> int:
    session = _read_session(args.input)
    cfg = _experiment_from_args(args)
    participants = session.participants()
    if len(participants) < 2:
        raise DataError("need at least two participants for a holdout split")
    started = time.perf_counter()
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    shuffled = list(rng.permutation(participants))
    n_test = max(1, int(round(args.holdout * len(shuffled))))
    test_set = set(shuffled[:n_test])

    windows = session_windows(session, cfg)
    train_windows = [w for w in windows if w.participant_id not in test_set]
    test_windows = [w for w in windows if w.participant_id in test_set]
    if not train_windows or not test_windows:
        raise DataError("holdout split left one side empty; adjust --holdout")
    vocab = fit_fold_vocab(train_windows, cfg, session)
    label_map = {t: i for i, t in enumerate(sorted({w.task_id for w in windows}))}
    encoder = None
    if cfg.method == "ae":
        from dataclasses import replace

        from .config import AE_DEPTHS
        from .train import train_autoencoder

        ae_cfg = replace(cfg.autoencoder, encoder_hidden=AE_DEPTHS[cfg.ae_depth])
        rows = [vocab.ids_for(w.tokens) for w in train_windows]
        encoder, _ = train_autoencoder(ae_cfg, rows, len(vocab.atoms))
    train_ds = build_dataset(train_windows, vocab, cfg.method, label_map, encoder)
    test_ds = build_dataset(test_windows, vocab, cfg.method, label_map, encoder)
    model, _ = train_classifier(cfg.classifier, train_ds, max_len=cfg.window_len)
    y_pred = predict(model, test_ds, cfg.classifier.batch_size)
    score = macro_f1(np.asarray(test_ds.labels), y_pred, len(label_map))

    man = RunManifest("train", _argv(args), cfg.seed, config=cfg.echo())
    man.add_input(args.input)
    man.write_output(args.out, save_checkpoint(
        model, cfg, vocab, label_map, max(cfg.window_len, train_ds.max_len),
        encoder))
    man.doc["wall_seconds"] = round(time.perf_counter() - started, 3)
    row = {
        "dataset_profile": session.dataset_profile.value,
        "modality": cfg.modality.value,
        "L_win": cfg.window_len,
        "method": cfg.method_label,
        "fold": 0,
        "macro_f1": f"{score:.6f}",
        "seconds": "0.000",
    }
    man.write_output(args.report, _csv_text(list(row), [row]))
    man.save(RunManifest.path_for(args.out))
    return 0


def cmd_evaluate(args) -> int:
    model_path = Path(args.model)
    if not model_path.exists():
        raise DataError(f"model checkpoint {args.model} does not exist; train first")
    model, cfg, vocab, label_map, encoder = load_checkpoint(model_path.read_bytes())
    session = _read_session(args.input)
    windows = session_windows(session, cfg)
    if not windows:
        raise DataError("no windows produced from the evaluation events")
    dataset = build_dataset(windows, vocab, cfg.method, label_map, encoder)
    started = time.perf_counter()
    y_pred = predict(model, dataset, cfg.classifier.batch_size)
    score = macro_f1(np.asarray(dataset.labels), y_pred, len(label_map))
    row = {
        "dataset_profile": session.dataset_profile.value,
        "modality": cfg.modality.value,
        "L_win": cfg.window_len,
        "method": cfg.method_label,
        "fold": 0,
        "macro_f1": f"{score:.6f}",
        "seconds": "0.000",
    }
    man = RunManifest("evaluate", _argv(args), cfg.seed, config=cfg.echo())
    man.doc["wall_seconds"] = round(time.perf_counter() - started, 3)
    man.add_input(args.model)
    man.add_input(args.input)
    man.write_output(args.out, _csv_text(list(row), [row]))
    man.save(RunManifest.path_for(args.out))
    return 0


def cmd_cross_validate(args) -> int:
    session = _read_session(args.input)
    cfg = _experiment_from_args(args)
    report, outcomes = cross_validate(session, cfg, jobs=args.jobs)
    rows = _freeze_seconds(report_rows(session, cfg, outcomes))
    man = RunManifest("cross-validate", _argv(args), cfg.seed, config=cfg.echo())
    man.doc["wall_seconds"] = {f"fold{o.fold}": round(o.seconds, 3) for o in outcomes}
    man.add_input(args.input)
    man.write_output(args.out, _csv_text(list(rows[0]), rows))
    echo = dict(report.config)
    echo["fold_scores"] = [round(s, 6) for s in report.fold_scores]
    echo["mean_f1"] = round(report.mean_f1, 6)
    echo["sd_f1"] = round(report.sd_f1, 6)
    man.write_output(args.echo_out or args.out + ".config.json", _json_text(echo))
    man.save(RunManifest.path_for(args.out))
    return 0


def cmd_fitts(args) -> int:
    p = Path(args.input)
    if not p.exists():
        raise DataError(f"input file {args.input} does not exist")
    by_participant: dict[str, list[FittsTrial]] = {}
    with open(p, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            by_participant.setdefault(rec["participant"], []).append(
                FittsTrial(d=float(rec["d"]), w=float(rec["w"]), mt=float(rec["mt"]))
            )
    if not by_participant:
        raise DataError("no movement trials in input")
    rows = []
    for participant in sorted(by_participant):
        a, b = fitts_fit(by_participant[participant])
        rows.append({"participant": participant, "a": f"{a:.9f}", "b": f"{b:.9f}"})
    man = RunManifest("fitts", _argv(args), None)
    man.add_input(args.input)
    man.write_output(args.out, _csv_text(["participant", "a", "b"], rows))
    man.save(RunManifest.path_for(args.out))
    return 0


def cmd_proficiency(args) -> int:
    session = _read_session(args.input)
    by_participant: dict[str, list] = {}
    for trial in session.trials:
        by_participant.setdefault(trial.participant_id, []).extend(trial.key_events())
    rows = []
    for participant in sorted(by_participant):
        mean_press_s, keys_per_min = keyboard_proficiency(by_participant[participant])
        rows.append({
            "participant": participant,
            "mean_press_s": f"{mean_press_s:.6f}",
            "keys_per_min": f"{keys_per_min:.6f}",
        })
    man = RunManifest("proficiency", _argv(args), None)
    man.add_input(args.input)
    man.write_output(args.out, _csv_text(
        ["participant", "mean_press_s", "keys_per_min"], rows))
    man.save(RunManifest.path_for(args.out))
    return 0


def cmd_task_distance(args) -> int:
    session = _read_session(args.input)
    trajectories: dict[str, list] = {}
    for trial in session.trials:
        traj = trajectory_of(normalize_coords(trial))
        if len(traj) >= 2:
            trajectories.setdefault(trial.task_id, []).append(traj)
    tasks = sorted(trajectories)
    if len(tasks) < 2:
        raise DataError("need mouse trajectories from at least two tasks")
    rows, pair_rows = [], []
    for i, task_a in enumerate(tasks):
        for task_b in tasks[i + 1:]:
            dists = task_pair_distances(
                trajectories[task_a], trajectories[task_b], args.points)
            rows.append({
                "task_a": task_a, "task_b": task_b,
                "distance": f"{float(np.mean(dists)):.9f}",
            })
            for pair_i, d in enumerate(dists):
                pair_rows.append({
                    "task_a": task_a, "task_b": task_b,
                    "pair": pair_i, "distance": f"{d:.9f}",
                })
    man = RunManifest("task-distance", _argv(args), None)
    man.add_input(args.input)
    man.write_output(args.out, _csv_text(["task_a", "task_b", "distance"], rows))
    if args.pairs_out:
        man.write_output(args.pairs_out, _csv_text(
            ["task_a", "task_b", "pair", "distance"], pair_rows))
    man.save(RunManifest.path_for(args.out))
    return 0


def cmd_rerun(args) -> int:
    doc = load_manifest(args.manifest)
    argv = doc["argv"]
    status = main(argv)
    if status != 0:
        print(f"rerun: command exited with status {status}", file=sys.stderr)
        return status
    mismatched = []
    for path, digest in doc["outputs"].items():
        if not Path(path).exists() or sha256_file(path) != digest:
            mismatched.append(path)
    if mismatched:
        print("rerun: outputs differ from manifest: " + ", ".join(mismatched),
              file=sys.stderr)
        return 1
    print(f"rerun: {len(doc['outputs'])} outputs reproduced byte-identically")
    return 0


def _argv(args) -> list[str]:
    return list(args._raw_argv)


def _add_idt_flags(sp):
    sp.add_argument("--idt-duration-ms", type=int, default=100)
    sp.add_argument("--idt-dispersion", type=float, default=0.1)


def _add_experiment_flags(sp):
    sp.add_argument("--modality", choices=[m.value for m in Modality], required=True)
    sp.add_argument("--window", type=int, required=True)
    sp.add_argument("--method", choices=["noenc", "ae", "bpe"], default="bpe")
    sp.add_argument("--k", type=int, default=300, help="BPE iterations")
    sp.add_argument("--ae-depth", type=int, choices=[1, 2, 3], default=1)
    sp.add_argument("--layers", type=int, default=2)
    sp.add_argument("--dmodel", type=int, default=16)
    sp.add_argument("--lr", type=float, default=1e-3)
    sp.add_argument("--epochs", type=int, default=30)
    sp.add_argument("--batch-size", type=int, default=64)
    sp.add_argument("--train-fraction", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    _add_idt_flags(sp)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actlex",
        description="action-lexicon toolkit for mouse/keyboard interaction logs",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="generate a synthetic session")
    sp.add_argument("--out", required=True)
    sp.add_argument("--truth", default=None)
    sp.add_argument("--participants", type=int, default=12)
    sp.add_argument("--trials", type=int, default=2)
    sp.add_argument("--events", type=int, default=1000)
    sp.add_argument("--profile", choices=[p.value for p in DatasetProfile],
                    default=DatasetProfile.PRESS_RELEASE.value)
    sp.add_argument("--profiles", default=None,
                    help="JSON file with custom task profiles")
    sp.add_argument("--window-len", type=int, default=150,
                    help="reference window for motif injection rates")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("ingest", help="validate and canonicalize an event log")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--profile", choices=[p.value for p in DatasetProfile], default=None)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("tokenize", help="events to action tokens")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--modality", choices=[m.value for m in Modality], required=True)
    sp.add_argument("--window", type=int, default=None,
                    help="emit fixed windows instead of trial streams")
    _add_idt_flags(sp)
    sp.set_defaults(func=cmd_tokenize)

    sp = sub.add_parser("learn-vocab", help="learn a BPE vocabulary from tokens")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_learn_vocab)

    sp = sub.add_parser("encode", help="encode token sequences with a vocabulary")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--vocab", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("vocab-stats", help="vocabulary size and length stats")
    sp.add_argument("--vocab", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--hist-out", default=None)
    sp.set_defaults(func=cmd_vocab_stats)

    sp = sub.add_parser("top-activities", help="most frequent activities")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--vocab", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--n", type=int, default=10)
    sp.add_argument("--merged-only", action="store_true")
    sp.set_defaults(func=cmd_top_activities)

    sp = sub.add_parser("train", help="train one model on a holdout split")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True, help="model checkpoint path")
    sp.add_argument("--report", required=True, help="CSV report path")
    sp.add_argument("--holdout", type=float, default=0.2)
    _add_experiment_flags(sp)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("evaluate", help="evaluate a trained model on events")
    sp.add_argument("--model", required=True)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("cross-validate",
                        help="participant-independent cross-validation")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--echo-out", default=None)
    sp.add_argument("--folds", type=int, default=5)
    sp.add_argument("--jobs", type=int, default=1)
    _add_experiment_flags(sp)
    sp.set_defaults(func=cmd_cross_validate)

    sp = sub.add_parser("fitts", help="movement-time regression per participant")
    sp.add_argument("--in", dest="input", required=True,
                    help="CSV with participant,d,w,mt columns")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_fitts)

    sp = sub.add_parser("proficiency", help="keyboard proficiency per participant")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_proficiency)

    sp = sub.add_parser("task-distance", help="trajectory distances between tasks")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--pairs-out", default=None)
    sp.add_argument("--points", type=int, default=101)
    sp.set_defaults(func=cmd_task_distance)

    sp = sub.add_parser("rerun", help="re-execute a manifest and verify outputs")
    sp.add_argument("--manifest", required=True)
    sp.set_defaults(func=cmd_rerun)

    return parser


def main(argv: list[str] | None = None) -> int:
    raw = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(raw)
    args._raw_argv = raw
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"actlex {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
