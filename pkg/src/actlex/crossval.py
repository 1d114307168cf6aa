"""Participant-independent cross-validation of task recognition.

Participants are shuffled with the experiment seed and split into folds;
everything fitted from data (BPE vocabulary, autoencoder, label map) is
fitted on the training participants of each fold only.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import bpe
from .config import AE_DEPTHS, ExperimentConfig
from .events import Session, normalize_coords
from .tokenizer import (
    WindowSample,
    atoms_for,
    observed_keys,
    segment_windows,
    tokenize_trial,
)
from .train import (
    TrainReport,
    build_dataset,
    macro_f1,
    predict,
    train_autoencoder,
    train_classifier,
)


def session_windows(session: Session, cfg: ExperimentConfig) -> list[WindowSample]:
    """Normalize, tokenize and window every trial of a session."""
    windows: list[WindowSample] = []
    for trial in session.trials:
        tokens = tokenize_trial(
            normalize_coords(trial), cfg.modality, session.dataset_profile, cfg.idt
        )
        windows.extend(segment_windows(
            tokens, cfg.window_len, trial.participant_id, trial.task_id, cfg.modality
        ))
    return windows


def partition_participants(participants: list[str], n_folds: int,
                           seed: int) -> list[list[str]]:
    if len(participants) < n_folds:
        raise ValueError(
            f"{len(participants)} participants cannot fill {n_folds} folds"
        )
    rng = np.random.Generator(np.random.PCG64(seed))
    shuffled = list(rng.permutation(sorted(participants)))
    return [sorted(fold) for fold in np.array_split(shuffled, n_folds)]


def fit_fold_vocab(train_windows: list[WindowSample],
                   cfg: ExperimentConfig, session: Session) -> bpe.Vocabulary:
    streams = [list(w.tokens) for w in train_windows]
    atoms = atoms_for(cfg.modality, session.dataset_profile,
                      keys=observed_keys(streams))
    if cfg.method == "bpe":
        base = bpe.Vocabulary(tuple(atoms), (), 0)
        corpus = [base.ids_for(s) for s in streams]
        return bpe.learn(corpus, cfg.bpe_k, atoms)
    return bpe.Vocabulary(tuple(atoms), (), 0)


def _subsample(labels: np.ndarray, fraction: float,
               rng: np.random.Generator) -> np.ndarray:
    """Seeded random subset of window indices, stratified per class with a
    one-window floor so tiny fractions still leave every class trainable.
    fraction 1.0 is the identity."""
    indices = np.arange(len(labels))
    if fraction >= 1.0:
        return indices
    chosen = []
    for c in sorted(set(labels)):
        c_idx = indices[labels == c]
        n = max(1, int(round(fraction * len(c_idx))))
        pick = rng.choice(len(c_idx), size=n, replace=False)
        chosen.append(c_idx[np.sort(pick)])
    return np.sort(np.concatenate(chosen))


@dataclass
class FoldOutcome:
    fold: int
    f1: float
    seconds: float
    epoch_losses: list[float]
    train_participants: list[str]
    test_participants: list[str]


def run_fold(session: Session, cfg: ExperimentConfig,
             folds: list[list[str]], fold_idx: int) -> FoldOutcome:
    started = time.perf_counter()
    test_set = set(folds[fold_idx])
    train_set = {p for i, f in enumerate(folds) if i != fold_idx for p in f}
    if train_set & test_set:
        raise RuntimeError("participant appears in both train and test splits")

    windows = session_windows(session, cfg)
    train_windows = [w for w in windows if w.participant_id in train_set]
    test_windows = [w for w in windows if w.participant_id in test_set]
    if not train_windows or not test_windows:
        raise ValueError(f"fold {fold_idx} has an empty split")

    fold_seed = int(np.random.SeedSequence([cfg.seed, fold_idx]).generate_state(1)[0])
    rng = np.random.Generator(np.random.PCG64(fold_seed))

    # vocabulary and autoencoder see all training-participant windows (that is
    # the leakage boundary); train_fraction subsamples the classifier's data
    vocab = fit_fold_vocab(train_windows, cfg, session)
    label_map = {t: i for i, t in enumerate(sorted({w.task_id for w in windows}))}

    encoder = None
    if cfg.method == "ae":
        ae_cfg = replace(cfg.autoencoder,
                         encoder_hidden=AE_DEPTHS[cfg.ae_depth], seed=fold_seed)
        rows = [vocab.ids_for(w.tokens) for w in train_windows]
        encoder, _ = train_autoencoder(ae_cfg, rows, len(vocab.atoms))

    window_tasks = np.array([w.task_id for w in train_windows])
    keep = _subsample(window_tasks, cfg.train_fraction, rng)
    train_windows = [train_windows[int(i)] for i in keep]

    train_ds = build_dataset(train_windows, vocab, cfg.method, label_map, encoder)
    test_ds = build_dataset(test_windows, vocab, cfg.method, label_map, encoder)

    clf_cfg = replace(cfg.classifier, seed=fold_seed)
    model, epoch_losses = train_classifier(clf_cfg, train_ds,
                                           max_len=cfg.window_len)
    y_pred = predict(model, test_ds, clf_cfg.batch_size)
    score = macro_f1(np.asarray(test_ds.labels), y_pred, len(label_map))
    return FoldOutcome(
        fold=fold_idx,
        f1=score,
        seconds=time.perf_counter() - started,
        epoch_losses=epoch_losses,
        train_participants=sorted(train_set),
        test_participants=sorted(test_set),
    )


def cross_validate(session: Session, cfg: ExperimentConfig,
                   jobs: int = 1) -> tuple[TrainReport, list[FoldOutcome]]:
    started = time.perf_counter()
    folds = partition_participants(session.participants(), cfg.n_folds, cfg.seed)
    if jobs > 1:
        import multiprocessing as mp
        ctx = mp.get_context("spawn")
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            outcomes = list(pool.map(
                _fold_job, [(session, cfg, folds, i) for i in range(cfg.n_folds)]
            ))
    else:
        outcomes = [run_fold(session, cfg, folds, i) for i in range(cfg.n_folds)]
    report = TrainReport(
        config=cfg.echo(),
        fold_scores=[o.f1 for o in outcomes],
        epoch_losses=[o.epoch_losses for o in outcomes],
        seconds=time.perf_counter() - started,
    )
    return report, outcomes


def _fold_job(args) -> FoldOutcome:
    return run_fold(*args)


def report_rows(session: Session, cfg: ExperimentConfig,
                outcomes: list[FoldOutcome]) -> list[dict]:
    """Per-fold CSV rows in the shape the figures tooling consumes."""
    return [
        {
            "dataset_profile": session.dataset_profile.value,
            "modality": cfg.modality.value,
            "L_win": cfg.window_len,
            "method": cfg.method_label,
            "fold": o.fold,
            "macro_f1": f"{o.f1:.6f}",
            "seconds": f"{o.seconds:.3f}",
        }
        for o in outcomes
    ]
