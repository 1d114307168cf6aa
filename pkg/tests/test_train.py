import numpy as np
import pytest
import torch
import torch.nn as nn
from sklearn.metrics import f1_score

from actlex import bpe
from actlex.config import AutoencoderConfig, ClassifierConfig
from actlex.model import SequenceClassifier, TokenAutoencoder, masked_mean
from actlex.tokenizer import EOT, Modality, WindowSample
from actlex.train import (
    EncodedDataset,
    PaddedBatch,
    build_dataset,
    gradient_check,
    macro_f1,
    predict,
    train_autoencoder,
    train_classifier,
)


class TestMacroF1:
    def test_perfect(self):
        assert macro_f1([0, 1, 2, 1], [0, 1, 2, 1], 3) == 1.0

    def test_all_one_class_on_balanced_three(self):
        y_true = [0, 1, 2] * 10
        y_pred = [0] * 30
        assert abs(macro_f1(y_true, y_pred, 3) - 1 / 6) < 1e-12

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            macro_f1([], [], 3)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            macro_f1([0, 1], [0], 2)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            macro_f1([0, 3], [0, 1], 3)

    def test_matches_sklearn(self):
        rng = np.random.Generator(np.random.PCG64(5))
        for _ in range(30):
            c = int(rng.integers(2, 6))
            n = int(rng.integers(1, 60))
            y_true = rng.integers(0, c, n)
            y_pred = rng.integers(0, c, n)
            expected = f1_score(y_true, y_pred, labels=range(c),
                                average="macro", zero_division=0)
            assert macro_f1(y_true, y_pred, c) == pytest.approx(expected, abs=1e-12)

    def test_uniform_random_concentrates_near_third(self):
        rng = np.random.Generator(np.random.PCG64(7))
        y_true = np.repeat([0, 1, 2], 3400)
        y_pred = rng.integers(0, 3, y_true.size)
        assert abs(macro_f1(y_true, y_pred, 3) - 1 / 3) < 0.05


def windows_of(rows, task_ids, modality=Modality.KEYBOARD):
    return [
        WindowSample(tuple(r), f"p{i}", task, modality)
        for i, (r, task) in enumerate(zip(rows, task_ids))
    ]


def atoms_vocab(tokens):
    return bpe.Vocabulary((EOT,) + tuple(tokens), (), 0)


class TestBuildDataset:
    def test_noenc_equal_lengths_no_padding(self):
        vocab = atoms_vocab(["KeyDown_a", "KeyDown_b"])
        windows = windows_of([["KeyDown_a"] * 4, ["KeyDown_b"] * 4], ["t0", "t1"])
        ds = build_dataset(windows, vocab, "noenc", {"t0": 0, "t1": 1})
        batch = next(ds.batches(8))
        assert not batch.mask.any()
        assert batch.ids.shape == (2, 4)

    def test_bpe_single_merge_covers_whole_window(self):
        atoms = [EOT, "a", "b"]
        corpus = [[1, 2, 1, 2], [1, 2, 1, 2]]
        v1 = bpe.learn(corpus, 2, atoms)  # (a,b) then (ab,ab)
        windows = windows_of([["a", "b", "a", "b"], ["a", "b"]], ["t0", "t1"])
        ds = build_dataset(windows, v1, "bpe", {"t0": 0, "t1": 1})
        assert sorted(len(r) for r in ds.rows) == [1, 1]

    def test_empty_window_list_yields_no_batches(self):
        vocab = atoms_vocab(["a"])
        ds = build_dataset([], vocab, "noenc", {})
        assert list(ds.batches(4)) == []

    def test_unknown_token_rejected(self):
        vocab = atoms_vocab(["a"])
        windows = windows_of([["zz"]], ["t0"])
        with pytest.raises(bpe.UnknownTokenError):
            build_dataset(windows, vocab, "noenc", {"t0": 0})

    def test_unknown_task_rejected(self):
        vocab = atoms_vocab(["a"])
        windows = windows_of([["a"]], ["mystery"])
        with pytest.raises(ValueError):
            build_dataset(windows, vocab, "noenc", {"t0": 0})

    def test_mask_true_implies_pad_id(self):
        ds = EncodedDataset(rows=[[1, 2, 3], [1]], labels=[0, 1],
                            num_classes=2, max_len=3, vocab_size=5)
        batch = ds.batch([0, 1])
        assert bool((batch.ids[batch.mask] == ds.pad_id).all())


def small_model(seed=0, vocab_size=9, num_classes=3, max_len=8, d_model=16):
    torch.manual_seed(seed)
    cfg = ClassifierConfig(num_layers=2, d_model=d_model, seed=seed)
    return SequenceClassifier(cfg, num_classes=num_classes, max_len=max_len,
                              vocab_size=vocab_size)


def small_batch(seed=1, batch=4, width=8, vocab_size=9, pad_tail=3):
    rng = np.random.Generator(np.random.PCG64(seed))
    ids = torch.from_numpy(rng.integers(0, vocab_size, (batch, width))).long()
    mask = torch.zeros((batch, width), dtype=torch.bool)
    mask[0, width - pad_tail:] = True
    ids[mask] = vocab_size  # pad id
    labels = torch.from_numpy(rng.integers(0, 3, batch)).long()
    return PaddedBatch(mask=mask, labels=labels, ids=ids)


class TestModelContracts:
    def test_softmax_rows_sum_to_one(self):
        model = small_model().eval()
        batch = small_batch()
        with torch.no_grad():
            probs = torch.softmax(model(batch.ids, batch.mask), dim=1)
        assert (probs >= 0).all()
        assert torch.allclose(probs.sum(dim=1), torch.ones(4), atol=1e-6)

    def test_padded_positions_do_not_affect_logits(self):
        model = small_model().eval()
        batch = small_batch()
        with torch.no_grad():
            base = model(batch.ids, batch.mask)
            ids2 = batch.ids.clone()
            ids2[batch.mask] = 3  # arbitrary real token in the padded slots
            permuted = model(ids2, batch.mask)
        assert (base - permuted).abs().max() < 1e-6

    def test_fully_padded_batch_rejected(self):
        mask = torch.ones((1, 4), dtype=torch.bool)
        with pytest.raises(ValueError):
            PaddedBatch(mask=mask, labels=torch.tensor([0]),
                        ids=torch.zeros((1, 4), dtype=torch.long))


class TestTrainClassifier:
    def _toy(self, n_per_class=24, width=10):
        vocab = atoms_vocab(["a", "b", "c", "d"])
        rows, tasks = [], []
        rng = np.random.Generator(np.random.PCG64(3))
        for i in range(n_per_class):
            rows.append(list(rng.choice(["a", "b"], width)))
            tasks.append("t0")
            rows.append(list(rng.choice(["c", "d"], width)))
            tasks.append("t1")
        windows = windows_of(rows, tasks)
        return build_dataset(windows, vocab, "noenc", {"t0": 0, "t1": 1})

    def test_separable_toy_reaches_high_train_f1(self):
        ds = self._toy()
        cfg = ClassifierConfig(num_layers=2, d_model=16, epochs=30, seed=0)
        model, losses = train_classifier(cfg, ds)
        assert len(losses) == 30
        y_pred = predict(model, ds)
        assert macro_f1(np.asarray(ds.labels), y_pred, 2) >= 0.99

    def test_single_class_rejected(self):
        vocab = atoms_vocab(["a"])
        windows = windows_of([["a"], ["a"]], ["t0", "t0"])
        ds = build_dataset(windows, vocab, "noenc", {"t0": 0})
        with pytest.raises(ValueError):
            train_classifier(ClassifierConfig(epochs=1), ds)

    def test_deterministic_given_seed(self):
        ds = self._toy(n_per_class=8)
        cfg = ClassifierConfig(epochs=2, seed=9)
        m1, l1 = train_classifier(cfg, ds)
        m2, l2 = train_classifier(cfg, ds)
        assert l1 == l2
        for a, b in zip(m1.state_dict().values(), m2.state_dict().values()):
            assert torch.equal(a, b)

    def test_label_smoothing_matches_manual_formula(self):
        # smoothed target for C=3, eps=0.1 -> (0.9333.., 0.0333.., 0.0333..)
        logits = torch.tensor([[2.0, -1.0, 0.5]])
        target = torch.tensor([0])
        eps, c = 0.1, 3
        smoothed = torch.full((1, c), eps / c)
        smoothed[0, 0] += 1 - eps
        assert smoothed[0, 0] == pytest.approx(0.93333333)
        manual = -(smoothed * torch.log_softmax(logits, dim=1)).sum()
        via_torch = nn.CrossEntropyLoss(label_smoothing=eps)(logits, target)
        assert float(manual) == pytest.approx(float(via_torch), abs=1e-7)


class TestAutoencoder:
    def test_constant_corpus_reconstructs_perfectly(self):
        rows = [[2] * 8 for _ in range(12)]
        cfg = AutoencoderConfig(epochs=10, seed=0)
        model, losses = train_autoencoder(cfg, rows, alphabet_size=4)
        with torch.no_grad():
            logits = model(torch.tensor(rows[0]).unsqueeze(0))
        assert (logits.argmax(dim=-1) == 2).all()

    def test_loss_non_increasing_within_tolerance(self):
        rng = np.random.Generator(np.random.PCG64(4))
        rows = rng.integers(0, 6, (40, 12)).tolist()
        cfg = AutoencoderConfig(epochs=10, seed=1, dropout=0.0)
        _, losses = train_autoencoder(cfg, rows, alphabet_size=6)
        for before, after in zip(losses, losses[1:]):
            assert after <= before * 1.05

    def test_encoder_output_dim_matches_last_hidden(self):
        for hidden in [(64,), (64, 32), (64, 32, 16)]:
            cfg = AutoencoderConfig(encoder_hidden=hidden, epochs=1, seed=0)
            model = TokenAutoencoder(cfg, alphabet_size=5)
            out = model.encode(torch.zeros((2, 7), dtype=torch.long))
            assert out.shape == (2, 7, hidden[-1])
            assert model.feature_dim == hidden[-1]

    def test_frozen_after_training(self):
        rows = [[1] * 4 for _ in range(4)]
        model, _ = train_autoencoder(AutoencoderConfig(epochs=1, seed=0), rows, 3)
        assert not any(p.requires_grad for p in model.parameters())

    def test_hidden_dims_must_decrease(self):
        with pytest.raises(ValueError):
            AutoencoderConfig(encoder_hidden=(64, 64))


class LinearHead(nn.Module):
    def __init__(self, dim, classes):
        super().__init__()
        self.head = nn.Linear(dim, classes)

    def forward(self, feats, mask):
        return self.head(masked_mean(feats, mask))


class TestGradientCheck:
    def test_linear_head_is_numerically_tight(self):
        torch.manual_seed(0)
        model = LinearHead(6, 3)
        feats = torch.randn(4, 5, 6)
        mask = torch.zeros((4, 5), dtype=torch.bool)
        batch = PaddedBatch(mask=mask, labels=torch.tensor([0, 1, 2, 1]), feats=feats)
        err = gradient_check(model, batch, max_coords_per_tensor=8)
        assert err < 1e-7

    def test_full_stack_within_tolerance(self):
        model = small_model(seed=2)
        batch = small_batch(seed=3)
        err = gradient_check(model, batch, max_coords_per_tensor=3)
        assert err < 1e-4

    def test_zero_input_batch_has_finite_gradients(self):
        model = small_model(seed=4)
        ids = torch.zeros((2, 6), dtype=torch.long)
        mask = torch.zeros((2, 6), dtype=torch.bool)
        batch = PaddedBatch(mask=mask, labels=torch.tensor([0, 1]), ids=ids)
        err = gradient_check(model, batch, max_coords_per_tensor=2)
        assert np.isfinite(err)


class TestConfigValidation:
    def test_dmodel_divisible_by_heads(self):
        with pytest.raises(ValueError):
            ClassifierConfig(d_model=18, heads=4)

    def test_rates_in_unit_interval(self):
        with pytest.raises(ValueError):
            ClassifierConfig(dropout=1.5)

    def test_ff_dim_derived(self):
        assert ClassifierConfig(d_model=16).ff_dim == 64
        assert ClassifierConfig(d_model=64).ff_dim == 256
