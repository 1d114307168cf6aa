import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actlex.events import DatasetProfile, EventKind, RawEvent, Trial
from actlex.tokenizer import (
    EOT,
    PINPOINT,
    REDIRECTION,
    IdtConfig,
    Modality,
    area_of,
    atoms_for,
    dispersion,
    idt_label,
    keyboard_atoms,
    merge_modalities,
    mouse_atoms,
    segment_windows,
    tokenize_keyboard,
    tokenize_mouse,
)


def move(t, x, y):
    return RawEvent(t, EventKind.MOUSE_MOVE, x=x, y=y)


def trial_of(events, sw=1, sh=1):
    # events already normalized; screen 1x1 keeps coordinates untouched
    return Trial("p", "t", 0, tuple(events), sw, sh)


class TestDispersion:
    def test_single_point_is_zero(self):
        assert dispersion([(0.3, 0.7)]) == 0.0

    def test_formula(self):
        pts = [(0.1, 0.2), (0.15, 0.22)]
        assert dispersion(pts) == pytest.approx(0.07)

    def test_corners(self):
        assert dispersion([(0.0, 0.0), (1.0, 1.0)]) == 2.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            dispersion([])


class TestIdt:
    def test_stationary_150ms_all_pinpoint(self):
        events = [move(t, 0.4, 0.4) for t in range(0, 151, 15)]
        assert set(idt_label(events)) == {PINPOINT}

    def test_sweep_within_150ms_all_redirection(self):
        events = [move(t, t / 150, 0.5) for t in range(0, 151, 15)]
        assert set(idt_label(events)) == {REDIRECTION}

    def test_three_phase_fixture(self):
        # 120 ms dwell, one 0.6-L1 jump sample, 120 ms dwell
        events = (
            [move(t, 0.2, 0.2) for t in range(0, 121, 20)]
            + [move(140, 0.5, 0.5)]
            + [move(t, 0.8, 0.8) for t in range(160, 281, 20)]
        )
        labels = idt_label(events)
        assert labels == [PINPOINT] * 7 + [REDIRECTION] + [PINPOINT] * 7

    def test_short_trailing_cluster_is_redirection(self):
        # only 60 ms of data: cannot satisfy the duration threshold
        events = [move(t, 0.5, 0.5) for t in (0, 20, 40, 60)]
        assert idt_label(events) == [REDIRECTION] * 4

    def test_empty_input(self):
        assert idt_label([]) == []

    def test_config_validation(self):
        with pytest.raises(ValueError):
            IdtConfig(duration_threshold_ms=0)
        with pytest.raises(ValueError):
            IdtConfig(dispersion_threshold=-1.0)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(
        st.tuples(st.integers(5, 40), st.floats(0.0, 1.0), st.floats(0.0, 1.0)),
        min_size=1, max_size=60,
    ))
    def test_pinpoint_runs_satisfy_both_thresholds(self, steps):
        cfg = IdtConfig()
        t = 0
        events = []
        for dt, x, y in steps:
            events.append(move(t, x, y))
            t += dt
        labels = idt_label(events, cfg)
        assert len(labels) == len(events)
        assert all(lab in (PINPOINT, REDIRECTION) for lab in labels)
        i = 0
        while i < len(labels):
            if labels[i] == PINPOINT:
                j = i
                while j + 1 < len(labels) and labels[j + 1] == PINPOINT:
                    j += 1
                run = events[i : j + 1]
                assert run[-1].timestamp_ms - run[0].timestamp_ms >= cfg.duration_threshold_ms
                assert dispersion([(e.x, e.y) for e in run]) <= cfg.dispersion_threshold
                i = j + 1
            else:
                i += 1


class TestArea:
    @pytest.mark.parametrize("x,y,expected", [
        (0.2, 0.1, 0), (0.9, 0.1, 1), (0.2, 0.9, 2), (0.9, 0.9, 3),
        (0.5, 0.5, 3), (0.49, 0.5, 2), (0.5, 0.0, 1), (0.0, 0.0, 0),
    ])
    def test_quadrants(self, x, y, expected):
        assert area_of(x, y) == expected

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            area_of(1.2, 0.5)
        with pytest.raises(ValueError):
            area_of(0.5, -0.1)


class TestTokenizeMouse:
    def test_single_click_cannot_reach_duration_threshold(self):
        # one sample spans 0 ms, so the duration gate makes it a redirection
        trial = trial_of([RawEvent(0, EventKind.MOUSE_CLICK, x=0.1, y=0.1)])
        tokens = tokenize_mouse(trial, DatasetProfile.CLICK_ONLY)
        assert tokens == ["Click_Redirection_Area0", EOT]

    def test_dwelling_click_is_pinpoint(self):
        events = [move(t, 0.1, 0.1) for t in range(0, 121, 20)]
        events.append(RawEvent(140, EventKind.MOUSE_CLICK, x=0.1, y=0.1))
        tokens = tokenize_mouse(trial_of(events), DatasetProfile.CLICK_ONLY)
        assert tokens[-2] == "Click_Pinpoint_Area0"

    def test_empty_trial(self):
        assert tokenize_mouse(trial_of([]), DatasetProfile.CLICK_ONLY) == [EOT]

    def test_profile_kind_mismatch(self):
        trial = trial_of([RawEvent(0, EventKind.MOUSE_DOWN, x=0.1, y=0.1)])
        with pytest.raises(ValueError):
            tokenize_mouse(trial, DatasetProfile.CLICK_ONLY)

    def test_alphabet_sizes(self):
        assert len(mouse_atoms(DatasetProfile.CLICK_ONLY)) == 16
        assert len(mouse_atoms(DatasetProfile.PRESS_RELEASE)) == 24

    def test_order_preserved_and_counts_match(self):
        events = [move(t, 0.3, 0.3) for t in range(0, 201, 20)]
        tokens = tokenize_mouse(trial_of(events), DatasetProfile.PRESS_RELEASE)
        assert len(tokens) == len(events) + 1
        assert tokens[-1] == EOT


class TestTokenizeKeyboard:
    def test_down_up_pair(self):
        trial = trial_of([
            RawEvent(0, EventKind.KEY_DOWN, key_value="a"),
            RawEvent(50, EventKind.KEY_UP, key_value="a"),
        ])
        assert tokenize_keyboard(trial) == ["KeyDown_a", "KeyUp_a", EOT]

    def test_alphabet_scales_with_distinct_keys(self):
        keys_91 = [f"k{i}" for i in range(91)]
        assert len(keyboard_atoms(keys_91)) == 182
        assert len(keyboard_atoms(["a", "b", "c"])) == 6

    def test_initial_vocab_includes_eot(self):
        atoms = atoms_for(Modality.KEYBOARD, DatasetProfile.CLICK_ONLY,
                          keys=[f"k{i}" for i in range(91)])
        assert len(atoms) == 183
        assert atoms[0] == EOT


class TestMergeModalities:
    def test_keyboard_only_passthrough(self):
        trial = trial_of([
            RawEvent(0, EventKind.KEY_DOWN, key_value="a"),
            RawEvent(10, EventKind.KEY_UP, key_value="a"),
        ])
        kb = tokenize_keyboard(trial)
        merged = merge_modalities(tokenize_mouse(trial, DatasetProfile.CLICK_ONLY), kb, trial)
        assert merged == kb

    def test_timestamp_interleaving(self):
        trial = trial_of([
            RawEvent(3, EventKind.KEY_DOWN, key_value="a"),
            RawEvent(5, EventKind.MOUSE_MOVE, x=0.2, y=0.2),
        ])
        merged = merge_modalities(
            tokenize_mouse(trial, DatasetProfile.CLICK_ONLY),
            tokenize_keyboard(trial), trial,
        )
        assert merged[0] == "KeyDown_a"
        assert merged[1].startswith("Move_")

    def test_tie_puts_mouse_first(self):
        trial = trial_of([
            RawEvent(5, EventKind.KEY_DOWN, key_value="a"),
            RawEvent(5, EventKind.MOUSE_MOVE, x=0.2, y=0.2),
        ])
        merged = merge_modalities(
            tokenize_mouse(trial, DatasetProfile.CLICK_ONLY),
            tokenize_keyboard(trial), trial,
        )
        assert merged[0].startswith("Move_")
        assert merged[1] == "KeyDown_a"
        assert merged[-1] == EOT and merged.count(EOT) == 1

    def test_mismatched_lengths_rejected(self):
        trial = trial_of([RawEvent(0, EventKind.KEY_DOWN, key_value="a")])
        with pytest.raises(RuntimeError):
            merge_modalities([EOT], ["KeyDown_a", "KeyDown_b", EOT], trial)


class TestSegmentWindows:
    def _tokens(self, n):
        return [f"KeyDown_{i}" for i in range(n)] + [EOT]

    def test_drop_remainder(self):
        ws = segment_windows(self._tokens(250), 100, "p", "t", Modality.KEYBOARD)
        assert len(ws) == 2
        assert all(len(w.tokens) == 100 for w in ws)

    def test_exact_fit(self):
        assert len(segment_windows(self._tokens(100), 100, "p", "t", Modality.KEYBOARD)) == 1

    def test_below_one_window(self):
        assert segment_windows(self._tokens(99), 100, "p", "t", Modality.KEYBOARD) == []

    def test_invalid_length(self):
        with pytest.raises(ValueError):
            segment_windows(self._tokens(10), 0, "p", "t", Modality.KEYBOARD)

    def test_windows_never_cross_trial_boundaries(self):
        tokens = self._tokens(12) + self._tokens(25)
        ws = segment_windows(tokens, 10, "p", "t", Modality.KEYBOARD)
        assert len(ws) == 3  # 1 from the first trial, 2 from the second
        assert all(EOT not in w.tokens for w in ws)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(0, 40), min_size=1, max_size=5),
           st.integers(1, 12))
    def test_concatenation_is_per_trial_prefix(self, trial_lens, window_len):
        tokens = []
        for n in trial_lens:
            tokens += [f"KeyDown_k{i}" for i in range(n)] + [EOT]
        ws = segment_windows(tokens, window_len, "p", "t", Modality.KEYBOARD)
        got = iter(ws)
        for n in trial_lens:
            trial_tokens = [f"KeyDown_k{i}" for i in range(n)]
            expect_windows = n // window_len
            chunk = []
            for _ in range(expect_windows):
                w = next(got)
                assert len(w.tokens) == window_len
                chunk += list(w.tokens)
            assert chunk == trial_tokens[: expect_windows * window_len]
        assert next(got, None) is None
