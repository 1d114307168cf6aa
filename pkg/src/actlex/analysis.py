"""Vocabulary statistics, frequent activities, and readable rendering."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .bpe import Vocabulary, encode
from .tokenizer import EOT

# Display shorthand for key values in rendered activities.
_KEY_GLYPHS = {"Space": "␣", "Backspace": "⇐"}


@dataclass(frozen=True)
class VocabStats:
    vocab_size: int
    length_min: int
    length_median: int
    length_max: int
    length_histogram: dict[int, int]


@dataclass(frozen=True)
class FrequentActivity:
    activity_id: int
    rendered: str
    count: int


def vocab_stats(vocab: Vocabulary) -> VocabStats:
    """Activity-length distribution over the vocabulary table.

    Lengths are atomic-expansion lengths; the end-of-trial marker is left
    out, so the histogram totals len(vocab) - 1 when the marker is present.
    The median is the lower median for even counts.
    """
    eot = vocab.eot_id
    lengths = sorted(
        len(vocab.expansion(i)) for i in range(len(vocab)) if i != eot
    )
    if not lengths:
        raise ValueError("vocabulary has no entries besides the end marker")
    return VocabStats(
        vocab_size=len(vocab),
        length_min=lengths[0],
        length_median=lengths[(len(lengths) - 1) // 2],
        length_max=lengths[-1],
        length_histogram=dict(Counter(lengths)),
    )


def render_token(token: str) -> str:
    if token.startswith("KeyDown_"):
        key = token[len("KeyDown_"):]
        return _KEY_GLYPHS.get(key, key) + "↓"
    if token.startswith("KeyUp_"):
        key = token[len("KeyUp_"):]
        return _KEY_GLYPHS.get(key, key) + "↑"
    return token


def render_activity(activity_id: int, vocab: Vocabulary) -> str:
    """Readable comma-joined form, e.g. the save shortcut "Ctrl↓,s↓,s↑,Ctrl↑"."""
    return ",".join(render_token(t) for t in vocab.expansion_tokens(activity_id))


def activity_counts(corpus: list[list[int]], vocab: Vocabulary) -> Counter:
    """Occurrences of each activity id in the encoded corpus (<EOT> skipped)."""
    counts: Counter = Counter()
    eot = vocab.eot_id
    for seq in corpus:
        for unit in encode(seq, vocab):
            if unit != eot:
                counts[unit] += 1
    return counts


def top_frequent(
    corpus: list[list[int]],
    vocab: Vocabulary,
    n: int,
    merged_only: bool = False,
) -> list[FrequentActivity]:
    """The n most frequent activities in the encoded corpus.

    Frequency is what the encoder actually emits, not raw substring counts.
    Ties rank the smaller id first. merged_only drops single-atom activities.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    counts = activity_counts(corpus, vocab)
    if merged_only:
        counts = Counter({
            i: c for i, c in counts.items() if i >= len(vocab.atoms)
        })
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [
        FrequentActivity(activity_id=i, rendered=render_activity(i, vocab), count=c)
        for i, c in ranked[:n]
    ]
