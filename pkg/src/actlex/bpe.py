"""Byte pair encoding over action-token sequences.

Starting from the atomic alphabet (plus the end-of-trial marker), each
iteration merges the most frequent adjacent pair of units into a new
activity and rewrites the corpus. Ties break deterministically on the
lowest (left_id, right_id); pairs involving the end-of-trial marker are
never counted, and learning stops early once the best pair occurs fewer
than twice.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field

from .tokenizer import EOT

VOCAB_FORMAT_VERSION = 1


class UnknownTokenError(KeyError):
    def __init__(self, token):
        super().__init__(token)
        self.token = token

    def __str__(self):
        return f"token {self.token!r} is not in the vocabulary atoms"


class VocabFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    """Atoms plus an ordered merge list; ids above len(atoms) are activities."""

    atoms: tuple[str, ...]
    merges: tuple[tuple[int, int], ...]
    k_requested: int

    # id -> expansion as atom-id tuples, built once
    _expansions: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _atom_ids: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("duplicate atoms")
        expansions: list[tuple[int, ...]] = [(i,) for i in range(len(self.atoms))]
        for n, (left, right) in enumerate(self.merges):
            new_id = len(self.atoms) + n
            if not (0 <= left < new_id and 0 <= right < new_id):
                raise ValueError(f"merge {n} references undefined id")
            expansions.append(expansions[left] + expansions[right])
        eot = self.atoms.index(EOT) if EOT in self.atoms else None
        for n, exp in enumerate(expansions[len(self.atoms):]):
            if eot is not None and eot in exp:
                raise ValueError(f"merge {n} expansion contains {EOT}")
        object.__setattr__(self, "_expansions", tuple(expansions))
        object.__setattr__(self, "_atom_ids", {a: i for i, a in enumerate(self.atoms)})

    def __len__(self) -> int:
        return len(self.atoms) + len(self.merges)

    @property
    def eot_id(self) -> int | None:
        return self._atom_ids.get(EOT)

    def atom_id(self, token: str) -> int:
        try:
            return self._atom_ids[token]
        except KeyError:
            raise UnknownTokenError(token) from None

    def ids_for(self, tokens) -> list[int]:
        return [self.atom_id(t) for t in tokens]

    def expansion(self, unit_id: int) -> tuple[int, ...]:
        if not 0 <= unit_id < len(self):
            raise ValueError(f"id {unit_id} outside vocabulary of size {len(self)}")
        return self._expansions[unit_id]

    def expansion_tokens(self, unit_id: int) -> list[str]:
        return [self.atoms[i] for i in self.expansion(unit_id)]


def learn(corpus: list[list[int]], k: int, atoms: list[str]) -> Vocabulary:
    """Learn up to k merges from id sequences over the given atom alphabet.

    Pair frequencies are counted over adjacent positions within each
    sequence (never across sequence boundaries) and maintained
    incrementally: rewriting an occurrence only touches its neighborhood.
    A lazy max-heap keyed on (-count, left, right) yields the most frequent
    pair with the lowest-id tie-break in O(log) amortized time.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not corpus or all(len(s) == 0 for s in corpus):
        raise ValueError("empty corpus")
    atom_count = len(atoms)
    for seq in corpus:
        for t in seq:
            if not 0 <= t < atom_count:
                raise ValueError(f"corpus id {t} outside atom alphabet")
    eot = atoms.index(EOT) if EOT in atoms else -1

    seqs = [list(s) for s in corpus]
    counts: dict[tuple[int, int], int] = {}
    where: dict[tuple[int, int], set[int]] = {}
    heap: list[tuple[int, int, int]] = []

    def bump(pair: tuple[int, int], delta: int, seq_idx: int):
        if eot in pair:
            return
        new = counts.get(pair, 0) + delta
        if new:
            counts[pair] = new
        else:
            counts.pop(pair, None)
        if delta > 0:
            where.setdefault(pair, set()).add(seq_idx)
            heapq.heappush(heap, (-new, pair[0], pair[1]))

    for si, seq in enumerate(seqs):
        for a, b in zip(seq, seq[1:]):
            bump((a, b), 1, si)

    merges: list[tuple[int, int]] = []
    for _ in range(k):
        best = None
        while heap:
            neg, left, right = heap[0]
            cur = counts.get((left, right), 0)
            if cur < 2:
                heapq.heappop(heap)
                continue
            if -neg != cur:
                heapq.heapreplace(heap, (-cur, left, right))
                continue
            best = (left, right)
            break
        if best is None:
            break
        new_id = atom_count + len(merges)
        merges.append(best)
        left, right = best
        for si in sorted(where.get(best, ())):
            seq = seqs[si]
            out: list[int] = []
            i = 0
            n = len(seq)
            while i < n:
                if i + 1 < n and seq[i] == left and seq[i + 1] == right:
                    if out:
                        bump((out[-1], left), -1, si)
                        bump((out[-1], new_id), +1, si)
                    if i + 2 < n:
                        bump((right, seq[i + 2]), -1, si)
                        bump((new_id, seq[i + 2]), +1, si)
                    bump((left, right), -1, si)
                    out.append(new_id)
                    i += 2
                else:
                    out.append(seq[i])
                    i += 1
            seqs[si] = out

    return Vocabulary(atoms=tuple(atoms), merges=tuple(merges), k_requested=k)


def encode(ids: list[int], vocab: Vocabulary) -> list[int]:
    """Apply the vocabulary's merges, in learned order, to an atom-id sequence.

    Each merge is one left-to-right non-overlapping replacement pass. Because
    a merge can only create pairs involving later ids, skipping merges whose
    pair is absent and always applying the earliest applicable one is exactly
    the sequential semantics.
    """
    atom_count = len(vocab.atoms)
    for t in ids:
        if not 0 <= t < atom_count:
            raise UnknownTokenError(t)
    if not vocab.merges:
        return list(ids)
    rank = {pair: n for n, pair in enumerate(vocab.merges)}
    seq = list(ids)
    while len(seq) > 1:
        best_rank = None
        for pair in zip(seq, seq[1:]):
            r = rank.get(pair)
            if r is not None and (best_rank is None or r < best_rank):
                best_rank = r
        if best_rank is None:
            break
        left, right = vocab.merges[best_rank]
        new_id = atom_count + best_rank
        out: list[int] = []
        i = 0
        while i < len(seq):
            if i + 1 < len(seq) and seq[i] == left and seq[i + 1] == right:
                out.append(new_id)
                i += 2
            else:
                out.append(seq[i])
                i += 1
        seq = out
    return seq


def decode(activity_ids: list[int], vocab: Vocabulary) -> list[int]:
    """Expand activity ids back to the underlying atom-id sequence."""
    out: list[int] = []
    for a in activity_ids:
        out.extend(vocab.expansion(a))
    return out


def encode_corpus(corpus: list[list[int]], vocab: Vocabulary) -> list[list[int]]:
    return [encode(seq, vocab) for seq in corpus]


def save_vocab(vocab: Vocabulary) -> bytes:
    doc = {
        "version": VOCAB_FORMAT_VERSION,
        "atoms": list(vocab.atoms),
        "merges": [list(m) for m in vocab.merges],
        "k_requested": vocab.k_requested,
    }
    return (json.dumps(doc, ensure_ascii=False, indent=1) + "\n").encode("utf-8")


def load_vocab(data: bytes) -> Vocabulary:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise VocabFormatError(f"unreadable vocabulary file: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != VOCAB_FORMAT_VERSION:
        raise VocabFormatError(
            f"unsupported vocabulary format version {doc.get('version')!r}"
            if isinstance(doc, dict) else "vocabulary file is not an object"
        )
    try:
        atoms = tuple(str(a) for a in doc["atoms"])
        merges = tuple((int(l), int(r)) for l, r in doc["merges"])
        k_requested = int(doc["k_requested"])
        return Vocabulary(atoms=atoms, merges=merges, k_requested=k_requested)
    except (KeyError, TypeError, ValueError) as exc:
        raise VocabFormatError(f"malformed vocabulary file: {exc}") from exc
