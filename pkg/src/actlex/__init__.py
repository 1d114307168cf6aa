"""actlex: an action-lexicon toolkit for mouse/keyboard interaction logs.

Pipeline: ingest raw event logs, discretize them into atomic action tokens
(dispersion-based mouse categories, quadrant areas, key down/up tokens),
learn a byte-pair-encoding vocabulary of multi-action activities, analyze
it, and train/evaluate task-recognition models under participant-independent
cross-validation.
"""

__version__ = "0.1.0"

from .bpe import Vocabulary, decode, encode, learn, load_vocab, save_vocab
from .events import (
    DatasetProfile,
    EventKind,
    RawEvent,
    Session,
    Trial,
    normalize_coords,
    parse_events,
    serialize_events,
)
from .tokenizer import (
    EOT,
    IdtConfig,
    Modality,
    WindowSample,
    area_of,
    dispersion,
    idt_label,
    segment_windows,
    tokenize_keyboard,
    tokenize_mouse,
    tokenize_trial,
)

__all__ = [
    "__version__",
    "Vocabulary", "decode", "encode", "learn", "load_vocab", "save_vocab",
    "DatasetProfile", "EventKind", "RawEvent", "Session", "Trial",
    "normalize_coords", "parse_events", "serialize_events",
    "EOT", "IdtConfig", "Modality", "WindowSample", "area_of", "dispersion",
    "idt_label", "segment_windows", "tokenize_keyboard", "tokenize_mouse",
    "tokenize_trial",
]
