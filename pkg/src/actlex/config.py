"""Dataclass configs for the recognition models and experiments."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .tokenizer import IdtConfig, Modality


@dataclass(frozen=True)
class ClassifierConfig:
    num_layers: int = 2          # encoder stack depth, 2/4/6 in the experiments
    heads: int = 4
    d_model: int = 16            # 16 or 64
    dropout: float = 0.5
    label_smoothing: float = 0.1
    learning_rate: float = 1e-3  # 1e-3 or 1e-4
    adam_betas: tuple[float, float] = (0.9, 0.999)
    weight_decay: float = 0.01
    batch_size: int = 64
    epochs: int = 30
    seed: int = 0

    @property
    def ff_dim(self) -> int:
        return 4 * self.d_model

    def __post_init__(self):
        if self.d_model % self.heads != 0:
            raise ValueError("d_model must be divisible by the head count")
        for name in ("dropout", "label_smoothing", "learning_rate"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0, 1), got {v}")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.num_layers < 1 or self.batch_size < 1:
            raise ValueError("num_layers and batch_size must be >= 1")


@dataclass(frozen=True)
class AutoencoderConfig:
    embed_dim: int = 128
    encoder_hidden: tuple[int, ...] = (64,)  # (64), (64,32) or (64,32,16)
    dropout: float = 0.1
    learning_rate: float = 1e-3
    epochs: int = 10
    batch_size: int = 64
    seed: int = 0

    def __post_init__(self):
        if not self.encoder_hidden:
            raise ValueError("encoder needs at least one hidden layer")
        dims = (self.embed_dim,) + self.encoder_hidden
        if any(b >= a for a, b in zip(dims, dims[1:])):
            raise ValueError("encoder hidden dims must strictly decrease")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


AE_DEPTHS = {1: (64,), 2: (64, 32), 3: (64, 32, 16)}


@dataclass(frozen=True)
class ExperimentConfig:
    """One task-recognition experiment: encoding method plus training setup."""

    modality: Modality = Modality.JOINT
    window_len: int = 150
    method: str = "bpe"          # "noenc" | "ae" | "bpe"
    bpe_k: int = 300
    ae_depth: int = 1
    n_folds: int = 5
    train_fraction: float = 1.0
    seed: int = 0
    idt: IdtConfig = field(default_factory=IdtConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    autoencoder: AutoencoderConfig = field(default_factory=AutoencoderConfig)

    def __post_init__(self):
        if self.method not in ("noenc", "ae", "bpe"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.ae_depth not in AE_DEPTHS:
            raise ValueError("ae_depth must be 1, 2 or 3")
        if not 0.0 < self.train_fraction <= 1.0:
            raise ValueError("train_fraction must be in (0, 1]")
        if self.n_folds < 2:
            raise ValueError("need at least 2 folds")

    @property
    def method_label(self) -> str:
        if self.method == "bpe":
            return f"BPE-{self.bpe_k}"
        if self.method == "ae":
            return f"AE-{self.ae_depth}"
        return "NoEncoding"

    def echo(self) -> dict:
        doc = asdict(self)
        doc["modality"] = self.modality.value
        doc["method_label"] = self.method_label
        return doc
