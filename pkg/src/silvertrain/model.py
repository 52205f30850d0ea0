"""Probabilistic-classifier contract and the native desk-scale backend.

The native backend is a logistic-regression model over hashed character
n-grams. The training loop keeps the schedule shape used for the large-scale
runs (linear warmup over a 0.03 ratio, cosine decay to zero, batch size 1
with no gradient accumulation, validation every 100 steps, one epoch,
checkpoint picked by best validation macro F1) but with a learning rate
sized for a linear model.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, runtime_checkable

import numpy as np

from .corpus import NEGATIVE, POSITIVE, Dataset
from .ioutil import atomic_write

DEFAULT_DIM = 2**18
DEFAULT_N_RANGE = (1, 4)

# FNV-1a 64-bit, applied to the sequence of Unicode scalar values of each
# n-gram (one code point per round instead of one byte). Fixed constants
# keep featurization identical across runs and platforms.
_FNV_OFFSET = np.uint64(14695981039346656037)
_FNV_PRIME = np.uint64(1099511628211)


class NotTrainedError(RuntimeError):
    """predict_proba was called on a classifier without trained state."""


@runtime_checkable
class ProbabilisticClassifier(Protocol):
    """Contract every backend satisfies: train, then map text to the
    positive-class probability in [0, 1], deterministically for a fixed
    trained state."""

    def train(self, train: Dataset, valid: Dataset, cfg: "TrainConfig") -> "TrainingLog":
        ...

    def predict_proba(self, text: str) -> float:
        ...


@dataclass(frozen=True)
class FeatureVector:
    """Sparse L2-normalized bag of hashed character n-grams."""

    indices: np.ndarray  # int64, sorted, unique, in [0, dim)
    values: np.ndarray  # float64

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def to_dict(self) -> dict[int, float]:
        return {int(i): float(v) for i, v in zip(self.indices, self.values)}


def featurize(text: str, n_range: tuple[int, int] = DEFAULT_N_RANGE, dim: int = DEFAULT_DIM) -> FeatureVector:
    """Hash all character n-grams of the text into a sparse count vector.

    n-grams are taken over the Unicode scalar-value sequence for every n in
    the inclusive range, hashed with FNV-1a-64 into [0, dim), accumulated as
    counts and L2-normalized. The empty text maps to the zero vector.
    """
    lo, hi = n_range
    if lo < 1 or hi < lo:
        raise ValueError(f"bad n_range {n_range}")
    if not text:
        return FeatureVector(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))
    codes = np.frombuffer(text.encode("utf-32-le"), dtype=np.uint32).astype(np.uint64)
    length = len(codes)
    all_indices = []
    for n in range(lo, hi + 1):
        if length < n:
            break
        h = np.full(length - n + 1, _FNV_OFFSET, dtype=np.uint64)
        for j in range(n):
            h = (h ^ codes[j : length - n + 1 + j]) * _FNV_PRIME
        all_indices.append(h % np.uint64(dim))
    indices, counts = np.unique(np.concatenate(all_indices), return_counts=True)
    values = counts.astype(np.float64)
    values /= np.linalg.norm(values)
    return FeatureVector(indices.astype(np.int64), values)


@dataclass
class TrainConfig:
    """Native-trainer settings. The schedule is always linear warmup
    followed by cosine decay to zero; only its knobs are configurable."""

    peak_lr: float = 0.1
    warmup_ratio: float = 0.03
    batch_size: int = 1
    grad_accum: int = 1
    eval_every_steps: int = 100
    epochs: int = 1
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0

    def __post_init__(self):
        if self.peak_lr <= 0:
            raise ValueError(f"peak_lr must be > 0, got {self.peak_lr}")
        if not 0.0 <= self.warmup_ratio < 1.0:
            raise ValueError(f"warmup_ratio must be in [0, 1), got {self.warmup_ratio}")
        if self.eval_every_steps < 1:
            raise ValueError(f"eval_every_steps must be >= 1, got {self.eval_every_steps}")
        if self.batch_size < 1 or self.grad_accum < 1 or self.epochs < 1:
            raise ValueError("batch_size, grad_accum and epochs must be >= 1")

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()


def learning_rate(step: int, total_steps: int, peak_lr: float, warmup_ratio: float) -> float:
    """Schedule value at an optimizer step in [0, total_steps].

    Linear warmup from 0 to peak over ceil(warmup_ratio * total_steps)
    steps, then cosine decay from peak to exactly 0 at the final step.
    """
    if total_steps < 1:
        raise ValueError(f"total_steps must be >= 1, got {total_steps}")
    warmup_steps = math.ceil(warmup_ratio * total_steps)
    if warmup_steps > 0 and step < warmup_steps:
        return peak_lr * step / warmup_steps
    if total_steps == warmup_steps:
        return peak_lr if step < total_steps else 0.0
    progress = (step - warmup_steps) / (total_steps - warmup_steps)
    return peak_lr * 0.5 * (1.0 + math.cos(math.pi * progress))


@dataclass
class LogEntry:
    step: int
    macro_f1: float
    lr: float


@dataclass
class TrainingLog:
    """Validation-metric trajectory of one training run."""

    entries: list[LogEntry] = field(default_factory=list)
    total_steps: int = 0

    @property
    def selected_step(self) -> int:
        """Step of the chosen checkpoint: argmax of validation macro F1,
        earliest step on ties."""
        return select_checkpoint(self.entries)

    @property
    def best_macro_f1(self) -> float:
        return max(e.macro_f1 for e in self.entries)


def select_checkpoint(entries: list[LogEntry]) -> int:
    """Best-metric step with earliest-step tie-break, from the log alone."""
    if not entries:
        raise ValueError("no evaluation entries to select from")
    best = entries[0]
    for e in entries[1:]:
        if e.macro_f1 > best.macro_f1:
            best = e
    return best.step


@dataclass(frozen=True)
class DecisionRule:
    """Positive-class probability cutoff; Yes iff p >= threshold."""

    threshold: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must be strictly inside (0, 1), got {self.threshold}")


def decide(p: float, rule: DecisionRule = DecisionRule()) -> str:
    """Map a positive-class probability to a Yes/No label (inclusive cutoff)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must be in [0, 1], got {p}")
    return POSITIVE if p >= rule.threshold else NEGATIVE


def sigmoid(z):
    """Numerically stable logistic function for scalars or arrays."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    if out.ndim == 0:
        return float(out)
    return out


def logistic_loss_and_grad(
    weights: np.ndarray, bias: float, fv: FeatureVector, y: float
) -> tuple[float, np.ndarray, float]:
    """Binary cross-entropy of one sample and its analytic gradient.

    Returns (loss, gradient on fv.indices, bias gradient). The loss is
    computed via log1p(exp) in its stable form so large |z| cannot overflow.
    """
    z = float(weights[fv.indices] @ fv.values) + bias if fv.nnz else bias
    loss = float(np.logaddexp(0.0, z) - y * z)
    residual = sigmoid(z) - y
    return loss, residual * fv.values, float(residual)


class HashedNgramClassifier:
    """Logistic regression over hashed character n-grams (native backend).

    Training uses an adaptive-moment (AdamW-style) optimizer with the
    warmup-then-cosine schedule, evaluates validation macro F1 every
    ``eval_every_steps`` optimizer steps plus once at the final step, and
    restores the parameter snapshot with the best validation macro F1
    (earliest step on ties). Bit-reproducible for fixed datasets, config
    and seed on one platform.
    """

    FORMAT_VERSION = 1

    def __init__(self, dim: int = DEFAULT_DIM, n_range: tuple[int, int] = DEFAULT_N_RANGE):
        self.dim = dim
        self.n_range = tuple(n_range)
        self.weights: np.ndarray | None = None
        self.bias: float = 0.0
        self.config_hash: str = ""

    @property
    def is_trained(self) -> bool:
        return self.weights is not None

    def featurize(self, text: str) -> FeatureVector:
        return featurize(text, self.n_range, self.dim)

    def train(self, train: Dataset, valid: Dataset, cfg: TrainConfig) -> TrainingLog:
        if len(train) == 0:
            raise ValueError("train set is empty")
        if len(valid) == 0:
            raise ValueError("validation set is empty")
        xs, ys = self._featurize_labeled(train)
        valid_xs, valid_ys = self._featurize_labeled(valid)

        n = len(xs)
        micro_per_epoch = math.ceil(n / cfg.batch_size)
        steps_per_epoch = math.ceil(micro_per_epoch / cfg.grad_accum)
        total_steps = cfg.epochs * steps_per_epoch

        w = np.zeros(self.dim, dtype=np.float64)
        b = 0.0
        m = np.zeros(self.dim, dtype=np.float64)
        v = np.zeros(self.dim, dtype=np.float64)
        mb = 0.0
        vb = 0.0
        rng = np.random.default_rng(cfg.seed)

        log = TrainingLog(total_steps=total_steps)
        best_f1 = -1.0
        best_snapshot: tuple[np.ndarray, float] | None = None
        step = 0

        def evaluate() -> float:
            # Imported here: evaluation imports DecisionRule from this module.
            from .evaluation import confusion, macro_f1

            preds = [
                POSITIVE if _raw_proba(w, b, fv) >= 0.5 else NEGATIVE for fv in valid_xs
            ]
            golds = [POSITIVE if y == 1.0 else NEGATIVE for y in valid_ys]
            return macro_f1(confusion(golds, preds))

        for _epoch in range(cfg.epochs):
            order = rng.permutation(n)
            micro = 0
            while micro < micro_per_epoch:
                # One optimizer step: grad_accum micro-batches of batch_size.
                grad_idx: list[np.ndarray] = []
                grad_val: list[np.ndarray] = []
                grad_b = 0.0
                n_examples = 0
                for _ in range(cfg.grad_accum):
                    if micro >= micro_per_epoch:
                        break
                    batch = order[micro * cfg.batch_size : (micro + 1) * cfg.batch_size]
                    micro += 1
                    for i in batch:
                        fv = xs[i]
                        _, gw, gb = logistic_loss_and_grad(w, b, fv, ys[i])
                        grad_idx.append(fv.indices)
                        grad_val.append(gw)
                        grad_b += gb
                        n_examples += 1
                lr = learning_rate(step, total_steps, cfg.peak_lr, cfg.warmup_ratio)
                step += 1
                self._adamw_step(
                    w, m, v, grad_idx, grad_val, n_examples, lr, step, cfg
                )
                gb_mean = grad_b / n_examples
                mb = cfg.beta1 * mb + (1 - cfg.beta1) * gb_mean
                vb = cfg.beta2 * vb + (1 - cfg.beta2) * gb_mean * gb_mean
                mb_hat = mb / (1 - cfg.beta1**step)
                vb_hat = vb / (1 - cfg.beta2**step)
                b -= lr * mb_hat / (math.sqrt(vb_hat) + cfg.eps)

                if step % cfg.eval_every_steps == 0 or step == total_steps:
                    f1 = evaluate()
                    lr_now = learning_rate(step, total_steps, cfg.peak_lr, cfg.warmup_ratio)
                    log.entries.append(LogEntry(step=step, macro_f1=f1, lr=lr_now))
                    if f1 > best_f1:
                        best_f1 = f1
                        best_snapshot = (w.copy(), b)

        assert best_snapshot is not None
        self.weights, self.bias = best_snapshot
        self.config_hash = cfg.content_hash()
        return log

    @staticmethod
    def _adamw_step(w, m, v, grad_idx, grad_val, n_examples, lr, step, cfg):
        if len(grad_idx) == 1:
            idx, val = grad_idx[0], grad_val[0]
        else:
            idx = np.concatenate(grad_idx)
            val = np.concatenate(grad_val)
        # Combine duplicate indices before squaring: the moment updates see
        # the mean gradient of the step, not per-sample contributions.
        uidx, inverse = np.unique(idx, return_inverse=True)
        gmean = np.zeros(len(uidx), dtype=np.float64)
        np.add.at(gmean, inverse, val)
        gmean /= n_examples
        m *= cfg.beta1
        v *= cfg.beta2
        m[uidx] += (1 - cfg.beta1) * gmean
        v[uidx] += (1 - cfg.beta2) * gmean**2
        denom = np.sqrt(v / (1 - cfg.beta2**step)) + cfg.eps
        update = (lr / (1 - cfg.beta1**step)) * (m / denom)
        if cfg.weight_decay:
            update += lr * cfg.weight_decay * w
        w -= update

    def _featurize_labeled(self, dataset: Dataset) -> tuple[list[FeatureVector], np.ndarray]:
        xs = []
        ys = np.empty(len(dataset), dtype=np.float64)
        for i, s in enumerate(dataset):
            if s.label is None:
                raise ValueError(f"sample {s.id!r} is unlabeled; training needs labels")
            xs.append(self.featurize(s.text))
            ys[i] = 1.0 if s.label == POSITIVE else 0.0
        return xs, ys

    def predict_proba(self, text: str) -> float:
        if not self.is_trained:
            raise NotTrainedError("classifier has no trained state")
        return _raw_proba(self.weights, self.bias, self.featurize(text))

    def predict_proba_batch(self, texts: list[str]) -> np.ndarray:
        if not self.is_trained:
            raise NotTrainedError("classifier has no trained state")
        return np.array([_raw_proba(self.weights, self.bias, self.featurize(t)) for t in texts])

    def save(self, path: str | Path) -> None:
        """Persist the trained state as a versioned npz artifact.

        Weights are stored sparse (nonzero indices and values). The write
        goes to a temporary file in the target directory and is renamed
        into place so a crash cannot leave a truncated artifact.
        """
        if not self.is_trained:
            raise NotTrainedError("cannot save an untrained classifier")
        path = Path(path)
        nz = np.flatnonzero(self.weights)
        meta = json.dumps(
            {
                "format_version": self.FORMAT_VERSION,
                "dim": self.dim,
                "n_range": list(self.n_range),
                "config_hash": self.config_hash,
            }
        )
        with atomic_write(path, "wb") as fh:
            np.savez(
                fh,
                meta=np.array(meta),
                indices=nz.astype(np.int64),
                values=self.weights[nz],
                bias=np.float64(self.bias),
            )

    @classmethod
    def load(cls, path: str | Path) -> "HashedNgramClassifier":
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            if meta.get("format_version") != cls.FORMAT_VERSION:
                raise ValueError(
                    f"unsupported model format version {meta.get('format_version')!r}"
                )
            clf = cls(dim=meta["dim"], n_range=tuple(meta["n_range"]))
            weights = np.zeros(clf.dim, dtype=np.float64)
            weights[data["indices"]] = data["values"]
            clf.weights = weights
            clf.bias = float(data["bias"])
            clf.config_hash = meta.get("config_hash", "")
        return clf


def _raw_proba(weights: np.ndarray, bias: float, fv: FeatureVector) -> float:
    z = float(weights[fv.indices] @ fv.values) + bias if fv.nnz else bias
    return sigmoid(z)
