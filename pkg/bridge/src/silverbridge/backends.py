"""Classifier backends behind the HTTP service.

``TinyCausalLM`` is the desk-scale stand-in for the production path: a
small byte-level causal transformer whose base weights stay frozen while
low-rank adapters on every projection, the embeddings and a last-token
score head are trained. The training regime mirrors the large-scale recipe:
batch size 1 without gradient accumulation, linear warmup over a 0.03 ratio
into cosine decay, validation every 100 steps, a single epoch by default,
and the checkpoint with the best validation macro F1 kept.

``ScriptedClassifier`` returns probabilities from a fixed rule table; it
exists so integration tests can drive the full wire protocol with exactly
known outputs.
"""
from __future__ import annotations

import copy
import math
import random
from dataclasses import dataclass, field

import torch
import torch.nn.functional as F
from torch import nn

POSITIVE = "Yes"
NEGATIVE = "No"

BOS_TOKEN = 256  # prepended so empty texts still have one position
VOCAB_SIZE = 257


class BackendError(Exception):
    """Invalid training payload or unusable configuration."""


class NotTrainedError(BackendError):
    """Inference was requested before any training completed."""


def macro_f1(golds: list[str], preds: list[str]) -> float:
    """Unweighted mean of per-class F1, zero-division convention."""

    def class_f1(positive: str) -> float:
        tp = sum(g == positive and p == positive for g, p in zip(golds, preds))
        fp = sum(g != positive and p == positive for g, p in zip(golds, preds))
        fn = sum(g == positive and p != positive for g, p in zip(golds, preds))
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        return 2 * precision * recall / (precision + recall) if precision + recall else 0.0

    return (class_f1(POSITIVE) + class_f1(NEGATIVE)) / 2.0


def warmup_cosine(step: int, total_steps: int, warmup_ratio: float) -> float:
    """Schedule factor in [0, 1]: linear warmup, cosine decay to zero."""
    warmup_steps = math.ceil(warmup_ratio * total_steps)
    if warmup_steps > 0 and step < warmup_steps:
        return step / warmup_steps
    if total_steps == warmup_steps:
        return 1.0 if step < total_steps else 0.0
    progress = (step - warmup_steps) / (total_steps - warmup_steps)
    return 0.5 * (1.0 + math.cos(math.pi * progress))


@dataclass
class TrainOutcome:
    best_macro_f1: float
    total_steps: int
    selected_step: int
    log: list[dict] = field(default_factory=list)


class LoRALinear(nn.Module):
    """Frozen linear layer with a trainable low-rank bypass."""

    def __init__(self, in_features: int, out_features: int, rank: int):
        super().__init__()
        self.base = nn.Linear(in_features, out_features)
        self.base.weight.requires_grad_(False)
        self.base.bias.requires_grad_(False)
        self.lora_a = nn.Parameter(torch.randn(in_features, rank) * 0.02)
        self.lora_b = nn.Parameter(torch.zeros(rank, out_features))
        self.scale = 1.0 / rank

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.base(x) + (x @ self.lora_a) @ self.lora_b * self.scale


class CausalBlock(nn.Module):
    def __init__(self, dim: int, heads: int, rank: int):
        super().__init__()
        self.heads = heads
        self.ln1 = nn.LayerNorm(dim)
        self.qkv = LoRALinear(dim, 3 * dim, rank)
        self.out = LoRALinear(dim, dim, rank)
        self.ln2 = nn.LayerNorm(dim)
        self.mlp_in = LoRALinear(dim, 4 * dim, rank)
        self.mlp_out = LoRALinear(4 * dim, dim, rank)

    def forward(self, hidden: torch.Tensor) -> torch.Tensor:
        batch, length, dim = hidden.shape
        normed = self.ln1(hidden)
        q, k, v = self.qkv(normed).chunk(3, dim=-1)
        head_dim = dim // self.heads

        def split(t):
            return t.view(batch, length, self.heads, head_dim).transpose(1, 2)

        attended = F.scaled_dot_product_attention(split(q), split(k), split(v), is_causal=True)
        attended = attended.transpose(1, 2).reshape(batch, length, dim)
        hidden = hidden + self.out(attended)
        hidden = hidden + self.mlp_out(F.gelu(self.mlp_in(self.ln2(hidden))))
        return hidden


class TinyCausalNet(nn.Module):
    """Byte-level causal transformer with a last-token score head."""

    def __init__(self, dim: int, heads: int, layers: int, rank: int, max_positions: int):
        super().__init__()
        self.token_embedding = nn.Embedding(VOCAB_SIZE, dim)
        self.position_embedding = nn.Embedding(max_positions + 1, dim)
        self.blocks = nn.ModuleList(CausalBlock(dim, heads, rank) for _ in range(layers))
        self.final_norm = nn.LayerNorm(dim)
        self.score_head = nn.Linear(dim, 1)

    def forward(self, token_ids: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(token_ids.shape[1], device=token_ids.device)
        hidden = self.token_embedding(token_ids) + self.position_embedding(positions)[None]
        for block in self.blocks:
            hidden = block(hidden)
        # Causal stack: the last position has seen the whole sequence.
        return self.score_head(self.final_norm(hidden[:, -1, :])).squeeze(-1)


class TinyCausalLM:
    """Trainable backend: frozen random base, LoRA adapters + embeddings +
    score head trainable.

    In production the base would be a pretrained causal LM finetuned through
    quantized low-rank adapters; at desk scale the same wiring runs over a
    randomly initialized trunk small enough for CPU.
    """

    def __init__(
        self,
        lora_rank: int = 8,
        max_sequence_chars: int = 4000,
        dim: int = 64,
        heads: int = 2,
        layers: int = 2,
        seed: int = 0,
    ):
        self.max_sequence_chars = max_sequence_chars
        torch.manual_seed(seed)
        self.net = TinyCausalNet(dim, heads, layers, lora_rank, max_positions=max_sequence_chars)
        self.trained = False

    def _encode(self, text: str) -> torch.Tensor:
        data = text[: self.max_sequence_chars].encode("utf-8")[: self.max_sequence_chars - 1]
        return torch.tensor([[BOS_TOKEN, *data]], dtype=torch.long)

    def _trainable_parameters(self):
        return [p for p in self.net.parameters() if p.requires_grad]

    def train(self, train_rows: list[dict], valid_rows: list[dict], config: dict) -> TrainOutcome:
        if not train_rows:
            raise BackendError("train set is empty")
        if not valid_rows:
            raise BackendError("validation set is empty")
        for row in train_rows + valid_rows:
            if row.get("label") not in (POSITIVE, NEGATIVE):
                raise BackendError(f"sample {row.get('id')!r} lacks a Yes/No label")
        batch_size = int(config.get("batch_size", 1))
        grad_accum = int(config.get("grad_accum", 1))
        if batch_size != 1 or grad_accum != 1:
            raise BackendError("this backend trains with batch size 1 and no gradient accumulation")
        peak_lr = float(config.get("peak_lr", 1e-3))
        warmup_ratio = float(config.get("warmup_ratio", 0.03))
        eval_every = int(config.get("eval_every_steps", 100))
        epochs = int(config.get("epochs", 1))
        seed = int(config.get("seed", 0))

        torch.manual_seed(seed)
        rng = random.Random(seed)
        encoded = [(self._encode(r["text"]), 1.0 if r["label"] == POSITIVE else 0.0) for r in train_rows]
        valid_encoded = [(self._encode(r["text"]), r["label"]) for r in valid_rows]

        total_steps = epochs * len(encoded)
        optimizer = torch.optim.AdamW(self._trainable_parameters(), lr=peak_lr)
        scheduler = torch.optim.lr_scheduler.LambdaLR(
            optimizer, lambda step: warmup_cosine(step, total_steps, warmup_ratio)
        )

        def validation_f1() -> float:
            self.net.eval()
            with torch.no_grad():
                preds = [
                    POSITIVE if torch.sigmoid(self.net(ids)).item() >= 0.5 else NEGATIVE
                    for ids, _ in valid_encoded
                ]
            self.net.train()
            return macro_f1([label for _, label in valid_encoded], preds)

        outcome = TrainOutcome(best_macro_f1=-1.0, total_steps=total_steps, selected_step=0)
        best_state: dict | None = None
        step = 0
        self.net.train()
        for _epoch in range(epochs):
            order = list(range(len(encoded)))
            rng.shuffle(order)
            for index in order:
                ids, target = encoded[index]
                optimizer.zero_grad()
                logit = self.net(ids)
                loss = F.binary_cross_entropy_with_logits(logit, torch.tensor([target]))
                loss.backward()
                optimizer.step()
                scheduler.step()
                step += 1
                if step % eval_every == 0 or step == total_steps:
                    score = validation_f1()
                    outcome.log.append(
                        {"step": step, "macro_f1": score, "lr": scheduler.get_last_lr()[0]}
                    )
                    if score > outcome.best_macro_f1:
                        outcome.best_macro_f1 = score
                        outcome.selected_step = step
                        best_state = copy.deepcopy(self.net.state_dict())

        if best_state is not None:
            self.net.load_state_dict(best_state)
        self.trained = True
        self.net.eval()
        return outcome

    def predict_proba(self, texts: list[str]) -> list[float]:
        if not self.trained:
            raise NotTrainedError("model not trained")
        with torch.no_grad():
            return [float(torch.sigmoid(self.net(self._encode(t))).item()) for t in texts]


class ScriptedClassifier:
    """Deterministic rule-table backend for contract and integration tests.

    ``script`` is {"default": p, "contains": {substring: p, ...}}; the first
    matching substring (in insertion order) wins. train() scores the script
    against the supplied validation set so the reported metric is real.
    """

    def __init__(self, script: dict | None = None):
        script = script or {}
        self.default = float(script.get("default", 0.5))
        self.contains = {str(k): float(v) for k, v in script.get("contains", {}).items()}
        self.trained = False

    def _proba(self, text: str) -> float:
        for needle, p in self.contains.items():
            if needle in text:
                return p
        return self.default

    def train(self, train_rows: list[dict], valid_rows: list[dict], config: dict) -> TrainOutcome:
        if not valid_rows:
            raise BackendError("validation set is empty")
        golds = [row.get("label") for row in valid_rows]
        if any(g not in (POSITIVE, NEGATIVE) for g in golds):
            raise BackendError("validation rows need Yes/No labels")
        preds = [POSITIVE if self._proba(row["text"]) >= 0.5 else NEGATIVE for row in valid_rows]
        score = macro_f1(golds, preds)
        self.trained = True
        return TrainOutcome(
            best_macro_f1=score,
            total_steps=len(train_rows),
            selected_step=len(train_rows),
            log=[{"step": len(train_rows), "macro_f1": score, "lr": 0.0}],
        )

    def predict_proba(self, texts: list[str]) -> list[float]:
        if not self.trained:
            raise NotTrainedError("model not trained")
        return [self._proba(t) for t in texts]
