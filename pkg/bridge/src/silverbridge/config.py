"""Service configuration."""
from __future__ import annotations

from dataclasses import dataclass

QUANT_4BIT = "4bit"
QUANT_NONE = "none"

BACKEND_TINY = "tiny"
BACKEND_SCRIPTED = "scripted"


@dataclass
class RemoteBackendConfig:
    """Settings for the classifier service.

    ``max_sequence_chars`` caps the characters fed to the model per text
    (longer texts are truncated); it must cover the corpus's 1,000-char
    upper bound. 4-bit quantization needs CUDA support and is rejected at
    startup on CPU-only hosts.
    """

    backend: str = BACKEND_TINY
    base_model_id: str = "tiny-causal-2x64"
    quantization: str = QUANT_NONE
    lora_rank: int = 8
    host: str = "127.0.0.1"
    port: int = 8765
    max_sequence_chars: int = 4000
    seed: int = 0
    script: dict | None = None  # scripted backend: {"default": p, "contains": {substr: p}}

    def __post_init__(self):
        if self.backend not in (BACKEND_TINY, BACKEND_SCRIPTED):
            raise ValueError(f"backend must be 'tiny' or 'scripted', got {self.backend!r}")
        if self.quantization not in (QUANT_4BIT, QUANT_NONE):
            raise ValueError(f"quantization must be '4bit' or 'none', got {self.quantization!r}")
        if self.lora_rank < 1:
            raise ValueError(f"lora_rank must be >= 1, got {self.lora_rank}")
        if self.max_sequence_chars < 1000:
            raise ValueError(
                f"max_sequence_chars must be >= 1000 to cover the corpus bound, "
                f"got {self.max_sequence_chars}"
            )
