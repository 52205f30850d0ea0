"""HTTP classifier backend: desk-scale parameter-efficient finetuning of a
small causal LM with a score head, plus a scripted backend for tests."""
from .backends import BackendError, NotTrainedError, ScriptedClassifier, TinyCausalLM
from .config import RemoteBackendConfig
from .service import create_app

__version__ = "0.1.0"

__all__ = [
    "BackendError",
    "NotTrainedError",
    "RemoteBackendConfig",
    "ScriptedClassifier",
    "TinyCausalLM",
    "create_app",
]
