"""HTTP client backend satisfying the probabilistic-classifier contract.

Talks JSON over HTTP to a classifier service exposing:

    GET  /health         -> {"status": "ok", ...}
    POST /train          -> {"job": ..., "status": "completed",
                             "best_macro_f1": float, "log": [...]}
    POST /predict_proba  -> {"probs": [p, ...]} for {"texts": [...]}

The client validates the contract on every response (order and length
preservation, probabilities inside [0, 1]) so a misbehaving server fails
loudly instead of corrupting the pipeline.
"""
from __future__ import annotations

import json
import urllib.error
import urllib.request

from .corpus import Dataset
from .model import LogEntry, TrainConfig, TrainingLog


class RemoteBackendError(RuntimeError):
    """Transport failure or contract violation from the remote backend."""


class RemoteClassifier:
    """Probabilistic classifier served by a remote HTTP backend."""

    def __init__(self, base_url: str, timeout: float = 600.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def _request(self, method: str, endpoint: str, payload: dict | None = None) -> dict:
        url = f"{self.base_url}{endpoint}"
        data = None
        headers = {}
        if payload is not None:
            data = json.dumps(payload).encode("utf-8")
            headers["Content-Type"] = "application/json"
        request = urllib.request.Request(url, data=data, headers=headers, method=method)
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                body = response.read().decode("utf-8")
        except urllib.error.HTTPError as exc:
            detail = exc.read().decode("utf-8", errors="replace")
            raise RemoteBackendError(
                f"{method} {url} failed: HTTP {exc.code} {exc.reason}: {detail}"
            ) from exc
        except urllib.error.URLError as exc:
            raise RemoteBackendError(f"{method} {url} unreachable: {exc.reason}") from exc
        try:
            return json.loads(body)
        except json.JSONDecodeError as exc:
            raise RemoteBackendError(f"{method} {url} returned non-JSON body") from exc

    def health(self) -> dict:
        return self._request("GET", "/health")

    def train(self, train: Dataset, valid: Dataset, cfg: TrainConfig) -> TrainingLog:
        payload = {
            "train": _dataset_payload(train),
            "valid": _dataset_payload(valid),
            "config": cfg.__dict__,
        }
        response = self._request("POST", "/train", payload)
        if response.get("status") != "completed":
            raise RemoteBackendError(f"train job did not complete: {response}")
        log = TrainingLog()
        for entry in response.get("log", []):
            log.entries.append(
                LogEntry(
                    step=int(entry["step"]),
                    macro_f1=float(entry["macro_f1"]),
                    lr=float(entry.get("lr", 0.0)),
                )
            )
        if not log.entries:
            log.entries.append(
                LogEntry(step=0, macro_f1=float(response["best_macro_f1"]), lr=0.0)
            )
        log.total_steps = int(response.get("total_steps", log.entries[-1].step))
        return log

    def predict_proba(self, text: str) -> float:
        return float(self.predict_proba_batch([text])[0])

    def predict_proba_batch(self, texts: list[str]) -> list[float]:
        response = self._request("POST", "/predict_proba", {"texts": list(texts)})
        probs = response.get("probs")
        if not isinstance(probs, list) or len(probs) != len(texts):
            raise RemoteBackendError(
                f"/predict_proba must return one probability per text, "
                f"got {0 if probs is None else len(probs)} for {len(texts)} texts"
            )
        out = [float(p) for p in probs]
        for p in out:
            if not 0.0 <= p <= 1.0:
                raise RemoteBackendError(f"/predict_proba returned probability outside [0, 1]: {p}")
        return out


def _dataset_payload(dataset: Dataset) -> list[dict]:
    rows = []
    for s in dataset:
        row = {"id": s.id, "text": s.text}
        if s.label is not None:
            row["label"] = s.label
        rows.append(row)
    return rows
