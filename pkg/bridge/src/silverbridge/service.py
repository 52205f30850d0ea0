"""FastAPI application exposing the classifier over HTTP.

Endpoints:
    GET  /health         liveness + model identity + trained flag
    POST /train          exclusive training job (409 busy while one runs)
    POST /predict_proba  order/length-preserving batch probabilities

/predict_proba requests run concurrently with each other; while a training
job holds the model they are rejected as busy rather than served from
half-updated weights. Each text is truncated to the configured
max_sequence_chars before encoding; there is no other request size limit.
"""
from __future__ import annotations

import threading

import torch
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .backends import BackendError, NotTrainedError, ScriptedClassifier, TinyCausalLM
from .config import BACKEND_SCRIPTED, QUANT_4BIT, RemoteBackendConfig
from .schemas import PredictRequest, PredictResponse, TrainRequest, TrainResponse


def build_backend(cfg: RemoteBackendConfig):
    if cfg.backend == BACKEND_SCRIPTED:
        return ScriptedClassifier(cfg.script)
    if cfg.quantization == QUANT_4BIT and not torch.cuda.is_available():
        raise BackendError(
            "4-bit quantization needs a CUDA device; use quantization='none' on CPU hosts"
        )
    return TinyCausalLM(
        lora_rank=cfg.lora_rank,
        max_sequence_chars=cfg.max_sequence_chars,
        seed=cfg.seed,
    )


def create_app(cfg: RemoteBackendConfig) -> FastAPI:
    backend = build_backend(cfg)
    app = FastAPI(title="silverbridge", version="0.1.0")
    app.state.backend = backend
    app.state.config = cfg
    app.state.train_lock = threading.Lock()
    app.state.job_counter = 0

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "model": cfg.base_model_id if cfg.backend != BACKEND_SCRIPTED else "scripted",
            "trained": backend.trained,
        }

    @app.post("/train", response_model=TrainResponse)
    def train(request: TrainRequest):
        if not app.state.train_lock.acquire(blocking=False):
            return JSONResponse(status_code=409, content={"error": "busy", "status": "busy"})
        try:
            app.state.job_counter += 1
            job_id = f"job-{app.state.job_counter}"
            outcome = backend.train(
                [row.model_dump() for row in request.train],
                [row.model_dump() for row in request.valid],
                request.config,
            )
        except BackendError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc), "status": "failed"})
        finally:
            app.state.train_lock.release()
        return TrainResponse(
            job=job_id,
            status="completed",
            best_macro_f1=outcome.best_macro_f1,
            total_steps=outcome.total_steps,
            selected_step=outcome.selected_step,
            log=outcome.log,
        )

    @app.post("/predict_proba", response_model=PredictResponse)
    def predict_proba(request: PredictRequest):
        if app.state.train_lock.locked():
            return JSONResponse(
                status_code=409, content={"error": "busy: training in progress"}
            )
        try:
            probs = backend.predict_proba(request.texts)
        except NotTrainedError as exc:
            return JSONResponse(status_code=409, content={"error": str(exc)})
        return PredictResponse(probs=probs)

    return app
