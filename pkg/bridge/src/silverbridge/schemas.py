"""Wire schemas for the classifier service (JSON over HTTP)."""
from __future__ import annotations

from pydantic import BaseModel, Field


class Row(BaseModel):
    id: str
    text: str
    label: str | None = None


class TrainRequest(BaseModel):
    train: list[Row]
    valid: list[Row]
    config: dict = Field(default_factory=dict)


class TrainResponse(BaseModel):
    job: str
    status: str
    best_macro_f1: float
    total_steps: int
    selected_step: int
    log: list[dict]


class PredictRequest(BaseModel):
    texts: list[str]


class PredictResponse(BaseModel):
    probs: list[float]
