"""Command-line entry: build the app from flags and serve it with uvicorn.

Bind or model-construction failures exit nonzero with a message.
"""
from __future__ import annotations

import argparse
import json
import sys

import uvicorn

from .backends import BackendError
from .config import RemoteBackendConfig
from .service import create_app


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="silverbridge", description="HTTP classifier backend")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8765)
    parser.add_argument("--backend", choices=["tiny", "scripted"], default="tiny")
    parser.add_argument("--base-model", default="tiny-causal-2x64")
    parser.add_argument("--quantization", choices=["4bit", "none"], default="none")
    parser.add_argument("--lora-rank", type=int, default=8)
    parser.add_argument("--max-chars", type=int, default=4000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--script-json",
        help='scripted backend rules, e.g. {"default": 0.5, "contains": {"foo": 0.99}}',
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        script = json.loads(args.script_json) if args.script_json else None
        cfg = RemoteBackendConfig(
            backend=args.backend,
            base_model_id=args.base_model,
            quantization=args.quantization,
            lora_rank=args.lora_rank,
            host=args.host,
            port=args.port,
            max_sequence_chars=args.max_chars,
            seed=args.seed,
            script=script,
        )
        app = create_app(cfg)
    except (BackendError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")
    except (OSError, SystemExit) as exc:
        print(f"error: server failed to start: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
