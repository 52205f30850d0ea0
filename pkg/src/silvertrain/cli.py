"""Command-line pipeline composing the toolkit's stages.

Subcommands: augment, split, train, selftrain, predict, eval, sweep.
Values come from an optional INI config file plus flag overrides (flags
win). Logs go to stderr; summaries go to stdout, as JSON when --json is
given. Every output file is written atomically, so a failing command never
leaves truncated artifacts, and the exit code is 0 only when all outputs
were written.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import corpus
from .augment import build_augmented_trainset
from .config import (
    BACKEND_NATIVE,
    BACKEND_REMOTE,
    ConfigError,
    PipelineConfig,
    load_pipeline_config,
)
from .corpus import CorpusError, load_jsonl, stratified_holdout, write_jsonl
from .evaluation import (
    confusion,
    evaluate_model,
    predict_probs,
    read_predictions,
    render_variant_table,
    report,
    threshold_sweep,
    write_predictions,
)
from .ioutil import atomic_write
from .model import (
    DecisionRule,
    HashedNgramClassifier,
    NotTrainedError,
    TrainingLog,
    decide,
)
from .remote import RemoteBackendError, RemoteClassifier
from .selftrain import SelfTrainLog, self_train_loop, write_silver_jsonl

logger = logging.getLogger(__name__)


def variant_name(base: str, threshold: float) -> str:
    """Report label for a variant; non-default thresholds get a suffix
    (threshold 0.7 -> "_th0.7")."""
    return base if threshold == 0.5 else f"{base}_th{threshold:g}"


def _emit(args, human: str, payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, ensure_ascii=False))
    else:
        print(human)


def _load_config(args, overrides: dict[str, dict] | None = None) -> PipelineConfig:
    return load_pipeline_config(getattr(args, "config", None), overrides)


def _backend_overrides(args) -> dict[str, dict]:
    values: dict[str, dict] = {"backend": {}}
    if getattr(args, "backend", None):
        values["backend"]["type"] = args.backend
    if getattr(args, "backend_url", None):
        values["backend"]["url"] = args.backend_url
    return values


def _make_untrained_backend(cfg: PipelineConfig):
    if cfg.backend_type == BACKEND_REMOTE:
        return RemoteClassifier(cfg.backend_url)
    return HashedNgramClassifier()


def _load_trained_backend(cfg: PipelineConfig, model_path: str | None):
    if cfg.backend_type == BACKEND_REMOTE:
        if model_path:
            raise ConfigError("the remote backend keeps trained state server-side; drop --model")
        return RemoteClassifier(cfg.backend_url)
    if not model_path:
        raise ConfigError("the native backend needs --model pointing at a saved artifact")
    return HashedNgramClassifier.load(model_path)


def _training_log_dict(log: TrainingLog) -> dict:
    return {
        "total_steps": log.total_steps,
        "selected_step": log.selected_step,
        "best_macro_f1": log.best_macro_f1,
        "entries": [
            {"step": e.step, "macro_f1": e.macro_f1, "lr": e.lr} for e in log.entries
        ],
    }


def _selftrain_log_dict(log: SelfTrainLog) -> dict:
    return {
        "teacher": _training_log_dict(log.teacher_log) if log.teacher_log else None,
        "rounds": [
            {
                "round": r.round,
                "pool_offered": r.pool_offered,
                "silver_positive": r.silver_positive,
                "silver_negative": r.silver_negative,
                "train_before": r.train_before,
                "train_after_merge": r.train_after_merge,
                "dedup_removed": r.dedup_removed,
                "best_val_macro_f1": r.best_val_macro_f1,
            }
            for r in log.rounds
        ],
        "silver_total": len(log.silver),
    }


def cmd_augment(args) -> int:
    overrides = {
        "augment": {
            "fraction": args.fraction,
            "seed": args.seed,
            "homoglyph_rate": args.homoglyph_rate,
            "techniques": tuple(args.techniques.split(",")) if args.techniques else None,
        }
    }
    cfg = _load_config(args, overrides)
    train = load_jsonl(args.input, corpus.SPLIT_TRAIN)
    result, summary = build_augmented_trainset(train, cfg.augment)
    write_jsonl(result, args.output)
    lines = [f"augmented train set written to {args.output}"]
    for tech, counts in summary.per_technique.items():
        lines.append(f"  {tech}: generated {counts.generated}, sampled {counts.sampled}")
    lines.append(
        f"  originals {summary.originals}, before dedup {summary.total_before_dedup}, "
        f"removed {summary.removed_by_dedup}, final {summary.total_after_dedup}"
    )
    counts = summary.class_counts
    lines.append(f"  class counts: {counts[corpus.POSITIVE]} Yes / {counts[corpus.NEGATIVE]} No")
    _emit(
        args,
        "\n".join(lines),
        {
            "output": str(args.output),
            "per_technique": {
                t: {"generated": c.generated, "sampled": c.sampled}
                for t, c in summary.per_technique.items()
            },
            "originals": summary.originals,
            "total_before_dedup": summary.total_before_dedup,
            "removed_by_dedup": summary.removed_by_dedup,
            "total_after_dedup": summary.total_after_dedup,
            "class_counts": counts,
        },
    )
    return 0


def cmd_split(args) -> int:
    dataset = load_jsonl(args.input, corpus.SPLIT_TRAIN)
    train, holdout = stratified_holdout(dataset, args.per_class, args.seed)
    write_jsonl(train, args.out_train)
    write_jsonl(holdout, args.out_holdout)
    _emit(
        args,
        f"split {len(dataset)} samples into {len(train)} train / {len(holdout)} holdout",
        {
            "input": str(args.input),
            "train": {"path": str(args.out_train), "size": len(train)},
            "holdout": {"path": str(args.out_holdout), "size": len(holdout)},
        },
    )
    return 0


def _train_overrides(args) -> dict[str, dict]:
    return {
        "train": {
            "peak_lr": args.peak_lr,
            "warmup_ratio": args.warmup_ratio,
            "batch_size": args.batch_size,
            "grad_accum": args.grad_accum,
            "eval_every_steps": args.eval_every_steps,
            "epochs": args.epochs,
            "seed": args.seed,
        },
        **_backend_overrides(args),
    }


def cmd_train(args) -> int:
    cfg = _load_config(args, _train_overrides(args))
    train = load_jsonl(args.train, corpus.SPLIT_TRAIN)
    valid = load_jsonl(args.valid, corpus.SPLIT_HOLDOUT)
    backend = _make_untrained_backend(cfg)
    log = backend.train(train, valid, cfg.train)
    if cfg.backend_type == BACKEND_NATIVE:
        if not args.out_model:
            raise ConfigError("--out-model is required for the native backend")
        backend.save(args.out_model)
    elif args.out_model:
        raise ConfigError("the remote backend keeps trained state server-side; drop --out-model")
    if args.out_log:
        with atomic_write(args.out_log) as fh:
            json.dump(_training_log_dict(log), fh, indent=2)
    _emit(
        args,
        f"trained {log.total_steps} steps; best validation macro F1 "
        f"{log.best_macro_f1:.4f} at step {log.selected_step}",
        {"model": args.out_model and str(args.out_model), **_training_log_dict(log)},
    )
    return 0


def cmd_selftrain(args) -> int:
    overrides = {
        "selftrain": {
            "pos_threshold": args.pos_threshold,
            "neg_threshold": args.neg_threshold,
            "rounds": args.rounds,
        },
        **_train_overrides(args),
    }
    cfg = _load_config(args, overrides)
    labeled = load_jsonl(args.train, corpus.SPLIT_TRAIN)
    valid = load_jsonl(args.valid, corpus.SPLIT_HOLDOUT)
    pool = load_jsonl(args.pool, corpus.SPLIT_POOL)

    if cfg.backend_type == BACKEND_REMOTE:
        if args.out_model:
            raise ConfigError("the remote backend keeps trained state server-side; drop --out-model")
        factory = lambda: RemoteClassifier(cfg.backend_url)  # noqa: E731
    else:
        if not args.out_model:
            raise ConfigError("--out-model is required for the native backend")
        factory = HashedNgramClassifier

    model, log = self_train_loop(labeled, valid, pool, cfg.train, cfg.selftrain, factory)
    if cfg.backend_type == BACKEND_NATIVE:
        model.save(args.out_model)
    write_silver_jsonl(log.silver, args.out_silver)
    if args.out_log:
        with atomic_write(args.out_log) as fh:
            json.dump(_selftrain_log_dict(log), fh, indent=2)
    lines = [
        f"teacher best validation macro F1 {log.teacher_log.best_macro_f1:.4f}",
    ]
    for r in log.rounds:
        lines.append(
            f"round {r.round}: {r.silver_positive}+{r.silver_negative} silver labels "
            f"from {r.pool_offered} pool samples; train {r.train_before} -> "
            f"{r.train_after_merge} (dedup removed {r.dedup_removed}); "
            f"best validation macro F1 {r.best_val_macro_f1:.4f}"
        )
    _emit(args, "\n".join(lines), _selftrain_log_dict(log))
    return 0


def cmd_predict(args) -> int:
    cfg = _load_config(args, _backend_overrides(args))
    threshold = args.threshold if args.threshold is not None else cfg.decision.threshold
    rule = DecisionRule(threshold)
    model = _load_trained_backend(cfg, args.model)
    dataset = load_jsonl(args.input, corpus.SPLIT_POOL)
    probs = predict_probs(model, dataset.texts())
    labels = [decide(float(p), rule) for p in probs]
    write_predictions(dataset.ids(), labels, args.output)
    positive = sum(1 for label in labels if label == corpus.POSITIVE)
    _emit(
        args,
        f"wrote {len(labels)} predictions to {args.output} "
        f"({positive} Yes / {len(labels) - positive} No, threshold {threshold:g})",
        {
            "output": str(args.output),
            "total": len(labels),
            "positive": positive,
            "negative": len(labels) - positive,
            "threshold": threshold,
        },
    )
    return 0


def cmd_eval(args) -> int:
    cfg = _load_config(args, _backend_overrides(args))
    golds_ds = load_jsonl(args.input, corpus.SPLIT_HOLDOUT)
    threshold = args.threshold if args.threshold is not None else cfg.decision.threshold
    if args.preds:
        pred_map = dict(read_predictions(args.preds))
        missing = [s.id for s in golds_ds if s.id not in pred_map]
        if missing:
            raise CorpusError(
                f"predictions file {args.preds} is missing ids: {missing[:10]}"
                + (" ..." if len(missing) > 10 else "")
            )
        golds = [s.label for s in golds_ds]
        preds = [pred_map[s.id] for s in golds_ds]
        rep = report(confusion(golds, preds), threshold=None)
        name = args.name
    else:
        model = _load_trained_backend(cfg, args.model)
        rep = evaluate_model(model, golds_ds, DecisionRule(threshold))
        name = variant_name(args.name, threshold)
    table = render_variant_table([(name, rep.macro_f1)])
    detail = (
        f"tp={rep.matrix.tp} fp={rep.matrix.fp} fn={rep.matrix.fn} tn={rep.matrix.tn}\n"
        f"macro F1 {rep.macro_f1:.4f}"
    )
    _emit(args, f"{table}\n{detail}", {"variant": name, **rep.to_dict()})
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args, _backend_overrides(args))
    model = _load_trained_backend(cfg, args.model)
    valid = load_jsonl(args.valid, corpus.SPLIT_HOLDOUT)
    grid = [float(part) for part in args.grid.split(",") if part.strip()]
    best, reports = threshold_sweep(model, valid, grid)
    rows = [
        (variant_name(args.name, rep.threshold), rep.macro_f1) for rep in reports
    ]
    table = render_variant_table(rows)
    _emit(
        args,
        f"{table}\nbest threshold: {best:g}",
        {
            "best_threshold": best,
            "reports": [{"variant": name, **rep.to_dict()} for (name, _), rep in zip(rows, reports)],
        },
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="silvertrain",
        description="Self-training binary text-classification pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="INI config file; flags override its values")
        p.add_argument("--json", action="store_true", help="machine-readable summary on stdout")

    def add_backend(p):
        p.add_argument("--backend", choices=[BACKEND_NATIVE, BACKEND_REMOTE])
        p.add_argument("--backend-url", help="base URL of the remote backend")

    def add_train_flags(p):
        p.add_argument("--peak-lr", type=float)
        p.add_argument("--warmup-ratio", type=float)
        p.add_argument("--batch-size", type=int)
        p.add_argument("--grad-accum", type=int)
        p.add_argument("--eval-every-steps", type=int)
        p.add_argument("--epochs", type=int)
        p.add_argument("--seed", type=int)

    p = sub.add_parser("augment", help="build the augmented train set")
    add_common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--fraction", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--techniques", help="comma-separated subset of anonymize,lowercase,uppercase,homoglyph")
    p.add_argument("--homoglyph-rate", type=float)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("split", help="split off a stratified holdout")
    add_common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-holdout", required=True)
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train a classifier")
    add_common(p)
    add_backend(p)
    add_train_flags(p)
    p.add_argument("--train", required=True)
    p.add_argument("--valid", required=True)
    p.add_argument("--out-model")
    p.add_argument("--out-log")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("selftrain", help="run the self-training loop")
    add_common(p)
    add_backend(p)
    add_train_flags(p)
    p.add_argument("--train", required=True)
    p.add_argument("--valid", required=True)
    p.add_argument("--pool", required=True)
    p.add_argument("--out-model")
    p.add_argument("--out-silver", required=True)
    p.add_argument("--out-log")
    p.add_argument("--pos-threshold", type=float)
    p.add_argument("--neg-threshold", type=float)
    p.add_argument("--rounds", type=int)
    p.set_defaults(func=cmd_selftrain)

    p = sub.add_parser("predict", help="write Yes/No predictions for a dataset")
    add_common(p)
    add_backend(p)
    p.add_argument("--model")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="score a model or a predictions file against golds")
    add_common(p)
    add_backend(p)
    p.add_argument("--model")
    p.add_argument("--preds", help="score this predictions file instead of running a model")
    p.add_argument("--in", dest="input", required=True, help="labeled golds JSONL")
    p.add_argument("--threshold", type=float)
    p.add_argument("--name", default="model", help="variant label in the report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="sweep decision thresholds on a labeled set")
    add_common(p)
    add_backend(p)
    p.add_argument("--model")
    p.add_argument("--valid", required=True)
    p.add_argument("--grid", default="0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--name", default="model")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        ConfigError,
        CorpusError,
        NotTrainedError,
        RemoteBackendError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
