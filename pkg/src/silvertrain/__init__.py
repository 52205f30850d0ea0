"""Self-training binary text-classification toolkit.

Pipeline pieces: dataset handling (``corpus``), data augmentation
(``augment``), the native hashed n-gram classifier and decision rules
(``model``), confidence-filtered self-training (``selftrain``),
macro-F1 evaluation (``evaluation``), a remote HTTP backend client
(``remote``), and synthetic fixtures (``synthetic``).
"""
from .augment import (
    AugmentConfig,
    AugmentSummary,
    ConfusablesTable,
    anonymize,
    build_augmented_trainset,
    case_variant,
    homoglyphify,
    sample_fraction,
)
from .corpus import (
    NEGATIVE,
    POSITIVE,
    Dataset,
    Sample,
    ValidationReport,
    dedup,
    load_jsonl,
    stratified_holdout,
    validate,
    write_jsonl,
)
from .evaluation import (
    ConfusionMatrix,
    EvalReport,
    confusion,
    evaluate_model,
    evaluate_probs,
    macro_f1,
    threshold_sweep,
    write_predictions,
)
from .model import (
    DecisionRule,
    FeatureVector,
    HashedNgramClassifier,
    NotTrainedError,
    ProbabilisticClassifier,
    TrainConfig,
    TrainingLog,
    decide,
    featurize,
    learning_rate,
)
from .remote import RemoteBackendError, RemoteClassifier
from .selftrain import (
    SelfTrainConfig,
    SelfTrainLog,
    SilverRecord,
    filter_confident,
    merge,
    pseudo_label,
    self_train_loop,
    write_silver_jsonl,
)
from .synthetic import SyntheticCorpus, make_separable_corpus

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig",
    "AugmentSummary",
    "ConfusablesTable",
    "ConfusionMatrix",
    "Dataset",
    "DecisionRule",
    "EvalReport",
    "FeatureVector",
    "HashedNgramClassifier",
    "NEGATIVE",
    "NotTrainedError",
    "POSITIVE",
    "ProbabilisticClassifier",
    "RemoteBackendError",
    "RemoteClassifier",
    "Sample",
    "SelfTrainConfig",
    "SelfTrainLog",
    "SilverRecord",
    "SyntheticCorpus",
    "TrainConfig",
    "TrainingLog",
    "ValidationReport",
    "anonymize",
    "build_augmented_trainset",
    "case_variant",
    "confusion",
    "decide",
    "dedup",
    "evaluate_model",
    "evaluate_probs",
    "featurize",
    "filter_confident",
    "homoglyphify",
    "learning_rate",
    "load_jsonl",
    "macro_f1",
    "make_separable_corpus",
    "merge",
    "pseudo_label",
    "sample_fraction",
    "self_train_loop",
    "stratified_holdout",
    "threshold_sweep",
    "validate",
    "write_jsonl",
    "write_predictions",
    "write_silver_jsonl",
]
