"""The self-training loop: teacher, confident pseudo-labels, merge, retrain.

Run: python demos/04_self_training.py
"""
from silvertrain import (
    DecisionRule,
    HashedNgramClassifier,
    SelfTrainConfig,
    TrainConfig,
    evaluate_model,
    make_separable_corpus,
    self_train_loop,
    stratified_holdout,
)

corpus = make_separable_corpus(n_labeled=800, n_pool=2000, noise_fraction=0.05, seed=11)
train, holdout = stratified_holdout(corpus.labeled, per_class=100, seed=11)
print(f"gold train {len(train)}, holdout {len(holdout)}, unlabeled pool {len(corpus.pool)}")

# Only predictions with p >= 0.99 (positive) or p <= 0.01 (negative) become
# silver labels; everything in between stays unlabeled.
model, log = self_train_loop(
    labeled=train,
    valid=holdout,
    pool=corpus.pool,
    tcfg=TrainConfig(seed=11),
    scfg=SelfTrainConfig(pos_threshold=0.99, neg_threshold=0.01, rounds=1),
    backend_factory=HashedNgramClassifier,
)

print(f"teacher best validation macro F1: {log.teacher_log.best_macro_f1:.4f}")
for r in log.rounds:
    print(
        f"round {r.round}: {r.silver_positive} Yes + {r.silver_negative} No silver "
        f"from {r.pool_offered} pool samples; train {r.train_before} -> {r.train_after_merge}"
    )

# The generator kept the pool's true labels hidden, so we can audit the
# silver labels exactly.
correct = sum(1 for r in log.silver if r.assigned == corpus.hidden_pool_labels[r.id])
print(f"silver accuracy vs hidden truth: {correct}/{len(log.silver)}")

final = evaluate_model(model, holdout, DecisionRule())
print(f"final holdout macro F1: {final.macro_f1:.4f}")
