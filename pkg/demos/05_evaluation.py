"""Macro-F1 scoring, threshold sweeping, and variant comparison tables.

Run: python demos/05_evaluation.py
"""
from silvertrain import ConfusionMatrix, confusion, macro_f1, threshold_sweep
from silvertrain.corpus import Dataset, Sample
from silvertrain.evaluation import render_variant_table, report

# Macro F1 is the unweighted mean of per-class F1 scores, so it is
# insensitive to class imbalance.
cm = confusion(["Yes", "Yes", "No", "No"], ["Yes", "No", "No", "No"])
print(f"confusion: tp={cm.tp} fp={cm.fp} fn={cm.fn} tn={cm.tn}")
print(f"macro F1: {macro_f1(cm):.4f}")

rep = report(ConfusionMatrix(tp=3, fp=1, fn=1, tn=3))
print(f"per-class F1: {rep.f1}")

# Sweeping the decision threshold on a validation set: probabilities are
# computed once, each grid point gets a full report, smallest threshold
# wins ties.
class Scripted:
    def __init__(self, table):
        self.table = table

    def predict_proba(self, text):
        return self.table[text]


valid = Dataset(
    tuple(
        Sample(f"v{i}", text, label)
        for i, (text, label) in enumerate(
            [("a", "Yes"), ("b", "Yes"), ("c", "No"), ("d", "No"), ("e", "No")]
        )
    ),
    "holdout",
)
model = Scripted({"a": 0.95, "b": 0.75, "c": 0.65, "d": 0.3, "e": 0.2})
best, reports = threshold_sweep(model, valid, [0.5, 0.6, 0.7, 0.8])
print(f"\nbest threshold: {best}")

# Reports render as a ranked variant table with 2-decimal macro F1.
rows = [(f"demo_th{r.threshold:g}", r.macro_f1) for r in reports]
print(render_variant_table(sorted(rows, key=lambda r: -r[1])))
