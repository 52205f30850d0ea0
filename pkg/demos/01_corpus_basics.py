"""Loading, validating, splitting and de-duplicating datasets.

Run: python demos/01_corpus_basics.py
"""
import tempfile
from pathlib import Path

from silvertrain import dedup, load_jsonl, stratified_holdout, validate, write_jsonl
from silvertrain.corpus import Dataset, Sample

# A dataset is an ordered, immutable collection of (id, text, label) samples.
# Labels live in {"Yes", "No"}; pool samples may be unlabeled.
samples = [
    Sample("a1", "They are hiding the truth about the towers" + " ." * 80, "Yes"),
    Sample("a2", "The weather was lovely this weekend" + " ." * 80, "No"),
    Sample("a3", "The weather was lovely this weekend" + " ." * 80, "No"),  # duplicate text
    Sample("a4", "short text", "Yes"),  # under the 160-char floor
]
dataset = Dataset(tuple(samples), "train")

# validate() reports, never mutates: length bounds are inclusive [160, 1000]
# Unicode scalar values, duplicates are counted, missing labels flagged.
report = validate(dataset)
print("validation:", report)

# dedup keeps the first copy of byte-identical texts; conflicting labels on
# the same text would remove every copy.
deduped, removed = dedup(dataset)
print(f"dedup: kept {len(deduped)} samples, removed {removed}")

# Datasets round-trip through JSONL ({"id", "text", "label"} per line).
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "demo.jsonl"
    write_jsonl(deduped, path)
    print("reloaded:", [s.id for s in load_jsonl(path, "train")])

# Stratified holdout: seeded uniform sampling without replacement, per class.
big = Dataset(
    tuple(
        Sample(f"s{i}", f"sample text number {i}", "Yes" if i % 2 == 0 else "No")
        for i in range(200)
    ),
    "train",
)
train, holdout = stratified_holdout(big, per_class=20, seed=7)
print(f"split: {len(train)} train / {len(holdout)} holdout", holdout.class_counts())
