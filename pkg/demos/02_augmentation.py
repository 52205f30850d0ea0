"""The four augmentation techniques and the combined trainset builder.

Run: python demos/02_augmentation.py
"""
from silvertrain import (
    AugmentConfig,
    ConfusablesTable,
    anonymize,
    build_augmented_trainset,
    case_variant,
    homoglyphify,
)
from silvertrain.corpus import Dataset, Sample

# 1. Anonymization: regex-identified PII becomes tags, idempotently.
text = "Contact bob@example.com or @conspiracyfan at +1-555-123-4567, see www.proof.example"
print("anonymize:", anonymize(text))

# 2/3. Case variants use full Unicode case mapping.
print("lower:", case_variant("The TRUTH Is Out There ß", "lower"))
print("upper:", case_variant("The TRUTH Is Out There ß", "upper"))

# 4. Homoglyphication swaps Latin letters for Cyrillic/Greek lookalikes from
# the committed table. rate=1.0 replaces every mapped character.
table = ConfusablesTable.default()
swapped = homoglyphify("wake up sheeple", table, rate=1.0, seed=0)
print("homoglyphed:", swapped, "->", [hex(ord(c)) for c in swapped[:4]])
# The table is injective, so its inverse undoes the swap exactly.
print("recovered:", homoglyphify(swapped, table.inverse(), rate=1.0, seed=0))

# The builder copies every train sample per technique, keeps 10% of each
# technique's copies (seeded), concatenates and de-duplicates.
train = Dataset(
    tuple(
        Sample(f"t{i}", f"Original Sample {i} from user{i}@mail.example", "Yes" if i % 2 == 0 else "No")
        for i in range(50)
    ),
    "train",
)
augmented, summary = build_augmented_trainset(train, AugmentConfig(fraction=0.10, seed=1))
print(f"\nbuilder: {summary.originals} originals -> {summary.total_after_dedup} total")
for tech, counts in summary.per_technique.items():
    print(f"  {tech}: {counts.generated} copies, {counts.sampled} kept")
print(f"  dedup removed {summary.removed_by_dedup} redundant copies")
print(f"  class counts: {summary.class_counts}")
