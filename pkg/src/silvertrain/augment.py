"""Data-augmentation techniques for labeled text: anonymization, case
variants, homoglyph substitution, per-technique subsampling, and the
combined augmented-trainset builder.

Each technique copies every training sample, transforms the copy's text,
keeps the label, and tags the copy's provenance. Only a configurable
fraction (default 10%) of each technique's copies is merged back, and the
final set is de-duplicated so transforms that left a text unchanged do not
add redundant copies.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .corpus import (
    PROV_ANONYMIZED,
    PROV_HOMOGLYPHED,
    PROV_LOWERCASED,
    PROV_UPPERCASED,
    Dataset,
    Sample,
    dedup,
)

TECH_ANONYMIZE = "anonymize"
TECH_LOWERCASE = "lowercase"
TECH_UPPERCASE = "uppercase"
TECH_HOMOGLYPH = "homoglyph"
# Fixed application order; also the concatenation order in the builder.
TECHNIQUES = (TECH_ANONYMIZE, TECH_LOWERCASE, TECH_UPPERCASE, TECH_HOMOGLYPH)

_TECH_PROVENANCE = {
    TECH_ANONYMIZE: PROV_ANONYMIZED,
    TECH_LOWERCASE: PROV_LOWERCASED,
    TECH_UPPERCASE: PROV_UPPERCASED,
    TECH_HOMOGLYPH: PROV_HOMOGLYPHED,
}
_TECH_ID_SUFFIX = {
    TECH_ANONYMIZE: "#anon",
    TECH_LOWERCASE: "#lower",
    TECH_UPPERCASE: "#upper",
    TECH_HOMOGLYPH: "#homo",
}

# Anonymization patterns. These are deliberately simple, documented rules:
#   URL    scheme:// or www. followed by non-space characters
#   EMAIL  RFC-5322-lite local@domain.tld
#   USER   @ followed by word characters at a token boundary
#   PHONE  optional +, 7-15 digits with optional space/dash/dot/parentheses
# Replacement order is URL, EMAIL, USER, PHONE so that addresses inside a
# URL query string are scrubbed as part of the URL and the user-mention
# pattern never fires on the local part of an email.
URL_RE = re.compile(r"\b(?:https?://|www\.)\S+")
EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}")
USER_RE = re.compile(r"(?<![\w@])@\w+")
# Candidate digit groups; a candidate is only replaced when its total digit
# count is 7-15 (filters out years, section numbers, short codes). Up to two
# separator characters may sit between digit groups ("(02) 1234 5678").
PHONE_CANDIDATE_RE = re.compile(r"(?<![\w.+-])\+?\(?\d(?:[\s().-]{0,2}\d)*(?![\w-])")

URL_TAG = "[URL]"
EMAIL_TAG = "[EMAIL]"
USER_TAG = "[USER]"
PHONE_TAG = "[PHONE]"


def anonymize(text: str) -> str:
    """Replace URLs, emails, user mentions and phone numbers with tags.

    Total and idempotent: text without matches passes through unchanged,
    and the replacement tags themselves never match any pattern.
    """

    def phone_repl(match: re.Match) -> str:
        digits = sum(ch.isdigit() for ch in match.group(0))
        return PHONE_TAG if 7 <= digits <= 15 else match.group(0)

    text = URL_RE.sub(URL_TAG, text)
    text = EMAIL_RE.sub(EMAIL_TAG, text)
    text = USER_RE.sub(USER_TAG, text)
    text = PHONE_CANDIDATE_RE.sub(phone_repl, text)
    return text


def case_variant(text: str, mode: str) -> str:
    """Full Unicode case mapping; mode is "lower" or "upper".

    Length may change (e.g. "ß".upper() == "SS"). Tags like "[URL]" are
    case-mapped like any other text.
    """
    if mode == "lower":
        return text.lower()
    if mode == "upper":
        return text.upper()
    raise ValueError(f"mode must be 'lower' or 'upper', got {mode!r}")


class ConfusablesTable:
    """Injective map from characters to visually similar characters of a
    different script, with an exact inverse.

    The shipped default maps Latin letters to Cyrillic/Greek lookalikes
    drawn from the Unicode confusables data; see data/confusables.tsv.
    """

    def __init__(self, mapping: dict[str, str]):
        for src, tgt in mapping.items():
            if len(src) != 1 or len(tgt) != 1:
                raise ValueError(f"confusables entries must be single characters: {src!r} -> {tgt!r}")
            if src == tgt:
                raise ValueError(f"confusable target must differ from source: {src!r}")
        targets = list(mapping.values())
        if len(set(targets)) != len(targets):
            raise ValueError("confusables mapping must be injective")
        self.mapping = dict(mapping)

    def __len__(self) -> int:
        return len(self.mapping)

    def __contains__(self, char: str) -> bool:
        return char in self.mapping

    def inverse(self) -> "ConfusablesTable":
        return ConfusablesTable({tgt: src for src, tgt in self.mapping.items()})

    def apply_all(self, text: str) -> str:
        """Replace every mapped character (rate-1.0 shortcut, no RNG)."""
        return "".join(self.mapping.get(ch, ch) for ch in text)

    @classmethod
    def from_tsv(cls, path: str | Path) -> "ConfusablesTable":
        """Load a table from a TSV file (source, target, comment), UTF-8.

        Lines starting with '#' and blank lines are skipped.
        """
        mapping: dict[str, str] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ValueError(f"bad confusables line: {line!r}")
            mapping[parts[0]] = parts[1]
        return cls(mapping)

    @classmethod
    def default(cls) -> "ConfusablesTable":
        """The table shipped with the package."""
        ref = resources.files("silvertrain").joinpath("data/confusables.tsv")
        with resources.as_file(ref) as path:
            return cls.from_tsv(path)


def homoglyphify(text: str, table: ConfusablesTable, rate: float = 1.0, seed: int = 0) -> str:
    """Swap mapped characters for their confusables, each independently
    with probability ``rate`` using a seeded generator.

    Character count is always preserved. rate=1.0 replaces every mapped
    character and is deterministic regardless of seed; rate=0.0 is the
    identity. Draws are consumed only for characters in the table's domain,
    so unmapped text never advances the generator.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must be in [0, 1], got {rate}")
    if rate >= 1.0:
        return table.apply_all(text)
    if rate <= 0.0:
        return text
    rng = np.random.default_rng(seed)
    out = []
    for ch in text:
        if ch in table and rng.random() < rate:
            out.append(table.mapping[ch])
        else:
            out.append(ch)
    return "".join(out)


def sample_fraction(dataset: Dataset, fraction: float, seed: int) -> Dataset:
    """Keep floor(fraction * |dataset|) samples, drawn uniformly without
    replacement with a seeded generator, preserving dataset order.

    The product is rounded to 9 decimals before flooring so that binary
    float noise (0.29 * 100 == 28.999...) does not drop a sample.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    n = len(dataset)
    k = math.floor(round(fraction * n, 9))
    if k >= n:
        return dataset
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(n, size=k, replace=False))
    samples = tuple(dataset.samples[i] for i in chosen)
    return Dataset(samples, dataset.split)


@dataclass
class AugmentConfig:
    """Settings for the augmented-trainset builder."""

    fraction: float = 0.10
    seed: int = 0
    techniques: tuple[str, ...] = TECHNIQUES
    homoglyph_rate: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"fraction must be in [0, 1], got {self.fraction}")
        if not 0.0 <= self.homoglyph_rate <= 1.0:
            raise ValueError(f"homoglyph_rate must be in [0, 1], got {self.homoglyph_rate}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        unknown = set(self.techniques) - set(TECHNIQUES)
        if unknown:
            raise ValueError(f"unknown techniques: {sorted(unknown)}")
        # Normalize to the fixed application order.
        self.techniques = tuple(t for t in TECHNIQUES if t in self.techniques)


@dataclass
class TechniqueCounts:
    generated: int
    sampled: int


@dataclass
class AugmentSummary:
    """Per-technique counts plus the dedup outcome of one builder run."""

    per_technique: dict[str, TechniqueCounts] = field(default_factory=dict)
    originals: int = 0
    total_before_dedup: int = 0
    removed_by_dedup: int = 0
    total_after_dedup: int = 0
    class_counts: dict[str, int] = field(default_factory=dict)


def _derived_seed(seed: int, *key: int) -> int:
    """Stable per-technique / per-sample seed derivation."""
    return int(np.random.SeedSequence((seed, *key)).generate_state(1)[0])


def build_augmented_trainset(
    train: Dataset, config: AugmentConfig, table: ConfusablesTable | None = None
) -> tuple[Dataset, AugmentSummary]:
    """Copy, transform, subsample and merge augmented samples into the train set.

    For each enabled technique every train sample is copied, transformed,
    given a derived id (original id + technique suffix) and the original
    label, then subsampled to ``config.fraction`` with a per-technique
    derived seed. Output order is originals first, then techniques in the
    fixed order anonymize, lowercase, uppercase, homoglyph. Byte-duplicate
    texts are removed by corpus.dedup (so transforms that changed nothing
    do not inflate the set).
    """
    for s in train:
        if s.label is None:
            raise ValueError(f"build_augmented_trainset needs a fully labeled train set; {s.id!r} has no label")
    if table is None and TECH_HOMOGLYPH in config.techniques:
        table = ConfusablesTable.default()

    summary = AugmentSummary(originals=len(train))
    parts: list[Sample] = list(train.samples)
    for tech_index, tech in enumerate(TECHNIQUES):
        if tech not in config.techniques:
            continue
        tech_seed = _derived_seed(config.seed, tech_index)
        copies = []
        for sample_index, s in enumerate(train):
            if tech == TECH_ANONYMIZE:
                new_text = anonymize(s.text)
            elif tech == TECH_LOWERCASE:
                new_text = case_variant(s.text, "lower")
            elif tech == TECH_UPPERCASE:
                new_text = case_variant(s.text, "upper")
            else:
                sample_seed = _derived_seed(config.seed, tech_index, sample_index)
                new_text = homoglyphify(s.text, table, config.homoglyph_rate, sample_seed)
            copies.append(
                Sample(
                    id=s.id + _TECH_ID_SUFFIX[tech],
                    text=new_text,
                    label=s.label,
                    provenance=_TECH_PROVENANCE[tech],
                )
            )
        sampled = sample_fraction(Dataset(tuple(copies), train.split), config.fraction, tech_seed)
        summary.per_technique[tech] = TechniqueCounts(generated=len(copies), sampled=len(sampled))
        parts.extend(sampled.samples)

    summary.total_before_dedup = len(parts)
    combined = Dataset(tuple(parts), train.split)
    result, removed = dedup(combined)
    summary.removed_by_dedup = removed
    summary.total_after_dedup = len(result)
    summary.class_counts = result.class_counts()
    return result, summary
